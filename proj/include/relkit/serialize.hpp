#pragma once

#include "relkit/clustering.hpp"
#include "relkit/data_prep.hpp"
#include "relkit/metrics.hpp"
#include "relkit/reward.hpp"
#include "relkit/rollout.hpp"

#include "json.hpp"

#include <stdexcept>

namespace relkit {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

/// A record did not match its JSONL schema.
class SchemaError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// {"answer", "confidence", "format_reward"}; absent fields are null.
Json rollout_json(const Rollout& r);

/// Flat object: the five counts, then the seven metrics. Undefined metrics
/// serialize as "n/a"; defined ones are multiplied by `scale`.
Json metric_report_json(const MetricReport<double>& report, double scale = 1.0);

Json reward_vector_json(const RewardVector& v);
Json cluster_json(const ClusterAssignment& a);

QaRecord qa_record_from_json(const Json& j);
Json qa_record_json(const QaRecord& r);

} // namespace relkit
