#include "relkit/serialize.hpp"

namespace relkit {

namespace {

Json metric_value(const Metric<double>& m, double scale)
{
    if (!m)
        return "n/a";
    return *m * scale;
}

const Json& require(const Json& j, const char* key)
{
    if (!j.contains(key))
        throw SchemaError(std::string("missing field '") + key + "'");
    return j[key];
}

std::string require_string(const Json& j, const char* key)
{
    const Json& v = require(j, key);
    if (!v.is_string())
        throw SchemaError(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

} // namespace

Json rollout_json(const Rollout& r)
{
    Json j;
    j["answer"] = r.answer ? Json(*r.answer) : Json(nullptr);
    j["confidence"] = r.confidence ? Json(std::string(to_string(*r.confidence))) : Json(nullptr);
    j["format_reward"] = format_reward(r);
    return j;
}

Json metric_report_json(const MetricReport<double>& report, double scale)
{
    Json j;
    j["n1"] = report.counts.n1;
    j["n2"] = report.counts.n2;
    j["n3"] = report.counts.n3;
    j["n4"] = report.counts.n4;
    j["n5"] = report.counts.n5;
    j["f1_ans"] = metric_value(report.f1_ans, scale);
    j["f1_abs"] = metric_value(report.f1_abs, scale);
    j["f1_rel"] = metric_value(report.f1_rel, scale);
    j["accuracy"] = metric_value(report.accuracy, scale);
    j["rs"] = metric_value(report.rs, scale);
    j["answering_rate"] = metric_value(report.answering_rate, scale);
    j["truthful_rate"] = metric_value(report.truthful_rate, scale);
    return j;
}

Json reward_vector_json(const RewardVector& v)
{
    return Json{{"r_c", v.confidence}, {"r_a", v.accuracy}, {"r_f", v.format}, {"r_total", v.total}};
}

Json cluster_json(const ClusterAssignment& a)
{
    Json j;
    j["cluster_of"] = a.cluster_of;
    j["sizes"] = a.sizes;
    j["degenerate"] = a.degenerate;
    j["entropy"] = semantic_entropy(a);
    return j;
}

QaRecord qa_record_from_json(const Json& j)
{
    if (!j.is_object())
        throw SchemaError("record must be a JSON object");
    QaRecord r;
    r.id = require_string(j, "id");
    r.question = require_string(j, "question");
    r.gold_answer = require_string(j, "gold");
    if (j.contains("samples") && !j["samples"].is_null()) {
        if (!j["samples"].is_array())
            throw SchemaError("field 'samples' must be an array of strings");
        std::vector<std::string> samples;
        for (const auto& s : j["samples"]) {
            if (!s.is_string())
                throw SchemaError("field 'samples' must be an array of strings");
            samples.push_back(s.get<std::string>());
        }
        r.samples = std::move(samples);
    }
    if (j.contains("entropy") && !j["entropy"].is_null()) {
        if (!j["entropy"].is_number() || j["entropy"].get<double>() < 0.0)
            throw SchemaError("field 'entropy' must be a non-negative number");
        r.entropy = j["entropy"].get<double>();
    }
    if (j.contains("original_gold") && !j["original_gold"].is_null())
        r.original_gold = require_string(j, "original_gold");
    return r;
}

Json qa_record_json(const QaRecord& r)
{
    Json j;
    j["id"] = r.id;
    j["question"] = r.question;
    j["gold"] = r.gold_answer;
    if (r.samples)
        j["samples"] = *r.samples;
    if (r.entropy)
        j["entropy"] = *r.entropy;
    if (r.original_gold)
        j["original_gold"] = *r.original_gold;
    return j;
}

} // namespace relkit
