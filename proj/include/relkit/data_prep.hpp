#pragma once

#include "relkit/entailment.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace relkit {

struct QaRecord
{
    std::string id;
    std::string question;
    std::string gold_answer;
    std::optional<std::vector<std::string>> samples;  // first sample is the designated answer
    std::optional<double> entropy;                    // nats
    std::optional<std::string> original_gold;         // set by rewrite_unknown_labels
};

inline constexpr double kDefaultEntropyThreshold = 1.0;
inline constexpr const char* kDefaultAbstentionText = "I don't know.";

/// Two-way split of the input. `skipped` counts records that could not be
/// classified (no samples to work from); they appear in neither side.
struct Split
{
    std::vector<QaRecord> first;
    std::vector<QaRecord> second;
    std::size_t skipped = 0;
};

/// Semantic entropy of the record's samples, clustered under its question.
/// Uses the stored entropy when present.
std::optional<double> record_entropy(const QaRecord& rec, const EntailmentOracle& oracle);

/// first = kept (entropy >= threshold), second = dropped. Kept and dropped
/// records carry their computed entropy.
Split filter_low_entropy(std::span<const QaRecord> records, double threshold, const EntailmentOracle& oracle);

/// first = known (designated answer matches gold), second = unknown.
Split partition_by_correctness(std::span<const QaRecord> records, const AnswerMatcher& matcher);

/// Uncertainty-based split: first = known (entropy < threshold), second = unknown.
Split partition_by_entropy(std::span<const QaRecord> records, double threshold, const EntailmentOracle& oracle);

/// Replaces each gold answer by the abstention text, keeping the first
/// original in `original_gold`. Idempotent.
std::vector<QaRecord> rewrite_unknown_labels(std::span<const QaRecord> unknown,
                                             const std::string& abstention_text = kDefaultAbstentionText);

} // namespace relkit
