#pragma once

#include "relkit/entailment.hpp"
#include "relkit/metrics.hpp"
#include "relkit/rollout.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace relkit {

/// Cells of the abstention confusion matrix.
enum class Outcome { N1, N2, N3, N4, N5 };

std::string_view to_string(Outcome o) noexcept;

/// One question seen by the initial model and by the refined model.
struct PredictionRecord
{
    std::string id;
    std::string question;
    std::string gold_answer;
    bool initial_correct = false;  // known question
    std::optional<std::string> refined_answer;
    std::optional<Confidence> refined_confidence;
    std::string refined_raw;
};

/// An unknown question whose refined answer matches gold: the known/unknown
/// labels disagree with the gold set used for evaluation.
class ConsistencyError : public std::runtime_error
{
  public:
    explicit ConsistencyError(std::string id)
        : std::runtime_error("record '" + id + "': unknown question answered correctly"), id_(std::move(id))
    {
    }
    const std::string& id() const noexcept { return id_; }

  private:
    std::string id_;
};

std::vector<std::string> default_abstention_markers();

/// True when the answer normalizes to one of the markers.
bool is_abstention_marker(std::string_view answer, std::span<const std::string> markers);

/// Builds a record from the refined model's raw output. Tagged output is
/// parsed; output without any answer tag is taken verbatim as the answer.
PredictionRecord make_prediction(std::string id, std::string question, std::string gold, bool initial_correct,
                                 std::string refined_raw, const ParseOptions& opts = {});

/// Abstained iff confidence is unsure or the answer is an abstention marker.
Outcome classify_outcome(const PredictionRecord& rec, const AnswerMatcher& matcher,
                         std::span<const std::string> markers);

struct EvalResult
{
    ConfusionMatrix counts;
    std::vector<std::string> inconsistent_ids;

    std::size_t records() const noexcept { return counts.total() + inconsistent_ids.size(); }
};

/// Throws std::invalid_argument on an empty record set.
EvalResult build_confusion(std::span<const PredictionRecord> records, const AnswerMatcher& matcher,
                           std::span<const std::string> markers);

struct InitialEntry
{
    std::string id;
    std::string question;
    std::string gold_answer;
    bool correct = false;
};

struct RefinedEntry
{
    std::string id;
    std::string raw;
};

/// One-to-one join on id, in initial-log order. Throws std::invalid_argument
/// on duplicate or unmatched ids.
std::vector<PredictionRecord> join_predictions(std::span<const InitialEntry> initial,
                                               std::span<const RefinedEntry> refined, const ParseOptions& opts = {});

} // namespace relkit
