#include "relkit/data_prep.hpp"

#include "relkit/clustering.hpp"

namespace relkit {

std::optional<double> record_entropy(const QaRecord& rec, const EntailmentOracle& oracle)
{
    if (rec.entropy)
        return rec.entropy;
    if (!rec.samples || rec.samples->empty())
        return std::nullopt;
    std::vector<std::optional<std::string>> answers(rec.samples->begin(), rec.samples->end());
    const ClusterAssignment a = cluster_answers(rec.question, answers, oracle);
    return semantic_entropy(a);
}

namespace {

template <typename Pred>
Split split_by_entropy(std::span<const QaRecord> records, const EntailmentOracle& oracle, Pred goes_first)
{
    Split out;
    for (const auto& rec : records) {
        std::optional<double> h;
        try {
            h = record_entropy(rec, oracle);
        } catch (const std::invalid_argument&) {
            // every sample blank: nothing to cluster
        }
        if (!h) {
            ++out.skipped;
            continue;
        }
        QaRecord r = rec;
        r.entropy = h;
        (goes_first(*h) ? out.first : out.second).push_back(std::move(r));
    }
    return out;
}

} // namespace

Split filter_low_entropy(std::span<const QaRecord> records, double threshold, const EntailmentOracle& oracle)
{
    return split_by_entropy(records, oracle, [threshold](double h) { return !(h < threshold); });
}

Split partition_by_entropy(std::span<const QaRecord> records, double threshold, const EntailmentOracle& oracle)
{
    return split_by_entropy(records, oracle, [threshold](double h) { return h < threshold; });
}

Split partition_by_correctness(std::span<const QaRecord> records, const AnswerMatcher& matcher)
{
    Split out;
    for (const auto& rec : records) {
        if (!rec.samples || rec.samples->empty()) {
            ++out.skipped;
            continue;
        }
        const bool known = matcher.matches(rec.samples->front(), rec.gold_answer);
        (known ? out.first : out.second).push_back(rec);
    }
    return out;
}

std::vector<QaRecord> rewrite_unknown_labels(std::span<const QaRecord> unknown, const std::string& abstention_text)
{
    std::vector<QaRecord> out(unknown.begin(), unknown.end());
    for (auto& rec : out) {
        if (!rec.original_gold)
            rec.original_gold = rec.gold_answer;
        rec.gold_answer = abstention_text;
    }
    return out;
}

} // namespace relkit
