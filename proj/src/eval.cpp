#include "relkit/eval.hpp"

#include "relkit/text.hpp"

#include <algorithm>
#include <unordered_map>

namespace relkit {

std::string_view to_string(Outcome o) noexcept
{
    static constexpr std::string_view names[] = {"N1", "N2", "N3", "N4", "N5"};
    return names[static_cast<int>(o)];
}

std::vector<std::string> default_abstention_markers() { return {"i don't know", "i don't know."}; }

bool is_abstention_marker(std::string_view answer, std::span<const std::string> markers)
{
    const std::string a = text::normalize(answer);
    if (a.empty())
        return false;
    return std::any_of(markers.begin(), markers.end(), [&](const std::string& m) { return text::normalize(m) == a; });
}

PredictionRecord make_prediction(std::string id, std::string question, std::string gold, bool initial_correct,
                                 std::string refined_raw, const ParseOptions& opts)
{
    PredictionRecord rec;
    rec.id = std::move(id);
    rec.question = std::move(question);
    rec.gold_answer = std::move(gold);
    rec.initial_correct = initial_correct;
    Rollout r = parse_rollout(refined_raw, opts);
    rec.refined_answer = std::move(r.answer);
    rec.refined_confidence = r.confidence;
    if (!rec.refined_answer && r.format.counts[static_cast<std::size_t>(Tag::AnswerOpen)] == 0 &&
        r.format.counts[static_cast<std::size_t>(Tag::ConfidenceOpen)] == 0) {
        std::string plain = text::trim(refined_raw);
        if (!plain.empty())
            rec.refined_answer = std::move(plain);
    }
    rec.refined_raw = std::move(refined_raw);
    return rec;
}

Outcome classify_outcome(const PredictionRecord& rec, const AnswerMatcher& matcher,
                         std::span<const std::string> markers)
{
    const bool abstained = rec.refined_confidence == Confidence::Unsure ||
                           (rec.refined_answer && is_abstention_marker(*rec.refined_answer, markers));
    if (abstained)
        return rec.initial_correct ? Outcome::N3 : Outcome::N5;

    const bool correct = rec.refined_answer && matcher.matches(*rec.refined_answer, rec.gold_answer);
    if (rec.initial_correct)
        return correct ? Outcome::N1 : Outcome::N2;
    if (correct)
        throw ConsistencyError(rec.id);
    return Outcome::N4;
}

EvalResult build_confusion(std::span<const PredictionRecord> records, const AnswerMatcher& matcher,
                           std::span<const std::string> markers)
{
    if (records.empty())
        throw std::invalid_argument("build_confusion: empty record set");
    EvalResult out;
    for (const auto& rec : records) {
        Outcome o;
        try {
            o = classify_outcome(rec, matcher, markers);
        } catch (const ConsistencyError& e) {
            out.inconsistent_ids.push_back(e.id());
            continue;
        }
        switch (o) {
        case Outcome::N1:
            ++out.counts.n1;
            break;
        case Outcome::N2:
            ++out.counts.n2;
            break;
        case Outcome::N3:
            ++out.counts.n3;
            break;
        case Outcome::N4:
            ++out.counts.n4;
            break;
        case Outcome::N5:
            ++out.counts.n5;
            break;
        }
    }
    return out;
}

std::vector<PredictionRecord> join_predictions(std::span<const InitialEntry> initial,
                                               std::span<const RefinedEntry> refined, const ParseOptions& opts)
{
    std::unordered_map<std::string, const RefinedEntry*> by_id;
    for (const auto& r : refined) {
        if (!by_id.emplace(r.id, &r).second)
            throw std::invalid_argument("duplicate id in refined log: '" + r.id + "'");
    }
    std::vector<PredictionRecord> out;
    out.reserve(initial.size());
    std::unordered_map<std::string, bool> seen;
    for (const auto& i : initial) {
        if (!seen.emplace(i.id, true).second)
            throw std::invalid_argument("duplicate id in initial log: '" + i.id + "'");
        auto it = by_id.find(i.id);
        if (it == by_id.end())
            throw std::invalid_argument("id '" + i.id + "' missing from refined log");
        out.push_back(make_prediction(i.id, i.question, i.gold_answer, i.correct, it->second->raw, opts));
    }
    if (out.size() != refined.size()) {
        for (const auto& r : refined) {
            if (!seen.count(r.id))
                throw std::invalid_argument("id '" + r.id + "' missing from initial log");
        }
    }
    return out;
}

} // namespace relkit
