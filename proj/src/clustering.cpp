#include "relkit/clustering.hpp"

#include "relkit/text.hpp"

namespace relkit {

ClusterAssignment cluster_answers(std::string_view question, std::span<const std::optional<std::string>> answers,
                                  const EntailmentOracle& oracle)
{
    ClusterAssignment out;
    out.cluster_of.resize(answers.size());
    std::vector<std::size_t> founder;  // rollout index of each cluster's first member
    bool any = false;

    for (std::size_t i = 0; i < answers.size(); ++i) {
        const auto& answer = answers[i];
        if (!answer || text::trim(*answer).empty()) {
            out.cluster_of[i] = out.sizes.size();
            out.sizes.push_back(1);
            out.degenerate.push_back(true);
            founder.push_back(i);
            continue;
        }
        any = true;
        std::optional<std::size_t> joined;
        for (std::size_t c = 0; c < out.sizes.size() && !joined; ++c) {
            if (out.degenerate[c])
                continue;
            const EquivalenceQuery q{std::string(question), *answers[founder[c]], *answer};
            if (semantically_equivalent(q, oracle))
                joined = c;
        }
        if (joined) {
            out.cluster_of[i] = *joined;
            ++out.sizes[*joined];
        } else {
            out.cluster_of[i] = out.sizes.size();
            out.sizes.push_back(1);
            out.degenerate.push_back(false);
            founder.push_back(i);
        }
    }
    if (!any)
        throw std::invalid_argument("cluster_answers: no rollout has an extractable answer");
    return out;
}

ClusterAssignment cluster_group(const RolloutGroup& group, const EntailmentOracle& oracle)
{
    std::vector<std::optional<std::string>> answers;
    answers.reserve(group.rollouts.size());
    for (const auto& r : group.rollouts)
        answers.push_back(r.answer);
    return cluster_answers(group.question, answers, oracle);
}

} // namespace relkit
