#include "relkit/reward.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace relkit {

void RewardWeights::validate() const
{
    for (double w : {confidence, accuracy, format}) {
        if (!std::isfinite(w) || w < 0.0)
            throw std::invalid_argument("reward weights must be finite and non-negative");
    }
}

int confidence_reward(const Rollout& rollout, std::size_t cluster_size, std::size_t group_size,
                      std::optional<std::size_t> tau)
{
    if (cluster_size < 1 || cluster_size > group_size)
        throw std::invalid_argument("confidence_reward: cluster size " + std::to_string(cluster_size) +
                                    " outside [1, " + std::to_string(group_size) + "]");
    const std::size_t t = tau.value_or(default_tau(group_size));
    if (t < 1 || t > group_size)
        throw std::invalid_argument("confidence_reward: tau " + std::to_string(t) + " outside [1, " +
                                    std::to_string(group_size) + "]");
    if (!rollout.confidence)
        return 0;
    const bool consensus = cluster_size >= t;
    return (consensus && *rollout.confidence == Confidence::Sure) ||
                   (!consensus && *rollout.confidence == Confidence::Unsure)
               ? 1
               : 0;
}

int accuracy_reward(const Rollout& rollout, std::string_view gold, const AnswerMatcher& matcher)
{
    if (!rollout.answer)
        return 0;
    return matcher.matches(*rollout.answer, gold) ? 1 : 0;
}

double total_reward(int r_c, int r_a, double r_f, const RewardWeights& w)
{
    if (r_f == 1.0)
        return w.confidence * r_c + w.accuracy * r_a + w.format * r_f;
    return w.format * r_f;
}

std::vector<RewardVector> score_group(const RolloutGroup& group, const ClusterAssignment& clusters,
                                      const RewardWeights& w, const AnswerMatcher& matcher,
                                      std::optional<std::size_t> tau)
{
    w.validate();
    const std::size_t g = group.rollouts.size();
    if (clusters.num_samples() != g)
        throw std::invalid_argument("score_group: cluster assignment does not match the group");

    std::vector<RewardVector> out;
    out.reserve(g);
    for (std::size_t i = 0; i < g; ++i) {
        const Rollout& r = group.rollouts[i];
        RewardVector v;
        v.confidence = confidence_reward(r, clusters.size_of(i), g, tau);
        v.accuracy = accuracy_reward(r, group.gold_answer, matcher);
        v.format = format_reward(r);
        v.total = total_reward(v.confidence, v.accuracy, v.format, w);
        out.push_back(v);
    }
    return out;
}

} // namespace relkit
