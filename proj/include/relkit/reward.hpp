#pragma once

#include "relkit/clustering.hpp"
#include "relkit/entailment.hpp"
#include "relkit/rollout.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace relkit {

/// Defaults follow the GRPO trainer setup: w_c = 1, w_f = 2, w_a = 4.
struct RewardWeights
{
    double confidence = 1.0;
    double accuracy = 4.0;
    double format = 2.0;

    void validate() const;
};

struct RewardVector
{
    int confidence = 0;  // R_c
    int accuracy = 0;    // R_a
    double format = 0.0; // R_f
    double total = 0.0;

    bool operator==(const RewardVector&) const = default;
};

/// ceil(G / 2).
constexpr std::size_t default_tau(std::size_t group_size) noexcept { return (group_size + 1) / 2; }

/// 1 when the expressed confidence agrees with the cluster-size threshold:
/// sure on a cluster of at least tau members, unsure on a smaller one.
/// Absent confidence scores 0.
int confidence_reward(const Rollout& rollout, std::size_t cluster_size, std::size_t group_size,
                      std::optional<std::size_t> tau = std::nullopt);

/// 1 iff an answer was extracted and it matches gold.
int accuracy_reward(const Rollout& rollout, std::string_view gold, const AnswerMatcher& matcher);

/// Weighted sum, gated: confidence and accuracy only count when the format
/// reward is exactly 1.
double total_reward(int r_c, int r_a, double r_f, const RewardWeights& w);

/// Reward vector for every rollout, each scored against its own cluster size.
std::vector<RewardVector> score_group(const RolloutGroup& group, const ClusterAssignment& clusters,
                                      const RewardWeights& w, const AnswerMatcher& matcher,
                                      std::optional<std::size_t> tau = std::nullopt);

} // namespace relkit
