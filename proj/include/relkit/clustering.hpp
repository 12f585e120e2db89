#pragma once

#include "relkit/entailment.hpp"
#include "relkit/rollout.hpp"

#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace relkit {

/// G rollouts sampled for one question, in generation order.
struct RolloutGroup
{
    std::string question;
    std::string gold_answer;
    std::vector<Rollout> rollouts;
};

/// Partition of a group into semantic clusters. Rollouts without an
/// extractable answer get their own singleton cluster, flagged degenerate.
struct ClusterAssignment
{
    std::vector<std::size_t> cluster_of;  // per rollout
    std::vector<std::size_t> sizes;       // per cluster
    std::vector<bool> degenerate;         // per cluster

    std::size_t num_clusters() const noexcept { return sizes.size(); }
    std::size_t size_of(std::size_t rollout) const { return sizes.at(cluster_of.at(rollout)); }
    std::size_t num_samples() const noexcept { return cluster_of.size(); }

    bool operator==(const ClusterAssignment&) const = default;
};

/// Greedy clustering: each answer joins the first cluster whose founding
/// member it is bidirectionally equivalent to (question-prefixed), else
/// founds a new one. Throws std::invalid_argument when no answer is present;
/// oracle errors propagate and no partial assignment is returned.
ClusterAssignment cluster_answers(std::string_view question, std::span<const std::optional<std::string>> answers,
                                  const EntailmentOracle& oracle);

ClusterAssignment cluster_group(const RolloutGroup& group, const EntailmentOracle& oracle);

/// -sum_i (|C_i| / M) ln(|C_i| / M), in nats.
template <typename Scalar = double>
Scalar semantic_entropy(std::span<const std::size_t> sizes, std::size_t total)
{
    if (total == 0)
        throw std::invalid_argument("semantic_entropy: sample count must be >= 1");
    Eigen::Array<Scalar, Eigen::Dynamic, 1> p(static_cast<Eigen::Index>(sizes.size()));
    std::size_t sum = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] == 0)
            throw std::invalid_argument("semantic_entropy: empty cluster");
        sum += sizes[i];
        p(static_cast<Eigen::Index>(i)) = Scalar(sizes[i]) / Scalar(total);
    }
    if (sum != total)
        throw std::invalid_argument("semantic_entropy: cluster sizes must sum to the sample count");
    const Scalar h = -(p * p.log()).sum();
    // a single cluster gives -1*ln(1) = -0.0
    return h == Scalar(0) ? Scalar(0) : h;
}

template <typename Scalar = double>
Scalar semantic_entropy(const ClusterAssignment& a)
{
    return semantic_entropy<Scalar>(a.sizes, a.num_samples());
}

} // namespace relkit
