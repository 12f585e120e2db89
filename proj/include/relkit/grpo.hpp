#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relkit {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar = double>
struct GrpoConfig
{
    Scalar epsilon = Scalar(0.2);    // clip ratio
    Scalar beta = Scalar(0.04);      // KL coefficient
    Scalar std_floor = Scalar(1e-6); // groups with a smaller std carry no signal

    void validate() const
    {
        if (!(epsilon > Scalar(0) && epsilon < Scalar(1)))
            throw std::invalid_argument("GrpoConfig: epsilon must lie in (0, 1)");
        if (!(beta >= Scalar(0)) || !std::isfinite(beta))
            throw std::invalid_argument("GrpoConfig: beta must be finite and >= 0");
        if (!(std_floor > Scalar(0)))
            throw std::invalid_argument("GrpoConfig: std_floor must be > 0");
    }
};

template <typename Scalar = double>
struct AdvantageSet
{
    Vector<Scalar> rewards;
    Vector<Scalar> advantages;
    Scalar mean = Scalar(0);
    Scalar std = Scalar(0);  // population std
    bool degenerate = false;
};

/// A_i = (r_i - mean) / std with the population std of the group. A group
/// whose std falls below the floor gets all-zero advantages.
template <typename Derived>
AdvantageSet<typename Derived::Scalar> normalize_advantages(const Eigen::MatrixBase<Derived>& rewards,
                                                            const GrpoConfig<typename Derived::Scalar>& cfg = {})
{
    using Scalar = typename Derived::Scalar;
    static_assert(Derived::ColsAtCompileTime == 1, "rewards must be a column vector");
    cfg.validate();
    if (rewards.size() < 2)
        throw std::invalid_argument("normalize_advantages: a group needs at least 2 rewards");
    if (!rewards.allFinite())
        throw std::invalid_argument("normalize_advantages: rewards must be finite");

    AdvantageSet<Scalar> out;
    out.rewards = rewards;
    out.mean = rewards.mean();
    const Vector<Scalar> centered = rewards.array() - out.mean;
    out.std = std::sqrt(centered.squaredNorm() / Scalar(rewards.size()));
    if (out.std < cfg.std_floor) {
        out.degenerate = true;
        out.advantages = Vector<Scalar>::Zero(rewards.size());
    } else {
        out.advantages = centered / out.std;
    }
    return out;
}

/// min(rho * A, clip(rho, 1 - eps, 1 + eps) * A).
template <typename Scalar>
Scalar clipped_surrogate(Scalar ratio, Scalar advantage, const GrpoConfig<Scalar>& cfg = {})
{
    if (!(ratio > Scalar(0)) || !std::isfinite(ratio))
        throw std::domain_error("clipped_surrogate: ratio must be positive and finite");
    const Scalar clipped = std::clamp(ratio, Scalar(1) - cfg.epsilon, Scalar(1) + cfg.epsilon);
    return std::min(ratio * advantage, clipped * advantage);
}

/// Per-sample KL estimator rho - ln(rho) - 1 with rho = pi_ref / pi_theta.
template <typename Scalar>
Scalar kl_penalty(Scalar ref_ratio)
{
    if (!(ref_ratio > Scalar(0)) || !std::isfinite(ref_ratio))
        throw std::domain_error("kl_penalty: ratio must be positive and finite");
    return ref_ratio - std::log(ref_ratio) - Scalar(1);
}

template <typename Scalar>
Scalar objective_term(Scalar ratio, Scalar ref_ratio, Scalar advantage, const GrpoConfig<Scalar>& cfg = {})
{
    return clipped_surrogate(ratio, advantage, cfg) - cfg.beta * kl_penalty(ref_ratio);
}

/// Per-rollout objective terms for a whole group.
template <typename DR, typename DQ, typename DA>
Vector<typename DA::Scalar> objective_terms(const Eigen::MatrixBase<DR>& ratios, const Eigen::MatrixBase<DQ>& ref_ratios,
                                            const Eigen::MatrixBase<DA>& advantages,
                                            const GrpoConfig<typename DA::Scalar>& cfg = {})
{
    using Scalar = typename DA::Scalar;
    if (ratios.size() != advantages.size() || ref_ratios.size() != advantages.size())
        throw std::invalid_argument("objective_terms: ratio and advantage lengths differ");
    Vector<Scalar> out(advantages.size());
    for (Eigen::Index i = 0; i < advantages.size(); ++i)
        out(i) = objective_term<Scalar>(ratios(i), ref_ratios(i), advantages(i), cfg);
    return out;
}

/// (1/G) sum_i of objective_term: the inner group average of the objective.
template <typename DR, typename DQ, typename DA>
typename DA::Scalar group_objective(const Eigen::MatrixBase<DR>& ratios, const Eigen::MatrixBase<DQ>& ref_ratios,
                                    const Eigen::MatrixBase<DA>& advantages,
                                    const GrpoConfig<typename DA::Scalar>& cfg = {})
{
    if (advantages.size() == 0)
        throw std::invalid_argument("group_objective: empty group");
    return objective_terms(ratios, ref_ratios, advantages, cfg).mean();
}

} // namespace relkit
