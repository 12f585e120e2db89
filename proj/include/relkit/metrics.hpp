#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

namespace relkit {

/// Abstention confusion matrix.
///
/// Rows are known/unknown questions (the initial model answered them
/// correctly/incorrectly), columns are the refined model's outcome:
///
///              correct  incorrect  abstained
///   known        n1        n2         n3
///   unknown      --        n4         n5
struct ConfusionMatrix
{
    std::uint64_t n1 = 0;
    std::uint64_t n2 = 0;
    std::uint64_t n3 = 0;
    std::uint64_t n4 = 0;
    std::uint64_t n5 = 0;

    constexpr std::uint64_t total() const noexcept { return n1 + n2 + n3 + n4 + n5; }

    constexpr ConfusionMatrix& operator+=(const ConfusionMatrix& o) noexcept
    {
        n1 += o.n1;
        n2 += o.n2;
        n3 += o.n3;
        n4 += o.n4;
        n5 += o.n5;
        return *this;
    }

    constexpr bool operator==(const ConfusionMatrix&) const noexcept = default;
};

/// A metric value; empty when the metric's denominator vanishes.
template <typename Scalar = double>
using Metric = std::optional<Scalar>;

template <typename Scalar = double>
Metric<Scalar> f1_ans(const ConfusionMatrix& cm)
{
    const Scalar n1 = Scalar(cm.n1), n2 = Scalar(cm.n2), n3 = Scalar(cm.n3), n4 = Scalar(cm.n4);
    const Scalar den = 2 * n1 + 2 * n2 + n3 + n4;
    if (den == Scalar(0))
        return std::nullopt;
    return 2 * n1 / den;
}

template <typename Scalar = double>
Metric<Scalar> f1_abs(const ConfusionMatrix& cm)
{
    const Scalar n3 = Scalar(cm.n3), n4 = Scalar(cm.n4), n5 = Scalar(cm.n5);
    const Scalar den = n3 + n4 + 2 * n5;
    if (den == Scalar(0))
        return std::nullopt;
    return 2 * n5 / den;
}

template <typename Scalar = double>
Metric<Scalar> precision_ans(const ConfusionMatrix& cm)
{
    const auto den = cm.n1 + cm.n2 + cm.n4;
    if (den == 0)
        return std::nullopt;
    return Scalar(cm.n1) / Scalar(den);
}

template <typename Scalar = double>
Metric<Scalar> recall_ans(const ConfusionMatrix& cm)
{
    const auto den = cm.n1 + cm.n2 + cm.n3;
    if (den == 0)
        return std::nullopt;
    return Scalar(cm.n1) / Scalar(den);
}

template <typename Scalar = double>
Metric<Scalar> precision_abs(const ConfusionMatrix& cm)
{
    const auto den = cm.n3 + cm.n5;
    if (den == 0)
        return std::nullopt;
    return Scalar(cm.n5) / Scalar(den);
}

template <typename Scalar = double>
Metric<Scalar> recall_abs(const ConfusionMatrix& cm)
{
    const auto den = cm.n4 + cm.n5;
    if (den == 0)
        return std::nullopt;
    return Scalar(cm.n5) / Scalar(den);
}

/// Harmonic mean of f1_ans and f1_abs, evaluated in closed form so that
/// matrices with n1 = 0 or n5 = 0 collapse to 0 instead of dividing by zero.
/// Undefined only when every denominator term vanishes.
template <typename Scalar = double>
Metric<Scalar> f1_rel(const ConfusionMatrix& cm)
{
    const Scalar n1 = Scalar(cm.n1), n2 = Scalar(cm.n2), n3 = Scalar(cm.n3), n4 = Scalar(cm.n4),
                 n5 = Scalar(cm.n5);
    const Scalar num = 4 * n1 * n5;
    const Scalar den = num + 2 * n2 * n5 + n1 * n3 + n1 * n4 + n3 * n5 + n4 * n5;
    if (den == Scalar(0)) {
        // n1 = n5 = 0 with some error: nothing right on either side
        if (cm.n2 + cm.n3 + cm.n4 > 0)
            return Scalar(0);
        return std::nullopt;
    }
    return num / den;
}

template <typename Scalar = double>
Metric<Scalar> accuracy(const ConfusionMatrix& cm)
{
    if (cm.total() == 0)
        return std::nullopt;
    return Scalar(cm.n1) / Scalar(cm.total());
}

/// Fraction of questions the model answered (alpha).
template <typename Scalar = double>
Metric<Scalar> answering_rate(const ConfusionMatrix& cm)
{
    if (cm.total() == 0)
        return std::nullopt;
    return Scalar(cm.n1 + cm.n2 + cm.n4) / Scalar(cm.total());
}

template <typename Scalar = double>
Metric<Scalar> truthful_rate(const ConfusionMatrix& cm)
{
    if (cm.total() == 0)
        return std::nullopt;
    return Scalar(cm.n1 + cm.n3 + cm.n5) / Scalar(cm.total());
}

/// RS = alpha * Truth + (1 - alpha) * Acc, evaluated over the common N^2
/// denominator.
template <typename Scalar = double>
Metric<Scalar> reliability_score(const ConfusionMatrix& cm)
{
    const auto n = cm.total();
    if (n == 0)
        return std::nullopt;
    const Scalar answered = Scalar(cm.n1 + cm.n2 + cm.n4);
    const Scalar truthful = Scalar(cm.n1 + cm.n3 + cm.n5);
    const Scalar num = answered * truthful + Scalar(cm.n1) * Scalar(cm.n3 + cm.n5);
    return num / (Scalar(n) * Scalar(n));
}

/// dRS/dN4 = (n3 + n5 - (n1 + n2 + n4)) / N^2 at an arbitrary matrix.
template <typename Scalar = double>
Metric<Scalar> rs_derivative_n4(const ConfusionMatrix& cm)
{
    const auto n = cm.total();
    if (n == 0)
        return std::nullopt;
    const Scalar num = Scalar(cm.n3 + cm.n5) - Scalar(cm.n1 + cm.n2 + cm.n4);
    return num / (Scalar(n) * Scalar(n));
}

/// dRS/dN4 at the all-abstained corner (0,0,0,0,n5). Always 1/n5 > 0: a
/// perfect abstainer gains RS by starting to guess wrong.
template <typename Scalar = double>
Scalar rs_pathology_witness(std::uint64_t n5)
{
    if (n5 == 0)
        throw std::invalid_argument("rs_pathology_witness: n5 must be >= 1");
    return *rs_derivative_n4<Scalar>(ConfusionMatrix{0, 0, 0, 0, n5});
}

/// dF1_rel/dN4 = -(F1_rel^2 / 4) * (1/n1 + 1/n5), the derivative of the closed form; defined for n1, n5 > 0.
template <typename Scalar = double>
Metric<Scalar> f1_rel_derivative_n4(const ConfusionMatrix& cm)
{
    if (cm.n1 == 0 || cm.n5 == 0)
        return std::nullopt;
    const Scalar rel = *f1_rel<Scalar>(cm);
    return -(rel * rel / 4) * (Scalar(1) / Scalar(cm.n1) + Scalar(1) / Scalar(cm.n5));
}

template <typename Scalar = double>
struct MetricReport
{
    ConfusionMatrix counts;
    Metric<Scalar> f1_ans;
    Metric<Scalar> f1_abs;
    Metric<Scalar> f1_rel;
    Metric<Scalar> accuracy;
    Metric<Scalar> rs;
    Metric<Scalar> answering_rate;
    Metric<Scalar> truthful_rate;
};

template <typename Scalar = double>
MetricReport<Scalar> make_report(const ConfusionMatrix& cm)
{
    return MetricReport<Scalar>{cm,
                                relkit::f1_ans<Scalar>(cm),
                                relkit::f1_abs<Scalar>(cm),
                                relkit::f1_rel<Scalar>(cm),
                                relkit::accuracy<Scalar>(cm),
                                relkit::reliability_score<Scalar>(cm),
                                relkit::answering_rate<Scalar>(cm),
                                relkit::truthful_rate<Scalar>(cm)};
}

} // namespace relkit
