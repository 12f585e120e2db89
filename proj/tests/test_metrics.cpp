#include "relkit/metrics.hpp"

#include "doctest.h"

#include <cstdint>
#include <numeric>
#include <random>

using namespace relkit;

namespace {

// Exact rational used as an oracle independent of the closed forms.
struct Q
{
    std::int64_t num;
    std::int64_t den;

    Q(std::int64_t n, std::int64_t d) : num(n), den(d)
    {
        const auto g = std::gcd(num, den);
        if (g) {
            num /= g;
            den /= g;
        }
    }
    double value() const { return double(num) / double(den); }
};

Q operator*(Q a, Q b) { return {a.num * b.num, a.den * b.den}; }
Q operator+(Q a, Q b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
Q operator/(Q a, Q b) { return {a.num * b.den, a.den * b.num}; }

// F1 from its precision/recall definition.
Q f1_from_pr(Q p, Q r) { return Q{2, 1} * p * r / (p + r); }

Q oracle_f1_ans(const ConfusionMatrix& c)
{
    const Q p{std::int64_t(c.n1), std::int64_t(c.n1 + c.n2 + c.n4)};
    const Q r{std::int64_t(c.n1), std::int64_t(c.n1 + c.n2 + c.n3)};
    return f1_from_pr(p, r);
}

Q oracle_f1_abs(const ConfusionMatrix& c)
{
    const Q p{std::int64_t(c.n5), std::int64_t(c.n3 + c.n5)};
    const Q r{std::int64_t(c.n5), std::int64_t(c.n4 + c.n5)};
    return f1_from_pr(p, r);
}

} // namespace

TEST_CASE("f1_ans matches its precision/recall definition")
{
    const ConfusionMatrix cm{3, 1, 1, 1, 4};
    CHECK(oracle_f1_ans(cm).num == 3);
    CHECK(oracle_f1_ans(cm).den == 5);
    CHECK(*f1_ans(cm) == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(*f1_ans(ConfusionMatrix{7, 0, 0, 0, 3}) == 1.0);
    CHECK(*f1_ans(ConfusionMatrix{0, 1, 1, 1, 0}) == 0.0);
}

TEST_CASE("f1_abs matches its precision/recall definition")
{
    const ConfusionMatrix cm{3, 1, 1, 1, 4};
    CHECK(oracle_f1_abs(cm).num == 4);
    CHECK(oracle_f1_abs(cm).den == 5);
    CHECK(*f1_abs(cm) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(*f1_abs(ConfusionMatrix{0, 0, 0, 0, 100}) == 1.0);
    CHECK(*f1_abs(ConfusionMatrix{0, 0, 0, 50, 50}) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("undefined metrics are distinguished, not zero")
{
    // no known questions at all and nothing answered
    CHECK_FALSE(f1_ans(ConfusionMatrix{0, 0, 0, 0, 5}).has_value());
    CHECK_FALSE(f1_abs(ConfusionMatrix{5, 0, 0, 0, 0}).has_value());
    CHECK_FALSE(f1_rel(ConfusionMatrix{}).has_value());
    CHECK_FALSE(reliability_score(ConfusionMatrix{}).has_value());
    CHECK_FALSE(accuracy(ConfusionMatrix{}).has_value());
    CHECK_FALSE(precision_ans(ConfusionMatrix{0, 0, 3, 0, 1}).has_value());
}

TEST_CASE("f1_rel closed form")
{
    SUBCASE("worked example equals the harmonic mean")
    {
        const ConfusionMatrix cm{3, 1, 1, 1, 4};
        const Q fa = oracle_f1_ans(cm), fb = oracle_f1_abs(cm);
        const Q harmonic = Q{2, 1} * fa * fb / (fa + fb);
        CHECK(harmonic.num == 24);
        CHECK(harmonic.den == 35);
        CHECK(*f1_rel(cm) == doctest::Approx(24.0 / 35.0).epsilon(1e-15));
    }
    SUBCASE("ideal case is exactly 1")
    {
        CHECK(*f1_rel(ConfusionMatrix{12, 0, 0, 0, 7}) == 1.0);
    }
    SUBCASE("worst case is exactly 0")
    {
        CHECK(*f1_rel(ConfusionMatrix{0, 4, 3, 2, 0}) == 0.0);
        CHECK(*f1_rel(ConfusionMatrix{0, 1, 0, 0, 0}) == 0.0);
    }
    SUBCASE("one of n1, n5 zero with errors collapses to 0")
    {
        CHECK(*f1_rel(ConfusionMatrix{0, 0, 0, 50, 50}) == 0.0);
        CHECK(*f1_rel(ConfusionMatrix{5, 1, 0, 0, 0}) == 0.0);
    }
    SUBCASE("only correct abstentions: closed form denominator vanishes")
    {
        CHECK_FALSE(f1_rel(ConfusionMatrix{0, 0, 0, 0, 9}).has_value());
    }
}

TEST_CASE("reliability score")
{
    CHECK(*reliability_score(ConfusionMatrix{3, 1, 1, 1, 4}) == doctest::Approx(0.55).epsilon(1e-15));
    CHECK(*reliability_score(ConfusionMatrix{0, 0, 0, 0, 100}) == 0.0);
    CHECK(*reliability_score(ConfusionMatrix{0, 0, 0, 50, 50}) == 0.25);
    CHECK(*reliability_score(ConfusionMatrix{17, 0, 0, 0, 0}) == 1.0);

    // weighted-sum definition agrees with the N^2 form
    const ConfusionMatrix cm{4, 2, 3, 6, 5};
    const double alpha = *answering_rate(cm), truth = *truthful_rate(cm), acc = *accuracy(cm);
    CHECK(*reliability_score(cm) == doctest::Approx(alpha * truth + (1 - alpha) * acc).epsilon(1e-14));
}

TEST_CASE("rs pathology witness")
{
    CHECK(rs_pathology_witness(100) == doctest::Approx(0.01).epsilon(1e-15));
    CHECK(rs_pathology_witness(1) == 1.0);
    CHECK(*rs_derivative_n4(ConfusionMatrix{3, 1, 1, 1, 4}) == 0.0);
    CHECK_THROWS_AS(rs_pathology_witness(0), std::invalid_argument);
}

TEST_CASE("f1_rel derivative in n4 is non-positive and matches a finite difference")
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::uint64_t> d(1, 40);
    for (int k = 0; k < 500; ++k) {
        const ConfusionMatrix cm{d(rng), d(rng) - 1, d(rng) - 1, d(rng) - 1, d(rng)};
        const double g = *f1_rel_derivative_n4(cm);
        CHECK(g <= 0.0);

        // the closed form is smooth in n4; a central difference in long double
        auto rel = [&](long double n4) {
            const long double n1 = cm.n1, n2 = cm.n2, n3 = cm.n3, n5 = cm.n5;
            return 4 * n1 * n5 / (4 * n1 * n5 + 2 * n2 * n5 + n1 * n3 + n1 * n4 + n3 * n5 + n4 * n5);
        };
        const long double h = 1e-4L;
        const long double fd = (rel(cm.n4 + h) - rel(cm.n4 - h)) / (2 * h);
        CHECK(g == doctest::Approx(double(fd)).epsilon(1e-6));
    }
}

TEST_CASE("f1_rel: n1 and n5 increments never decrease it")
{
    for (std::uint64_t n1 = 1; n1 <= 8; ++n1)
        for (std::uint64_t n2 = 0; n2 <= 8; ++n2)
            for (std::uint64_t n3 = 0; n3 <= 8; ++n3)
                for (std::uint64_t n4 = 0; n4 <= 8; ++n4)
                    for (std::uint64_t n5 = 1; n5 <= 8; ++n5) {
                        const double base = *f1_rel(ConfusionMatrix{n1, n2, n3, n4, n5});
                        CHECK(*f1_rel(ConfusionMatrix{n1 + 1, n2, n3, n4, n5}) >= base);
                        CHECK(*f1_rel(ConfusionMatrix{n1, n2, n3, n4, n5 + 1}) >= base);
                    }
}

TEST_CASE("metrics are scale invariant")
{
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::uint64_t> d(1, 30);
    for (int i = 0; i < 200; ++i) {
        const ConfusionMatrix cm{d(rng), d(rng), d(rng), d(rng), d(rng)};
        const std::uint64_t k = d(rng);
        const ConfusionMatrix s{k * cm.n1, k * cm.n2, k * cm.n3, k * cm.n4, k * cm.n5};
        CHECK(std::abs(*f1_ans(cm) - *f1_ans(s)) < 1e-12);
        CHECK(std::abs(*f1_abs(cm) - *f1_abs(s)) < 1e-12);
        CHECK(std::abs(*f1_rel(cm) - *f1_rel(s)) < 1e-12);
        CHECK(std::abs(*reliability_score(cm) - *reliability_score(s)) < 1e-12);
        CHECK(std::abs(*accuracy(cm) - *accuracy(s)) < 1e-12);
    }
}

TEST_CASE("report fields stay in the unit interval and f1_rel lies between its parts")
{
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<std::uint64_t> d(0, 12);
    for (int i = 0; i < 1000; ++i) {
        ConfusionMatrix cm{d(rng), d(rng), d(rng), d(rng), d(rng)};
        if (cm.total() == 0)
            cm.n1 = 1;
        const auto r = make_report(cm);
        for (const auto& m : {r.f1_ans, r.f1_abs, r.f1_rel, r.accuracy, r.rs, r.answering_rate, r.truthful_rate}) {
            if (m) {
                CHECK(*m >= 0.0);
                CHECK(*m <= 1.0);
            }
        }
        if (r.f1_ans && r.f1_abs && *r.f1_ans > 0 && *r.f1_abs > 0)
        {
            CHECK(*r.f1_rel >= std::min(*r.f1_ans, *r.f1_abs) - 1e-15);
            CHECK(*r.f1_rel <= std::max(*r.f1_ans, *r.f1_abs) + 1e-15);
        }
    }
}

TEST_CASE("float scalar instantiation")
{
    CHECK(*f1_rel<float>(ConfusionMatrix{3, 1, 1, 1, 4}) == doctest::Approx(24.0f / 35.0f));
}
