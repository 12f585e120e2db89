#include "relkit/data_prep.hpp"

#include "doctest.h"

#include <cmath>

using namespace relkit;

namespace {

QaRecord rec(std::string id, std::vector<std::string> samples, std::string gold = "maid")
{
    QaRecord r;
    r.id = std::move(id);
    r.question = "q";
    r.gold_answer = std::move(gold);
    r.samples = std::move(samples);
    return r;
}

} // namespace

TEST_CASE("record entropy clusters the samples")
{
    const ExactMatchOracle o;
    CHECK(*record_entropy(rec("a", {"x", "x", "x"}), o) == 0.0);
    CHECK(*record_entropy(rec("b", {"x", "y"}), o) == doctest::Approx(std::log(2.0)));
    QaRecord stored = rec("c", {"x", "y"});
    stored.entropy = 0.25;
    CHECK(*record_entropy(stored, o) == 0.25);
    QaRecord none;
    CHECK_FALSE(record_entropy(none, o));
}

TEST_CASE("entropy filter drops exactly the records below the threshold")
{
    const ExactMatchOracle o;
    const std::vector<QaRecord> in = {rec("low", {"x", "x", "x", "x"}), rec("mid", {"x", "x", "y", "y"}),
                                      rec("high", {"a", "b", "c", "d"}), rec("blank", {" ", ""})};
    const double threshold = std::log(2.0);
    const Split s = filter_low_entropy(in, threshold, o);
    REQUIRE(s.first.size() == 2);
    CHECK(s.first[0].id == "mid");
    CHECK(s.first[1].id == "high");
    REQUIRE(s.second.size() == 1);
    CHECK(s.second[0].id == "low");
    CHECK(s.skipped == 1);
    for (const auto& r : s.first)
        CHECK(*r.entropy >= threshold);
    for (const auto& r : s.second)
        CHECK(*r.entropy < threshold);
}

TEST_CASE("entropy partition is the complement of the filter")
{
    const ExactMatchOracle o;
    const std::vector<QaRecord> in = {rec("a", {"x", "x"}), rec("b", {"x", "y"}), rec("c", {"x", "y", "z"})};
    for (double t : {0.0, 0.5, 0.69, 1.0, 2.0}) {
        const Split f = filter_low_entropy(in, t, o);
        const Split p = partition_by_entropy(in, t, o);
        CHECK(f.first.size() == p.second.size());
        CHECK(f.second.size() == p.first.size());
        CHECK(f.first.size() + f.second.size() == in.size());
    }
}

TEST_CASE("correctness partition uses the designated answer")
{
    const std::vector<QaRecord> in = {rec("k", {"Minute Maid", "fanta"}), rec("u", {"fanta", "maid"}),
                                      rec("none", {})};
    const Split s = partition_by_correctness(in, StringMatcher{});
    REQUIRE(s.first.size() == 1);
    CHECK(s.first[0].id == "k");
    REQUIRE(s.second.size() == 1);
    CHECK(s.second[0].id == "u");
    CHECK(s.skipped == 1);
}

TEST_CASE("rewriting unknown labels is idempotent and keeps the original")
{
    const std::vector<QaRecord> in = {rec("u", {"fanta"})};
    const auto once = rewrite_unknown_labels(in);
    CHECK(once[0].gold_answer == "I don't know.");
    CHECK(*once[0].original_gold == "maid");
    const auto twice = rewrite_unknown_labels(once);
    CHECK(twice[0].gold_answer == once[0].gold_answer);
    CHECK(twice[0].original_gold == once[0].original_gold);
    CHECK(rewrite_unknown_labels(in, "Unsure")[0].gold_answer == "Unsure");
}
