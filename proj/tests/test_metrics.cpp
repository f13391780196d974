#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "tourney/metrics.hpp"
#include "tourney/random.hpp"

using namespace tourney;

namespace {

ObservedRanking ranks(std::initializer_list<int> ids) {
    ObservedRanking out;
    for (int id : ids) out.push_back(PlayerId{id});
    return out;
}

ObservedRanking random_ranking(int n, RandomStream& rng) {
    ObservedRanking r = identity_ranking(n);
    rng.shuffle(std::span(r));
    return r;
}

}  // namespace

TEST_CASE("inversions") {
    CHECK(inversions(ranks({1, 2, 3})) == 0);
    CHECK(inversions(ranks({3, 2, 1})) == 3);
    ObservedRanking reversed = identity_ranking(32);
    std::reverse(reversed.begin(), reversed.end());
    CHECK(inversions(reversed) == 496);
}

TEST_CASE("weighted inversions") {
    // The third-best player wins, everyone else in order.
    CHECK(weighted_inversions(ranks({3, 1, 2, 4})) ==
          doctest::Approx(1 / std::log(2.0) + 1 / std::log(3.0)).epsilon(1e-12));
    // The ninth-best player finishes seventh.
    CHECK(weighted_inversions(ranks({1, 2, 3, 4, 5, 6, 9, 7, 8, 10})) ==
          doctest::Approx(1 / std::log(8.0) + 1 / std::log(9.0)).epsilon(1e-12));
    CHECK(weighted_inversions(identity_ranking(10)) == 0.0);
    CHECK_THROWS_AS(weighted_inversions(ranks({2, 1}), 1.0), std::invalid_argument);
}

TEST_CASE("log base enters as the per-pair factor ln(b)") {
    const ObservedRanking r = ranks({3, 1, 2, 4});
    for (double base : {2.0, 10.0, 3.5}) {
        const double expected = 1 / (std::log(2.0) / std::log(base)) + 1 / (std::log(3.0) / std::log(base));
        CHECK(weighted_inversions(r, base) == doctest::Approx(expected).epsilon(1e-12));
    }
    RandomStream rng(5);
    for (int t = 0; t < 50; ++t) {
        const ObservedRanking q = random_ranking(16, rng);
        CHECK(weighted_inversions(q, 2.0) == doctest::Approx(weighted_inversions(q) * std::log(2.0)).epsilon(1e-12));
    }
}

TEST_CASE("average rank of the top k") {
    CHECK(avg_rank_top(ranks({5, 1, 2, 3, 4}), 1) == 5.0);
    CHECK(avg_rank_top(ranks({3, 2, 1, 4}), 3) == 1.0);
    CHECK(avg_rank_top(ranks({1, 2, 3, 4}), 3) == 1.0);
    CHECK(avg_rank_top(identity_ranking(32), 8) == 1.0);
    CHECK(avg_rank_top(ranks({2, 1, 4, 3}), 3) == doctest::Approx(7.0 / 6.0));
    CHECK_THROWS_AS(avg_rank_top(ranks({1, 2}), 3), std::invalid_argument);
    CHECK_THROWS_AS(avg_rank_top(ranks({1, 2}), 0), std::invalid_argument);
}

TEST_CASE("metric properties on random rankings") {
    RandomStream rng(77);
    for (int t = 0; t < 200; ++t) {
        const int n = 2 + static_cast<int>(rng.below(31));
        ObservedRanking r = random_ranking(n, rng);
        const auto inv = inversions(r);
        CHECK(inv >= 0);
        CHECK(inv <= n * (n - 1) / 2);

        ObservedRanking rev(r.rbegin(), r.rend());
        CHECK(inversions(rev) == n * (n - 1) / 2 - inv);

        CHECK((inv == 0) == (weighted_inversions(r) == 0.0));
        CHECK((inv == 0) == (r == identity_ranking(n)));

        const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        const double top = avg_rank_top(r, k);
        CHECK(top >= 1.0);
        ObservedRanking shuffled = r;
        rng.shuffle(std::span(shuffled).first(static_cast<std::size_t>(k)));
        CHECK(avg_rank_top(shuffled, k) == top);
        std::vector<int> firsts;
        for (int i = 0; i < k; ++i) firsts.push_back(r[i].rank);
        std::sort(firsts.begin(), firsts.end());
        CHECK((top == 1.0) == (firsts.back() == k));
    }
}

TEST_CASE("metric vector") {
    const int ks[] = {1, 3};
    const MetricVector v = compute_metrics(ranks({3, 1, 2, 4}), ks);
    CHECK(v.inversions == 2);
    CHECK(v.weighted_inversions == doctest::Approx(1 / std::log(2.0) + 1 / std::log(3.0)));
    CHECK(v.avg_rank_top.at(1) == 3.0);
    CHECK(v.avg_rank_top.at(3) == 1.0);
}

TEST_CASE("metric names") {
    CHECK(parse_metric("inversions").kind == MetricKind::Inversions);
    CHECK(parse_metric("weighted_inversions").log_base == std::numbers::e);
    CHECK(parse_metric("weighted_inversions:10").log_base == 10.0);
    CHECK(parse_metric("avg_rank_top_8").k == 8);
    CHECK(parse_metric("avg_rank_top:3").k == 3);
    CHECK_THROWS_AS(parse_metric("spearman"), std::invalid_argument);
    CHECK_THROWS_AS(parse_metric("avg_rank_top_0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_metric("weighted_inversions:1"), std::invalid_argument);
    for (const MetricSpec& m : {MetricSpec::inversion_count(), MetricSpec::weighted(), MetricSpec::weighted(2.0),
                                MetricSpec::top(1), MetricSpec::top(8)}) {
        const MetricSpec back = parse_metric(metric_name(m));
        CHECK(back.kind == m.kind);
        CHECK(metric_name(back) == metric_name(m));
    }
    CHECK(metric_name(MetricSpec::weighted(2.0)) == "weighted_inversions:2");

    const auto defaults = default_metrics();
    REQUIRE(defaults.size() == 4);
    CHECK(metric_name(defaults[2]) == "avg_rank_top_1");
    CHECK(metric_name(defaults[3]) == "avg_rank_top_8");
}
