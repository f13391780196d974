#include <doctest.h>

#include <cmath>

#include "tourney/engine.hpp"

using namespace tourney;

namespace {

RunConfig config_for(FormatSpec spec, std::shared_ptr<const WinMatrix> m, std::int64_t reps, std::uint64_t seed = 3) {
    RunConfig c;
    c.format = spec;
    c.model = std::move(m);
    c.replications = reps;
    c.master_seed = seed;
    return c;
}

std::int64_t total(const Histogram& h) {
    std::int64_t sum = 0;
    for (const auto& [bin, count] : h) sum += count;
    return sum;
}

}  // namespace

TEST_CASE("results do not depend on the thread count") {
    const auto m = std::make_shared<const WinMatrix>(skill_matrix(SkillModel{5}, 32));
    for (FormatSpec spec : {FormatSpec{FormatKind::DrawAndProcess, 32, 0}, FormatSpec{FormatKind::Swiss, 32, 7}}) {
        RunConfig c = config_for(spec, m, 5000);
        c.threads = 1;
        const RunSummary one = run(c);
        c.threads = 4;
        const RunSummary four = run(c);
        const RunSummary again = run(c);
        REQUIRE(one.metrics.size() == four.metrics.size());
        for (std::size_t i = 0; i < one.metrics.size(); ++i) {
            CHECK(one.metrics[i].mean == four.metrics[i].mean);
            CHECK(one.metrics[i].variance == four.metrics[i].variance);
            CHECK(one.metrics[i].skewness == four.metrics[i].skewness);
            CHECK(one.metrics[i].histogram == four.metrics[i].histogram);
            CHECK(four.metrics[i].mean == again.metrics[i].mean);
        }
        c.master_seed = 4;
        CHECK(run(c).metrics[0].mean != one.metrics[0].mean);
    }
}

TEST_CASE("summary statistics") {
    const auto m = std::make_shared<const WinMatrix>(skill_matrix(SkillModel{5}, 32));
    const RunSummary s = run(config_for({FormatKind::Knockout, 32, 0}, m, 3000));
    CHECK(s.counted_matches == 80);
    CHECK(s.min_counted_matches == 80);
    CHECK(s.max_counted_matches == 80);
    CHECK(s.invalid_results == 0);
    REQUIRE(s.metrics.size() == 4);
    for (const MetricSummary& ms : s.metrics) {
        CAPTURE(ms.name());
        CHECK(ms.count == 3000);
        CHECK(total(ms.histogram) == 3000);
        CHECK(ms.min <= ms.mean);
        CHECK(ms.mean <= ms.max);
        CHECK(ms.std_error == doctest::Approx(std::sqrt(ms.variance / 3000)));
        CHECK(ms.histogram.begin()->first <= ms.min);
        CHECK(ms.histogram.rbegin()->first <= ms.max);
    }
    CHECK(s.metric("inversions").mean > 0.0);
    CHECK_THROWS_AS(s.metric("kendall"), std::out_of_range);

    SUBCASE("real-valued metrics use quarter-unit bins") {
        for (const auto& [bin, count] : s.metric("weighted_inversions").histogram)
            CHECK(std::fmod(bin, kRealBinWidth) == 0.0);
        CHECK(histogram_bin(parse_metric("weighted_inversions"), 3.3) == 3.25);
        CHECK(histogram_bin(parse_metric("inversions"), 7.0) == 7.0);
    }
}

TEST_CASE("no upsets") {
    const auto m = std::make_shared<const WinMatrix>(WinMatrix::deterministic(32));
    RunConfig c = config_for({FormatKind::RoundRobin, 32, 0}, m, 200);
    c.metrics = {parse_metric("inversions"), parse_metric("weighted_inversions"), parse_metric("avg_rank_top_1"),
                 parse_metric("avg_rank_top_8")};
    const RunSummary s = run(c);
    CHECK(s.metrics[0].mean == 0.0);
    CHECK(s.metrics[1].mean == 0.0);
    CHECK(s.metrics[2].mean == 1.0);
    CHECK(s.metrics[3].mean == 1.0);
    CHECK(s.metrics[0].variance == 0.0);
    CHECK(s.metrics[0].skewness == 0.0);
}

TEST_CASE("coin-flip knockout of four") {
    const auto m = std::make_shared<const WinMatrix>(WinMatrix::uniform(4));
    RunConfig c = config_for({FormatKind::Knockout, 4, 0}, m, 100000);
    c.metrics = {parse_metric("inversions")};
    const RunSummary s = run(c);
    CHECK(std::abs(s.metrics[0].mean - 3.0) < 0.02);
    // A uniform permutation: inversions are symmetric about the mean.
    CHECK(std::abs(s.metrics[0].skewness) < 0.05);
}

TEST_CASE("standard error shrinks with the square root of the replications") {
    const auto m = std::make_shared<const WinMatrix>(skill_matrix(SkillModel{5}, 16));
    RunConfig c = config_for({FormatKind::Knockout, 16, 0}, m, 4000);
    const double small = run(c).metric("inversions").std_error;
    c.replications = 16000;
    const double large = run(c).metric("inversions").std_error;
    CHECK(std::abs(small / large - 2.0) < 0.6);
}

TEST_CASE("empty metric set") {
    const auto m = std::make_shared<const WinMatrix>(WinMatrix::uniform(8));
    RunConfig c = config_for({FormatKind::Knockout, 8, 0}, m, 100);
    c.metrics.clear();
    const RunSummary s = run(c);
    CHECK(s.metrics.empty());
    CHECK(s.counted_matches == 12);
}

TEST_CASE("bad configurations") {
    const auto m = std::make_shared<const WinMatrix>(WinMatrix::uniform(8));
    CHECK_THROWS_AS(run(config_for({FormatKind::Knockout, 8, 0}, m, 0)), std::invalid_argument);
    CHECK_THROWS_AS(run(config_for({FormatKind::Knockout, 16, 0}, m, 10)), std::invalid_argument);
    CHECK_THROWS_AS(run(config_for({FormatKind::Knockout, 8, 0}, nullptr, 10)), std::invalid_argument);
    CHECK_THROWS_AS(run(config_for({FormatKind::Swiss, 8, 0}, m, 10)), std::invalid_argument);
    CHECK_THROWS_AS(sweep({}), std::invalid_argument);
}

TEST_CASE("dominance") {
    const Histogram low{{1.0, 10}};
    const Histogram high{{2.0, 5}};
    CHECK(dominance(low, high).p_strictly_less == 1.0);
    CHECK(dominance(high, low).p_strictly_less == 0.0);
    CHECK(dominance(low, low).p_tie == 1.0);

    // a in {0, 2}, b in {1, 2}, equal weights: a < b for (0,1), (0,2); tie for (2,2).
    const Histogram a{{0.0, 1}, {2.0, 1}};
    const Histogram b{{1.0, 1}, {2.0, 1}};
    const DominanceEstimate d = dominance(a, b);
    CHECK(d.p_strictly_less == 0.5);
    CHECK(d.p_tie == 0.25);
    CHECK(d.samples_a == 2);
    CHECK(d.samples_b == 2);
    CHECK_THROWS_AS(dominance(Histogram{}, b), std::invalid_argument);

    SUBCASE("brute force over sample pairs") {
        const Histogram x{{0.0, 3}, {1.0, 5}, {4.0, 2}, {6.0, 1}};
        const Histogram y{{1.0, 2}, {2.0, 2}, {4.0, 4}};
        double less = 0, tie = 0, pairs = 0;
        for (const auto& [vx, cx] : x)
            for (const auto& [vy, cy] : y) {
                const double w = static_cast<double>(cx * cy);
                pairs += w;
                less += vx < vy ? w : 0;
                tie += vx == vy ? w : 0;
            }
        const DominanceEstimate e = dominance(x, y);
        CHECK(e.p_strictly_less == doctest::Approx(less / pairs));
        CHECK(e.p_tie == doctest::Approx(tie / pairs));
    }
}

TEST_CASE("sweep over Swiss rounds") {
    const auto m = std::make_shared<const WinMatrix>(skill_matrix(SkillModel{5}, 32));
    std::vector<RunConfig> configs;
    for (int r = 5; r <= 14; ++r) configs.push_back(config_for({FormatKind::Swiss, 32, r}, m, 300));
    const std::vector<SweepRow> rows = sweep(configs);
    REQUIRE(rows.size() == 10);
    for (int i = 0; i < 10; ++i) CHECK(rows[static_cast<std::size_t>(i)].counted_matches == 16 * (i + 5));
}

TEST_CASE("unimodality check") {
    CHECK(is_unimodal(Histogram{{0.0, 10}, {1.0, 50}, {2.0, 200}, {3.0, 60}, {4.0, 5}}));
    CHECK(is_unimodal(Histogram{{0.0, 100}}));
    CHECK(is_unimodal(Histogram{}));
    CHECK_FALSE(is_unimodal(Histogram{{0.0, 500}, {1.0, 100}, {2.0, 500}}));
    // A dip within sampling noise is not a second mode.
    CHECK(is_unimodal(Histogram{{0.0, 100}, {1.0, 95}, {2.0, 100}}));
}
