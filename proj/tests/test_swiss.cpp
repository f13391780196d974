#include <doctest.h>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/max_cardinality_matching.hpp>

#include <numeric>
#include <set>

#include "tourney/swiss.hpp"

using namespace tourney;

namespace {

PlayerId P(int rank) { return PlayerId{rank}; }

/// Whether `players` can be perfectly matched without rematches (Edmonds via Boost).
bool has_perfect_matching(const SwissState& s, const std::vector<PlayerId>& players) {
    using Graph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
    const std::size_t k = players.size();
    if (k == 0) return true;
    Graph g(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            if (!s.played(players[i], players[j])) boost::add_edge(i, j, g);
    std::vector<boost::graph_traits<Graph>::vertex_descriptor> mate(k);
    boost::edmonds_maximum_cardinality_matching(g, &mate[0]);
    return 2 * boost::matching_size(g, &mate[0]) == k;
}

/// Reference rule: the first unpaired player takes the earliest opponent that leaves a matchable remainder.
Pairing reference_pairing(const SwissState& s, std::vector<PlayerId> order) {
    Pairing pairs;
    while (!order.empty()) {
        const PlayerId first = order.front();
        bool paired = false;
        for (std::size_t c = 1; c < order.size() && !paired; ++c) {
            if (s.played(first, order[c])) continue;
            std::vector<PlayerId> rest;
            for (std::size_t i = 1; i < order.size(); ++i)
                if (i != c) rest.push_back(order[i]);
            if (has_perfect_matching(s, rest)) {
                pairs.emplace_back(first, order[c]);
                order = std::move(rest);
                paired = true;
            }
        }
        if (!paired) throw UnpairableError("reference: no pairing");
    }
    return pairs;
}

/// Would pairing each player with its earliest unplayed opponent, without look-ahead, get stuck?
bool naive_greedy_fails(const SwissState& s, std::vector<PlayerId> order) {
    while (!order.empty()) {
        auto it = std::find_if(order.begin() + 1, order.end(), [&](PlayerId q) { return !s.played(order.front(), q); });
        if (it == order.end()) return true;
        order.erase(it);
        order.erase(order.begin());
    }
    return false;
}

void play(SwissState& s, std::initializer_list<std::pair<int, int>> winner_loser) {
    for (const auto& [w, l] : winner_loser) s.record(P(w), P(l), P(w));
    s.close_round();
}

}  // namespace

TEST_CASE("pairing follows the order with feasibility") {
    SwissState s(4);
    CHECK(s.round() == 0);
    for (int p = 1; p <= 4; ++p) CHECK(s.buchholz(P(p)) == 0.0);

    play(s, {{1, 2}, {3, 4}});
    const std::vector<PlayerId> order{P(1), P(3), P(2), P(4)};
    CHECK(score_order(s, {P(2), P(4), P(1), P(3)}) == std::vector<PlayerId>{P(1), P(3), P(2), P(4)});
    const Pairing second = pair_in_order(s, order);
    CHECK(second == Pairing{{P(1), P(3)}, {P(2), P(4)}});

    play(s, {{1, 3}, {2, 4}});
    const Pairing third = pair_in_order(s, order);
    CHECK(third == Pairing{{P(1), P(4)}, {P(3), P(2)}});

    play(s, {{4, 1}, {2, 3}});
    CHECK(s.pairs_played() == 6);
    CHECK_THROWS_AS(pair_in_order(s, order), UnpairableError);

    SUBCASE("six players after two rounds") {
        SwissState t(6);
        play(t, {{1, 2}, {3, 4}, {5, 6}});
        play(t, {{1, 3}, {2, 5}, {4, 6}});
        const std::vector<PlayerId> ord{P(1), P(4), P(5), P(2), P(3), P(6)};
        CHECK(pair_in_order(t, ord) == reference_pairing(t, ord));
    }
}

TEST_CASE("pairings match an independent matching-based reference") {
    int lookahead_needed = 0;
    int unpairable = 0;
    for (int n : {6, 8, 10, 16}) {
        for (std::uint64_t seed = 0; seed < 150; ++seed) {
            RandomStream rng(stream_seed(101 + static_cast<std::uint64_t>(n), seed));
            const WinMatrix m = WinMatrix::uniform(n);
            SwissState s(n);
            for (int round = 0; round < n - 1; ++round) {
                const std::vector<PlayerId> order = pairing_order(s, rng);
                Pairing expected;
                bool reference_ok = true;
                try {
                    expected = reference_pairing(s, order);
                } catch (const UnpairableError&) {
                    reference_ok = false;
                }
                if (!reference_ok) {
                    CHECK_THROWS_AS(pair_in_order(s, order), UnpairableError);
                    ++unpairable;
                    break;
                }
                lookahead_needed += naive_greedy_fails(s, order) ? 1 : 0;
                const Pairing got = pair_in_order(s, order);
                REQUIRE(got == expected);
                s.apply_round(got, m, rng);
            }
        }
    }
    CHECK(lookahead_needed > 0);
    CHECK(unpairable > 0);
}

TEST_CASE("Swiss tournaments at n = 32") {
    const WinMatrix m = skill_matrix(SkillModel{5}, 32);
    for (int rounds : {5, 14}) {
        CAPTURE(rounds);
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            RandomStream rng(stream_seed(7, seed));
            SwissState s(32);
            for (int r = 0; r < rounds; ++r) {
                const Pairing pairs = pair_round(s, rng);
                REQUIRE(pairs.size() == 16);
                std::set<int> seen;
                for (const auto& [a, b] : pairs) {
                    REQUIRE_FALSE(s.played(a, b));
                    seen.insert(a.rank);
                    seen.insert(b.rank);
                }
                REQUIRE(seen.size() == 32);
                s.apply_round(pairs, m, rng);
            }
            CHECK(s.pairs_played() == 16 * rounds);
            CHECK(std::accumulate(s.scores().begin(), s.scores().end(), 0) == 16 * rounds);
            const std::vector<double> recomputed = buchholz(s.history(), s.scores());
            for (int p = 1; p <= 32; ++p) REQUIRE(s.buchholz(P(p)) == recomputed[P(p).index()]);
        }
    }
}

TEST_CASE("Buchholz") {
    // Player 1 met players 2..6, whose final scores are 3, 2, 4, 1, 0.
    std::vector<MatchRecord> history;
    for (int opp = 2; opp <= 6; ++opp) history.push_back({Stage{StageKind::Swiss, opp - 1}, P(1), P(opp), P(1), true});
    const std::vector<int> scores{5, 3, 2, 4, 1, 0};
    CHECK(buchholz(history, scores)[0] == 10.0);
}

TEST_CASE("standings") {
    SwissState s(4);
    play(s, {{1, 2}, {3, 4}});
    play(s, {{1, 3}, {2, 4}});
    play(s, {{4, 1}, {2, 3}});
    // 1 and 2 tie on 2 points and Buchholz 4; 1 beat 2. 3 and 4 tie on 1 point and Buchholz 5; 3 beat 4.
    CHECK(s.buchholz(P(1)) == 4.0);
    CHECK(s.buchholz(P(2)) == 4.0);
    CHECK(s.buchholz(P(3)) == 5.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RandomStream rng(seed);
        CHECK(swiss_standings(s, rng) == ObservedRanking{P(1), P(2), P(3), P(4)});
    }

    const WinMatrix det = WinMatrix::deterministic(32);
    for (int rounds = 5; rounds <= 14; ++rounds) {
        RandomStream rng(static_cast<std::uint64_t>(rounds));
        const TournamentResult r = run_swiss(det, 32, rounds, rng);
        CHECK(r.ranking.front() == P(1));
        CHECK(r.counted_matches == 16 * rounds);
        CHECK(validate_result(r, 32));
    }
}

TEST_CASE("rejections") {
    CHECK_THROWS_AS(SwissState(5), std::invalid_argument);
    CHECK_THROWS_AS(SwissState(66), std::invalid_argument);
    SwissState s(4);
    s.record(P(1), P(2), P(1));
    CHECK_THROWS_AS(s.record(P(2), P(1), P(2)), std::invalid_argument);
    CHECK_THROWS_AS(s.record(P(3), P(3), P(3)), std::invalid_argument);

    SwissState t(4);
    RandomStream rng(1);
    CHECK_THROWS_AS(t.apply_round(Pairing{{P(1), P(2)}}, WinMatrix::uniform(4), rng), std::invalid_argument);
    CHECK_THROWS_AS(t.apply_round(Pairing{{P(1), P(2)}, {P(2), P(3)}}, WinMatrix::uniform(4), rng),
                    std::invalid_argument);
    CHECK_THROWS_AS(run_swiss(WinMatrix::uniform(4), 4, 4, rng), std::invalid_argument);
}
