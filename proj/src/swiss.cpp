#include "tourney/swiss.hpp"

#include <algorithm>
#include <bit>
#include <unordered_set>

namespace tourney {

SwissState::SwissState(int n)
    : n_(n),
      scores_(static_cast<std::size_t>(n), 0),
      buchholz_(static_cast<std::size_t>(n), 0.0),
      met_(static_cast<std::size_t>(n), 0),
      beaten_(static_cast<std::size_t>(n), 0) {
    if (n < 2 || n > 64 || n % 2 != 0) throw std::invalid_argument("Swiss state needs an even n in 2..64");
}

int SwissState::pairs_played() const {
    int total = 0;
    for (std::uint64_t mask : met_) total += std::popcount(mask);
    return total / 2;
}

void SwissState::record(PlayerId white, PlayerId black, PlayerId winner) {
    const int a = white.index();
    const int b = black.index();
    if (a == b || a < 0 || b < 0 || a >= n_ || b >= n_) throw std::invalid_argument("invalid Swiss pairing");
    if (played(white, black)) throw std::invalid_argument("rematch in Swiss pairing");
    met_[a] |= std::uint64_t{1} << b;
    met_[b] |= std::uint64_t{1} << a;
    buchholz_[a] += scores_[b];
    buchholz_[b] += scores_[a];

    const int w = winner.index();
    const int l = w == a ? b : a;
    beaten_[w] |= std::uint64_t{1} << l;
    ++scores_[w];
    for (std::uint64_t opp = met_[w]; opp != 0; opp &= opp - 1) buchholz_[std::countr_zero(opp)] += 1.0;
    history_.push_back(MatchRecord{Stage{StageKind::Swiss, round_ + 1}, white, black, winner, true});
}

void SwissState::apply_round(const Pairing& pairs, const WinMatrix& m, RandomStream& rng) {
    std::uint64_t seen = 0;
    for (const auto& [a, b] : pairs) {
        const std::uint64_t bits = (std::uint64_t{1} << a.index()) | (std::uint64_t{1} << b.index());
        if (a == b || (seen & bits) != 0) throw std::invalid_argument("Swiss round is not a matching");
        seen |= bits;
    }
    if (static_cast<int>(pairs.size()) * 2 != n_) throw std::invalid_argument("Swiss round must pair every player");
    for (const auto& [a, b] : pairs) record(a, b, sample_match(m, a, b, rng));
    close_round();
}

std::vector<PlayerId> score_order(const SwissState& state, std::vector<PlayerId> tie_order) {
    std::stable_sort(tie_order.begin(), tie_order.end(),
                     [&](PlayerId x, PlayerId y) { return state.score(x) > state.score(y); });
    return tie_order;
}

std::vector<PlayerId> pairing_order(const SwissState& state, RandomStream& rng, Seeding seeding) {
    std::vector<PlayerId> order = identity_ranking(state.size());
    if (seeding == Seeding::Random) rng.shuffle(std::span(order));
    return score_order(state, std::move(order));
}

namespace {

/// Depth-first search in pairing order. The first complete matching it finds is
/// the one the greedy feasibility rule selects: at every step the earliest
/// opponent with a completable remainder.
class MatchingSearch {
  public:
    explicit MatchingSearch(std::vector<std::uint64_t> compatible)
        : compatible_(std::move(compatible)), mate_(compatible_.size(), -1) {}

    bool solve(std::uint64_t remaining) {
        if (remaining == 0) return true;
        if (dead_.contains(remaining)) return false;
        const int first = std::countr_zero(remaining);
        const std::uint64_t rest = remaining & (remaining - 1);
        for (std::uint64_t cands = compatible_[first] & rest; cands != 0; cands &= cands - 1) {
            const int c = std::countr_zero(cands);
            const std::uint64_t next = rest & ~(std::uint64_t{1} << c);
            if (everyone_has_partner(next) && solve(next)) {
                mate_[first] = c;
                mate_[c] = first;
                return true;
            }
        }
        dead_.insert(remaining);
        return false;
    }

    int mate(int position) const { return mate_[position]; }

  private:
    bool everyone_has_partner(std::uint64_t set) const {
        for (std::uint64_t s = set; s != 0; s &= s - 1)
            if ((compatible_[std::countr_zero(s)] & set) == 0) return false;
        return true;
    }

    std::vector<std::uint64_t> compatible_;
    std::vector<int> mate_;
    std::unordered_set<std::uint64_t> dead_;
};

}  // namespace

Pairing pair_in_order(const SwissState& state, std::span<const PlayerId> order) {
    const int n = state.size();
    if (static_cast<int>(order.size()) != n) throw std::invalid_argument("pairing order must list every player");
    // Compatibility in order positions.
    std::vector<std::uint64_t> compatible(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && !state.played(order[i], order[j])) compatible[i] |= std::uint64_t{1} << j;

    MatchingSearch search(std::move(compatible));
    const std::uint64_t everyone = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
    if (!search.solve(everyone))
        throw UnpairableError("no rematch-free pairing exists for round " + std::to_string(state.round() + 1));

    Pairing pairs;
    pairs.reserve(static_cast<std::size_t>(n / 2));
    for (int i = 0; i < n; ++i)
        if (search.mate(i) > i) pairs.emplace_back(order[i], order[search.mate(i)]);
    return pairs;
}

Pairing pair_round(const SwissState& state, RandomStream& rng, Seeding seeding) {
    // With all scores level the order is a uniform shuffle and the rule pairs
    // neighbours, which is a uniformly random perfect matching.
    const std::vector<PlayerId> order = pairing_order(state, rng, seeding);
    return pair_in_order(state, order);
}

std::vector<double> buchholz(std::span<const MatchRecord> history, std::span<const int> scores) {
    std::vector<double> table(scores.size(), 0.0);
    for (const MatchRecord& m : history) {
        table[m.white.index()] += scores[m.black.index()];
        table[m.black.index()] += scores[m.white.index()];
    }
    return table;
}

ObservedRanking swiss_standings(const SwissState& state, RandomStream& rng, Seeding seeding) {
    ObservedRanking ranking = identity_ranking(state.size());
    std::stable_sort(ranking.begin(), ranking.end(), [&](PlayerId x, PlayerId y) {
        if (state.score(x) != state.score(y)) return state.score(x) > state.score(y);
        return state.buchholz(x) > state.buchholz(y);
    });
    for (auto begin = ranking.begin(); begin != ranking.end();) {
        auto end = std::find_if(begin, ranking.end(), [&](PlayerId p) {
            return state.score(p) != state.score(*begin) || state.buchholz(p) != state.buchholz(*begin);
        });
        if (end - begin > 1) {
            std::vector<PlayerId> tied(begin, end);
            if (seeding == Seeding::Random) rng.shuffle(std::span(tied));
            std::vector<std::pair<int, PlayerId>> keyed;
            keyed.reserve(tied.size());
            for (PlayerId p : tied) {
                int direct_wins = 0;
                for (PlayerId q : tied) direct_wins += state.beat(p, q) ? 1 : 0;
                keyed.emplace_back(direct_wins, p);
            }
            std::stable_sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
            for (std::size_t i = 0; i < keyed.size(); ++i) begin[static_cast<std::ptrdiff_t>(i)] = keyed[i].second;
        }
        begin = end;
    }
    return ranking;
}

TournamentResult run_swiss(const WinMatrix& m, int n, int rounds, RandomStream& rng, Seeding seeding) {
    validate(FormatSpec{FormatKind::Swiss, n, rounds});
    if (m.size() != n) throw std::invalid_argument("format size does not match the win matrix");
    SwissState state(n);
    for (int r = 0; r < rounds; ++r) state.apply_round(pair_round(state, rng, seeding), m, rng);

    TournamentResult result;
    result.ranking = swiss_standings(state, rng, seeding);
    result.matches = state.history();
    result.counted_matches = static_cast<int>(result.matches.size());
    return result;
}

}  // namespace tourney
