#include "tourney/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace tourney {

double OutcomeEnumeration::total_probability() const {
    double total = 0.0;
    for (const auto& [ranking, p] : distribution) total += p;
    return total;
}

namespace {

using Order = std::vector<int>;  // 0-based player indices, best first

std::uint64_t pack(const Order& order) {
    std::uint64_t key = 0;
    for (int v : order) key = (key << 4) | static_cast<std::uint64_t>(v);
    return key;
}

Order unpack(std::uint64_t key, int n) {
    Order order(static_cast<std::size_t>(n));
    for (int i = n - 1; i >= 0; --i) {
        order[i] = static_cast<int>(key & 0xF);
        key >>= 4;
    }
    return order;
}

// ---- knockout family ----------------------------------------------------

/// Bracket with each pair and each pair of sibling sub-brackets sorted by their
/// smallest member. Placement knockouts are invariant under these swaps.
Order canonical(std::span<const int> bracket) {
    if (bracket.size() == 1) return {bracket.front()};
    const std::size_t half = bracket.size() / 2;
    Order left = canonical(bracket.first(half));
    Order right = canonical(bracket.subspan(half));
    if (right.front() < left.front()) std::swap(left, right);
    left.insert(left.end(), right.begin(), right.end());
    return left;
}

std::vector<Order> canonical_brackets(int n) {
    Order perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::set<Order> classes;
    do {
        classes.insert(canonical(perm));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return {classes.begin(), classes.end()};
}

/// Plays a placement knockout breadth first: each block of players splits into
/// its winners' block followed by its losers' block until every block is a single player.
/// Bit k of `outcomes` decides game k (1 = first-listed player wins).
double knockout_outcome(const Order& bracket, std::uint64_t outcomes, int games, const Eigen::MatrixXd& p,
                        Order& ranking) {
    std::vector<Order> blocks{bracket};
    double prob = 1.0;
    int bit = 0;
    while (blocks.front().size() > 1) {
        std::vector<Order> next;
        next.reserve(blocks.size() * 2);
        for (const Order& block : blocks) {
            Order up, down;
            for (std::size_t k = 0; k < block.size(); k += 2) {
                const int a = block[k];
                const int b = block[k + 1];
                int a_wins = 0;
                for (int g = 0; g < games; ++g, ++bit) {
                    if ((outcomes >> bit) & 1U) {
                        ++a_wins;
                        prob *= p(a, b);
                    } else {
                        prob *= p(b, a);
                    }
                }
                const bool a_up = 2 * a_wins > games;
                up.push_back(a_up ? a : b);
                down.push_back(a_up ? b : a);
            }
            next.push_back(std::move(up));
            next.push_back(std::move(down));
        }
        blocks = std::move(next);
    }
    ranking.clear();
    for (const Order& block : blocks) ranking.push_back(block.front());
    return prob;
}

void enumerate_knockout(int n, int games, const Eigen::MatrixXd& p, std::unordered_map<std::uint64_t, double>& dist,
                        OutcomeEnumeration& out) {
    const int matches = games * n * std::countr_zero(static_cast<unsigned>(n)) / 2;
    const std::vector<Order> brackets = canonical_brackets(n);
    if (matches >= 63 || brackets.size() * (std::uint64_t{1} << matches) > kEnumerationLimit)
        throw std::invalid_argument("knockout instance too large to enumerate");
    const double bracket_weight = 1.0 / static_cast<double>(brackets.size());
    Order ranking;
    for (const Order& bracket : brackets) {
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << matches); ++v) {
            const double prob = knockout_outcome(bracket, v, games, p, ranking);
            if (prob > 0.0) dist[pack(ranking)] += bracket_weight * prob;
        }
        out.outcome_vectors += std::uint64_t{1} << matches;
    }
}

// ---- round-robin family -------------------------------------------------

using Distribution = std::vector<std::pair<Order, double>>;

/// Exact ranking distribution of a round-robin with recursive tie replays.
class RoundRobinOracle {
  public:
    RoundRobinOracle(const Eigen::MatrixXd& p, int legs, OutcomeEnumeration& out) : p_(p), legs_(legs), out_(out) {}

    /// Ranking distribution of `players` after the opening (counted) round-robin.
    Distribution opening(const Order& players) { return play(players, /*replay=*/false); }

  private:
    /// Plays every outcome vector of a round-robin among `players`. For the
    /// opening round the tie sets are resolved by replays; for a replay, an
    /// all-tied outcome is a repetition and is handled by the caller.
    Distribution play(const Order& players, bool replay, double* repeat_probability = nullptr) {
        const int k = static_cast<int>(players.size());
        std::vector<std::pair<int, int>> games;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
                for (int leg = 0; leg < legs_; ++leg) games.emplace_back(i, j);
        const int bits = static_cast<int>(games.size());
        if (bits > 28) throw std::invalid_argument("round-robin instance too large to enumerate");

        std::map<Order, double> acc;
        double repeat = 0.0;
        std::vector<int> wins(static_cast<std::size_t>(k));
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << bits); ++v) {
            std::fill(wins.begin(), wins.end(), 0);
            double prob = 1.0;
            for (int g = 0; g < bits; ++g) {
                const auto [i, j] = games[g];
                if ((v >> g) & 1U) {
                    ++wins[i];
                    prob *= p_(players[i], players[j]);
                } else {
                    ++wins[j];
                    prob *= p_(players[j], players[i]);
                }
            }
            if (prob == 0.0) continue;
            const bool all_tied = std::all_of(wins.begin(), wins.end(), [&](int w) { return w == wins.front(); });
            if (replay && all_tied) {
                repeat += prob;
                continue;
            }
            // Blocks of equal wins, best first.
            std::vector<int> levels(wins.begin(), wins.end());
            std::sort(levels.begin(), levels.end(), std::greater<>());
            levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
            Distribution combined{{Order{}, prob}};
            for (int level : levels) {
                Order block;
                for (int i = 0; i < k; ++i)
                    if (wins[i] == level) block.push_back(players[i]);
                combined = append(combined, block.size() == 1 ? Distribution{{block, 1.0}} : resolve(block));
            }
            for (auto& [order, q] : combined) acc[order] += q;
        }
        out_.outcome_vectors += std::uint64_t{1} << bits;
        if (repeat_probability != nullptr) *repeat_probability = repeat;
        return {acc.begin(), acc.end()};
    }

    static Distribution append(const Distribution& head, const Distribution& tail) {
        Distribution out;
        out.reserve(head.size() * tail.size());
        for (const auto& [h, ph] : head)
            for (const auto& [t, pt] : tail) {
                Order joined = h;
                joined.insert(joined.end(), t.begin(), t.end());
                out.emplace_back(std::move(joined), ph * pt);
            }
        return out;
    }

    /// Replays among a tied set until it splits; after kTieReplayCap identical
    /// repetitions the order is uniform. Geometric in the repeat probability.
    Distribution resolve(const Order& tied) {
        Order key = tied;
        std::sort(key.begin(), key.end());
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;

        double q = 0.0;
        Distribution split = play(key, /*replay=*/true, &q);
        double series = 0.0;
        for (int t = 0; t < kTieReplayCap; ++t) series += std::pow(q, t);
        const double capped = std::pow(q, kTieReplayCap);
        out_.replay_cap_mass = std::max(out_.replay_cap_mass, capped);

        std::map<Order, double> acc;
        for (auto& [order, prob] : split) acc[order] += series * prob;
        if (capped > 0.0) {
            Order perm = key;
            double count = 0.0;
            do { count += 1.0; } while (std::next_permutation(perm.begin(), perm.end()));
            do { acc[perm] += capped / count; } while (std::next_permutation(perm.begin(), perm.end()));
        }
        Distribution dist(acc.begin(), acc.end());
        memo_.emplace(key, dist);
        return dist;
    }

    const Eigen::MatrixXd& p_;
    int legs_;
    OutcomeEnumeration& out_;
    std::map<Order, Distribution> memo_;
};

}  // namespace

OutcomeEnumeration enumerate(const FormatSpec& format, const WinMatrix& m) {
    validate(format);
    if (format.n != m.size()) throw std::invalid_argument("format size does not match the win matrix");
    const int n = format.n;
    OutcomeEnumeration out;
    out.format = format;
    const Eigen::MatrixXd& p = m.probabilities();

    std::unordered_map<std::uint64_t, double> packed;
    switch (format.kind) {
        case FormatKind::Knockout:
        case FormatKind::TripleKnockout: {
            if (n > 8) throw std::invalid_argument("knockout enumeration supports n <= 8");
            enumerate_knockout(n, format.kind == FormatKind::Knockout ? 1 : 3, p, packed, out);
            for (const auto& [key, prob] : packed) {
                ObservedRanking ranking;
                for (int v : unpack(key, n)) ranking.push_back(player_at(v));
                out.distribution[std::move(ranking)] += prob;
            }
            break;
        }
        case FormatKind::RoundRobin:
        case FormatKind::DoubleRoundRobin: {
            if (n > 5) throw std::invalid_argument("round-robin enumeration supports n <= 5");
            RoundRobinOracle oracle(p, format.kind == FormatKind::RoundRobin ? 1 : 2, out);
            Order players(static_cast<std::size_t>(n));
            std::iota(players.begin(), players.end(), 0);
            for (auto& [order, prob] : oracle.opening(players)) {
                ObservedRanking ranking;
                for (int v : order) ranking.push_back(player_at(v));
                out.distribution[std::move(ranking)] += prob;
            }
            break;
        }
        default:
            throw std::invalid_argument("format '" + format.label() + "' is not supported by the oracle");
    }

    out.place_probabilities = Eigen::MatrixXd::Zero(n, n);
    for (const auto& [ranking, prob] : out.distribution)
        for (int place = 0; place < n; ++place) out.place_probabilities(ranking[place].index(), place) += prob;
    return out;
}

MetricMoments metric_moments(const OutcomeEnumeration& e, const MetricSpec& metric) {
    double mean = 0.0;
    double second = 0.0;
    for (const auto& [ranking, prob] : e.distribution) {
        const double value = metric.evaluate(ranking);
        mean += prob * value;
        second += prob * value * value;
    }
    return {mean, std::max(0.0, second - mean * mean)};
}

double expected_metric(const OutcomeEnumeration& e, const MetricSpec& metric) { return metric_moments(e, metric).mean; }

double expected_metric(const OutcomeEnumeration& e, std::string_view metric) {
    return expected_metric(e, parse_metric(metric));
}

}  // namespace tourney
