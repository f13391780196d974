#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tourney/formats.hpp"
#include "tourney/model.hpp"
#include "tourney/prob.hpp"
#include "tourney/random.hpp"

namespace tourney {

/// No perfect matching without rematches exists for the round.
class UnpairableError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using Pairing = std::vector<std::pair<PlayerId, PlayerId>>;

/// Scores, meetings and incrementally maintained Buchholz values of a Swiss event (n <= 64).
class SwissState {
  public:
    explicit SwissState(int n);

    int size() const { return n_; }
    int round() const { return round_; }
    int score(PlayerId p) const { return scores_[p.index()]; }
    double buchholz(PlayerId p) const { return buchholz_[p.index()]; }
    bool played(PlayerId a, PlayerId b) const { return (met_[a.index()] >> b.index()) & 1U; }
    bool beat(PlayerId winner, PlayerId loser) const { return (beaten_[winner.index()] >> loser.index()) & 1U; }
    /// Bit j set iff the player has met player j + 1.
    std::uint64_t opponents_mask(PlayerId p) const { return met_[p.index()]; }
    std::span<const int> scores() const { return scores_; }
    const std::vector<MatchRecord>& history() const { return history_; }
    /// Number of distinct pairs that have met.
    int pairs_played() const;

    /// Plays one round: every pair must be new and cover every player once.
    void apply_round(const Pairing& pairs, const WinMatrix& m, RandomStream& rng);
    /// Records a decided match of the current round (used by apply_round and tests).
    void record(PlayerId white, PlayerId black, PlayerId winner);
    void close_round() { ++round_; }

  private:
    int n_;
    int round_ = 0;
    std::vector<int> scores_;
    std::vector<double> buchholz_;
    std::vector<std::uint64_t> met_;
    std::vector<std::uint64_t> beaten_;
    std::vector<MatchRecord> history_;
};

/// Players by score (descending); equal scores keep the order given in `tie_order`.
std::vector<PlayerId> score_order(const SwissState& state, std::vector<PlayerId> tie_order);

/// The round's pairing order: random order within score groups (strength order under Seeding::ByStrength).
std::vector<PlayerId> pairing_order(const SwissState& state, RandomStream& rng, Seeding seeding = Seeding::Random);

/// Pairs the first unpaired player of `order` with the earliest compatible
/// opponent that still leaves a perfect matching of the rest; throws UnpairableError.
Pairing pair_in_order(const SwissState& state, std::span<const PlayerId> order);

/// Round 1: a uniformly random perfect matching. Later: pair_in_order(pairing_order(...)).
Pairing pair_round(const SwissState& state, RandomStream& rng, Seeding seeding = Seeding::Random);

/// Sum of final scores of each player's opponents, recomputed from the match log.
std::vector<double> buchholz(std::span<const MatchRecord> history, std::span<const int> scores);

/// Final standings: wins, then Buchholz, then head-to-head among the tied players, then random.
ObservedRanking swiss_standings(const SwissState& state, RandomStream& rng, Seeding seeding = Seeding::Random);

TournamentResult run_swiss(const WinMatrix& m, int n, int rounds, RandomStream& rng,
                           Seeding seeding = Seeding::Random);

}  // namespace tourney
