#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tourney {

/// A player, identified by its position in the true power ranking (1 = strongest).
struct PlayerId {
    int rank = 0;

    constexpr auto operator<=>(const PlayerId&) const = default;
    constexpr int index() const { return rank - 1; }
};

constexpr PlayerId player_at(int index) { return PlayerId{index + 1}; }

/// Observed finishing order; position 0 is the tournament winner.
using ObservedRanking = std::vector<PlayerId>;

enum class StageKind : std::uint8_t {
    RoundRobin,
    Group,
    SecondGroup,
    Knockout,
    Draw,
    Process,
    Swiss,
    TieBreak,       // replayed mini tournament among tied players
    MergeTieBreak,  // draw-and-process merge conflict
};

/// Where a match was played. `number` is a round (1-based) or a group index (0-based).
struct Stage {
    StageKind kind = StageKind::RoundRobin;
    int number = 0;

    constexpr bool operator==(const Stage&) const = default;
    constexpr bool is_tiebreak() const {
        return kind == StageKind::TieBreak || kind == StageKind::MergeTieBreak;
    }
};

/// Human-readable stage label, e.g. "group-A", "ko-round-2", "swiss-round-3", "tiebreak".
std::string label(Stage stage);

struct MatchRecord {
    Stage stage;
    PlayerId white;
    PlayerId black;
    PlayerId winner;
    bool counted = true;

    PlayerId loser() const { return winner == white ? black : white; }
};

struct TournamentResult {
    ObservedRanking ranking;
    std::vector<MatchRecord> matches;
    int counted_matches = 0;
};

/// True iff `ranking` contains each of 1..n exactly once.
bool is_permutation_of_field(std::span<const PlayerId> ranking, int n);

/// Checks the ranking is a permutation of 1..n, every record is well formed
/// (distinct players, winner among them, counted exactly when not a tie-break)
/// and `counted_matches` agrees with the log.
bool validate_result(const TournamentResult& result, int n);

/// Players 1..n in true order.
ObservedRanking identity_ranking(int n);

}  // namespace tourney
