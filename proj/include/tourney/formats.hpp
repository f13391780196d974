#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tourney/model.hpp"
#include "tourney/prob.hpp"
#include "tourney/random.hpp"

namespace tourney {

enum class FormatKind : std::uint8_t {
    RoundRobin,
    DoubleRoundRobin,
    Knockout,
    TripleKnockout,
    DrawAndProcess,
    MultiStage8,
    MultiStage4,
    DoubleGroup,
    Swiss,
};

inline constexpr FormatKind kAllFormats[] = {
    FormatKind::RoundRobin,    FormatKind::DoubleRoundRobin, FormatKind::Knockout,
    FormatKind::TripleKnockout, FormatKind::DrawAndProcess,  FormatKind::MultiStage8,
    FormatKind::MultiStage4,   FormatKind::DoubleGroup,      FormatKind::Swiss,
};

/// CLI token: rr, drr, ko, ko3, dp, ms8, ms4, dg, swiss.
std::string_view format_token(FormatKind kind);
std::optional<FormatKind> parse_format_token(std::string_view token);

struct FormatSpec {
    FormatKind kind = FormatKind::Knockout;
    int n = 32;
    int swiss_rounds = 0;

    /// "swiss-5", "ko", ...
    std::string label() const;
};

/// Throws std::invalid_argument when the field size or round count does not fit the format.
void validate(const FormatSpec& spec);

/// Number of counted matches every tournament of this format plays.
int counted_match_budget(const FormatSpec& spec);

/// How draws that the formats leave to chance are made.
enum class Seeding : std::uint8_t {
    Random,      // every format's published behaviour
    ByStrength,  // test hook: brackets, groups and Swiss orders follow true strength
};

struct FormatOptions {
    Seeding seeding = Seeding::Random;
    /// Group-fed knockouts never pair two players of the same group in round 1.
    bool constrain_group_draw = true;
};

/// Replays of an identical tie set before the remaining tie is broken at random.
inline constexpr int kTieReplayCap = 10;

/// Bracket order; slot 2k meets slot 2k+1 in round 1 (0-based).
using Bracket = std::vector<PlayerId>;

bool is_valid_bracket(std::span<const PlayerId> bracket);

/// Reverses the lowest `bits` bits of `value`.
constexpr std::uint32_t bit_reverse(std::uint32_t value, int bits) {
    std::uint32_t out = 0;
    for (int b = 0; b < bits; ++b) out |= ((value >> b) & 1U) << (bits - 1 - b);
    return out;
}

/// Bracket in which a placement knockout with no upsets reproduces the order of `players`.
Bracket placement_order(std::span<const PlayerId> players);

Bracket random_bracket(std::span<const PlayerId> players, RandomStream& rng);

/// Process bracket of draw-and-process: the player at draw slot s moves to slot bit_reverse(s).
Bracket process_bracket(std::span<const PlayerId> draw);

/// Draw bracket of 1..n whose draw and process knockouts both reproduce the true
/// order when the stronger player always wins (test hook; n a power of two, 8..32).
Bracket strength_seeded_draw(int n);

/// Single (`double_round = false`) or double round-robin over `players`, ties
/// re-ranked by recursive uncounted mini round-robins.
TournamentResult run_round_robin(const WinMatrix& m, std::span<const PlayerId> players, bool double_round,
                                 RandomStream& rng);

/// Full placement knockout: losers keep playing, so every player gets a unique place.
TournamentResult run_placement_knockout(const WinMatrix& m, const Bracket& bracket, RandomStream& rng);

/// Placement knockout in which every pairing plays three matches.
TournamentResult run_triple_knockout(const WinMatrix& m, const Bracket& bracket, RandomStream& rng);

TournamentResult run_draw_and_process(const WinMatrix& m, const Bracket& draw_bracket, RandomStream& rng);

struct MergeResult {
    ObservedRanking ranking;
    std::vector<MatchRecord> tiebreaks;
};

/// Position-by-position merge of two strict rankings of the same players.
MergeResult merge_rankings(std::span<const PlayerId> draw, std::span<const PlayerId> process, const WinMatrix& m,
                           RandomStream& rng);

/// Round-robin groups feeding an upper and a lower placement knockout. `groups` is 4 or 8.
TournamentResult run_multistage(const WinMatrix& m, int groups, RandomStream& rng, const FormatOptions& options = {});

/// Two group stages followed by four 8-player placement knockouts (n = 32).
TournamentResult run_double_group(const WinMatrix& m, RandomStream& rng, const FormatOptions& options = {});

/// Stage-two group composition from the ordered top halves of four stage-one groups.
std::vector<std::vector<PlayerId>> cross_groups(std::span<const std::vector<PlayerId>> stage_one_halves);

/// Runs any format on the field 1..spec.n of `m`.
TournamentResult run_format(const FormatSpec& spec, const WinMatrix& m, RandomStream& rng,
                            const FormatOptions& options = {});

}  // namespace tourney
