#include "tourney/formats.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <mutex>
#include <stdexcept>

#include "tourney/swiss.hpp"

namespace tourney {

std::string_view format_token(FormatKind kind) {
    switch (kind) {
        case FormatKind::RoundRobin: return "rr";
        case FormatKind::DoubleRoundRobin: return "drr";
        case FormatKind::Knockout: return "ko";
        case FormatKind::TripleKnockout: return "ko3";
        case FormatKind::DrawAndProcess: return "dp";
        case FormatKind::MultiStage8: return "ms8";
        case FormatKind::MultiStage4: return "ms4";
        case FormatKind::DoubleGroup: return "dg";
        case FormatKind::Swiss: return "swiss";
    }
    return "?";
}

std::optional<FormatKind> parse_format_token(std::string_view token) {
    for (FormatKind kind : kAllFormats)
        if (format_token(kind) == token) return kind;
    return std::nullopt;
}

std::string FormatSpec::label() const {
    std::string out(format_token(kind));
    if (kind == FormatKind::Swiss) out += "-" + std::to_string(swiss_rounds);
    return out;
}

namespace {

bool is_power_of_two(int n) { return n > 0 && std::has_single_bit(static_cast<unsigned>(n)); }

int log2_exact(int n) { return std::countr_zero(static_cast<unsigned>(n)); }

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

}  // namespace

void validate(const FormatSpec& spec) {
    const int n = spec.n;
    require(n >= 2, "a tournament needs at least 2 players");
    require(spec.kind == FormatKind::Swiss || spec.swiss_rounds == 0, "rounds apply to the Swiss-system only");
    switch (spec.kind) {
        case FormatKind::RoundRobin:
        case FormatKind::DoubleRoundRobin:
            return;
        case FormatKind::Knockout:
        case FormatKind::TripleKnockout:
            require(is_power_of_two(n) && n >= 4, "knockout formats need a power of two n >= 4");
            return;
        case FormatKind::DrawAndProcess:
            require(is_power_of_two(n) && n >= 8, "draw and process needs a power of two n >= 8");
            return;
        case FormatKind::MultiStage8:
            require(is_power_of_two(n) && n >= 16, "multi-stage with 8 groups needs a power of two n >= 16");
            return;
        case FormatKind::MultiStage4:
            require(is_power_of_two(n) && n >= 8, "multi-stage with 4 groups needs a power of two n >= 8");
            return;
        case FormatKind::DoubleGroup:
            require(n == 32, "double group is defined for 32 players");
            return;
        case FormatKind::Swiss:
            require(n % 2 == 0, "the Swiss-system needs an even number of players");
            require(n <= 64, "the Swiss-system supports at most 64 players");
            require(spec.swiss_rounds >= 1 && spec.swiss_rounds <= n - 1, "Swiss rounds must lie in 1..n-1");
            return;
    }
}

int counted_match_budget(const FormatSpec& spec) {
    validate(spec);
    const int n = spec.n;
    const auto knockout = [](int size) { return size * log2_exact(size) / 2; };
    const auto round_robin = [](int size) { return size * (size - 1) / 2; };
    switch (spec.kind) {
        case FormatKind::RoundRobin: return round_robin(n);
        case FormatKind::DoubleRoundRobin: return 2 * round_robin(n);
        case FormatKind::Knockout: return knockout(n);
        case FormatKind::TripleKnockout: return 3 * knockout(n);
        case FormatKind::DrawAndProcess: return 2 * knockout(n);
        case FormatKind::MultiStage8: return 8 * round_robin(n / 8) + 2 * knockout(n / 2);
        case FormatKind::MultiStage4: return 4 * round_robin(n / 4) + 2 * knockout(n / 2);
        case FormatKind::DoubleGroup: return 4 * round_robin(8) + 8 * round_robin(4) + 4 * knockout(8);
        case FormatKind::Swiss: return n / 2 * spec.swiss_rounds;
    }
    return 0;
}

bool is_valid_bracket(std::span<const PlayerId> bracket) {
    if (!is_power_of_two(static_cast<int>(bracket.size()))) return false;
    std::vector<PlayerId> sorted(bracket.begin(), bracket.end());
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end() && sorted.front().rank >= 1;
}

Bracket placement_order(std::span<const PlayerId> players) {
    const int size = static_cast<int>(players.size());
    require(is_power_of_two(size), "bracket size must be a power of two");
    const int bits = log2_exact(size);
    Bracket bracket(players.size());
    for (int slot = 0; slot < size; ++slot) bracket[slot] = players[bit_reverse(static_cast<std::uint32_t>(slot), bits)];
    return bracket;
}

Bracket random_bracket(std::span<const PlayerId> players, RandomStream& rng) {
    Bracket bracket(players.begin(), players.end());
    rng.shuffle(std::span(bracket));
    return bracket;
}

Bracket process_bracket(std::span<const PlayerId> draw) {
    const int size = static_cast<int>(draw.size());
    require(is_power_of_two(size), "bracket size must be a power of two");
    const int bits = log2_exact(size);
    Bracket process(draw.size());
    for (int slot = 0; slot < size; ++slot) process[bit_reverse(static_cast<std::uint32_t>(slot), bits)] = draw[slot];
    return process;
}

namespace {

/// Finishing order of a placement knockout in which the lower rank always wins.
void no_upset_knockout(std::span<const int> bracket, std::vector<int>& out) {
    if (bracket.size() == 1) {
        out.push_back(bracket.front());
        return;
    }
    std::vector<int> winners, losers;
    for (std::size_t k = 0; k < bracket.size(); k += 2) {
        winners.push_back(std::min(bracket[k], bracket[k + 1]));
        losers.push_back(std::max(bracket[k], bracket[k + 1]));
    }
    no_upset_knockout(winners, out);
    no_upset_knockout(losers, out);
}

int disorder(std::span<const int> bracket) {
    std::vector<int> order;
    order.reserve(bracket.size());
    no_upset_knockout(bracket, order);
    int count = 0;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (std::size_t j = i + 1; j < order.size(); ++j) count += order[i] > order[j] ? 1 : 0;
    return count;
}

/// Local search over swaps; deterministic because the stream seed is fixed.
std::vector<int> search_seeded_draw(int n) {
    const int bits = log2_exact(n);
    std::vector<int> draw(static_cast<std::size_t>(n)), process(draw.size());
    const auto cost = [&] {
        for (int s = 0; s < n; ++s) process[bit_reverse(static_cast<std::uint32_t>(s), bits)] = draw[s];
        return disorder(draw) + disorder(process);
    };
    RandomStream rng(0x5EEDED5EEDULL + static_cast<std::uint64_t>(n));
    for (int restart = 0; restart < 1000; ++restart) {
        for (int i = 0; i < n; ++i) draw[i] = i + 1;
        rng.shuffle(std::span(draw));
        int current = cost();
        for (int step = 0; step < 100000 && current > 0; ++step) {
            const auto i = rng.below(static_cast<std::uint64_t>(n));
            const auto j = rng.below(static_cast<std::uint64_t>(n));
            std::swap(draw[i], draw[j]);
            const int next = cost();
            if (next <= current) current = next;
            else std::swap(draw[i], draw[j]);
        }
        if (current == 0) return draw;
    }
    throw std::runtime_error("no strength-seeded draw found for n = " + std::to_string(n));
}

}  // namespace

Bracket strength_seeded_draw(int n) {
    require(is_power_of_two(n) && n >= 8 && n <= 32, "strength-seeded draw supports n in {8, 16, 32}");
    static std::mutex mutex;
    static std::map<int, std::vector<int>> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, search_seeded_draw(n)).first;
    Bracket bracket;
    for (int rank : it->second) bracket.push_back(PlayerId{rank});
    return bracket;
}

namespace {

/// Plays matches into a shared log and tracks the counted total.
class Arena {
  public:
    Arena(const WinMatrix& m, RandomStream& rng, std::vector<MatchRecord>& log) : m_(m), rng_(rng), log_(log) {}

    PlayerId play(PlayerId white, PlayerId black, Stage stage) {
        const PlayerId winner = sample_match(m_, white, black, rng_);
        const bool counted = !stage.is_tiebreak();
        log_.push_back(MatchRecord{stage, white, black, winner, counted});
        if (counted) ++counted_;
        return winner;
    }

    RandomStream& rng() { return rng_; }
    const WinMatrix& matrix() const { return m_; }
    int counted() const { return counted_; }

  private:
    const WinMatrix& m_;
    RandomStream& rng_;
    std::vector<MatchRecord>& log_;
    int counted_ = 0;
};

std::vector<int> play_all_pairs(Arena& arena, std::span<const PlayerId> players, int legs, Stage stage) {
    std::vector<int> wins(players.size(), 0);
    for (std::size_t i = 0; i < players.size(); ++i)
        for (std::size_t j = i + 1; j < players.size(); ++j)
            for (int leg = 0; leg < legs; ++leg) {
                // Alternate sides between legs; the model has no side advantage.
                const bool swap = leg % 2 == 1;
                const PlayerId w = arena.play(swap ? players[j] : players[i], swap ? players[i] : players[j], stage);
                ++wins[w == players[i] ? i : j];
            }
    return wins;
}

void resolve_tie(Arena& arena, std::vector<PlayerId> tied, int legs, std::vector<PlayerId>& out);

/// Appends `players` ordered by `wins`, resolving each tied block recursively.
void emit_by_wins(Arena& arena, std::span<const PlayerId> players, std::span<const int> wins, int legs,
                  std::vector<PlayerId>& out) {
    std::vector<std::size_t> order(players.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return wins[a] > wins[b]; });
    for (std::size_t begin = 0; begin < order.size();) {
        std::size_t end = begin + 1;
        while (end < order.size() && wins[order[end]] == wins[order[begin]]) ++end;
        if (end - begin == 1) {
            out.push_back(players[order[begin]]);
        } else {
            std::vector<PlayerId> tied;
            tied.reserve(end - begin);
            for (std::size_t i = begin; i < end; ++i) tied.push_back(players[order[i]]);
            resolve_tie(arena, std::move(tied), legs, out);
        }
        begin = end;
    }
}

void resolve_tie(Arena& arena, std::vector<PlayerId> tied, int legs, std::vector<PlayerId>& out) {
    for (int replays = 0;;) {
        const std::vector<int> wins = play_all_pairs(arena, tied, legs, Stage{StageKind::TieBreak});
        if (std::all_of(wins.begin(), wins.end(), [&](int w) { return w == wins.front(); })) {
            if (++replays == kTieReplayCap) {
                arena.rng().shuffle(std::span(tied));
                out.insert(out.end(), tied.begin(), tied.end());
                return;
            }
            continue;
        }
        emit_by_wins(arena, tied, wins, legs, out);
        return;
    }
}

std::vector<PlayerId> rank_round_robin(Arena& arena, std::span<const PlayerId> players, int legs, Stage stage) {
    std::vector<PlayerId> out;
    out.reserve(players.size());
    const std::vector<int> wins = play_all_pairs(arena, players, legs, stage);
    emit_by_wins(arena, players, wins, legs, out);
    return out;
}

void rank_knockout(Arena& arena, std::span<const PlayerId> bracket, int games, StageKind kind, int round,
                   std::vector<PlayerId>& out) {
    if (bracket.size() == 1) {
        out.push_back(bracket.front());
        return;
    }
    const std::size_t half = bracket.size() / 2;
    std::vector<PlayerId> winners(half), losers(half);
    for (std::size_t k = 0; k < half; ++k) {
        const PlayerId a = bracket[2 * k];
        const PlayerId b = bracket[2 * k + 1];
        int a_wins = 0;
        for (int g = 0; g < games; ++g)
            if (arena.play(a, b, Stage{kind, round}) == a) ++a_wins;
        const bool a_advances = 2 * a_wins > games;
        winners[k] = a_advances ? a : b;
        losers[k] = a_advances ? b : a;
    }
    rank_knockout(arena, winners, games, kind, round + 1, out);
    rank_knockout(arena, losers, games, kind, round + 1, out);
}

std::vector<PlayerId> rank_knockout(Arena& arena, std::span<const PlayerId> bracket, int games, StageKind kind) {
    std::vector<PlayerId> out;
    out.reserve(bracket.size());
    rank_knockout(arena, bracket, games, kind, 1, out);
    return out;
}

TournamentResult finish(ObservedRanking ranking, std::vector<MatchRecord> log, const Arena& arena) {
    TournamentResult result;
    result.ranking = std::move(ranking);
    result.matches = std::move(log);
    result.counted_matches = arena.counted();
    return result;
}

void require_bracket(const Bracket& bracket) {
    require(bracket.size() >= 2 && is_valid_bracket(bracket), "bracket must hold distinct players, power-of-two size");
}

std::vector<std::vector<PlayerId>> deal_groups(int n, int groups, RandomStream& rng, Seeding seeding) {
    ObservedRanking field = identity_ranking(n);
    std::vector<std::vector<PlayerId>> out(static_cast<std::size_t>(groups));
    if (seeding == Seeding::ByStrength) {
        for (int i = 0; i < n; ++i) out[i % groups].push_back(field[i]);
        return out;
    }
    rng.shuffle(std::span(field));
    const int size = n / groups;
    for (int i = 0; i < n; ++i) out[i / size].push_back(field[i]);
    return out;
}

/// Knockout bracket for group qualifiers; `group_of` is indexed by PlayerId::index().
Bracket draw_group_bracket(std::vector<PlayerId> qualifiers, std::span<const int> group_of, RandomStream& rng,
                           const FormatOptions& options) {
    if (options.seeding == Seeding::ByStrength) {
        std::sort(qualifiers.begin(), qualifiers.end());
        return placement_order(qualifiers);
    }
    for (;;) {
        rng.shuffle(std::span(qualifiers));
        if (!options.constrain_group_draw) return qualifiers;
        bool clash = false;
        for (std::size_t k = 0; k + 1 < qualifiers.size() && !clash; k += 2)
            clash = group_of[qualifiers[k].index()] == group_of[qualifiers[k + 1].index()];
        if (!clash) return qualifiers;
    }
}

}  // namespace

TournamentResult run_round_robin(const WinMatrix& m, std::span<const PlayerId> players, bool double_round,
                                 RandomStream& rng) {
    require(players.size() >= 2, "round-robin needs at least 2 players");
    std::vector<MatchRecord> log;
    Arena arena(m, rng, log);
    ObservedRanking ranking = rank_round_robin(arena, players, double_round ? 2 : 1, Stage{StageKind::RoundRobin});
    return finish(std::move(ranking), std::move(log), arena);
}

TournamentResult run_placement_knockout(const WinMatrix& m, const Bracket& bracket, RandomStream& rng) {
    require_bracket(bracket);
    std::vector<MatchRecord> log;
    Arena arena(m, rng, log);
    ObservedRanking ranking = rank_knockout(arena, bracket, 1, StageKind::Knockout);
    return finish(std::move(ranking), std::move(log), arena);
}

TournamentResult run_triple_knockout(const WinMatrix& m, const Bracket& bracket, RandomStream& rng) {
    require_bracket(bracket);
    std::vector<MatchRecord> log;
    Arena arena(m, rng, log);
    ObservedRanking ranking = rank_knockout(arena, bracket, 3, StageKind::Knockout);
    return finish(std::move(ranking), std::move(log), arena);
}

MergeResult merge_rankings(std::span<const PlayerId> draw, std::span<const PlayerId> process, const WinMatrix& m,
                           RandomStream& rng) {
    require(draw.size() == process.size(), "merged rankings must have equal length");
    std::vector<PlayerId> a(draw.begin(), draw.end()), b(process.begin(), process.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    require(a == b && std::adjacent_find(a.begin(), a.end()) == a.end(),
            "merged rankings must be permutations of the same players");

    MergeResult result;
    result.ranking.reserve(draw.size());
    int max_rank = a.empty() ? 0 : a.back().rank;
    std::vector<bool> placed(static_cast<std::size_t>(max_rank), false);
    Arena arena(m, rng, result.tiebreaks);
    const auto place = [&](PlayerId p) {
        result.ranking.push_back(p);
        placed[p.index()] = true;
    };
    for (std::size_t pos = 0; pos < draw.size(); ++pos) {
        const PlayerId x = draw[pos];
        const PlayerId y = process[pos];
        if (x == y) {
            if (!placed[x.index()]) place(x);
            continue;
        }
        const bool x_placed = placed[x.index()];
        const bool y_placed = placed[y.index()];
        if (x_placed && y_placed) continue;
        if (x_placed != y_placed) {
            place(x_placed ? y : x);
            continue;
        }
        const PlayerId winner = arena.play(x, y, Stage{StageKind::MergeTieBreak});
        place(winner);
        place(winner == x ? y : x);
    }
    return result;
}

TournamentResult run_draw_and_process(const WinMatrix& m, const Bracket& draw_bracket, RandomStream& rng) {
    require_bracket(draw_bracket);
    require(draw_bracket.size() >= 8, "draw and process needs at least 8 players");
    std::vector<MatchRecord> log;
    Arena arena(m, rng, log);
    const ObservedRanking draw = rank_knockout(arena, draw_bracket, 1, StageKind::Draw);
    const ObservedRanking process = rank_knockout(arena, process_bracket(draw_bracket), 1, StageKind::Process);
    MergeResult merged = merge_rankings(draw, process, m, rng);
    log.insert(log.end(), merged.tiebreaks.begin(), merged.tiebreaks.end());
    return finish(std::move(merged.ranking), std::move(log), arena);
}

TournamentResult run_multistage(const WinMatrix& m, int groups, RandomStream& rng, const FormatOptions& options) {
    require(groups == 4 || groups == 8, "multi-stage supports 4 or 8 groups");
    const int n = m.size();
    validate(FormatSpec{groups == 8 ? FormatKind::MultiStage8 : FormatKind::MultiStage4, n, 0});

    std::vector<MatchRecord> log;
    Arena arena(m, rng, log);
    const auto members = deal_groups(n, groups, rng, options.seeding);
    std::vector<int> group_of(static_cast<std::size_t>(n));
    std::vector<PlayerId> upper, lower;
    for (int g = 0; g < groups; ++g) {
        for (PlayerId p : members[g]) group_of[p.index()] = g;
        const auto standings = rank_round_robin(arena, members[g], 1, Stage{StageKind::Group, g});
        const std::size_t half = standings.size() / 2;
        upper.insert(upper.end(), standings.begin(), standings.begin() + static_cast<std::ptrdiff_t>(half));
        lower.insert(lower.end(), standings.begin() + static_cast<std::ptrdiff_t>(half), standings.end());
    }
    const Bracket upper_bracket = draw_group_bracket(std::move(upper), group_of, rng, options);
    const Bracket lower_bracket = draw_group_bracket(std::move(lower), group_of, rng, options);
    ObservedRanking ranking = rank_knockout(arena, upper_bracket, 1, StageKind::Knockout);
    const ObservedRanking bottom = rank_knockout(arena, lower_bracket, 1, StageKind::Knockout);
    ranking.insert(ranking.end(), bottom.begin(), bottom.end());
    return finish(std::move(ranking), std::move(log), arena);
}

std::vector<std::vector<PlayerId>> cross_groups(std::span<const std::vector<PlayerId>> stage_one_halves) {
    require(stage_one_halves.size() == 4, "crossing needs four groups");
    for (const auto& half : stage_one_halves) require(half.size() == 4, "crossing needs four players per group");
    // Group q takes place p from stage-one group q xor p:
    // {A1,B2,C3,D4}, {B1,A2,D3,C4}, {C1,D2,A3,B4}, {D1,C2,B3,A4}.
    std::vector<std::vector<PlayerId>> out(4);
    for (std::size_t q = 0; q < 4; ++q)
        for (std::size_t p = 0; p < 4; ++p) out[q].push_back(stage_one_halves[q ^ p][p]);
    return out;
}

TournamentResult run_double_group(const WinMatrix& m, RandomStream& rng, const FormatOptions& options) {
    const int n = m.size();
    validate(FormatSpec{FormatKind::DoubleGroup, n, 0});

    std::vector<MatchRecord> log;
    Arena arena(m, rng, log);
    const auto members = deal_groups(n, 4, rng, options.seeding);
    std::vector<std::vector<PlayerId>> tops, bottoms;
    for (int g = 0; g < 4; ++g) {
        const auto standings = rank_round_robin(arena, members[g], 1, Stage{StageKind::Group, g});
        tops.emplace_back(standings.begin(), standings.begin() + 4);
        bottoms.emplace_back(standings.begin() + 4, standings.end());
    }

    ObservedRanking ranking;
    ranking.reserve(static_cast<std::size_t>(n));
    int stage_two_index = 0;
    for (const auto* halves : {&tops, &bottoms}) {
        std::vector<int> group_of(static_cast<std::size_t>(n), -1);
        std::vector<PlayerId> better, worse;
        for (const auto& group : cross_groups(*halves)) {
            for (PlayerId p : group) group_of[p.index()] = stage_two_index;
            const auto standings = rank_round_robin(arena, group, 1, Stage{StageKind::SecondGroup, stage_two_index});
            better.insert(better.end(), standings.begin(), standings.begin() + 2);
            worse.insert(worse.end(), standings.begin() + 2, standings.end());
            ++stage_two_index;
        }
        for (auto* block : {&better, &worse}) {
            const Bracket bracket = draw_group_bracket(std::move(*block), group_of, rng, options);
            const ObservedRanking part = rank_knockout(arena, bracket, 1, StageKind::Knockout);
            ranking.insert(ranking.end(), part.begin(), part.end());
        }
    }
    return finish(std::move(ranking), std::move(log), arena);
}

TournamentResult run_format(const FormatSpec& spec, const WinMatrix& m, RandomStream& rng,
                            const FormatOptions& options) {
    validate(spec);
    require(spec.n == m.size(), "format size does not match the win matrix");
    const ObservedRanking field = identity_ranking(spec.n);
    const bool seeded = options.seeding == Seeding::ByStrength;
    const auto initial_bracket = [&] { return seeded ? placement_order(field) : random_bracket(field, rng); };
    switch (spec.kind) {
        case FormatKind::RoundRobin: return run_round_robin(m, field, false, rng);
        case FormatKind::DoubleRoundRobin: return run_round_robin(m, field, true, rng);
        case FormatKind::Knockout: return run_placement_knockout(m, initial_bracket(), rng);
        case FormatKind::TripleKnockout: return run_triple_knockout(m, initial_bracket(), rng);
        case FormatKind::DrawAndProcess:
            return run_draw_and_process(m, seeded ? strength_seeded_draw(spec.n) : random_bracket(field, rng), rng);
        case FormatKind::MultiStage8: return run_multistage(m, 8, rng, options);
        case FormatKind::MultiStage4: return run_multistage(m, 4, rng, options);
        case FormatKind::DoubleGroup: return run_double_group(m, rng, options);
        case FormatKind::Swiss: return run_swiss(m, spec.n, spec.swiss_rounds, rng, options.seeding);
    }
    throw std::invalid_argument("unknown format");
}

}  // namespace tourney
