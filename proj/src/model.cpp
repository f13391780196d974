#include "tourney/model.hpp"

namespace tourney {

std::string label(Stage stage) {
    switch (stage.kind) {
        case StageKind::RoundRobin:
            return "round-robin";
        case StageKind::Group:
            return std::string("group-") + static_cast<char>('A' + stage.number);
        case StageKind::SecondGroup:
            return std::string("group2-") + static_cast<char>('A' + stage.number);
        case StageKind::Knockout:
            return "ko-round-" + std::to_string(stage.number);
        case StageKind::Draw:
            return "draw-round-" + std::to_string(stage.number);
        case StageKind::Process:
            return "process-round-" + std::to_string(stage.number);
        case StageKind::Swiss:
            return "swiss-round-" + std::to_string(stage.number);
        case StageKind::TieBreak:
            return "tiebreak";
        case StageKind::MergeTieBreak:
            return "merge-tiebreak";
    }
    return "unknown";
}

bool is_permutation_of_field(std::span<const PlayerId> ranking, int n) {
    if (n < 1 || static_cast<int>(ranking.size()) != n) return false;
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (PlayerId p : ranking) {
        if (p.rank < 1 || p.rank > n || seen[p.index()]) return false;
        seen[p.index()] = true;
    }
    return true;
}

bool validate_result(const TournamentResult& result, int n) {
    if (n < 2 || !is_permutation_of_field(result.ranking, n)) return false;
    int counted = 0;
    for (const MatchRecord& m : result.matches) {
        if (m.white == m.black) return false;
        if (m.winner != m.white && m.winner != m.black) return false;
        if (m.counted == m.stage.is_tiebreak()) return false;
        if (m.counted) ++counted;
    }
    return counted == result.counted_matches;
}

ObservedRanking identity_ranking(int n) {
    ObservedRanking r(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) r[i] = player_at(i);
    return r;
}

}  // namespace tourney
