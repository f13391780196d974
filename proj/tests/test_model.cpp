#include <doctest.h>

#include <algorithm>

#include "tourney/model.hpp"

using namespace tourney;

namespace {

ObservedRanking ranks(std::initializer_list<int> ids) {
    ObservedRanking out;
    for (int id : ids) out.push_back(PlayerId{id});
    return out;
}

TournamentResult four_player_result() {
    TournamentResult r;
    r.ranking = ranks({1, 2, 3, 4});
    r.matches = {
        {Stage{StageKind::Knockout, 1}, PlayerId{1}, PlayerId{2}, PlayerId{1}, true},
        {Stage{StageKind::Knockout, 1}, PlayerId{3}, PlayerId{4}, PlayerId{3}, true},
        {Stage{StageKind::Knockout, 2}, PlayerId{1}, PlayerId{3}, PlayerId{1}, true},
        {Stage{StageKind::Knockout, 2}, PlayerId{2}, PlayerId{4}, PlayerId{2}, true},
        {Stage{StageKind::TieBreak}, PlayerId{2}, PlayerId{4}, PlayerId{2}, false},
    };
    r.counted_matches = 4;
    return r;
}

}  // namespace

TEST_CASE("player ids are true ranks") {
    CHECK(player_at(0) == PlayerId{1});
    CHECK(PlayerId{7}.index() == 6);
    CHECK(PlayerId{2} < PlayerId{3});
}

TEST_CASE("validate_result accepts a consistent result") {
    CHECK(validate_result(four_player_result(), 4));
}

TEST_CASE("validate_result rejects duplicate players") {
    TournamentResult r = four_player_result();
    r.ranking = ranks({1, 1, 3, 4});
    CHECK_FALSE(validate_result(r, 4));
}

TEST_CASE("validate_result rejects a counted total that disagrees with the log") {
    TournamentResult r = four_player_result();
    r.counted_matches = 5;
    CHECK_FALSE(validate_result(r, 4));
}

TEST_CASE("validate_result checks each record") {
    SUBCASE("winner must be one of the players") {
        TournamentResult r = four_player_result();
        r.matches[0].winner = PlayerId{3};
        CHECK_FALSE(validate_result(r, 4));
    }
    SUBCASE("no self pairing") {
        TournamentResult r = four_player_result();
        r.matches[0].black = PlayerId{1};
        CHECK_FALSE(validate_result(r, 4));
    }
    SUBCASE("tie-break records are never counted") {
        TournamentResult r = four_player_result();
        r.matches[4].counted = true;
        r.counted_matches = 5;
        CHECK_FALSE(validate_result(r, 4));
    }
    SUBCASE("ids outside the field") {
        TournamentResult r = four_player_result();
        r.ranking = ranks({1, 2, 3, 5});
        CHECK_FALSE(validate_result(r, 4));
    }
    SUBCASE("wrong length") {
        TournamentResult r = four_player_result();
        CHECK_FALSE(validate_result(r, 5));
    }
}

TEST_CASE("identity ranking sorts back to the field") {
    ObservedRanking r = identity_ranking(6);
    std::reverse(r.begin(), r.end());
    CHECK(is_permutation_of_field(r, 6));
    std::sort(r.begin(), r.end());
    CHECK(r == identity_ranking(6));
}

TEST_CASE("stage labels") {
    CHECK(label(Stage{StageKind::Group, 0}) == "group-A");
    CHECK(label(Stage{StageKind::Knockout, 2}) == "ko-round-2");
    CHECK(label(Stage{StageKind::Swiss, 3}) == "swiss-round-3");
    CHECK(label(Stage{StageKind::TieBreak}) == "tiebreak");
    CHECK(Stage{StageKind::MergeTieBreak}.is_tiebreak());
    CHECK_FALSE(Stage{StageKind::Process, 1}.is_tiebreak());
}
