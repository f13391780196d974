#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string_view>

#include "tourney/formats.hpp"
#include "tourney/metrics.hpp"
#include "tourney/prob.hpp"

namespace tourney {

/// Largest number of (bracket, outcome vector) combinations enumerate() will visit.
inline constexpr std::uint64_t kEnumerationLimit = std::uint64_t{1} << 28;

/// Exact distribution of final rankings of a small tournament.
struct OutcomeEnumeration {
    FormatSpec format;
    std::map<ObservedRanking, double> distribution;
    /// (player index, place index) -> probability of that player finishing in that place.
    Eigen::MatrixXd place_probabilities;
    /// Outcome vectors visited, summed over brackets and tie-break sub-tournaments.
    std::uint64_t outcome_vectors = 0;
    /// Largest probability, over all tie sets met, that a tie reached the replay cap
    /// and was broken uniformly at random.
    double replay_cap_mass = 0.0;

    double total_probability() const;
};

/// Enumerates every outcome vector (one entry per match) of a round-robin
/// (n <= 5), double round-robin (n <= 5), knockout or triple knockout
/// (n <= 8) under uniformly random seeding. Throws std::invalid_argument for
/// other formats or instances above kEnumerationLimit.
OutcomeEnumeration enumerate(const FormatSpec& format, const WinMatrix& m);

struct MetricMoments {
    double mean = 0.0;
    double variance = 0.0;
};

MetricMoments metric_moments(const OutcomeEnumeration& e, const MetricSpec& metric);
double expected_metric(const OutcomeEnumeration& e, const MetricSpec& metric);
/// Metric by name (see parse_metric); throws std::invalid_argument on unknown names.
double expected_metric(const OutcomeEnumeration& e, std::string_view metric);

}  // namespace tourney
