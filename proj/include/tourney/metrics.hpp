#pragma once

#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tourney/model.hpp"

namespace tourney {

/// Pairs ranked against their true order (Kendall tau distance to the identity).
std::int64_t inversions(std::span<const PlayerId> ranking);

/// Sum over inverted pairs of 1 / log_base(s + 1), where s is the true rank of
/// the stronger (overtaken) player of the pair.
double weighted_inversions(std::span<const PlayerId> ranking, double log_base = std::numbers::e);

/// Sum of true ranks in observed places 1..k divided by k(k+1)/2.
double avg_rank_top(std::span<const PlayerId> ranking, int k);

struct MetricVector {
    std::int64_t inversions = 0;
    double weighted_inversions = 0.0;
    std::map<int, double> avg_rank_top;
};

MetricVector compute_metrics(std::span<const PlayerId> ranking, std::span<const int> top_k = {},
                             double log_base = std::numbers::e);

enum class MetricKind : std::uint8_t { Inversions, WeightedInversions, AvgRankTop };

/// A metric with its parameter: `log_base` for weighted inversions, `k` for the top-k average.
struct MetricSpec {
    MetricKind kind = MetricKind::Inversions;
    int k = 1;
    double log_base = std::numbers::e;

    static MetricSpec inversion_count() { return {MetricKind::Inversions}; }
    static MetricSpec weighted(double base = std::numbers::e) { return {MetricKind::WeightedInversions, 1, base}; }
    static MetricSpec top(int k) { return {MetricKind::AvgRankTop, k}; }

    bool is_integral() const { return kind == MetricKind::Inversions; }
    double evaluate(std::span<const PlayerId> ranking) const;
};

/// "inversions", "weighted_inversions" (natural log), "weighted_inversions:2", "avg_rank_top_8".
std::string metric_name(const MetricSpec& spec);

/// Inverse of metric_name; also accepts "avg_rank_top:K" and "weighted_inversions:BASE".
/// Throws std::invalid_argument on unknown names.
MetricSpec parse_metric(std::string_view name);

/// inversions, weighted inversions (given base), then avg_rank_top for each k.
std::vector<MetricSpec> default_metrics(std::span<const int> top_k = std::span<const int>{},
                                        double log_base = std::numbers::e);

}  // namespace tourney
