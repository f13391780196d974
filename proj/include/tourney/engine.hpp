#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tourney/formats.hpp"
#include "tourney/metrics.hpp"
#include "tourney/prob.hpp"

namespace tourney {

struct RunConfig {
    FormatSpec format;
    std::shared_ptr<const WinMatrix> model;
    std::int64_t replications = 100000;
    std::uint64_t master_seed = 1;
    std::vector<MetricSpec> metrics = default_metrics();
    FormatOptions options;
    /// Worker threads; 0 picks the hardware concurrency. Results do not depend on it.
    int threads = 0;
};

/// Width of the bins used for real-valued metrics.
inline constexpr double kRealBinWidth = 0.25;

/// Counts keyed by bin start. Integral metrics use one bin per value.
using Histogram = std::map<double, std::int64_t>;

struct MetricSummary {
    MetricSpec metric;
    std::int64_t count = 0;
    double mean = 0.0;
    double std_error = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double min = 0.0;
    double max = 0.0;
    Histogram histogram;

    std::string name() const { return metric_name(metric); }
};

struct RunSummary {
    FormatSpec format;
    std::int64_t replications = 0;
    std::uint64_t master_seed = 0;
    std::vector<MetricSummary> metrics;
    /// Counted matches per tournament; equal for every valid format.
    int counted_matches = 0;
    int min_counted_matches = 0;
    int max_counted_matches = 0;
    /// Replications whose result failed validate_result.
    std::int64_t invalid_results = 0;

    /// Throws std::out_of_range when no metric has this name.
    const MetricSummary& metric(const std::string& name) const;
};

/// Runs `replications` tournaments. Replication i draws from stream_seed(master_seed, i);
/// fixed-size blocks are reduced in index order, so the summary is bit-identical
/// for any thread count.
RunSummary run(const RunConfig& config);

double histogram_bin(const MetricSpec& metric, double value);

struct DominanceEstimate {
    double p_strictly_less = 0.0;
    double p_tie = 0.0;
    std::int64_t samples_a = 0;
    std::int64_t samples_b = 0;
};

/// P(X_a < X_b) for independent draws from the two histograms, ties reported separately.
DominanceEstimate dominance(const Histogram& a, const Histogram& b);
DominanceEstimate dominance(const RunSummary& a, const RunSummary& b, const std::string& metric);

struct SweepRow {
    FormatSpec format;
    int counted_matches = 0;
    std::vector<MetricSummary> metrics;
};

std::vector<SweepRow> sweep(std::span<const RunConfig> configs);

/// No bin falls below both a higher bin on its left and a higher bin on its
/// right by more than `sigmas` Poisson standard deviations.
bool is_unimodal(const Histogram& h, double sigmas = 3.0);

}  // namespace tourney
