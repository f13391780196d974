#include "tourney/metrics.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace tourney {

std::int64_t inversions(std::span<const PlayerId> ranking) {
    std::int64_t count = 0;
    for (std::size_t p = 0; p < ranking.size(); ++p)
        for (std::size_t q = p + 1; q < ranking.size(); ++q)
            if (ranking[p].rank > ranking[q].rank) ++count;
    return count;
}

double weighted_inversions(std::span<const PlayerId> ranking, double log_base) {
    if (!(log_base > 1.0)) throw std::invalid_argument("log base must exceed 1");
    const double ln_base = std::log(log_base);
    double sum = 0.0;
    // For each player, count the weaker players finishing above it.
    for (std::size_t q = 0; q < ranking.size(); ++q) {
        int overtaken_by = 0;
        for (std::size_t p = 0; p < q; ++p)
            if (ranking[p].rank > ranking[q].rank) ++overtaken_by;
        if (overtaken_by > 0) sum += overtaken_by * ln_base / std::log(static_cast<double>(ranking[q].rank + 1));
    }
    return sum;
}

double avg_rank_top(std::span<const PlayerId> ranking, int k) {
    if (k < 1 || k > static_cast<int>(ranking.size())) throw std::invalid_argument("top-k out of range");
    long long sum = 0;
    for (int i = 0; i < k; ++i) sum += ranking[i].rank;
    return static_cast<double>(sum) / (static_cast<double>(k) * (k + 1) / 2.0);
}

MetricVector compute_metrics(std::span<const PlayerId> ranking, std::span<const int> top_k, double log_base) {
    MetricVector v;
    v.inversions = inversions(ranking);
    v.weighted_inversions = weighted_inversions(ranking, log_base);
    for (int k : top_k) v.avg_rank_top[k] = avg_rank_top(ranking, k);
    return v;
}

double MetricSpec::evaluate(std::span<const PlayerId> ranking) const {
    switch (kind) {
        case MetricKind::Inversions:
            return static_cast<double>(inversions(ranking));
        case MetricKind::WeightedInversions:
            return weighted_inversions(ranking, log_base);
        case MetricKind::AvgRankTop:
            return avg_rank_top(ranking, k);
    }
    return 0.0;
}

std::string metric_name(const MetricSpec& spec) {
    switch (spec.kind) {
        case MetricKind::Inversions:
            return "inversions";
        case MetricKind::WeightedInversions: {
            if (spec.log_base == std::numbers::e) return "weighted_inversions";
            char buf[32];
            const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, spec.log_base);
            return "weighted_inversions:" + std::string(buf, end);
        }
        case MetricKind::AvgRankTop:
            return "avg_rank_top_" + std::to_string(spec.k);
    }
    return "unknown";
}

namespace {

template <typename T>
bool parse_number(std::string_view text, T& out) {
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return !text.empty() && ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

MetricSpec parse_metric(std::string_view name) {
    if (name == "inversions") return MetricSpec::inversion_count();
    if (name == "weighted_inversions") return MetricSpec::weighted();
    if (name.starts_with("weighted_inversions:")) {
        double base = 0.0;
        if (!parse_number(name.substr(20), base) || !(base > 1.0))
            throw std::invalid_argument("invalid log base in metric '" + std::string(name) + "'");
        return MetricSpec::weighted(base);
    }
    for (std::string_view prefix : {std::string_view("avg_rank_top_"), std::string_view("avg_rank_top:")}) {
        if (name.starts_with(prefix)) {
            int k = 0;
            if (!parse_number(name.substr(prefix.size()), k) || k < 1)
                throw std::invalid_argument("invalid k in metric '" + std::string(name) + "'");
            return MetricSpec::top(k);
        }
    }
    throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

std::vector<MetricSpec> default_metrics(std::span<const int> top_k, double log_base) {
    std::vector<MetricSpec> specs{MetricSpec::inversion_count(), MetricSpec::weighted(log_base)};
    if (top_k.empty()) {
        specs.push_back(MetricSpec::top(1));
        specs.push_back(MetricSpec::top(8));
    } else {
        for (int k : top_k) specs.push_back(MetricSpec::top(k));
    }
    return specs;
}

}  // namespace tourney
