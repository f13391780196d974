#include "tourney/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>

namespace tourney {

namespace {

constexpr std::int64_t kBlockSize = 1024;

/// Running moments (Chan et al. pairwise update).
struct Moments {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();

    void add(double x) {
        const double n0 = static_cast<double>(n);
        ++n;
        const double n1 = static_cast<double>(n);
        const double delta = x - mean;
        const double delta_n = delta / n1;
        const double term = delta * delta_n * n0;
        mean += delta_n;
        m3 += term * delta_n * (n1 - 2.0) - 3.0 * delta_n * m2;
        m2 += term;
        min = std::min(min, x);
        max = std::max(max, x);
    }

    void merge(const Moments& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n);
        const double nb = static_cast<double>(o.n);
        const double nt = na + nb;
        const double delta = o.mean - mean;
        const double m2 = this->m2 + o.m2 + delta * delta * na * nb / nt;
        m3 = m3 + o.m3 + delta * delta * delta * na * nb * (na - nb) / (nt * nt) +
             3.0 * delta * (na * o.m2 - nb * this->m2) / nt;
        this->m2 = m2;
        mean += delta * nb / nt;
        n += o.n;
        min = std::min(min, o.min);
        max = std::max(max, o.max);
    }
};

struct Block {
    std::vector<Moments> moments;
    std::vector<Histogram> histograms;
    int min_counted = std::numeric_limits<int>::max();
    int max_counted = std::numeric_limits<int>::min();
    std::int64_t invalid = 0;

    explicit Block(std::size_t metrics) : moments(metrics), histograms(metrics) {}

    void merge(const Block& o) {
        for (std::size_t i = 0; i < moments.size(); ++i) {
            moments[i].merge(o.moments[i]);
            for (const auto& [bin, count] : o.histograms[i]) histograms[i][bin] += count;
        }
        min_counted = std::min(min_counted, o.min_counted);
        max_counted = std::max(max_counted, o.max_counted);
        invalid += o.invalid;
    }
};

Block run_block(const RunConfig& config, std::int64_t begin, std::int64_t end) {
    Block block(config.metrics.size());
    for (std::int64_t i = begin; i < end; ++i) {
        RandomStream rng(stream_seed(config.master_seed, static_cast<std::uint64_t>(i)));
        const TournamentResult result = run_format(config.format, *config.model, rng, config.options);
        if (!validate_result(result, config.format.n)) {
            ++block.invalid;
            continue;
        }
        block.min_counted = std::min(block.min_counted, result.counted_matches);
        block.max_counted = std::max(block.max_counted, result.counted_matches);
        for (std::size_t m = 0; m < config.metrics.size(); ++m) {
            const double value = config.metrics[m].evaluate(result.ranking);
            block.moments[m].add(value);
            ++block.histograms[m][histogram_bin(config.metrics[m], value)];
        }
    }
    return block;
}

}  // namespace

const MetricSummary& RunSummary::metric(const std::string& name) const {
    for (const MetricSummary& m : metrics)
        if (m.name() == name) return m;
    throw std::out_of_range("run summary has no metric '" + name + "'");
}

double histogram_bin(const MetricSpec& metric, double value) {
    if (metric.is_integral()) return value;
    return std::floor(value / kRealBinWidth) * kRealBinWidth;
}

RunSummary run(const RunConfig& config) {
    if (config.replications < 1) throw std::invalid_argument("replications must be at least 1");
    if (!config.model) throw std::invalid_argument("run config has no model");
    validate(config.format);
    if (config.model->size() != config.format.n)
        throw std::invalid_argument("format size does not match the win matrix");

    const std::int64_t blocks = (config.replications + kBlockSize - 1) / kBlockSize;
    std::vector<std::optional<Block>> results(static_cast<std::size_t>(blocks));
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::mutex failure_mutex;

    auto worker = [&] {
        for (std::int64_t b = next++; b < blocks && !failed; b = next++) {
            try {
                const std::int64_t begin = b * kBlockSize;
                results[static_cast<std::size_t>(b)] =
                    run_block(config, begin, std::min(config.replications, begin + kBlockSize));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                failed = true;
            }
        }
    };

    int threads = config.threads > 0 ? config.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = static_cast<int>(std::clamp<std::int64_t>(threads, 1, blocks));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    Block total(config.metrics.size());
    for (const auto& block : results) total.merge(*block);

    RunSummary summary;
    summary.format = config.format;
    summary.replications = config.replications;
    summary.master_seed = config.master_seed;
    summary.invalid_results = total.invalid;
    if (total.invalid < config.replications) {
        summary.min_counted_matches = total.min_counted;
        summary.max_counted_matches = total.max_counted;
        summary.counted_matches = total.min_counted;
    }
    for (std::size_t m = 0; m < config.metrics.size(); ++m) {
        const Moments& mo = total.moments[m];
        MetricSummary s;
        s.metric = config.metrics[m];
        s.count = mo.n;
        s.histogram = std::move(total.histograms[m]);
        if (mo.n > 0) {
            const double n = static_cast<double>(mo.n);
            s.mean = mo.mean;
            s.min = mo.min;
            s.max = mo.max;
            s.variance = mo.n > 1 ? mo.m2 / (n - 1.0) : 0.0;
            s.std_error = std::sqrt(s.variance / n);
            s.skewness = mo.m2 > 0.0 ? std::sqrt(n) * mo.m3 / std::pow(mo.m2, 1.5) : 0.0;
        }
        summary.metrics.push_back(std::move(s));
    }
    return summary;
}

DominanceEstimate dominance(const Histogram& a, const Histogram& b) {
    DominanceEstimate est;
    for (const auto& [bin, count] : a) est.samples_a += count;
    for (const auto& [bin, count] : b) est.samples_b += count;
    if (est.samples_a == 0 || est.samples_b == 0) throw std::invalid_argument("dominance needs non-empty histograms");

    // Walk b from the top, keeping the mass of b strictly above the current value of a.
    std::int64_t above = 0;
    auto ib = b.rbegin();
    double less = 0.0;
    double tie = 0.0;
    for (auto ia = a.rbegin(); ia != a.rend(); ++ia) {
        while (ib != b.rend() && ib->first > ia->first) {
            above += ib->second;
            ++ib;
        }
        const std::int64_t equal = (ib != b.rend() && ib->first == ia->first) ? ib->second : 0;
        less += static_cast<double>(ia->second) * static_cast<double>(above);
        tie += static_cast<double>(ia->second) * static_cast<double>(equal);
    }
    const double pairs = static_cast<double>(est.samples_a) * static_cast<double>(est.samples_b);
    est.p_strictly_less = less / pairs;
    est.p_tie = tie / pairs;
    return est;
}

DominanceEstimate dominance(const RunSummary& a, const RunSummary& b, const std::string& metric) {
    return dominance(a.metric(metric).histogram, b.metric(metric).histogram);
}

std::vector<SweepRow> sweep(std::span<const RunConfig> configs) {
    if (configs.empty()) throw std::invalid_argument("sweep needs at least one configuration");
    std::vector<SweepRow> rows;
    rows.reserve(configs.size());
    for (const RunConfig& config : configs) {
        RunSummary summary = run(config);
        rows.push_back(SweepRow{config.format, summary.counted_matches, std::move(summary.metrics)});
    }
    return rows;
}

bool is_unimodal(const Histogram& h, double sigmas) {
    std::vector<double> counts;
    counts.reserve(h.size());
    for (const auto& [bin, count] : h) counts.push_back(static_cast<double>(count));
    const std::size_t size = counts.size();
    std::vector<double> suffix_max(size + 1, 0.0);
    for (std::size_t j = size; j-- > 0;) suffix_max[j] = std::max(suffix_max[j + 1], counts[j]);
    double prefix_max = 0.0;
    for (std::size_t j = 0; j < size; ++j) {
        const double shoulder = std::min(prefix_max, suffix_max[j + 1]);
        if (shoulder - counts[j] > sigmas * std::sqrt(shoulder + counts[j])) return false;
        prefix_max = std::max(prefix_max, counts[j]);
    }
    return true;
}

}  // namespace tourney
