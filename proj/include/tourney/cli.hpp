#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tourney/engine.hpp"
#include "tourney/formats.hpp"

namespace tourney::cli {

enum class Command : std::uint8_t { Simulate, Sweep, Compare, Verify };
enum class OutputFormat : std::uint8_t { Csv, Json };

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitRuntime = 2,
    kExitVerifyFailed = 3,
};

/// Bad command line; the message names the offending flag.
class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// `--help` was given; the message is the help text.
class HelpRequested : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct ModelSource {
    enum class Kind : std::uint8_t { Skill, Elo, Matrix };
    Kind kind = Kind::Skill;
    double skill = 5.0;
    std::string path;

    std::string describe() const;
};

struct CliConfig {
    Command command = Command::Simulate;
    std::optional<FormatKind> format;
    /// Swiss rounds; a range only for sweep.
    std::optional<int> rounds_from;
    std::optional<int> rounds_to;
    int players = 32;
    bool players_given = false;
    ModelSource model;
    std::int64_t reps = 100000;
    std::uint64_t seed = 1;
    std::vector<int> topk{1, 8};
    double log_base = std::numbers::e;
    std::vector<MetricSpec> metrics;
    std::optional<std::string> out;
    OutputFormat out_format = OutputFormat::Csv;
    std::optional<std::string> hist_out;

    // compare
    FormatKind baseline = FormatKind::Knockout;
    std::optional<int> baseline_rounds;
    std::string compare_metric = "inversions";

    int threads = 0;
    FormatOptions options;
};

/// Throws UsageError, or HelpRequested for --help.
CliConfig parse_args(int argc, const char* const* argv);

/// "e", "2", "10" or any number > 1.
double parse_log_base(const std::string& text);

/// "5" or "5..14".
std::pair<int, int> parse_rounds(const std::string& text);

/// Loads the model and returns a matrix for exactly `config.players` players
/// (rating and matrix files fix the field size when --players is absent).
std::shared_ptr<const WinMatrix> load_model(CliConfig& config);

/// Run configurations of a simulate or sweep command, in output order.
std::vector<RunConfig> run_configs(const CliConfig& config, const std::shared_ptr<const WinMatrix>& model);

void write_summary_csv(std::ostream& out, std::span<const RunSummary> runs);
void write_histogram_csv(std::ostream& out, std::span<const RunSummary> runs);
void write_summary_json(std::ostream& out, const CliConfig& config, std::span<const RunSummary> runs);
void write_compare_csv(std::ostream& out, const RunSummary& a, const RunSummary& b, const std::string& metric,
                       const DominanceEstimate& d);
void write_compare_json(std::ostream& out, const CliConfig& config, const RunSummary& a, const RunSummary& b,
                        const std::string& metric, const DominanceEstimate& d);

/// Oracle-equivalence and match-count checks; prints one line per check.
bool verify(const CliConfig& config, std::ostream& out);

/// Full program: parses, runs, writes, and returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tourney::cli
