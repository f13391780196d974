#include "tourney/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>

#include "tourney/oracle.hpp"

namespace tourney::cli {

using nlohmann::json;

namespace {

std::string number(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

double parse_double(const std::string& text, const std::string& flag) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size() || !std::isfinite(v))
        throw UsageError(flag + ": '" + text + "' is not a number");
    return v;
}

int parse_int(const std::string& text, const std::string& flag) {
    int v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size())
        throw UsageError(flag + ": '" + text + "' is not an integer");
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t at = text.find(sep, start);
        parts.push_back(text.substr(start, at - start));
        if (at == std::string::npos) break;
        start = at + 1;
    }
    return parts;
}

FormatKind parse_format(const std::string& text, const std::string& flag) {
    if (auto kind = parse_format_token(text)) return *kind;
    throw UsageError(flag + ": unknown format '" + text + "' (rr, drr, ko, ko3, dp, ms4, ms8, dg, swiss)");
}

ModelSource parse_model(const std::string& text) {
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos) throw UsageError("--model: expected skill:FLOAT, elo:PATH or matrix:PATH");
    const std::string kind = text.substr(0, colon);
    const std::string arg = text.substr(colon + 1);
    ModelSource source;
    if (kind == "skill") {
        source.kind = ModelSource::Kind::Skill;
        source.skill = parse_double(arg, "--model");
        if (!(source.skill > 0.0)) throw UsageError("--model: skill must be positive");
        return source;
    }
    if (kind == "elo") {
        source.kind = ModelSource::Kind::Elo;
    } else if (kind == "matrix") {
        source.kind = ModelSource::Kind::Matrix;
    } else {
        throw UsageError("--model: unknown model '" + kind + "'");
    }
    source.path = arg;
    if (std::ifstream probe(arg); !probe) throw UsageError("--model: cannot read '" + arg + "'");
    return source;
}

std::optional<int> swiss_param(const FormatSpec& spec) {
    if (spec.kind == FormatKind::Swiss) return spec.swiss_rounds;
    return std::nullopt;
}

std::string param_text(const FormatSpec& spec) {
    const auto p = swiss_param(spec);
    return p ? std::to_string(*p) : std::string{};
}

json config_json(const CliConfig& c) {
    static constexpr const char* commands[] = {"simulate", "sweep", "compare", "verify"};
    json j;
    j["command"] = commands[static_cast<int>(c.command)];
    j["format"] = c.format ? json(std::string(format_token(*c.format))) : json(nullptr);
    j["rounds_from"] = c.rounds_from ? json(*c.rounds_from) : json(nullptr);
    j["rounds_to"] = c.rounds_to ? json(*c.rounds_to) : json(nullptr);
    j["players"] = c.players;
    j["model"] = c.model.describe();
    j["reps"] = c.reps;
    j["seed"] = c.seed;
    j["topk"] = c.topk;
    j["log_base"] = c.log_base;
    j["seeding"] = c.options.seeding == Seeding::Random ? "random" : "strength";
    j["constrain_group_draw"] = c.options.constrain_group_draw;
    if (c.command == Command::Compare) {
        j["baseline"] = std::string(format_token(c.baseline));
        j["baseline_rounds"] = c.baseline_rounds ? json(*c.baseline_rounds) : json(nullptr);
        j["metric"] = c.compare_metric;
    }
    return j;
}

json histogram_json(const RunSummary& run) {
    json out = json::array();
    for (const MetricSummary& m : run.metrics) {
        json bins = json::array();
        for (const auto& [value, count] : m.histogram) bins.push_back(json::array({value, count}));
        out.push_back({{"format", run.format.label()}, {"metric", m.name()}, {"bins", std::move(bins)}});
    }
    return out;
}

json run_json(const RunSummary& run) {
    json metrics = json::array();
    for (const MetricSummary& m : run.metrics) {
        metrics.push_back({{"metric", m.name()},
                           {"mean", m.mean},
                           {"stderr", m.std_error},
                           {"min", m.min},
                           {"max", m.max},
                           {"variance", m.variance},
                           {"skewness", m.skewness}});
    }
    const auto p = swiss_param(run.format);
    return {{"format", std::string(format_token(run.format.kind))},
            {"label", run.format.label()},
            {"param", p ? json(*p) : json(nullptr)},
            {"players", run.format.n},
            {"counted_matches", run.counted_matches},
            {"replications", run.replications},
            {"invalid_results", run.invalid_results},
            {"metrics", std::move(metrics)}};
}

template <typename Fn>
void with_output(const std::optional<std::string>& path, std::ostream& fallback, Fn&& write) {
    if (!path) {
        write(fallback);
        return;
    }
    std::ofstream file(*path);
    if (!file) throw std::runtime_error("cannot write '" + *path + "'");
    write(file);
    file.flush();
    if (!file) throw std::runtime_error("error writing '" + *path + "'");
}

}  // namespace

std::string ModelSource::describe() const {
    switch (kind) {
        case Kind::Skill:
            return "skill:" + number(skill);
        case Kind::Elo:
            return "elo:" + path;
        case Kind::Matrix:
            return "matrix:" + path;
    }
    return {};
}

double parse_log_base(const std::string& text) {
    if (text == "e") return std::numbers::e;
    const double base = parse_double(text, "--log-base");
    if (!(base > 1.0)) throw UsageError("--log-base: base must exceed 1");
    return base;
}

std::pair<int, int> parse_rounds(const std::string& text) {
    const std::size_t dots = text.find("..");
    if (dots == std::string::npos) {
        const int r = parse_int(text, "--rounds");
        return {r, r};
    }
    const int from = parse_int(text.substr(0, dots), "--rounds");
    const int to = parse_int(text.substr(dots + 2), "--rounds");
    if (from > to) throw UsageError("--rounds: empty range '" + text + "'");
    return {from, to};
}

CliConfig parse_args(int argc, const char* const* argv) {
    CLI::App app{"Tournament format simulator", "tourney"};
    app.require_subcommand(1);

    std::string format, rounds, model, topk, log_base, out_format, metrics, seeding, baseline;
    std::optional<std::string> out, hist;
    std::optional<int> players, baseline_rounds;
    std::int64_t reps = 100000;
    std::uint64_t seed = 1;
    std::string metric = "inversions";
    int threads = 0;
    bool unconstrained = false;

    auto common = [&](CLI::App* sub, bool with_format) {
        if (with_format) {
            sub->add_option("--format", format, "rr, drr, ko, ko3, dp, ms4, ms8, dg or swiss");
            sub->add_option("--rounds", rounds, "Swiss rounds (INT, or A..B for sweep)");
            sub->add_option("--players", players, "Field size (default 32)");
            sub->add_option("--out", out, "Output file (default stdout)");
            sub->add_option("--out-format", out_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
            sub->add_option("--seeding", seeding, "random or strength")->check(CLI::IsMember({"random", "strength"}));
            sub->add_flag("--unconstrained-draw", unconstrained,
                          "Allow same-group pairs in round 1 of group-fed knockouts");
        }
        sub->add_option("--model", model, "skill:FLOAT, elo:PATH or matrix:PATH (default skill:5)");
        sub->add_option("--reps", reps, "Replications (default 100000)");
        sub->add_option("--seed", seed, "Master seed");
        sub->add_option("--threads", threads, "Worker threads (default: all cores)");
    };

    auto* simulate = app.add_subcommand("simulate", "Run one format and report metric means");
    auto* sweep_cmd = app.add_subcommand("sweep", "Run several formats (all by default)");
    auto* compare = app.add_subcommand("compare", "Dominance probability of one format over another");
    auto* verify_cmd = app.add_subcommand("verify", "Oracle-equivalence and match-count checks");
    for (auto* sub : {simulate, sweep_cmd, compare}) {
        common(sub, true);
        sub->add_option("--topk", topk, "Top-k list for avg_rank_top (default 1,8)");
        sub->add_option("--log-base", log_base, "Weighted-inversion log base: e, 2, 10 or a number");
    }
    for (auto* sub : {simulate, sweep_cmd}) {
        sub->add_option("--metrics", metrics, "Comma-separated metric names (overrides the default set)");
        sub->add_option("--hist", hist, "Histogram CSV output (metric,value,count)");
    }
    compare->add_option("--baseline", baseline, "Format compared against (default ko)");
    compare->add_option("--baseline-rounds", baseline_rounds, "Swiss rounds of the baseline");
    compare->add_option("--metric", metric, "Metric compared (default inversions)");
    common(verify_cmd, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::CallForAllHelp&) {
        throw HelpRequested(app.help("", CLI::AppFormatMode::All));
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    CliConfig c;
    if (simulate->parsed()) c.command = Command::Simulate;
    if (sweep_cmd->parsed()) c.command = Command::Sweep;
    if (compare->parsed()) c.command = Command::Compare;
    if (verify_cmd->parsed()) c.command = Command::Verify;

    if (!format.empty()) c.format = parse_format(format, "--format");
    if (!rounds.empty()) {
        const auto [from, to] = parse_rounds(rounds);
        if (from != to && c.command != Command::Sweep) throw UsageError("--rounds: ranges are only valid for sweep");
        if (c.format && *c.format != FormatKind::Swiss) throw UsageError("--rounds requires --format swiss");
        c.rounds_from = from;
        c.rounds_to = to;
    }
    if (c.command == Command::Simulate || c.command == Command::Compare) {
        if (!c.format) throw UsageError("--format is required");
        if (*c.format == FormatKind::Swiss && !c.rounds_from) throw UsageError("--format swiss requires --rounds");
    }
    if (players) {
        if (*players < 2) throw UsageError("--players must be at least 2");
        c.players = *players;
        c.players_given = true;
    }
    if (!model.empty()) c.model = parse_model(model);
    if (c.command == Command::Verify && c.model.kind != ModelSource::Kind::Skill)
        throw UsageError("--model: verify accepts only skill models");
    if (reps < 1) throw UsageError("--reps must be at least 1");
    c.reps = reps;
    c.seed = seed;
    if (threads < 0) throw UsageError("--threads must be non-negative");
    c.threads = threads;

    if (!topk.empty()) {
        c.topk.clear();
        for (const std::string& part : split(topk, ',')) {
            const int k = parse_int(part, "--topk");
            if (k < 1) throw UsageError("--topk: k must be at least 1");
            c.topk.push_back(k);
        }
    }
    if (!log_base.empty()) c.log_base = parse_log_base(log_base);

    try {
        const bool custom = (simulate->parsed() && simulate->count("--metrics") > 0) ||
                            (sweep_cmd->parsed() && sweep_cmd->count("--metrics") > 0);
        if (custom) {
            for (const std::string& name : split(metrics, ',')) {
                if (name.empty()) continue;
                MetricSpec spec = parse_metric(name);
                if (name == "weighted_inversions") spec.log_base = c.log_base;
                c.metrics.push_back(spec);
            }
        } else {
            c.metrics = default_metrics(c.topk, c.log_base);
        }
        if (c.command == Command::Compare) {
            MetricSpec spec = parse_metric(metric);
            if (metric == "weighted_inversions") spec.log_base = c.log_base;
            c.compare_metric = metric_name(spec);
            c.metrics = {spec};
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string(c.command == Command::Compare ? "--metric: " : "--metrics: ") + e.what());
    }

    c.out = out;
    c.hist_out = hist;
    c.out_format = out_format == "json" ? OutputFormat::Json : OutputFormat::Csv;
    c.options.seeding = seeding == "strength" ? Seeding::ByStrength : Seeding::Random;
    c.options.constrain_group_draw = !unconstrained;

    if (!baseline.empty()) c.baseline = parse_format(baseline, "--baseline");
    if (baseline_rounds && c.baseline != FormatKind::Swiss) throw UsageError("--baseline-rounds requires --baseline swiss");
    if (c.command == Command::Compare && c.baseline == FormatKind::Swiss && !baseline_rounds)
        throw UsageError("--baseline swiss requires --baseline-rounds");
    c.baseline_rounds = baseline_rounds;

    // Field size is known unless a model file fixes it; check formats and top-k now.
    if (c.players_given || c.model.kind == ModelSource::Kind::Skill) (void)run_configs(c, nullptr);
    return c;
}

std::shared_ptr<const WinMatrix> load_model(CliConfig& config) {
    switch (config.model.kind) {
        case ModelSource::Kind::Skill:
            return std::make_shared<const WinMatrix>(skill_matrix(SkillModel{config.model.skill}, config.players));
        case ModelSource::Kind::Elo: {
            EloModel elo = elo_matrix(load_rating_file(config.model.path));
            if (!config.players_given) config.players = elo.matrix.size();
            if (elo.matrix.size() != config.players)
                throw UsageError("--players: rating file lists " + std::to_string(elo.matrix.size()) + " players");
            return std::make_shared<const WinMatrix>(std::move(elo.matrix));
        }
        case ModelSource::Kind::Matrix: {
            WinMatrix m = load_matrix_file(config.model.path);
            if (!config.players_given) config.players = m.size();
            if (m.size() != config.players)
                throw UsageError("--players: matrix file has " + std::to_string(m.size()) + " players");
            return std::make_shared<const WinMatrix>(std::move(m));
        }
    }
    throw std::logic_error("unknown model kind");
}

std::vector<RunConfig> run_configs(const CliConfig& c, const std::shared_ptr<const WinMatrix>& model) {
    std::vector<FormatSpec> specs;
    auto add_swiss = [&](int from, int to) {
        for (int r = from; r <= to; ++r) specs.push_back({FormatKind::Swiss, c.players, r});
    };
    switch (c.command) {
        case Command::Simulate:
            specs.push_back({*c.format, c.players, c.rounds_from.value_or(0)});
            break;
        case Command::Compare:
            specs.push_back({*c.format, c.players, c.rounds_from.value_or(0)});
            specs.push_back({c.baseline, c.players, c.baseline_rounds.value_or(0)});
            break;
        case Command::Sweep:
            if (c.format && *c.format != FormatKind::Swiss) {
                specs.push_back({*c.format, c.players, 0});
            } else if (c.format) {
                add_swiss(c.rounds_from.value_or(5), c.rounds_to.value_or(14));
            } else {
                for (FormatKind kind : kAllFormats)
                    if (kind != FormatKind::Swiss) specs.push_back({kind, c.players, 0});
                add_swiss(c.rounds_from.value_or(5), c.rounds_to.value_or(14));
            }
            break;
        case Command::Verify:
            break;
    }

    std::vector<RunConfig> configs;
    for (const FormatSpec& spec : specs) {
        try {
            validate(spec);
        } catch (const std::invalid_argument& e) {
            throw UsageError(std::string("--format/--players: ") + e.what());
        }
        for (const MetricSpec& m : c.metrics)
            if (m.kind == MetricKind::AvgRankTop && m.k > c.players)
                throw UsageError("--topk: k = " + std::to_string(m.k) + " exceeds the field size");
        RunConfig rc;
        rc.format = spec;
        rc.model = model;
        rc.replications = c.reps;
        rc.master_seed = c.seed;
        rc.metrics = c.metrics;
        rc.options = c.options;
        rc.threads = c.threads;
        configs.push_back(std::move(rc));
    }
    return configs;
}

void write_summary_csv(std::ostream& out, std::span<const RunSummary> runs) {
    out << "format,param,counted_matches,metric,mean,stderr\n";
    for (const RunSummary& run : runs)
        for (const MetricSummary& m : run.metrics)
            out << format_token(run.format.kind) << ',' << param_text(run.format) << ',' << run.counted_matches << ','
                << m.name() << ',' << number(m.mean) << ',' << number(m.std_error) << '\n';
}

void write_histogram_csv(std::ostream& out, std::span<const RunSummary> runs) {
    const bool labelled = runs.size() > 1;
    out << (labelled ? "format,metric,value,count\n" : "metric,value,count\n");
    for (const RunSummary& run : runs)
        for (const MetricSummary& m : run.metrics)
            for (const auto& [value, count] : m.histogram) {
                if (labelled) out << run.format.label() << ',';
                out << m.name() << ',' << number(value) << ',' << count << '\n';
            }
}

void write_summary_json(std::ostream& out, const CliConfig& config, std::span<const RunSummary> runs) {
    json results = json::array();
    json histograms = json::array();
    for (const RunSummary& run : runs) {
        results.push_back(run_json(run));
        for (auto& h : histogram_json(run)) histograms.push_back(std::move(h));
    }
    out << json{{"config", config_json(config)}, {"results", std::move(results)}, {"histograms", std::move(histograms)}}
               .dump(2)
        << '\n';
}

void write_compare_csv(std::ostream& out, const RunSummary& a, const RunSummary& b, const std::string& metric,
                       const DominanceEstimate& d) {
    out << "format,param,baseline,baseline_param,metric,p_strictly_less,p_tie,samples,baseline_samples\n";
    out << format_token(a.format.kind) << ',' << param_text(a.format) << ',' << format_token(b.format.kind) << ','
        << param_text(b.format) << ',' << metric << ',' << number(d.p_strictly_less) << ',' << number(d.p_tie) << ','
        << d.samples_a << ',' << d.samples_b << '\n';
}

void write_compare_json(std::ostream& out, const CliConfig& config, const RunSummary& a, const RunSummary& b,
                        const std::string& metric, const DominanceEstimate& d) {
    json histograms = histogram_json(a);
    for (auto& h : histogram_json(b)) histograms.push_back(std::move(h));
    json result = {{"format", a.format.label()},
                   {"baseline", b.format.label()},
                   {"metric", metric},
                   {"p_strictly_less", d.p_strictly_less},
                   {"p_tie", d.p_tie},
                   {"samples", json::array({d.samples_a, d.samples_b})},
                   {"runs", json::array({run_json(a), run_json(b)})}};
    out << json{{"config", config_json(config)}, {"results", json::array({std::move(result)})},
                {"histograms", std::move(histograms)}}
               .dump(2)
        << '\n';
}

bool verify(const CliConfig& config, std::ostream& out) {
    bool ok = true;
    auto report = [&](bool pass, const std::string& line) {
        out << (pass ? "PASS " : "FAIL ") << line << '\n';
        ok = ok && pass;
    };

    // Match counts at n = 32.
    const auto field = std::make_shared<const WinMatrix>(skill_matrix(SkillModel{config.model.skill}, 32));
    std::vector<FormatSpec> specs;
    for (FormatKind kind : kAllFormats)
        if (kind != FormatKind::Swiss) specs.push_back({kind, 32, 0});
    specs.push_back({FormatKind::Swiss, 32, 5});
    specs.push_back({FormatKind::Swiss, 32, 14});
    for (const FormatSpec& spec : specs) {
        RunConfig rc;
        rc.format = spec;
        rc.model = field;
        rc.replications = std::min<std::int64_t>(config.reps, 10000);
        rc.master_seed = config.seed;
        rc.metrics = {};
        rc.threads = config.threads;
        const RunSummary s = run(rc);
        const int budget = counted_match_budget(spec);
        report(s.invalid_results == 0 && s.min_counted_matches == budget && s.max_counted_matches == budget,
               "match count " + spec.label() + ": " + std::to_string(s.min_counted_matches) + ".." +
                   std::to_string(s.max_counted_matches) + " expected " + std::to_string(budget));
    }

    // Monte Carlo means against exact enumeration.
    const std::vector<FormatSpec> small{{FormatKind::Knockout, 4, 0}, {FormatKind::RoundRobin, 4, 0},
                                        {FormatKind::Knockout, 8, 0}};
    for (const FormatSpec& spec : small) {
        for (bool uniform : {true, false}) {
            auto m = std::make_shared<const WinMatrix>(uniform ? WinMatrix::uniform(spec.n)
                                                               : skill_matrix(SkillModel{config.model.skill}, spec.n));
            const OutcomeEnumeration exact = enumerate(spec, *m);
            RunConfig rc;
            rc.format = spec;
            rc.model = m;
            rc.replications = config.reps;
            rc.master_seed = config.seed;
            rc.metrics = {MetricSpec::inversion_count(), MetricSpec::top(1)};
            rc.threads = config.threads;
            const RunSummary s = run(rc);
            for (const MetricSummary& ms : s.metrics) {
                const MetricMoments expected = metric_moments(exact, ms.metric);
                const double se = std::sqrt(expected.variance / static_cast<double>(ms.count));
                const bool pass = std::abs(ms.mean - expected.mean) <= 3.0 * se + 1e-12;
                report(pass, "oracle " + spec.label() + " n=" + std::to_string(spec.n) +
                                 (uniform ? " uniform " : " " + config.model.describe() + " ") + ms.name() +
                                 ": mc " + number(ms.mean) + " exact " + number(expected.mean) + " se " + number(se));
            }
        }
    }
    return ok;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CliConfig config;
    try {
        config = parse_args(argc, argv);
    } catch (const HelpRequested& help) {
        out << help.what();
        return kExitOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (config.command == Command::Verify) return verify(config, out) ? kExitOk : kExitVerifyFailed;

        const auto model = load_model(config);
        const std::vector<RunConfig> configs = run_configs(config, model);

        if (config.command == Command::Compare) {
            const RunSummary a = run(configs[0]);
            const RunSummary b = run(configs[1]);
            const DominanceEstimate d = dominance(a, b, config.compare_metric);
            with_output(config.out, out, [&](std::ostream& os) {
                if (config.out_format == OutputFormat::Json)
                    write_compare_json(os, config, a, b, config.compare_metric, d);
                else
                    write_compare_csv(os, a, b, config.compare_metric, d);
            });
            return kExitOk;
        }

        std::vector<RunSummary> runs;
        runs.reserve(configs.size());
        for (const RunConfig& rc : configs) runs.push_back(run(rc));
        with_output(config.out, out, [&](std::ostream& os) {
            if (config.out_format == OutputFormat::Json)
                write_summary_json(os, config, runs);
            else
                write_summary_csv(os, runs);
        });
        if (config.hist_out) with_output(config.hist_out, out, [&](std::ostream& os) { write_histogram_csv(os, runs); });
        return kExitOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace tourney::cli
