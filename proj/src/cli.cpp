#include "reprtrace/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "reprtrace/errors.hpp"
#include "reprtrace/metrics_report.hpp"
#include "reprtrace/scenario.hpp"

namespace reprtrace::cli {

namespace fs = std::filesystem;

unsigned worker_count(std::size_t jobs) {
    unsigned n = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("REPRTRACE_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) n = static_cast<unsigned>(v);
    }
    if (n == 0) n = 1;
    if (jobs > 0 && n > jobs) n = static_cast<unsigned>(jobs);
    return n;
}

namespace {

struct Options {
    std::string scenario;
    std::string strategy;
    std::uint64_t seed = 0;
    std::string strategies;
    std::string seeds;
    std::string out;
    bool strict = false;
    std::string in_dir;

    CLI::Option* strategy_opt = nullptr;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* strategies_opt = nullptr;
    CLI::Option* seeds_opt = nullptr;
    CLI::Option* out_opt = nullptr;
    CLI::Option* strict_opt = nullptr;
};

Scenario load(const Options& o) {
    return o.scenario.empty() ? default_scenario() : load_scenario(o.scenario);
}

// Command-line values win over the file.
void apply_overrides(Scenario& sc, const Options& o) {
    try {
        if (o.strategy_opt && o.strategy_opt->count() > 0) {
            auto kinds = parse_strategy_list(o.strategy);
            if (kinds.size() != 1) throw ParameterError("--strategy takes exactly one strategy");
            sc.strategy = kinds.front();
        }
        if (o.seed_opt && o.seed_opt->count() > 0) sc.seed = o.seed;
        if (o.strategies_opt && o.strategies_opt->count() > 0) sc.strategies = parse_strategy_list(o.strategies);
        if (o.seeds_opt && o.seeds_opt->count() > 0) sc.seeds = parse_seed_list(o.seeds);
    } catch (const ParameterError& e) {
        throw ConfigError("command line", 0, e.what());
    }
    if (o.out_opt && o.out_opt->count() > 0) sc.out = o.out;
    if (o.strict_opt && o.strict_opt->count() > 0) sc.strict = o.strict;
    sc.validate("command line");
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << content;
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::string run_name(StrategyKind kind, std::uint64_t seed) {
    return std::string(to_string(kind)) + "_seed" + std::to_string(seed);
}

void print_report(std::ostream& out, const report::ComparisonReport& rep) {
    auto opt = [](const std::optional<double>& v, int prec) {
        if (!v) return std::string("-");
        std::ostringstream s;
        s << std::fixed << std::setprecision(prec) << *v;
        return s.str();
    };
    out << std::left << std::setw(9) << "strategy" << std::right << std::setw(6) << "runs" << std::setw(12)
        << "TR" << std::setw(10) << "TR d%" << std::setw(9) << "SR" << std::setw(12) << "RMSE" << '\n';
    for (const auto& r : rep.rows) {
        out << std::left << std::setw(9) << to_string(r.strategy) << std::right << std::setw(6) << r.runs
            << std::setw(12) << std::fixed << std::setprecision(1) << r.tr_mean << std::setw(10)
            << opt(r.tr_delta_pct, 1) << std::setw(9) << std::setprecision(4) << r.sr_mean << std::setw(12)
            << opt(r.rmse_mean, 3) << '\n';
    }
    for (const auto& w : rep.warnings) out << "warning: " << w << '\n';
}

int strict_status(const Scenario& sc, const report::ComparisonReport& rep, std::ostream& err) {
    if (sc.strict && (rep.missing_ground_truth || rep.missing_types)) {
        err << "strict: report is incomplete ("
            << (rep.missing_ground_truth ? "missing ground truth" : "missing request types") << ")\n";
        return kExitStrict;
    }
    return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out) {
    Scenario sc = load(o);
    apply_overrides(sc, o);
    out << (o.scenario.empty() ? std::string("<default>") : o.scenario) << ": ok ("
        << sc.model.types.size() << " request types, " << sc.workload.segments.size() << " segments, "
        << sc.workload.total_duration() << " s)\n";
    return kExitOk;
}

int cmd_run(const Options& o, std::ostream& out) {
    Scenario sc = load(o);
    apply_overrides(sc, o);
    fs::path dir = sc.out;
    fs::create_directories(dir);

    auto result = sim::run(sc.run_spec(sc.strategy, sc.seed));
    {
        std::ofstream f(dir / "traces.txt");
        write_traces(f, result.traces);
    }
    auto summary = report::summarize(result);
    write_file(dir / "summary.json", report::to_json(summary));
    {
        std::ofstream f(dir / "series.csv");
        report::write_series_csv(f, summary);
    }
    {
        std::ofstream f(dir / "cycles.csv");
        report::write_cycles_csv(f, std::span<const report::RunSummary>(&summary, 1));
    }
    write_file(dir / "effective_scenario.yaml", dump_scenario(sc));

    out << to_string(sc.strategy) << " seed " << sc.seed << ": TR " << std::fixed << std::setprecision(1)
        << report::throughput_stats(result) << " req/s, SR " << std::setprecision(4)
        << report::sampling_rate_stats(result) << ", " << result.traces.size() << " traces, "
        << summary.cycles.size() << " cycles -> " << dir.string() << '\n';
    return kExitOk;
}

int cmd_compare(const Options& o, std::ostream& out, std::ostream& err) {
    Scenario sc = load(o);
    apply_overrides(sc, o);
    fs::path dir = sc.out;
    fs::create_directories(dir / "runs");

    struct Job {
        StrategyKind kind;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (auto s : sc.seeds)
        for (auto k : sc.strategies) jobs.push_back({k, s});

    std::vector<report::RunSummary> summaries(jobs.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr failure;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            try {
                auto result = sim::run(sc.run_spec(jobs[i].kind, jobs[i].seed));
                summaries[i] = report::summarize(result);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!failure) failure = std::current_exception();
                next.store(jobs.size());
                return;
            }
        }
    };
    unsigned n = worker_count(jobs.size());
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    for (std::size_t i = 0; i < jobs.size(); ++i) {
        write_file(dir / "runs" / (run_name(jobs[i].kind, jobs[i].seed) + ".json"), report::to_json(summaries[i]));
    }
    auto rep = report::write_report(summaries, dir);
    write_file(dir / "effective_scenario.yaml", dump_scenario(sc));

    out << jobs.size() << " runs (" << sc.strategies.size() << " strategies x " << sc.seeds.size()
        << " seeds) -> " << dir.string() << '\n';
    print_report(out, rep);
    return strict_status(sc, rep, err);
}

int cmd_report(const Options& o, std::ostream& out, std::ostream& err) {
    fs::path in = o.in_dir;
    if (!fs::is_directory(in)) throw ConfigError("command line", 0, "input directory '" + o.in_dir + "' not found");
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(in)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<report::RunSummary> summaries;
    for (const auto& f : files) {
        std::ifstream s(f);
        std::stringstream buf;
        buf << s.rdbuf();
        try {
            summaries.push_back(report::run_summary_from_json(buf.str()));
        } catch (const std::exception& e) {
            err << "skipping " << f.string() << ": " << e.what() << '\n';
        }
    }
    if (summaries.empty()) throw std::runtime_error("no run summaries under " + in.string());
    fs::path dir = o.out;
    fs::create_directories(dir);
    auto rep = report::write_report(summaries, dir);
    out << summaries.size() << " runs -> " << dir.string() << '\n';
    print_report(out, rep);
    Scenario flags;
    flags.strict = o.strict;
    return strict_status(flags, rep, err);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Adaptive trace sampling simulator"};
    app.require_subcommand(1);
    Options o;

    auto* validate = app.add_subcommand("validate", "Check a scenario without running it");
    validate->add_option("--scenario", o.scenario, "Scenario YAML (default: built-in)");

    auto* run = app.add_subcommand("run", "Simulate one strategy with one seed");
    run->add_option("--scenario", o.scenario, "Scenario YAML (default: built-in)");
    o.strategy_opt = run->add_option("--strategy", o.strategy, "ADP, INV, UNI, FUM or NOM");
    o.seed_opt = run->add_option("--seed", o.seed, "Random seed");
    auto* run_out = run->add_option("--out", o.out, "Output directory");

    auto* compare = app.add_subcommand("compare", "Run every strategy for every seed and report");
    compare->add_option("--scenario", o.scenario, "Scenario YAML (default: built-in)");
    o.strategies_opt = compare->add_option("--strategies", o.strategies, "Comma separated, e.g. ADP,INV,UNI,FUM,NOM");
    o.seeds_opt = compare->add_option("--seeds", o.seeds, "Range 1..10 or list 1,2,3");
    auto* cmp_out = compare->add_option("--out", o.out, "Output directory");
    auto* cmp_strict = compare->add_flag("--strict", o.strict, "Exit 3 when ground truth or request types are missing");

    auto* report = app.add_subcommand("report", "Rebuild the comparison report from stored run summaries");
    report->add_option("in_dir", o.in_dir, "Directory holding run summary JSON files")->required();
    report->add_option("out_dir", o.out, "Directory for the CSV report")->required();
    report->add_flag("--strict", o.strict, "Exit 3 when ground truth or request types are missing");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (validate->parsed()) return cmd_validate(o, out);
        if (run->parsed()) {
            o.out_opt = run_out;
            return cmd_run(o, out);
        }
        if (compare->parsed()) {
            o.out_opt = cmp_out;
            o.strict_opt = cmp_strict;
            return cmd_compare(o, out, err);
        }
        return cmd_report(o, out, err);
    } catch (const ConfigError& e) {
        err << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace reprtrace::cli
