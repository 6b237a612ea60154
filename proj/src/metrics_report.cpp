#include "reprtrace/metrics_report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <set>

#include <json.hpp>

#include "reprtrace/errors.hpp"

namespace reprtrace::report {

using nlohmann::json;

MemoryByType memory_by_type(std::span<const RequestEvent> events) {
    MemoryByType out;
    for (const auto& e : events) {
        out[e.type_id].add(e.memory_delta);
    }
    return out;
}

MemoryByType memory_by_type(std::span<const TraceRecord> traces) {
    MemoryByType out;
    for (const auto& t : traces) {
        out[t.event.type_id].add(t.event.memory_delta);
    }
    return out;
}

std::map<std::string, double> mean_memory(const MemoryByType& stats) {
    std::map<std::string, double> out;
    for (const auto& [type, s] : stats) {
        if (s.has_mean()) out[type] = s.mean();
    }
    return out;
}

double rmse(const std::map<std::string, double>& ground, const std::map<std::string, double>& sampled) {
    if (ground.empty()) {
        throw InsufficientDataError("RMSE needs at least one request type");
    }
    double acc = 0.0;
    for (const auto& [type, mu] : ground) {
        auto it = sampled.find(type);
        if (it == sampled.end()) {
            throw MissingTypeError(type);
        }
        double d = mu - it->second;
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(ground.size()));
}

CoveredRmse rmse_covered(const std::map<std::string, double>& ground,
                         const std::map<std::string, double>& sampled) {
    CoveredRmse out;
    out.total = ground.size();
    std::map<std::string, double> covered_ground;
    for (const auto& [type, mu] : ground) {
        if (sampled.contains(type)) {
            covered_ground.emplace(type, mu);
        } else {
            out.missing.push_back(type);
        }
    }
    out.covered = covered_ground.size();
    out.value = covered_ground.empty() ? std::nan("") : rmse(covered_ground, sampled);
    return out;
}

double throughput_stats(std::span<const sim::SecondRecord> series) {
    if (series.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& s : series) sum += static_cast<double>(s.throughput);
    return sum / static_cast<double>(series.size());
}

double throughput_stats(const sim::RunResult& run) { return throughput_stats(run.series); }

double sampling_rate_stats(std::span<const sim::SecondRecord> series) {
    if (series.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& s : series) sum += s.sampling_rate;
    return sum / static_cast<double>(series.size());
}

double sampling_rate_stats(const sim::RunResult& run) { return sampling_rate_stats(run.series); }

RunSummary summarize(const sim::RunResult& run) {
    RunSummary out;
    out.strategy = run.strategy;
    out.seed = run.seed;
    out.series = run.series;
    for (const auto& r : run.released) {
        CycleSummary c;
        c.cycle_index = r.cycle_index;
        c.released_at = static_cast<double>(r.released_at) / 1000.0;
        c.cycle_length = r.cycle_length;
        c.sample_size = r.sample_stats.total();
        c.population_size = r.population_stats.total();
        c.confidence = r.confidence_at_release;
        c.reason = r.reason;
        out.cycles.push_back(c);
    }
    out.ground_memory = memory_by_type(run.events);
    out.sampled_memory = memory_by_type(run.traces);
    out.event_count = run.events.size();
    out.trace_count = run.traces.size();
    return out;
}

namespace {

json memory_to_json(const MemoryByType& m) {
    json out = json::object();
    for (const auto& [type, s] : m) {
        out[type] = {{"sum", s.sum}, {"valid", s.valid}, {"executions", s.executions}};
    }
    return out;
}

MemoryByType memory_from_json(const json& j) {
    MemoryByType out;
    for (auto it = j.begin(); it != j.end(); ++it) {
        MemoryStats s;
        s.sum = it.value().at("sum").get<double>();
        s.valid = it.value().at("valid").get<std::uint64_t>();
        s.executions = it.value().at("executions").get<std::uint64_t>();
        out.emplace(it.key(), s);
    }
    return out;
}

}  // namespace

std::string to_json(const RunSummary& summary) {
    json j;
    j["format"] = "reprtrace-run-summary/1";
    j["strategy"] = std::string(to_string(summary.strategy));
    j["seed"] = summary.seed;
    j["event_count"] = summary.event_count;
    j["trace_count"] = summary.trace_count;
    json series = json::array();
    for (const auto& s : summary.series) {
        series.push_back({s.second, s.users, s.throughput, s.traced, s.sampling_rate, s.monitoring_enabled});
    }
    j["series"] = std::move(series);
    json cycles = json::array();
    for (const auto& c : summary.cycles) {
        cycles.push_back({{"cycle_index", c.cycle_index},
                          {"released_at", c.released_at},
                          {"cycle_length", c.cycle_length},
                          {"sample_size", c.sample_size},
                          {"population_size", c.population_size},
                          {"confidence", c.confidence},
                          {"reason", std::string(to_string(c.reason))}});
    }
    j["cycles"] = std::move(cycles);
    j["ground_memory"] = memory_to_json(summary.ground_memory);
    j["sampled_memory"] = memory_to_json(summary.sampled_memory);
    return j.dump(1);
}

RunSummary run_summary_from_json(const std::string& text) {
    json j = json::parse(text);
    if (j.value("format", "") != "reprtrace-run-summary/1") {
        throw ParameterError("not a reprtrace run summary (format tag missing or unknown)");
    }
    RunSummary out;
    auto kind = parse_strategy_kind(j.at("strategy").get<std::string>());
    if (!kind) throw ParameterError("unknown strategy in run summary");
    out.strategy = *kind;
    out.seed = j.at("seed").get<std::uint64_t>();
    out.event_count = j.at("event_count").get<std::uint64_t>();
    out.trace_count = j.at("trace_count").get<std::uint64_t>();
    for (const auto& row : j.at("series")) {
        sim::SecondRecord s;
        s.second = row.at(0).get<int>();
        s.users = row.at(1).get<int>();
        s.throughput = row.at(2).get<std::uint64_t>();
        s.traced = row.at(3).get<std::uint64_t>();
        s.sampling_rate = row.at(4).get<double>();
        s.monitoring_enabled = row.at(5).get<bool>();
        out.series.push_back(s);
    }
    for (const auto& c : j.at("cycles")) {
        CycleSummary cs;
        cs.cycle_index = c.at("cycle_index").get<std::uint64_t>();
        cs.released_at = c.at("released_at").get<double>();
        cs.cycle_length = c.at("cycle_length").get<double>();
        cs.sample_size = c.at("sample_size").get<std::uint64_t>();
        cs.population_size = c.at("population_size").get<std::uint64_t>();
        cs.confidence = c.at("confidence").get<double>();
        cs.reason = c.at("reason").get<std::string>() == "timeout" ? ReleaseReason::Timeout
                                                                   : ReleaseReason::Representative;
        out.cycles.push_back(cs);
    }
    out.ground_memory = memory_from_json(j.at("ground_memory"));
    out.sampled_memory = memory_from_json(j.at("sampled_memory"));
    return out;
}

const StrategyRow* ComparisonReport::row(StrategyKind kind) const noexcept {
    for (const auto& r : rows) {
        if (r.strategy == kind) return &r;
    }
    return nullptr;
}

namespace {

struct MeanSd {
    double mean = 0.0;
    double sd = 0.0;
};

MeanSd mean_sd(const std::vector<double>& xs) {
    MeanSd out;
    if (xs.empty()) return out;
    out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return out;
}

bool is_sampler(StrategyKind k) {
    return k == StrategyKind::ADP || k == StrategyKind::INV || k == StrategyKind::UNI;
}

}  // namespace

ComparisonReport build_report(std::span<const RunSummary> runs) {
    ComparisonReport report;

    std::map<std::uint64_t, const RunSummary*> fum_by_seed;
    for (const auto& r : runs) {
        if (r.strategy == StrategyKind::FUM) fum_by_seed[r.seed] = &r;
    }

    for (const auto& r : runs) {
        RunRow row;
        row.strategy = r.strategy;
        row.seed = r.seed;
        row.throughput = throughput_stats(r.series);
        row.sampling_rate = sampling_rate_stats(r.series);
        if (is_sampler(r.strategy)) {
            auto fum = fum_by_seed.find(r.seed);
            if (fum == fum_by_seed.end()) {
                report.missing_ground_truth = true;
            } else {
                row.rmse = rmse_covered(mean_memory(fum->second->ground_memory), mean_memory(r.sampled_memory));
                if (!row.rmse->missing.empty()) {
                    report.missing_types = true;
                    report.warnings.push_back(std::string(to_string(r.strategy)) + " seed " +
                                              std::to_string(r.seed) + ": " +
                                              std::to_string(row.rmse->missing.size()) +
                                              " request type(s) never sampled; RMSE over covered types");
                }
            }
        }
        report.runs.push_back(std::move(row));
    }
    if (report.missing_ground_truth) {
        report.warnings.push_back("no FUM run for some seeds; RMSE omitted for those runs");
    }

    std::optional<double> nom_mean;
    for (auto kind : kAllStrategies) {
        std::vector<double> tr, sr, err, coverage;
        StrategyRow row;
        row.strategy = kind;
        for (const auto& rr : report.runs) {
            if (rr.strategy != kind) continue;
            ++row.runs;
            tr.push_back(rr.throughput);
            sr.push_back(rr.sampling_rate);
            if (rr.rmse && rr.rmse->covered > 0) {
                err.push_back(rr.rmse->value);
                coverage.push_back(rr.rmse->coverage_pct());
                if (!rr.rmse->missing.empty()) ++row.runs_with_missing_types;
            }
        }
        if (row.runs == 0) continue;
        auto t = mean_sd(tr);
        auto s = mean_sd(sr);
        row.tr_mean = t.mean;
        row.tr_sd = t.sd;
        row.sr_mean = s.mean;
        row.sr_sd = s.sd;
        if (!err.empty()) {
            auto e = mean_sd(err);
            row.rmse_mean = e.mean;
            row.rmse_sd = e.sd;
            row.rmse_coverage_pct = mean_sd(coverage).mean;
        }
        if (kind == StrategyKind::NOM) nom_mean = row.tr_mean;
        report.rows.push_back(row);
    }
    if (nom_mean && *nom_mean > 0.0) {
        for (auto& row : report.rows) {
            row.tr_delta_pct = (row.tr_mean - *nom_mean) / *nom_mean * 100.0;
        }
    }

    // Request distribution: population from FUM ground truth when present,
    // otherwise from every run's ground truth.
    std::map<std::string, double> population;
    bool have_fum = !fum_by_seed.empty();
    std::map<StrategyKind, std::map<std::string, double>> sampled;
    for (const auto& r : runs) {
        if (!have_fum || r.strategy == StrategyKind::FUM) {
            for (const auto& [type, s] : r.ground_memory) population[type] += static_cast<double>(s.executions);
        }
        for (const auto& [type, s] : r.sampled_memory) sampled[r.strategy][type] += static_cast<double>(s.executions);
    }
    auto to_pct = [](std::map<std::string, double>& m) {
        double total = 0.0;
        for (const auto& [k, v] : m) total += v;
        if (total > 0.0)
            for (auto& [k, v] : m) v = 100.0 * v / total;
    };
    to_pct(population);
    for (auto kind : kAllStrategies) {
        auto it = sampled.find(kind);
        if (it == sampled.end() || it->second.empty()) continue;
        to_pct(it->second);
        report.distribution_columns.push_back(kind);
    }
    std::set<std::string> all_types;
    for (const auto& [k, v] : population) all_types.insert(k);
    for (const auto& [kind, m] : sampled)
        for (const auto& [k, v] : m) all_types.insert(k);
    for (const auto& type : all_types) {
        DistributionRow row;
        row.type_id = type;
        row.population_pct = population.contains(type) ? population.at(type) : 0.0;
        for (auto kind : report.distribution_columns) {
            const auto& m = sampled.at(kind);
            row.sampled_pct[kind] = m.contains(type) ? m.at(type) : 0.0;
        }
        report.distribution.push_back(std::move(row));
    }
    return report;
}

namespace {

std::string num(double v) {
    if (std::isnan(v)) return "";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

void write_series_csv(std::ostream& out, const RunSummary& run) {
    out << "# reprtrace series v1\n";
    out << "second,users,throughput,sampling_rate,monitoring_enabled,effective_rate,traced\n";
    for (const auto& s : run.series) {
        out << s.second << ',' << s.users << ',' << s.throughput << ',' << num(s.sampling_rate) << ','
            << (s.monitoring_enabled ? 1 : 0) << ',' << num(s.effective_rate()) << ',' << s.traced << '\n';
    }
}

void write_summary_csv(std::ostream& out, const ComparisonReport& report) {
    out << "# reprtrace summary v1\n";
    out << "strategy,runs,tr_mean,tr_sd,tr_delta_pct,sr_mean,sr_sd,rmse_mean,rmse_sd,rmse_coverage_pct,"
           "runs_missing_types\n";
    for (const auto& r : report.rows) {
        bool has_rmse = r.rmse_mean.has_value();
        out << to_string(r.strategy) << ',' << r.runs << ',' << num(r.tr_mean) << ',' << num(r.tr_sd) << ','
            << num(r.tr_delta_pct) << ',' << num(r.sr_mean) << ',' << num(r.sr_sd) << ',' << num(r.rmse_mean)
            << ',' << num(r.rmse_sd) << ',' << (has_rmse ? num(r.rmse_coverage_pct) : "") << ','
            << (has_rmse ? std::to_string(r.runs_with_missing_types) : "") << '\n';
    }
}

void write_runs_csv(std::ostream& out, const ComparisonReport& report) {
    out << "# reprtrace runs v1\n";
    out << "strategy,seed,throughput,sampling_rate,rmse,rmse_coverage_pct,missing_types\n";
    for (const auto& r : report.runs) {
        out << to_string(r.strategy) << ',' << r.seed << ',' << num(r.throughput) << ','
            << num(r.sampling_rate) << ',';
        if (r.rmse) {
            std::string missing;
            for (const auto& m : r.rmse->missing) {
                if (!missing.empty()) missing += ';';
                missing += m;
            }
            out << num(r.rmse->value) << ',' << num(r.rmse->coverage_pct()) << ',' << csv_field(missing);
        } else {
            out << ",,";
        }
        out << '\n';
    }
}

void write_cycles_csv(std::ostream& out, std::span<const RunSummary> runs) {
    out << "# reprtrace cycles v1\n";
    out << "strategy,seed,cycle_index,released_at_s,cycle_length_s,sample_size,population_size,confidence,reason\n";
    for (const auto& r : runs) {
        for (const auto& c : r.cycles) {
            out << to_string(r.strategy) << ',' << r.seed << ',' << c.cycle_index << ',' << num(c.released_at)
                << ',' << num(c.cycle_length) << ',' << c.sample_size << ',' << c.population_size << ','
                << num(c.confidence) << ',' << to_string(c.reason) << '\n';
        }
    }
}

void write_distribution_csv(std::ostream& out, const ComparisonReport& report) {
    out << "# reprtrace distribution v1\n";
    out << "type_id,population_pct";
    for (auto k : report.distribution_columns) out << ',' << to_string(k) << "_pct";
    out << '\n';
    for (const auto& row : report.distribution) {
        out << csv_field(row.type_id) << ',' << num(row.population_pct);
        for (auto k : report.distribution_columns) out << ',' << num(row.sampled_pct.at(k));
        out << '\n';
    }
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    return f;
}

}  // namespace

ComparisonReport write_report(std::span<const RunSummary> runs, const std::filesystem::path& out_dir) {
    if (runs.empty()) {
        throw InsufficientDataError("report needs at least one run");
    }
    auto report = build_report(runs);
    std::filesystem::create_directories(out_dir / "series");
    {
        auto f = open_out(out_dir / "summary.csv");
        write_summary_csv(f, report);
    }
    {
        auto f = open_out(out_dir / "runs.csv");
        write_runs_csv(f, report);
    }
    {
        auto f = open_out(out_dir / "cycles.csv");
        write_cycles_csv(f, runs);
    }
    {
        auto f = open_out(out_dir / "distribution.csv");
        write_distribution_csv(f, report);
    }
    for (const auto& r : runs) {
        auto f = open_out(out_dir / "series" /
                          (std::string(to_string(r.strategy)) + "_seed" + std::to_string(r.seed) + ".csv"));
        write_series_csv(f, r);
    }
    return report;
}

}  // namespace reprtrace::report
