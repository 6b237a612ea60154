#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "reprtrace/simulator.hpp"

namespace reprtrace::report {

// Memory measurements of one request type. Negative (GC-affected) values are
// counted in `executions` but excluded from the mean.
struct MemoryStats {
    double sum = 0.0;
    std::uint64_t valid = 0;
    std::uint64_t executions = 0;

    void add(double memory_delta) noexcept {
        ++executions;
        if (memory_delta >= 0.0) {
            sum += memory_delta;
            ++valid;
        }
    }
    bool has_mean() const noexcept { return valid > 0; }
    double mean() const noexcept { return valid == 0 ? 0.0 : sum / static_cast<double>(valid); }

    friend bool operator==(const MemoryStats&, const MemoryStats&) = default;
};

using MemoryByType = std::map<std::string, MemoryStats>;

MemoryByType memory_by_type(std::span<const RequestEvent> events);
MemoryByType memory_by_type(std::span<const TraceRecord> traces);

// Per-type mean memory, only for types with at least one valid measurement.
std::map<std::string, double> mean_memory(const MemoryByType& stats);

/// sqrt(sum over ground types of (mu_ground - mu_sampled)^2 / |types|).
/// Throws MissingTypeError when a ground type has no sampled mean.
double rmse(const std::map<std::string, double>& ground, const std::map<std::string, double>& sampled);

struct CoveredRmse {
    double value = 0.0;
    std::size_t covered = 0;
    std::size_t total = 0;
    std::vector<std::string> missing;

    double coverage_pct() const noexcept {
        return total == 0 ? 100.0 : 100.0 * static_cast<double>(covered) / static_cast<double>(total);
    }
};

// RMSE over the ground types the sample covers; uncovered types are listed
// instead of contributing a fabricated error.
CoveredRmse rmse_covered(const std::map<std::string, double>& ground,
                         const std::map<std::string, double>& sampled);

// Mean requests per second over the run.
double throughput_stats(std::span<const sim::SecondRecord> series);
double throughput_stats(const sim::RunResult& run);

// Mean per-second controller sampling rate. Baseline windows keep the
// configured rate; the effective rate is exported in the series CSV.
double sampling_rate_stats(std::span<const sim::SecondRecord> series);
double sampling_rate_stats(const sim::RunResult& run);

struct CycleSummary {
    std::uint64_t cycle_index = 0;
    double released_at = 0.0;  // s
    double cycle_length = 0.0;  // s
    std::uint64_t sample_size = 0;
    std::uint64_t population_size = 0;
    double confidence = 1.0;
    ReleaseReason reason = ReleaseReason::Representative;

    friend bool operator==(const CycleSummary&, const CycleSummary&) = default;
};

// Everything the comparison report needs from a run, small enough to keep
// for many runs and to store on disk.
struct RunSummary {
    StrategyKind strategy = StrategyKind::NOM;
    std::uint64_t seed = 0;
    std::vector<sim::SecondRecord> series;
    std::vector<CycleSummary> cycles;
    MemoryByType ground_memory;
    MemoryByType sampled_memory;
    std::uint64_t event_count = 0;
    std::uint64_t trace_count = 0;

    friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

RunSummary summarize(const sim::RunResult& run);

std::string to_json(const RunSummary& summary);
RunSummary run_summary_from_json(const std::string& text);

struct StrategyRow {
    StrategyKind strategy = StrategyKind::NOM;
    std::size_t runs = 0;
    double tr_mean = 0.0;
    double tr_sd = 0.0;
    std::optional<double> tr_delta_pct;  // vs the NOM mean
    double sr_mean = 0.0;
    double sr_sd = 0.0;
    std::optional<double> rmse_mean;
    std::optional<double> rmse_sd;
    double rmse_coverage_pct = 100.0;
    std::size_t runs_with_missing_types = 0;
};

struct RunRow {
    StrategyKind strategy = StrategyKind::NOM;
    std::uint64_t seed = 0;
    double throughput = 0.0;
    double sampling_rate = 0.0;
    std::optional<CoveredRmse> rmse;
};

struct DistributionRow {
    std::string type_id;
    double population_pct = 0.0;
    std::map<StrategyKind, double> sampled_pct;
};

struct ComparisonReport {
    std::vector<StrategyRow> rows;  // in kAllStrategies order
    std::vector<RunRow> runs;
    std::vector<DistributionRow> distribution;
    std::vector<StrategyKind> distribution_columns;
    std::vector<std::string> warnings;
    bool missing_ground_truth = false;
    bool missing_types = false;

    const StrategyRow* row(StrategyKind kind) const noexcept;
};

// RMSE of a strategy's run is taken against the FUM run with the same seed.
ComparisonReport build_report(std::span<const RunSummary> runs);

// File layouts (comma separated, first line "# reprtrace <name> v1"):
//   summary.csv       strategy,runs,tr_mean,tr_sd,tr_delta_pct,sr_mean,sr_sd,
//                     rmse_mean,rmse_sd,rmse_coverage_pct,runs_missing_types
//   runs.csv          strategy,seed,throughput,sampling_rate,rmse,rmse_coverage_pct,missing_types
//   series/<S>_seed<k>.csv  second,users,throughput,sampling_rate,monitoring_enabled,effective_rate,traced
//   cycles.csv        strategy,seed,cycle_index,released_at_s,cycle_length_s,sample_size,
//                     population_size,confidence,reason
//   distribution.csv  type_id,population_pct,<S>_pct...
// Empty fields mean "not available".
ComparisonReport write_report(std::span<const RunSummary> runs, const std::filesystem::path& out_dir);

void write_series_csv(std::ostream& out, const RunSummary& run);
void write_summary_csv(std::ostream& out, const ComparisonReport& report);
void write_runs_csv(std::ostream& out, const ComparisonReport& report);
void write_cycles_csv(std::ostream& out, std::span<const RunSummary> runs);
void write_distribution_csv(std::ostream& out, const ComparisonReport& report);

}  // namespace reprtrace::report
