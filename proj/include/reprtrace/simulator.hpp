#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "reprtrace/random.hpp"
#include "reprtrace/strategies.hpp"
#include "reprtrace/trace_model.hpp"
#include "reprtrace/workload.hpp"

namespace reprtrace::sim {

struct RequestTypeSpec {
    std::string type_id;
    double weight = 1.0;
    double base_rt = 10.0;        // ms
    double rt_dispersion = 0.3;   // lognormal sigma
    double base_mem = 100.0;      // KB
    double mem_dispersion = 0.3;  // lognormal sigma
};

// Closed-loop application model. Each user issues requests back to back;
// a request's service time is
//   base_rt * lognormal(rt_dispersion) * (1 + gamma * max(0, U_eff - capacity) / capacity)
// where U_eff = users * (1 + monitor_load * traced fraction of the previous
// second). A traced request additionally keeps its user busy for trace_cost
// ms after the response; that cost is not part of the measured response time.
// The memory measurement is base_mem * lognormal(mem_dispersion), inflated by
// mem_concurrency_gain per other concurrent user (free-memory deltas pick up
// their allocations), and turns negative with probability gc_negative_prob.
struct AppModel {
    std::vector<RequestTypeSpec> types;
    int capacity_users = 10;
    double contention_gamma = 1.0;
    double trace_cost = 0.0;  // ms per traced request
    double monitor_load = 0.0;
    double mem_concurrency_gain = 0.0;
    double gc_negative_prob = 0.0;

    void validate() const;
};

struct SecondRecord {
    int second = 0;
    int users = 0;
    std::uint64_t throughput = 0;
    std::uint64_t traced = 0;
    double sampling_rate = 0.0;  // controller rate in effect
    bool monitoring_enabled = false;

    // Rate actually applied: zero while monitoring is switched off.
    double effective_rate() const noexcept { return monitoring_enabled ? sampling_rate : 0.0; }

    friend bool operator==(const SecondRecord&, const SecondRecord&) = default;
};

struct RunResult {
    StrategyKind strategy = StrategyKind::NOM;
    std::uint64_t seed = 0;
    std::vector<SecondRecord> series;
    std::vector<TraceRecord> traces;
    std::vector<RequestEvent> events;  // ground truth, every request served
    std::vector<ReleasedSample> released;
};

struct StepOutcome {
    SecondRecord record;
    PerformanceRecord performance;
    std::map<std::string, std::pair<double, std::uint64_t>> rt_totals;  // sum ms, count
};

// Drives one strategy through the model second by second. The request
// stream of second s comes from its own generator derived from (seed, s), so
// every strategy sees the same requests in the same order; only how many fit
// in the second depends on tracing.
class Simulation {
public:
    Simulation(const AppModel& model, SamplingStrategy& strategy, std::uint64_t seed,
               bool keep_events = true);

    StepOutcome step(int second, int users);

    std::vector<TraceRecord>& traces() noexcept { return traces_; }
    std::vector<RequestEvent>& events() noexcept { return events_; }

private:
    const AppModel& model_;
    SamplingStrategy& strategy_;
    std::uint64_t seed_;
    Rng decision_rng_;
    std::vector<double> cumulative_weight_;
    double carry_ms_ = 0.0;
    double prev_traced_fraction_ = 0.0;
    std::uint64_t sequence_ = 0;
    bool keep_events_;
    std::vector<TraceRecord> traces_;
    std::vector<RequestEvent> events_;
};

struct RunSpec {
    AppModel model;
    WorkloadSpec workload;
    SamplerConfig sampler;
    StrategyKind strategy = StrategyKind::ADP;
    std::uint64_t seed = 1;
    bool keep_events = true;
};

// Full schedule; ticks the strategy every adaptation_frequency seconds
// (rounded to whole seconds, at least 1). Deterministic in (spec, seed).
RunResult run(const RunSpec& spec);

}  // namespace reprtrace::sim
