#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "reprtrace/random.hpp"
#include "reprtrace/stat_kit.hpp"
#include "reprtrace/trace_model.hpp"

// The adaptive monitoring process: per-request sampling decision with
// resampling, periodic sampling-rate adaptation with performance baselines,
// and continuous sample evaluation, organised in monitoring cycles.
//
// These free functions operate on a MonitorState owned by a single context;
// AdaptiveSampler wraps them for concurrent callers.
namespace reprtrace::core {

struct MonitorState {
    explicit MonitorState(const SamplerConfig& config, TimestampMs start = 0);

    double rate;
    bool monitoring_enabled = true;
    std::optional<TimestampMs> baseline_until;

    FrequencyTable population;
    FrequencyTable sample;
    std::vector<TraceRecord> sample_traces;
    std::vector<double> sample_rts;
    stats::RunningSummary sample_rt_summary;
    double population_rt_sum = 0.0;
    std::uint64_t population_rt_count = 0;

    PerformanceReferenceTable perf_ref;
    TimestampMs cycle_start;
    std::uint64_t cycle_index = 0;

    double population_mean_rt() const noexcept {
        return population_rt_count == 0 ? 0.0
                                         : population_rt_sum / static_cast<double>(population_rt_count);
    }
};

// Sampling decision. The population is updated unconditionally. A request is
// traced when monitoring is on, the Bernoulli(rate) draw succeeds (one draw,
// consumed only while monitoring is on) and its type is not over-represented:
//   p_population(type) >= p_sample(type) - epsilon,
// both proportions taken before this request is counted anywhere.
bool decide(MonitorState& state, const RequestEvent& request, UniformSource& rng,
            const SamplerConfig& config);

void record_performance(MonitorState& state, PerformanceRecord current);

// Record at the median throughput among those with the given monitoring flag;
// with an even count, the higher of the two middle values.
std::optional<PerformanceRecord> select_normal_behavior(const PerformanceReferenceTable& perf_ref,
                                                        bool monitoring_enabled);

// Request types present in both records, in key order.
std::vector<std::string> common_types(const PerformanceRecord& a, const PerformanceRecord& b);

// sum(current) / sum(normal) - 1 over the shared request types.
// Throws InsufficientDataError when the records share no type.
double perf_diff(const PerformanceRecord& current, const PerformanceRecord& normal);

// Outcome of one adaptation step, for callers that report what happened.
struct AdaptationOutcome {
    double rate = 0.0;
    bool compared = false;  // a normal-behavior record with >= 2 shared types existed
    bool equal = true;
    double diff = 0.0;
    bool baseline_started = false;
};

// Response-time summary of a released sample's traces.
stats::SampleSummary sample_rt_summary(const ReleasedSample& released);

// Sampling-rate adaptation. The branch is chosen by the monitoring flag the
// current record was measured under. Lower response time is better:
//   monitored,   equal or diff <= 0      -> rate += rate*|diff| (capped at max_rate)
//   monitored,   not equal and diff > 0  -> start a baseline window, rate kept
//   unmonitored, not equal and diff > 0  -> rate -= rate*|diff| (floored at min_rate)
AdaptationOutcome adapt_rate_detailed(MonitorState& state, const PerformanceRecord& current,
                                      TimestampMs now, const SamplerConfig& config);

double adapt_rate(MonitorState& state, const PerformanceRecord& current, TimestampMs now,
                  const SamplerConfig& config);

// The three representativeness criteria at a given confidence.
struct SampleAssessment {
    double confidence = 1.0;
    double required_size = 0.0;
    bool size_ok = false;
    bool equivalent = false;
    bool balanced = false;

    bool representative() const noexcept { return size_ok && equivalent && balanced; }
};

// Criteria on plain statistics, usable both live and on a released sample:
//   |sample| > cochran(conf), one-sample t-test of sample response times
//   against the population mean at alpha = 0.05*conf, and for every
//   population type |p_pop - p_sample| <= (1 - conf) + epsilon.
SampleAssessment assess_sample(const FrequencyTable& population, const FrequencyTable& sample,
                               const stats::SampleSummary& sample_rts, double population_mean_rt,
                               stats::ConfidenceLevel conf, const SamplerConfig& config);

// Sample evaluation. Releases and starts a new cycle when the sample is
// representative, or unconditionally (reason Timeout) once the cycle is
// max_cycle_length old.
std::optional<ReleasedSample> evaluate_sample(MonitorState& state, TimestampMs now,
                                              const SamplerConfig& config);

// Adaptation tick: ends an expired baseline window, adapts the rate, and
// evaluates the sample (which enforces the cycle timeout).
std::optional<ReleasedSample> on_tick(MonitorState& state, TimestampMs now,
                                      const PerformanceRecord& current, const SamplerConfig& config);

}  // namespace reprtrace::core
