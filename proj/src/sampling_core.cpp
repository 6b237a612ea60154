#include "reprtrace/sampling_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "reprtrace/errors.hpp"

namespace reprtrace::core {

namespace {
constexpr double kAdaptationAlpha = 0.05;
constexpr double kEvaluationAlpha = 0.05;
}  // namespace

MonitorState::MonitorState(const SamplerConfig& config, TimestampMs start)
    : rate(config.max_rate), perf_ref(config.history_capacity), cycle_start(start) {
    config.validate();
}

bool decide(MonitorState& state, const RequestEvent& request, UniformSource& rng,
            const SamplerConfig& config) {
    const std::string& type = request.type_id;
    const double population_share = state.population.proportion(type);

    state.population.add(type);
    state.population_rt_sum += request.response_time;
    ++state.population_rt_count;

    if (!state.monitoring_enabled) {
        return false;
    }
    if (!stats::bernoulli(state.rate, rng)) {
        return false;
    }
    if (!state.sample.empty() &&
        population_share < state.sample.proportion(type) - config.epsilon) {
        return false;
    }

    state.sample.add(type);
    state.sample_rts.push_back(request.response_time);
    state.sample_rt_summary.add(request.response_time);
    TraceRecord rec{request, state.cycle_index,
                    request.start + static_cast<TimestampMs>(std::llround(request.response_time))};
    state.sample_traces.push_back(std::move(rec));
    return true;
}

void record_performance(MonitorState& state, PerformanceRecord current) {
    state.perf_ref.add(std::move(current));
}

std::optional<PerformanceRecord> select_normal_behavior(const PerformanceReferenceTable& perf_ref,
                                                        bool monitoring_enabled) {
    std::vector<const PerformanceRecord*> matching;
    for (const auto& r : perf_ref.records()) {
        if (r.monitoring_enabled == monitoring_enabled) {
            matching.push_back(&r);
        }
    }
    if (matching.empty()) {
        return std::nullopt;
    }
    std::stable_sort(matching.begin(), matching.end(),
                     [](const auto* a, const auto* b) { return a->rps < b->rps; });
    // Index n/2 is the middle for odd n and the upper middle for even n.
    return *matching[matching.size() / 2];
}

std::vector<std::string> common_types(const PerformanceRecord& a, const PerformanceRecord& b) {
    std::vector<std::string> out;
    for (const auto& [type, rt] : a.mean_rt) {
        if (b.mean_rt.contains(type)) {
            out.push_back(type);
        }
    }
    return out;
}

double perf_diff(const PerformanceRecord& current, const PerformanceRecord& normal) {
    double current_sum = 0.0;
    double normal_sum = 0.0;
    std::size_t shared = 0;
    for (const auto& [type, rt] : current.mean_rt) {
        auto it = normal.mean_rt.find(type);
        if (it == normal.mean_rt.end()) continue;
        current_sum += rt;
        normal_sum += it->second;
        ++shared;
    }
    if (shared == 0) {
        throw InsufficientDataError("performance records share no request type");
    }
    if (normal_sum <= 0.0) {
        throw InsufficientDataError("normal behavior has zero total response time");
    }
    return current_sum / normal_sum - 1.0;
}

AdaptationOutcome adapt_rate_detailed(MonitorState& state, const PerformanceRecord& current,
                                      TimestampMs now, const SamplerConfig& config) {
    record_performance(state, current);

    AdaptationOutcome out;
    out.rate = state.rate;

    auto normal = select_normal_behavior(state.perf_ref, current.monitoring_enabled);
    if (!normal) {
        return out;
    }
    auto shared = common_types(current, *normal);
    if (shared.size() < 2) {
        return out;
    }

    std::vector<double> normal_rt;
    std::vector<double> current_rt;
    normal_rt.reserve(shared.size());
    current_rt.reserve(shared.size());
    for (const auto& type : shared) {
        normal_rt.push_back(normal->mean_rt.at(type));
        current_rt.push_back(current.mean_rt.at(type));
    }
    if (std::accumulate(normal_rt.begin(), normal_rt.end(), 0.0) <= 0.0) {
        return out;
    }

    out.compared = true;
    out.equal = stats::paired_t_test(normal_rt, current_rt, stats::SignificanceLevel(kAdaptationAlpha));
    out.diff = perf_diff(current, *normal);
    const double magnitude = std::fabs(out.diff);

    if (current.monitoring_enabled) {
        if (out.equal || out.diff <= 0.0) {
            state.rate = std::min(state.rate + state.rate * magnitude, config.max_rate);
        } else if (state.monitoring_enabled) {
            state.monitoring_enabled = false;
            state.baseline_until =
                now + static_cast<TimestampMs>(std::llround(config.baseline_duration * 1000.0));
            out.baseline_started = true;
        }
    } else if (!out.equal && out.diff > 0.0) {
        state.rate = std::max(state.rate - state.rate * magnitude, config.min_rate);
    }
    state.rate = std::clamp(state.rate, config.min_rate, config.max_rate);
    out.rate = state.rate;
    return out;
}

double adapt_rate(MonitorState& state, const PerformanceRecord& current, TimestampMs now,
                  const SamplerConfig& config) {
    return adapt_rate_detailed(state, current, now, config).rate;
}

SampleAssessment assess_sample(const FrequencyTable& population, const FrequencyTable& sample,
                               const stats::SampleSummary& sample_rts, double population_mean_rt,
                               stats::ConfidenceLevel conf, const SamplerConfig& config) {
    SampleAssessment a;
    a.confidence = conf.value();
    if (population.empty()) {
        return a;
    }
    a.required_size = stats::cochran_sample_size(conf, config.variability_p, config.margin_e,
                                                 static_cast<double>(population.total()));
    a.size_ok = static_cast<double>(sample.total()) > a.required_size;

    if (sample_rts.n >= 2) {
        a.equivalent = stats::one_sample_t_test(sample_rts, population_mean_rt,
                                                stats::SignificanceLevel(kEvaluationAlpha * conf.value()));
    }

    const double tolerance = (1.0 - conf.value()) + config.epsilon;
    a.balanced = true;
    for (const auto& [type, count] : population.counts()) {
        double gap = std::fabs(population.proportion(type) - sample.proportion(type));
        if (gap > tolerance) {
            a.balanced = false;
            break;
        }
    }
    return a;
}

stats::SampleSummary sample_rt_summary(const ReleasedSample& released) {
    stats::RunningSummary acc;
    for (const auto& t : released.traces) {
        acc.add(t.event.response_time);
    }
    return acc.summary();
}

namespace {

ReleasedSample release(MonitorState& state, TimestampMs now, double elapsed_s, double conf,
                       ReleaseReason reason) {
    ReleasedSample out;
    out.traces = std::move(state.sample_traces);
    out.population_stats = std::move(state.population);
    out.sample_stats = std::move(state.sample);
    out.cycle_length = elapsed_s;
    out.confidence_at_release = conf;
    out.population_mean_rt = state.population_mean_rt();
    out.reason = reason;
    out.cycle_index = state.cycle_index;
    out.released_at = now;

    state.sample_traces.clear();
    state.population.clear();
    state.sample.clear();
    state.sample_rts.clear();
    state.sample_rt_summary.reset();
    state.population_rt_sum = 0.0;
    state.population_rt_count = 0;
    ++state.cycle_index;
    state.cycle_start = now;
    return out;
}

}  // namespace

std::optional<ReleasedSample> evaluate_sample(MonitorState& state, TimestampMs now,
                                              const SamplerConfig& config) {
    const double elapsed_s = static_cast<double>(std::max<TimestampMs>(now - state.cycle_start, 0)) / 1000.0;
    const auto conf = stats::decayed_confidence(elapsed_s, config.max_cycle_length);

    auto assessment = assess_sample(state.population, state.sample, state.sample_rt_summary.summary(),
                                    state.population_mean_rt(), conf, config);
    if (assessment.representative()) {
        return release(state, now, elapsed_s, conf.value(), ReleaseReason::Representative);
    }
    if (elapsed_s >= config.max_cycle_length) {
        return release(state, now, elapsed_s, conf.value(), ReleaseReason::Timeout);
    }
    return std::nullopt;
}

std::optional<ReleasedSample> on_tick(MonitorState& state, TimestampMs now,
                                      const PerformanceRecord& current, const SamplerConfig& config) {
    if (!state.monitoring_enabled && state.baseline_until && now >= *state.baseline_until) {
        state.monitoring_enabled = true;
        state.baseline_until.reset();
    }
    adapt_rate(state, current, now, config);
    return evaluate_sample(state, now, config);
}

}  // namespace reprtrace::core
