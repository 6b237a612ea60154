#include "reprtrace/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "reprtrace/errors.hpp"

namespace reprtrace::sim {

namespace {
// Stream ids for derive_seed; decision streams are offset by strategy.
constexpr std::uint64_t kWorkloadStream = 1'000'000;
constexpr std::uint64_t kDecisionStream = 100;
}  // namespace

void AppModel::validate() const {
    if (types.empty()) {
        throw ParameterError("model declares no request types");
    }
    for (const auto& t : types) {
        const std::string where = "request type '" + t.type_id + "': ";
        if (t.type_id.empty()) throw ParameterError("request type id must be non-empty");
        if (t.type_id.find_first_of("\t\n") != std::string::npos)
            throw ParameterError(where + "id must not contain tabs or newlines");
        if (!(t.weight > 0.0)) throw ParameterError(where + "weight must be positive");
        if (!(t.base_rt > 0.0)) throw ParameterError(where + "base_rt must be positive");
        if (!(t.base_mem > 0.0)) throw ParameterError(where + "base_mem must be positive");
        if (!(t.rt_dispersion >= 0.0)) throw ParameterError(where + "rt_dispersion must be >= 0");
        if (!(t.mem_dispersion >= 0.0)) throw ParameterError(where + "mem_dispersion must be >= 0");
    }
    for (std::size_t i = 0; i < types.size(); ++i) {
        for (std::size_t j = i + 1; j < types.size(); ++j) {
            if (types[i].type_id == types[j].type_id)
                throw ParameterError("duplicate request type '" + types[i].type_id + "'");
        }
    }
    if (capacity_users < 1) throw ParameterError("capacity_users must be >= 1");
    if (!(contention_gamma >= 0.0)) throw ParameterError("contention_gamma must be >= 0");
    if (!(trace_cost >= 0.0)) throw ParameterError("trace_cost must be >= 0");
    if (!(monitor_load >= 0.0)) throw ParameterError("monitor_load must be >= 0");
    if (!(mem_concurrency_gain >= 0.0)) throw ParameterError("mem_concurrency_gain must be >= 0");
    if (!(gc_negative_prob >= 0.0 && gc_negative_prob < 1.0))
        throw ParameterError("gc_negative_prob must lie in [0, 1)");
}

Simulation::Simulation(const AppModel& model, SamplingStrategy& strategy, std::uint64_t seed,
                       bool keep_events)
    : model_(model),
      strategy_(strategy),
      seed_(seed),
      decision_rng_(derive_seed(seed, kDecisionStream + static_cast<std::uint64_t>(strategy.kind()))),
      keep_events_(keep_events) {
    model_.validate();
    double acc = 0.0;
    for (const auto& t : model_.types) {
        acc += t.weight;
        cumulative_weight_.push_back(acc);
    }
}

StepOutcome Simulation::step(int second, int users) {
    const double capacity = static_cast<double>(model_.capacity_users);
    const double effective_users =
        users * (1.0 + model_.monitor_load * prev_traced_fraction_);
    const double slowdown =
        1.0 + model_.contention_gamma * std::max(0.0, effective_users - capacity) / capacity;
    const double mem_factor = 1.0 + model_.mem_concurrency_gain * (users - 1);

    StepOutcome out;
    out.record.second = second;
    out.record.users = users;
    out.record.sampling_rate = strategy_.rate();
    out.record.monitoring_enabled = strategy_.monitoring_enabled();
    out.performance.monitoring_enabled = out.record.monitoring_enabled;

    const double budget = users * 1000.0 - carry_ms_;
    const TimestampMs second_start = static_cast<TimestampMs>(second) * 1000;
    Rng workload(derive_seed(seed_, kWorkloadStream + static_cast<std::uint64_t>(second)));

    auto& rt_by_type = out.rt_totals;
    double used = 0.0;
    while (used < budget) {
        const auto& type = model_.types[workload.next_weighted_index(cumulative_weight_)];
        const double rt_noise = workload.next_lognormal_unit_mean(type.rt_dispersion);
        const double mem_noise = workload.next_lognormal_unit_mean(type.mem_dispersion);
        const bool gc_hit = workload.next_uniform() < model_.gc_negative_prob;

        RequestEvent ev;
        ev.type_id = type.type_id;
        ev.start = second_start + static_cast<TimestampMs>(std::max(used, 0.0) / users);
        ev.response_time = type.base_rt * rt_noise * slowdown;
        ev.memory_delta = type.base_mem * mem_noise * mem_factor;
        if (gc_hit) {
            ev.memory_delta = -ev.memory_delta;
        }
        ev.sequence = sequence_++;

        const std::uint64_t cycle = strategy_.cycle_index();
        const bool traced = strategy_.decide(ev, decision_rng_);

        used += ev.response_time;
        auto& slot = rt_by_type[ev.type_id];
        slot.first += ev.response_time;
        ++slot.second;
        ++out.record.throughput;
        if (traced) {
            used += model_.trace_cost;
            ++out.record.traced;
            traces_.push_back({ev, cycle, ev.start + static_cast<TimestampMs>(std::llround(ev.response_time))});
        }
        if (keep_events_) {
            events_.push_back(std::move(ev));
        }
    }
    carry_ms_ = used - budget;

    prev_traced_fraction_ = out.record.throughput == 0
                                ? 0.0
                                : static_cast<double>(out.record.traced) /
                                      static_cast<double>(out.record.throughput);
    out.performance.rps = static_cast<double>(out.record.throughput);
    for (const auto& [type, acc] : rt_by_type) {
        out.performance.mean_rt[type] = acc.first / static_cast<double>(acc.second);
    }
    return out;
}

namespace {

// Merges per-second records into one record covering a whole tick interval.
PerformanceRecord merge(const std::vector<StepOutcome>& steps) {
    PerformanceRecord out;
    std::map<std::string, std::pair<double, std::uint64_t>> sums;
    double total = 0.0;
    for (const auto& s : steps) {
        total += s.performance.rps;
        out.monitoring_enabled = s.performance.monitoring_enabled;
        for (const auto& [type, acc] : s.rt_totals) {
            sums[type].first += acc.first;
            sums[type].second += acc.second;
        }
    }
    out.rps = steps.empty() ? 0.0 : total / static_cast<double>(steps.size());
    for (const auto& [type, acc] : sums) {
        out.mean_rt[type] = acc.first / static_cast<double>(acc.second);
    }
    return out;
}

}  // namespace

RunResult run(const RunSpec& spec) {
    spec.model.validate();
    spec.workload.validate();
    spec.sampler.validate();

    auto strategy = make_strategy(spec.strategy, spec.sampler);
    Simulation sim(spec.model, *strategy, spec.seed, spec.keep_events);

    RunResult result;
    result.strategy = spec.strategy;
    result.seed = spec.seed;

    const int seconds = static_cast<int>(std::floor(spec.workload.total_duration()));
    const int tick_every = std::max(1, static_cast<int>(std::lround(spec.sampler.adaptation_frequency)));
    result.series.reserve(static_cast<std::size_t>(seconds));

    std::vector<StepOutcome> interval;
    for (int s = 0; s < seconds; ++s) {
        auto outcome = sim.step(s, users_at(spec.workload, static_cast<double>(s)));
        result.series.push_back(outcome.record);
        interval.push_back(std::move(outcome));
        if (static_cast<int>(interval.size()) == tick_every) {
            PerformanceRecord current =
                interval.size() == 1 ? interval.front().performance : merge(interval);
            strategy->tick(static_cast<TimestampMs>(s + 1) * 1000, current);
            interval.clear();
        }
    }

    result.traces = std::move(sim.traces());
    result.events = std::move(sim.events());
    result.released = strategy->take_released();
    return result;
}

}  // namespace reprtrace::sim
