#pragma once

// Generated-case invariant checks shared by the property suite and the
// acceptance runner. Each returns how many cases ran and how many broke the
// invariant, with a description of the first break.

#include <algorithm>
#include <cmath>
#include <string>

#include "reprtrace/adaptive_sampler.hpp"
#include "reprtrace/metrics_report.hpp"
#include "reprtrace/sampling_core.hpp"
#include "reprtrace/simulator.hpp"

namespace invariants {

using namespace reprtrace;

struct Result {
    int cases = 0;
    int violations = 0;
    std::string first;

    void fail(int c, const std::string& what) {
        if (violations++ == 0) first = "case " + std::to_string(c) + ": " + what;
    }
    bool ok() const { return violations == 0; }
};

struct Gen {
    Rng rng;
    explicit Gen(std::uint64_t seed) : rng(seed) {}
    double real(double lo, double hi) { return lo + (hi - lo) * rng.next_uniform(); }
    int integer(int lo, int hi) { return lo + static_cast<int>(rng.next_uniform() * (hi - lo + 1)); }
    bool coin(double p = 0.5) { return rng.next_uniform() < p; }

    SamplerConfig sampler() {
        SamplerConfig c;
        c.max_rate = real(0.05, 1.0);
        c.min_rate = real(0.001, c.max_rate);
        c.epsilon = real(0.0, 0.2);
        c.baseline_duration = real(0.5, 5.0);
        c.max_cycle_length = real(1.0, 200.0);
        c.history_capacity = static_cast<std::size_t>(integer(1, 80));
        return c;
    }

    PerformanceRecord perf(int types, bool me) {
        PerformanceRecord r;
        r.rps = real(0, 500);
        r.monitoring_enabled = me;
        for (int i = 0; i < types; ++i) {
            if (coin(0.9)) r.mean_rt["/t" + std::to_string(i)] = real(1, 1000);
        }
        return r;
    }

    sim::RunSpec tiny_run() {
        sim::RunSpec spec;
        int types = integer(1, 4);
        for (int i = 0; i < types; ++i) {
            spec.model.types.push_back(
                {"/t" + std::to_string(i), real(0.1, 3), real(2, 50), real(0, 0.6), real(10, 500), real(0, 0.6)});
        }
        spec.model.capacity_users = integer(1, 8);
        spec.model.contention_gamma = real(0, 3);
        spec.model.trace_cost = real(0, 10);
        spec.model.monitor_load = real(0, 1);
        spec.model.mem_concurrency_gain = real(0, 0.2);
        spec.model.gc_negative_prob = real(0, 0.2);
        spec.workload.segments = {StationarySegment{integer(1, 4), static_cast<double>(integer(1, 4))}};
        spec.strategy = kAllStrategies[static_cast<std::size_t>(integer(0, 4))];
        spec.seed = static_cast<std::uint64_t>(integer(0, 1 << 30));
        return spec;
    }
};

// Random adaptation sequences never leave [min_rate, max_rate].
inline Result rate_clamping(int cases, std::uint64_t seed = 1) {
    Result res;
    Gen g(seed);
    for (int c = 0; c < cases; ++c, ++res.cases) {
        auto cfg = g.sampler();
        core::MonitorState s(cfg);
        s.rate = g.real(cfg.min_rate, cfg.max_rate);
        int types = g.integer(1, 6);
        for (int t = 1; t <= 40; ++t) {
            s.monitoring_enabled = g.coin(0.7);
            core::adapt_rate(s, g.perf(types, s.monitoring_enabled), t * 1000, cfg);
            if (!(s.rate >= cfg.min_rate && s.rate <= cfg.max_rate && s.rate > 0.0)) {
                res.fail(c, "rate " + std::to_string(s.rate) + " outside bounds");
                break;
            }
        }
    }
    return res;
}

// Every representative release re-passes all three criteria from its stored
// statistics; every release keeps sample counts within population counts.
inline Result release_criteria(int cases, std::uint64_t seed = 2, int* representative = nullptr) {
    Result res;
    Gen g(seed);
    int reps = 0;
    for (int c = 0; c < cases; ++c, ++res.cases) {
        SamplerConfig cfg;
        cfg.max_cycle_length = g.real(2, 30);
        cfg.epsilon = g.real(0.0, 0.1);
        core::AdaptiveSampler sampler(cfg, 0);
        int types = g.integer(1, 4);
        Rng decisions(static_cast<std::uint64_t>(c));
        for (int i = 0; i < 400; ++i) {
            RequestEvent e;
            e.type_id = "/t" + std::to_string(g.integer(0, types - 1));
            e.start = i * 50;
            e.response_time = g.real(1, 30);
            e.sequence = static_cast<std::uint64_t>(i);
            sampler.decide(e, decisions);
            if (i % 20 == 19) sampler.tick(e.start, g.perf(types, sampler.monitoring_enabled()));
        }
        for (const auto& r : sampler.take_released()) {
            if (r.sample_stats.total() != r.traces.size()) res.fail(c, "trace count differs from sample size");
            for (const auto& [type, n] : r.sample_stats.counts()) {
                if (n > r.population_stats.count(type)) res.fail(c, "sample count above population count");
            }
            if (r.reason != ReleaseReason::Representative) continue;
            ++reps;
            auto a = core::assess_sample(r.population_stats, r.sample_stats, core::sample_rt_summary(r),
                                         r.population_mean_rt, stats::ConfidenceLevel(r.confidence_at_release),
                                         cfg);
            if (!a.representative()) res.fail(c, "released sample fails re-verification");
        }
    }
    if (representative) *representative = reps;
    return res;
}

// Totals equal the sum of counts after any sequence of adds and sets.
inline Result frequency_conservation(int cases, std::uint64_t seed = 5) {
    Result res;
    Gen g(seed);
    for (int c = 0; c < cases; ++c, ++res.cases) {
        FrequencyTable t;
        int ops = g.integer(1, 100);
        for (int i = 0; i < ops; ++i) {
            auto type = "/t" + std::to_string(g.integer(0, 9));
            if (g.coin(0.8)) {
                t.add(type);
            } else {
                t.set(type, static_cast<std::uint64_t>(g.integer(0, 50)));
            }
            std::uint64_t sum = 0;
            double share = 0.0;
            for (const auto& [k, v] : t.counts()) {
                sum += v;
                share += t.proportion(k);
            }
            if (t.total() != sum || (!t.empty() && std::fabs(share - 1.0) > 1e-9)) {
                res.fail(c, "total " + std::to_string(t.total()) + " vs sum " + std::to_string(sum));
                break;
            }
        }
    }
    return res;
}

// Confidence never increases with cycle age and stays in (0, 1].
inline Result confidence_monotone(int cases, std::uint64_t seed = 7) {
    Result res;
    Gen g(seed);
    for (int c = 0; c < cases; ++c, ++res.cases) {
        double len = g.real(0.1, 1000);
        double t1 = g.real(0, 3 * len);
        double t2 = t1 + g.real(0, len);
        double c1 = stats::decayed_confidence(t1, len).value();
        double c2 = stats::decayed_confidence(t2, len).value();
        if (!(c1 <= 1.0 && c2 > 0.0 && c2 <= c1)) res.fail(c, "confidence not monotone");
    }
    return res;
}

inline bool identical(const sim::RunResult& a, const sim::RunResult& b) {
    if (!(a.series == b.series) || a.events.size() != b.events.size() || a.traces.size() != b.traces.size() ||
        a.released.size() != b.released.size())
        return false;
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        const auto& x = a.events[i];
        const auto& y = b.events[i];
        if (x.type_id != y.type_id || x.start != y.start || x.response_time != y.response_time ||
            x.memory_delta != y.memory_delta || x.sequence != y.sequence)
            return false;
    }
    for (std::size_t i = 0; i < a.traces.size(); ++i) {
        if (a.traces[i].event.sequence != b.traces[i].event.sequence ||
            a.traces[i].cycle_index != b.traces[i].cycle_index)
            return false;
    }
    return true;
}

// Same spec and seed give bit-identical results.
inline Result simulator_determinism(int cases, std::uint64_t seed = 10) {
    Result res;
    Gen g(seed);
    for (int c = 0; c < cases; ++c, ++res.cases) {
        auto spec = g.tiny_run();
        if (!identical(sim::run(spec), sim::run(spec))) res.fail(c, "repeated run differs");
    }
    return res;
}

// A FUM run compared with its own ground truth has zero error.
inline Result fum_self_rmse(int cases, std::uint64_t seed = 12) {
    Result res;
    Gen g(seed);
    for (int c = 0; c < cases; ++c, ++res.cases) {
        auto spec = g.tiny_run();
        spec.strategy = StrategyKind::FUM;
        auto s = report::summarize(sim::run(spec));
        double e = report::rmse(report::mean_memory(s.ground_memory), report::mean_memory(s.sampled_memory));
        if (e != 0.0) res.fail(c, "rmse " + std::to_string(e));
    }
    return res;
}

}  // namespace invariants
