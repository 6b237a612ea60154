#pragma once

// Scripted 200-request run replayed through both the library sampler and the
// reference monitor.

#include <vector>

#include "oracle/reference_monitor.hpp"
#include "reprtrace/adaptive_sampler.hpp"

namespace oracle {

using namespace reprtrace;

constexpr int kRequests = 200;
constexpr int kRequestsPerTick = 10;
constexpr TimestampMs kSpacingMs = 100;

struct Script {
    std::vector<RequestEvent> requests;
    std::vector<double> tape;
    // Slowdown of each tick's measurements relative to the nominal times.
    std::vector<double> tick_factor;
    std::vector<double> tick_rps;
};

// 200 requests over 20 s in three types with a skewed mix, one tick per
// second. The tick measurements slow down sharply (forcing a baseline that
// outlasts the cycle limit), stay slow without monitoring (lowering the
// rate) and recover (raising it again).
inline Script make_script() {
    Script s;
    Rng rng(20240611);
    const char* types[] = {"/home", "/vets", "/owners"};
    for (int i = 0; i < kRequests; ++i) {
        double u = rng.next_uniform();
        int t = u < 0.5 ? 0 : (u < 0.8 ? 1 : 2);
        RequestEvent e;
        e.type_id = types[t];
        e.start = i * kSpacingMs;
        e.response_time = (10.0 + 10.0 * t) * (0.7 + 0.6 * rng.next_uniform());
        e.sequence = static_cast<std::uint64_t>(i);
        s.requests.push_back(e);
    }
    for (int i = 0; i < 1000; ++i) s.tape.push_back(rng.next_uniform());
    const double factors[] = {1.00, 0.99, 1.01, 1.00, 1.60, 1.60, 2.20, 2.30, 2.25, 2.40,
                              2.30, 2.30, 1.00, 0.98, 0.97, 0.99, 1.00, 0.98, 0.97, 0.99};
    const double rps[] = {100, 102, 98, 101, 60, 60, 50, 48, 49, 45, 47, 47, 99, 103, 105, 100, 101, 102, 104, 100};
    for (int k = 0; k < kRequests / kRequestsPerTick; ++k) {
        s.tick_factor.push_back(factors[k]);
        s.tick_rps.push_back(rps[k]);
    }
    return s;
}

inline reprtrace::PerformanceRecord tick_record(const Script& s, int k, bool me) {
    PerformanceRecord r;
    r.rps = s.tick_rps[static_cast<std::size_t>(k)];
    r.monitoring_enabled = me;
    const char* types[] = {"/home", "/vets", "/owners", "/pets", "/visits", "/find"};
    for (int t = 0; t < 6; ++t) {
        // Small per-type jitter keeps the paired differences from being constant.
        double jitter = 1.0 + 0.005 * ((k * 7 + t * 3) % 5 - 2);
        r.mean_rt[types[t]] = (20.0 + 2.0 * t) * s.tick_factor[static_cast<std::size_t>(k)] * jitter;
    }
    return r;
}

struct Trace {
    std::vector<bool> accepted;
    std::vector<double> rates;
    std::vector<bool> enabled;
    std::vector<Release> releases;
};

inline reprtrace::SamplerConfig library_config() {
    SamplerConfig c;
    c.max_rate = 0.9;
    c.min_rate = 0.05;
    c.epsilon = 0.08;
    c.baseline_duration = 7.0;
    c.max_cycle_length = 6.0;
    c.history_capacity = 8;
    c.variability_p = 0.5;
    c.margin_e = 0.25;
    return c;
}

inline Config oracle_config() {
    auto c = library_config();
    Config o;
    o.max_rate = c.max_rate;
    o.min_rate = c.min_rate;
    o.epsilon = c.epsilon;
    o.baseline_s = c.baseline_duration;
    o.max_cycle_s = c.max_cycle_length;
    o.history = c.history_capacity;
    o.p = c.variability_p;
    o.e = c.margin_e;
    return o;
}

inline Trace run_library(const Script& s) {
    Trace out;
    core::AdaptiveSampler sampler(library_config(), 0);
    TapeSource tape(s.tape);
    for (int i = 0; i < kRequests; ++i) {
        out.accepted.push_back(sampler.decide(s.requests[static_cast<std::size_t>(i)], tape));
        if ((i + 1) % kRequestsPerTick == 0) {
            int k = i / kRequestsPerTick;
            bool me = sampler.monitoring_enabled();
            sampler.tick((i + 1) * kSpacingMs, tick_record(s, k, me));
            out.rates.push_back(sampler.rate());
            out.enabled.push_back(sampler.monitoring_enabled());
        }
    }
    for (const auto& r : sampler.take_released()) {
        out.releases.push_back({r.released_at, r.reason == ReleaseReason::Timeout, r.sample_stats.total(),
                                r.population_stats.total()});
    }
    return out;
}

inline Trace run_oracle(const Script& s) {
    Trace out;
    Monitor m(oracle_config());
    std::size_t pos = 0;
    for (int i = 0; i < kRequests; ++i) {
        const auto& e = s.requests[static_cast<std::size_t>(i)];
        bool drew = false;
        double u = s.tape[pos % s.tape.size()];
        out.accepted.push_back(m.request(e.type_id, e.response_time, e.start, u, drew));
        if (drew) ++pos;
        if ((i + 1) % kRequestsPerTick == 0) {
            int k = i / kRequestsPerTick;
            auto rec = tick_record(s, k, m.enabled);
            Perf p{rec.rps, rec.mean_rt, rec.monitoring_enabled};
            m.tick((i + 1) * kSpacingMs, p);
            out.rates.push_back(m.rate);
            out.enabled.push_back(m.enabled);
        }
    }
    out.releases = m.releases;
    return out;
}

}  // namespace oracle
