#pragma once

// Plain re-implementation of the adaptive monitoring loop used as a test
// oracle. It shares no code with the library: statistics are computed by
// direct numerical integration and bisection, state lives in plain maps and
// vectors, and every rule is spelled out step by step.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace oracle {

struct Config {
    double max_rate = 0.5;
    double min_rate = 0.01;
    double epsilon = 0.05;
    double baseline_s = 3.0;
    double max_cycle_s = 180.0;
    std::size_t history = 60;
    double p = 0.5;
    double e = 0.05;
};

struct Perf {
    double rps = 0;
    std::map<std::string, double> rt;
    bool me = true;
};

struct Release {
    long long at_ms = 0;
    bool timeout = false;
    std::uint64_t sample_size = 0;
    std::uint64_t population_size = 0;
};

inline double t_pdf(double x, double df) {
    double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI);
    return c * std::pow(1 + x * x / df, -(df + 1) / 2);
}

// Two-sided p-value: 1 - 2 * integral_0^|t| pdf, composite Simpson.
inline double t_two_sided(double t, double df) {
    double a = std::fabs(t);
    if (a == 0) return 1.0;
    // Integrate in the variable u = atan(x) so large |t| stays well resolved.
    double hi = std::atan(a);
    const int n = 4000;
    double h = hi / n;
    double sum = 0;
    for (int i = 0; i <= n; ++i) {
        double u = i * h;
        double x = std::tan(u);
        double f = t_pdf(x, df) * (1 + x * x);
        double w = (i == 0 || i == n) ? 1 : (i % 2 ? 4 : 2);
        sum += w * f;
    }
    double area = sum * h / 3;
    return std::clamp(1.0 - 2.0 * area, 0.0, 1.0);
}

// Equality verdict of a one-sample t-test on mean/variance/n.
inline bool t_equal(double mean, double var, double n, double mu0, double alpha) {
    double scale = std::max(std::fabs(mean), std::fabs(mu0));
    if (var <= 1e-24 * scale * scale) return mean == mu0;
    double t = (mean - mu0) / std::sqrt(var / n);
    return t_two_sided(t, n - 1) > alpha;
}

inline bool paired_equal(const std::vector<double>& a, const std::vector<double>& b, double alpha) {
    std::vector<double> d;
    for (std::size_t i = 0; i < a.size(); ++i) d.push_back(a[i] - b[i]);
    double mean = 0;
    for (double x : d) mean += x;
    mean /= d.size();
    double ss = 0;
    for (double x : d) ss += (x - mean) * (x - mean);
    return t_equal(mean, ss / (d.size() - 1), static_cast<double>(d.size()), 0.0, alpha);
}

// Upper quantile z with P(|Z| <= z) = conf, by bisection.
inline double z_for(double conf) {
    double lo = 0, hi = 40;
    for (int i = 0; i < 200; ++i) {
        double mid = (lo + hi) / 2;
        double inside = std::erf(mid / std::sqrt(2.0));
        (inside < conf ? lo : hi) = mid;
    }
    return (lo + hi) / 2;
}

inline double required_n(double conf, double p, double e, double N) {
    if (conf >= 1.0 || N == 1.0) return N;
    double z = z_for(conf);
    double n0 = z * z * p * (1 - p) / (e * e);
    return n0 / (1 + (n0 - 1) / N);
}

class Monitor {
public:
    explicit Monitor(Config c) : cfg(c), rate(c.max_rate) {}

    Config cfg;
    double rate;
    bool enabled = true;
    long long baseline_end = -1;
    std::map<std::string, std::uint64_t> pop, smp;
    std::uint64_t pop_n = 0, smp_n = 0;
    std::vector<double> smp_rt;
    double pop_rt_sum = 0;
    std::vector<Perf> history;
    long long cycle_start = 0;
    std::vector<Release> releases;

    // One request. `u` is the uniform draw; it is used only when monitoring.
    bool request(const std::string& type, double rt, long long at_ms, double u, bool& drew) {
        double pop_share = pop_n == 0 ? 0.0 : double(pop[type]) / pop_n;
        pop[type]++;
        pop_n++;
        pop_rt_sum += rt;
        drew = false;
        if (!enabled) return false;
        drew = true;
        if (!(u < rate)) return false;
        if (smp_n > 0) {
            double smp_share = double(smp[type]) / smp_n;
            if (pop_share < smp_share - cfg.epsilon) return false;
        }
        smp[type]++;
        smp_n++;
        smp_rt.push_back(rt);
        evaluate(at_ms);
        return true;
    }

    void tick(long long now_ms, const Perf& current) {
        if (!enabled && baseline_end >= 0 && now_ms >= baseline_end) {
            enabled = true;
            baseline_end = -1;
        }
        adapt(now_ms, current);
        evaluate(now_ms);
    }

private:
    void adapt(long long now_ms, const Perf& current) {
        history.push_back(current);
        if (history.size() > cfg.history) history.erase(history.begin());

        std::vector<Perf> same;
        for (const auto& h : history)
            if (h.me == current.me) same.push_back(h);
        if (same.empty()) return;
        std::stable_sort(same.begin(), same.end(), [](const Perf& a, const Perf& b) { return a.rps < b.rps; });
        const Perf& normal = same[same.size() / 2];

        std::vector<double> nv, cv;
        double nsum = 0, csum = 0;
        for (const auto& [type, rt] : current.rt) {
            auto it = normal.rt.find(type);
            if (it == normal.rt.end()) continue;
            nv.push_back(it->second);
            cv.push_back(rt);
            nsum += it->second;
            csum += rt;
        }
        if (nv.size() < 2 || nsum <= 0) return;
        bool equal = paired_equal(nv, cv, 0.05);
        double diff = csum / nsum - 1;

        if (current.me) {
            if (equal || diff <= 0) {
                rate = std::min(rate + rate * std::fabs(diff), cfg.max_rate);
            } else if (enabled) {
                enabled = false;
                baseline_end = now_ms + std::llround(cfg.baseline_s * 1000);
            }
        } else if (!equal && diff > 0) {
            rate = std::max(rate - rate * std::fabs(diff), cfg.min_rate);
        }
    }

    void evaluate(long long now_ms) {
        double age = std::max(0LL, now_ms - cycle_start) / 1000.0;
        double conf = std::max(std::exp(-age / cfg.max_cycle_s), 1e-300);
        bool ok = false;
        if (pop_n > 0) {
            bool size_ok = double(smp_n) > required_n(conf, cfg.p, cfg.e, double(pop_n));
            bool eq = false;
            if (smp_rt.size() >= 2) {
                double mean = 0;
                for (double x : smp_rt) mean += x;
                mean /= smp_rt.size();
                double ss = 0;
                for (double x : smp_rt) ss += (x - mean) * (x - mean);
                eq = t_equal(mean, ss / (smp_rt.size() - 1), double(smp_rt.size()), pop_rt_sum / pop_n,
                             0.05 * conf);
            }
            bool balanced = true;
            for (const auto& [type, count] : pop) {
                double ps = double(count) / pop_n;
                double ss = smp_n == 0 ? 0.0 : double(smp[type]) / smp_n;
                if (std::fabs(ps - ss) > (1 - conf) + cfg.epsilon) balanced = false;
            }
            ok = size_ok && eq && balanced;
        }
        bool timeout = age >= cfg.max_cycle_s;
        if (!ok && !timeout) return;
        releases.push_back({now_ms, !ok, smp_n, pop_n});
        pop.clear();
        smp.clear();
        pop_n = smp_n = 0;
        smp_rt.clear();
        pop_rt_sum = 0;
        cycle_start = now_ms;
    }
};

}  // namespace oracle
