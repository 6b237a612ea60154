#include "reprtrace/stat_kit.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "reprtrace/errors.hpp"

namespace reprtrace::stats {

SignificanceLevel::SignificanceLevel(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ParameterError("significance level must lie in (0, 1), got " + std::to_string(alpha));
    }
}

ConfidenceLevel::ConfidenceLevel(double conf) : conf_(conf) {
    if (!(conf > 0.0 && conf <= 1.0)) {
        throw ParameterError("confidence level must lie in (0, 1], got " + std::to_string(conf));
    }
}

SampleSummary SampleSummary::of(std::span<const double> values) {
    RunningSummary acc;
    for (double v : values) {
        acc.add(v);
    }
    return acc.summary();
}

bool bernoulli(double p, UniformSource& rng) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ParameterError("bernoulli probability must lie in [0, 1], got " + std::to_string(p));
    }
    return rng.next_uniform() < p;
}

namespace {

// Continued fraction for I_x(a, b) (modified Lentz). Converges quickly for
// x < (a + 1) / (a + b + 2); the caller flips the arguments otherwise.
double beta_continued_fraction(double a, double b, double x) {
    constexpr int max_iter = 500;
    constexpr double eps = 1e-16;
    constexpr double tiny = 1e-300;

    double qab = a + b;
    double qap = a + 1.0;
    double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < eps) break;
    }
    return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) {
        throw ParameterError("incomplete beta requires a > 0 and b > 0");
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw ParameterError("incomplete beta requires x in [0, 1]");
    }
    if (x == 0.0 || x == 1.0) {
        return x;
    }
    double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
    double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_continued_fraction(a, b, x) / a;
    }
    return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) {
        throw ParameterError("degrees of freedom must be positive");
    }
    if (std::isinf(t)) {
        return 0.0;
    }
    double x = df / (df + t * t);
    return regularized_incomplete_beta(0.5 * df, 0.5, x);
}

double student_t_cdf(double t, double df) {
    double tail = 0.5 * student_t_two_sided_p(t, df);
    return t >= 0.0 ? 1.0 - tail : tail;
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double paired_t_test_p_value(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw InsufficientDataError("paired t-test needs sequences of equal length");
    }
    if (xs.size() < 2) {
        throw InsufficientDataError("paired t-test needs at least 2 pairs");
    }
    RunningSummary diffs;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        diffs.add(xs[i] - ys[i]);
    }
    return one_sample_t_test_p_value(diffs.summary(), 0.0);
}

bool paired_t_test(std::span<const double> xs, std::span<const double> ys, SignificanceLevel alpha) {
    return paired_t_test_p_value(xs, ys) > alpha.value();
}

double one_sample_t_test_p_value(const SampleSummary& sample, double mu0) {
    if (sample.n < 2) {
        throw InsufficientDataError("one-sample t-test needs at least 2 values");
    }
    // Relative threshold so accumulated rounding in the variance of a
    // constant sequence does not count as spread.
    double scale = std::max(std::fabs(sample.mean), std::fabs(mu0));
    double var_floor = 1e-24 * scale * scale;
    if (sample.variance <= var_floor) {
        return sample.mean == mu0 ? 1.0 : 0.0;
    }
    double n = static_cast<double>(sample.n);
    double t = (sample.mean - mu0) / std::sqrt(sample.variance / n);
    return student_t_two_sided_p(t, n - 1.0);
}

double one_sample_t_test_p_value(std::span<const double> values, double mu0) {
    return one_sample_t_test_p_value(SampleSummary::of(values), mu0);
}

bool one_sample_t_test(const SampleSummary& sample, double mu0, SignificanceLevel alpha) {
    return one_sample_t_test_p_value(sample, mu0) > alpha.value();
}

bool one_sample_t_test(std::span<const double> values, double mu0, SignificanceLevel alpha) {
    return one_sample_t_test_p_value(values, mu0) > alpha.value();
}

namespace {

// Lower-tail standard normal quantile, p in (0, 1). Acklam's rational
// approximation (relative error 1.15e-9) polished by one Halley step.
double inverse_normal_cdf(double p) {
    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double p_low = 0.02425;

    double x;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    double e = normal_cdf(x) - p;
    double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

}  // namespace

double normal_quantile(ConfidenceLevel conf) {
    if (conf.value() >= 1.0) {
        throw ParameterError("normal quantile diverges at confidence 1");
    }
    double upper = 1.0 - (1.0 - conf.value()) / 2.0;
    return inverse_normal_cdf(upper);
}

double cochran_sample_size(ConfidenceLevel conf, double variability_p, double margin_e,
                           double population_size) {
    if (!(variability_p > 0.0 && variability_p < 1.0)) {
        throw ParameterError("variability p must lie in (0, 1)");
    }
    if (!(margin_e > 0.0 && margin_e < 1.0)) {
        throw ParameterError("margin of error e must lie in (0, 1)");
    }
    if (!(population_size >= 1.0)) {
        throw ParameterError("population size must be at least 1");
    }
    if (conf.value() >= 1.0 || population_size == 1.0) {
        return population_size;
    }
    double z = normal_quantile(conf);
    double n_inf = z * z * variability_p * (1.0 - variability_p) / (margin_e * margin_e);
    if (std::isinf(population_size)) {
        return n_inf;
    }
    return n_inf / (1.0 + (n_inf - 1.0) / population_size);
}

ConfidenceLevel decayed_confidence(double t_seconds, double max_length_seconds) {
    if (!(t_seconds >= 0.0)) {
        throw ParameterError("elapsed cycle time must be non-negative");
    }
    if (!(max_length_seconds > 0.0)) {
        throw ParameterError("maximum cycle length must be positive");
    }
    // Far past max_length the exponential underflows; keep the level valid.
    double conf = std::exp(-t_seconds / max_length_seconds);
    return ConfidenceLevel(std::max(conf, std::numeric_limits<double>::min()));
}

}  // namespace reprtrace::stats
