#pragma once

#include <cstddef>
#include <span>

#include "reprtrace/random.hpp"

// Statistical primitives behind the sampling decision, rate adaptation and
// sample evaluation activities. Everything here is a pure function except
// bernoulli(), which consumes one draw from the caller's source.
namespace reprtrace::stats {

// Significance level alpha of a hypothesis test, 0 < alpha < 1.
class SignificanceLevel {
public:
    explicit SignificanceLevel(double alpha);
    double value() const noexcept { return alpha_; }

private:
    double alpha_;
};

// Confidence as a fraction, 0 < conf <= 1.
class ConfidenceLevel {
public:
    explicit ConfidenceLevel(double conf);
    double value() const noexcept { return conf_; }

private:
    double conf_;
};

// Count, mean and unbiased variance of a sample; lets callers that keep
// running sums use the t-tests without materializing the values.
struct SampleSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;

    static SampleSummary of(std::span<const double> values);
};

// Welford accumulator producing a SampleSummary.
class RunningSummary {
public:
    void add(double x) noexcept {
        ++n_;
        double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    void reset() noexcept { *this = RunningSummary{}; }
    std::size_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    SampleSummary summary() const noexcept {
        return {n_, mean_, n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0};
    }

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// True with probability p. Consumes exactly one uniform draw.
/// Throws ParameterError when p is outside [0, 1].
bool bernoulli(double p, UniformSource& rng);

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double a, double b, double x);

// Student t cumulative distribution with `df` degrees of freedom.
double student_t_cdf(double t, double df);

// Two-sided tail probability P(|T| >= |t|).
double student_t_two_sided_p(double t, double df);

double normal_cdf(double x);

/// Two-sided p-value of the paired t statistic on the differences xs - ys.
/// Zero-variance differences give p = 1 when all differences are 0, else 0.
/// Throws InsufficientDataError on a length mismatch or fewer than 2 pairs.
double paired_t_test_p_value(std::span<const double> xs, std::span<const double> ys);

/// "Equal" verdict of the paired t-test: true when p > alpha.
bool paired_t_test(std::span<const double> xs, std::span<const double> ys, SignificanceLevel alpha);

/// Two-sided p-value of t = (mean - mu0) / (s / sqrt(n)).
/// A zero-variance sample gives p = 1 when its mean equals mu0, else 0.
double one_sample_t_test_p_value(const SampleSummary& sample, double mu0);
double one_sample_t_test_p_value(std::span<const double> values, double mu0);

bool one_sample_t_test(const SampleSummary& sample, double mu0, SignificanceLevel alpha);
bool one_sample_t_test(std::span<const double> values, double mu0, SignificanceLevel alpha);

/// Two-sided z-score: the standard normal quantile at 1 - (1 - conf)/2.
/// Throws ParameterError for conf = 1, where the quantile diverges.
double normal_quantile(ConfidenceLevel conf);

/// Cochran's minimum sample size with finite population correction:
///   n_inf = z^2 p (1 - p) / e^2,  n = n_inf / (1 + (n_inf - 1) / N).
/// At conf = 1 the quantile is unbounded and the corrected size tends to N,
/// which is what gets returned. Pass +infinity as population_size for n_inf.
double cochran_sample_size(ConfidenceLevel conf, double variability_p, double margin_e,
                           double population_size);

/// exp(-t / max_length): 1 at cycle start, e^-1 at max_length.
ConfidenceLevel decayed_confidence(double t_seconds, double max_length_seconds);

}  // namespace reprtrace::stats
