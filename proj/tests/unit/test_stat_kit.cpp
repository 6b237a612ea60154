#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "oracle/stat_corpus.inc"
#include "reprtrace/errors.hpp"
#include "reprtrace/stat_kit.hpp"

using namespace reprtrace;
using namespace reprtrace::stats;

namespace {
const SignificanceLevel kAlpha05(0.05);
}

TEST_CASE("significance and confidence levels reject out-of-range values") {
    CHECK_THROWS_AS(SignificanceLevel(0.0), ParameterError);
    CHECK_THROWS_AS(SignificanceLevel(1.0), ParameterError);
    CHECK_THROWS_AS(SignificanceLevel(std::nan("")), ParameterError);
    CHECK_NOTHROW(SignificanceLevel(0.05));
    CHECK_THROWS_AS(ConfidenceLevel(0.0), ParameterError);
    CHECK_THROWS_AS(ConfidenceLevel(1.0001), ParameterError);
    CHECK(ConfidenceLevel(1.0).value() == 1.0);
}

TEST_CASE("bernoulli") {
    Rng rng(7);
    SUBCASE("p = 0 is always false") {
        for (int i = 0; i < 1000; ++i) CHECK_FALSE(bernoulli(0.0, rng));
    }
    SUBCASE("p = 1 is always true") {
        for (int i = 0; i < 1000; ++i) CHECK(bernoulli(1.0, rng));
    }
    SUBCASE("p = 0.5 over 100000 draws") {
        // 99.9% binomial interval half-width is 3.29 * sqrt(0.25 / 1e5) = 0.0052.
        int hits = 0;
        for (int i = 0; i < 100000; ++i) hits += bernoulli(0.5, rng) ? 1 : 0;
        double frac = hits / 100000.0;
        CHECK(frac >= 0.49);
        CHECK(frac <= 0.51);
    }
    SUBCASE("exactly one draw per call") {
        TapeSource tape({0.1, 0.9, 0.4});
        CHECK(bernoulli(0.5, tape));
        CHECK_FALSE(bernoulli(0.5, tape));
        CHECK(bernoulli(0.5, tape));
        CHECK(tape.consumed() == 3);
    }
    SUBCASE("invalid p") {
        CHECK_THROWS_AS(bernoulli(-0.01, rng), ParameterError);
        CHECK_THROWS_AS(bernoulli(1.01, rng), ParameterError);
    }
}

TEST_CASE("paired t-test") {
    SUBCASE("identical vectors are equal") {
        std::vector<double> xs{3, 1, 4, 1, 5};
        CHECK(paired_t_test(xs, xs, kAlpha05));
        CHECK(paired_t_test_p_value(xs, xs) == 1.0);
    }
    SUBCASE("clear shift is detected") {
        std::vector<double> xs{100, 100, 100, 100};
        std::vector<double> ys{200, 205, 195, 210};
        CHECK(paired_t_test_p_value(xs, ys) == doctest::Approx(6.860319475837367e-05).epsilon(1e-6));
        CHECK_FALSE(paired_t_test(xs, ys, kAlpha05));
    }
    SUBCASE("response-time example p-value") {
        // A paired test on these vectors rejects equality (scipy ttest_rel p = 0.0030).
        std::vector<double> xs{600, 780, 1050, 1100};
        std::vector<double> ys{500, 720, 950, 1020};
        CHECK(paired_t_test_p_value(xs, ys) == doctest::Approx(0.0030132990718159855).epsilon(1e-6));
    }
    SUBCASE("constant nonzero difference") {
        std::vector<double> xs{1, 2, 3};
        std::vector<double> ys{2, 3, 4};
        CHECK(paired_t_test_p_value(xs, ys) == 0.0);
        CHECK_FALSE(paired_t_test(xs, ys, kAlpha05));
    }
    SUBCASE("insufficient data") {
        std::vector<double> one{1};
        std::vector<double> two{1, 2};
        std::vector<double> three{1, 2, 3};
        CHECK_THROWS_AS(paired_t_test(one, one, kAlpha05), InsufficientDataError);
        CHECK_THROWS_AS(paired_t_test(two, three, kAlpha05), InsufficientDataError);
    }
}

TEST_CASE("one-sample t-test") {
    std::vector<double> v{10, 12, 11, 9, 13};
    CHECK(one_sample_t_test_p_value(v, 11.0) == doctest::Approx(1.0));
    CHECK(one_sample_t_test(v, 11.0, kAlpha05));
    CHECK(one_sample_t_test_p_value(v, 30.0) == doctest::Approx(1.1404529062913282e-05).epsilon(1e-6));
    CHECK_FALSE(one_sample_t_test(v, 30.0, kAlpha05));

    std::vector<double> flat{5, 5, 5};
    CHECK(one_sample_t_test(flat, 5.0, kAlpha05));
    CHECK_FALSE(one_sample_t_test(flat, 6.0, kAlpha05));

    std::vector<double> single{5};
    CHECK_THROWS_AS(one_sample_t_test(single, 5.0, kAlpha05), InsufficientDataError);
}

TEST_CASE("summaries agree with direct computation") {
    std::vector<double> v{2.5, 7.25, 1.0, 9.5, 3.75, 4.0};
    auto direct = SampleSummary::of(v);
    RunningSummary running;
    for (double x : v) running.add(x);
    auto s = running.summary();
    CHECK(s.n == direct.n);
    CHECK(s.mean == doctest::Approx(direct.mean));
    CHECK(s.variance == doctest::Approx(direct.variance));
    CHECK(one_sample_t_test_p_value(s, 4.0) == doctest::Approx(one_sample_t_test_p_value(v, 4.0)));
}

TEST_CASE("oracle corpus: paired p-values") {
    for (const auto& c : kPairedCorpus) {
        CHECK(std::fabs(paired_t_test_p_value(c.xs, c.ys) - c.p) <= 1e-6);
    }
}

TEST_CASE("oracle corpus: one-sample p-values") {
    for (const auto& c : kOneSampleCorpus) {
        CHECK(std::fabs(one_sample_t_test_p_value(c.values, c.mu0) - c.p) <= 1e-6);
    }
}

TEST_CASE("oracle corpus: normal quantiles") {
    for (const auto& c : kQuantileCorpus) {
        CHECK(std::fabs(normal_quantile(ConfidenceLevel(c.conf)) - c.z) <= 1e-6);
    }
}

TEST_CASE("normal quantile") {
    CHECK(normal_quantile(ConfidenceLevel(0.95)) == doctest::Approx(1.96).epsilon(0.005 / 1.96));
    CHECK(std::fabs(normal_quantile(ConfidenceLevel(0.5)) - 0.6744897501960817) <= 1e-3);
    CHECK_THROWS_AS(normal_quantile(ConfidenceLevel(1.0)), ParameterError);
    double prev = normal_quantile(ConfidenceLevel(0.5));
    for (double c : {0.1, 0.01, 1e-3, 1e-6}) {
        double z = normal_quantile(ConfidenceLevel(c));
        CHECK(z > 0.0);
        CHECK(z < prev);
        prev = z;
    }
}

TEST_CASE("student t building blocks") {
    CHECK(student_t_cdf(0.0, 5.0) == doctest::Approx(0.5));
    CHECK(student_t_two_sided_p(0.0, 3.0) == doctest::Approx(1.0));
    CHECK(regularized_incomplete_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(regularized_incomplete_beta(2.0, 3.0, 1.0) == 1.0);
    // I_x(1, 1) = x
    CHECK(regularized_incomplete_beta(1.0, 1.0, 0.37) == doctest::Approx(0.37));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975));
}

TEST_CASE("cochran sample size") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(std::fabs(cochran_sample_size(ConfidenceLevel(0.95), 0.5, 0.05, inf) - 384.16) <= 0.5);
    CHECK(std::fabs(cochran_sample_size(ConfidenceLevel(0.95), 0.5, 0.05, 1000) - 277.7) <= 0.5);
    for (double conf : {0.05, 0.5, 0.95, 1.0}) {
        CHECK(cochran_sample_size(ConfidenceLevel(conf), 0.5, 0.05, 1) == doctest::Approx(1.0));
    }
    CHECK(cochran_sample_size(ConfidenceLevel(1.0), 0.5, 0.05, 250) == 250.0);
    CHECK_THROWS_AS(cochran_sample_size(ConfidenceLevel(0.9), 0.0, 0.05, 10), ParameterError);
    CHECK_THROWS_AS(cochran_sample_size(ConfidenceLevel(0.9), 0.5, 1.0, 10), ParameterError);
    CHECK_THROWS_AS(cochran_sample_size(ConfidenceLevel(0.9), 0.5, 0.05, 0.5), ParameterError);
}

TEST_CASE("decayed confidence") {
    CHECK(decayed_confidence(0.0, 180.0).value() == 1.0);
    CHECK(decayed_confidence(180.0, 180.0).value() == doctest::Approx(0.36787944));
    CHECK(decayed_confidence(90.0, 180.0).value() == doctest::Approx(0.60653066));
    CHECK(decayed_confidence(1e6, 1.0).value() > 0.0);
}
