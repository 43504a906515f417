#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "leadlag/circular_stats.hpp"
#include "leadlag/error.hpp"
#include "test_support.hpp"

using namespace leadlag;

constexpr double kPi = std::numbers::pi;

TEST_CASE("wrap_angle") {
  CHECK(wrap_angle(0.0) == 0.0);
  CHECK(wrap_angle(kPi) == -kPi);
  CHECK(wrap_angle(-kPi) == -kPi);
  CHECK(wrap_angle(3.0 * kPi) == doctest::Approx(-kPi));
  CHECK(wrap_angle(2.0 * kPi + 0.25) == doctest::Approx(0.25));
  CHECK(wrap_angle(-0.5) == -0.5);
  for (double a : {-1e6, -7.0, 7.0, 1e6}) {
    const double w = wrap_angle(a);
    CHECK(w >= -kPi);
    CHECK(w < kPi);
  }
}

TEST_CASE("mean resultant examples") {
  const std::vector<double> one{0.0};
  const Resultant r1 = mean_resultant(one);
  CHECK(r1.x == 0.0);
  CHECK(r1.y == 1.0);
  CHECK(r1.length == 1.0);

  const std::vector<double> anti{0.0, kPi};
  CHECK(mean_resultant(anti).length == doctest::Approx(0.0));

  const std::vector<double> quarter{0.0, kPi / 2};
  const Resultant r = mean_resultant(quarter);
  CHECK(r.x == doctest::Approx(0.5));
  CHECK(r.y == doctest::Approx(0.5));
  CHECK(r.length == doctest::Approx(std::sqrt(2.0) / 2.0));

  const std::vector<double> w{1.0, 0.0};
  CHECK(mean_resultant(quarter, w).length == doctest::Approx(1.0));
  CHECK_THROWS_AS(mean_resultant(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(mean_resultant(quarter, std::vector<double>{1.0}), std::invalid_argument);
  CHECK_THROWS_AS(mean_resultant(quarter, std::vector<double>{1.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(mean_resultant(quarter, std::vector<double>{0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("mean direction examples") {
  const std::vector<double> quarter{0.0, kPi / 2};
  CHECK(mean_direction(quarter) == doctest::Approx(kPi / 4));
  const std::vector<double> same(7, -1.25);
  CHECK(mean_direction(same) == doctest::Approx(-1.25));
  const std::vector<double> uniform{0.0, kPi / 2, kPi, -kPi / 2};
  CHECK_THROWS_WITH_AS(mean_direction(uniform), doctest::Contains("zero resultant"),
                       AnalysisError);
}

TEST_CASE("moments") {
  const std::vector<double> same(5, 0.7);
  CHECK(circular_variance(same) == doctest::Approx(0.0));
  CHECK(circular_skewness(same, 0.7) == doctest::Approx(0.0));
  CHECK(circular_kurtosis(same, 0.7) == doctest::Approx(1.0));
  const std::vector<double> uniform{0.0, kPi / 2, kPi, -kPi / 2};
  CHECK(circular_variance(uniform) == doctest::Approx(1.0));

  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const auto a = testing::von_mises_sample(rng, 1 + rep * 3, 0.3, 2.0);
    const auto o = testing::moment_oracle(a);
    const double m = mean_direction(a);
    CHECK(std::abs(testing::angle_diff(m, o.mean)) <= 1e-12);
    CHECK(std::abs(mean_resultant(a).length - o.length) <= 1e-12);
    CHECK(std::abs(circular_skewness(a, m) - o.skewness) <= 1e-12);
    CHECK(std::abs(circular_kurtosis(a, m) - o.kurtosis) <= 1e-12);
  }
}

TEST_CASE("hat weights") {
  const std::vector<double> a{0.3, 0.3 + kPi, 0.3 + kPi / 2, 0.3 - kPi / 2};
  const auto w = hat_weights(a, 0.3);
  CHECK(w[0] == 1.0);
  CHECK(w[1] == doctest::Approx(0.0));
  CHECK(w[2] == doctest::Approx(0.5));
  CHECK(w[3] == doctest::Approx(0.5));
}

TEST_CASE("histogram mode") {
  const std::vector<double> a{0.01, 0.02, 1.0, 1.01, 1.02, -3.0};
  CHECK(histogram_mode(a, 24) == doctest::Approx(-kPi + 15.5 * kPi / 12));
  const std::vector<double> tie{-3.0, 3.0};
  CHECK(histogram_mode(tie, 4) == doctest::Approx(-3.0 * kPi / 4));
}

TEST_CASE("confidence interval special cases") {
  const std::vector<double> same(10, 1.0);
  const auto d = confidence_interval(same);
  REQUIRE(d.has_value());
  CHECK(*d == doctest::Approx(0.0));
  const std::vector<double> uniform{0.0, kPi / 2, kPi, -kPi / 2};
  CHECK_FALSE(confidence_interval(uniform).has_value());
  CHECK_FALSE(confidence_halfwidth(0.05, 5).has_value());
  CHECK_THROWS_AS(confidence_halfwidth(0.5, 10, 1.0), std::invalid_argument);
  // Both branches shrink with n and widen with the level.
  for (double r : {0.5, 0.95}) {
    CHECK(*confidence_halfwidth(r, 400) < *confidence_halfwidth(r, 100));
    CHECK(*confidence_halfwidth(r, 100, 0.99) > *confidence_halfwidth(r, 100, 0.95));
  }
}

namespace {

// 95th percentile of |bootstrap mean - sample mean| over 4000 resamples.
double bootstrap_halfwidth(const std::vector<double>& sample, std::mt19937_64& rng) {
  const double mean = mean_direction(sample);
  std::vector<double> dev;
  std::uniform_int_distribution<std::size_t> pick(0, sample.size() - 1);
  std::vector<double> boot(sample.size());
  for (int b = 0; b < 4000; ++b) {
    for (double& x : boot) x = sample[pick(rng)];
    dev.push_back(std::abs(testing::angle_diff(mean_direction(boot), mean)));
  }
  std::sort(dev.begin(), dev.end());
  return dev[static_cast<std::size_t>(0.95 * static_cast<double>(dev.size()))];
}

}  // namespace

TEST_CASE("confidence interval matches a bootstrap halfwidth") {
  for (double kappa : {1.0, 2.0, 8.0, 20.0}) {
    CAPTURE(kappa);
    std::mt19937_64 rng(2024);
    const auto sample = testing::von_mises_sample(rng, 1000, 0.4, kappa);
    const double bootstrap = bootstrap_halfwidth(sample, rng);
    const auto d = confidence_interval(sample);
    REQUIRE(d.has_value());
    CHECK(std::abs(*d - bootstrap) / bootstrap <= 0.15);
  }
}

TEST_CASE("interval is conservative just below the branch switch") {
  // Near a resultant length of 0.86 the low-concentration branch overstates
  // the halfwidth by about a fifth; it must never understate it.
  std::mt19937_64 rng(2024);
  const auto sample = testing::von_mises_sample(rng, 1000, 0.4, 4.0);
  const double bootstrap = bootstrap_halfwidth(sample, rng);
  const auto d = confidence_interval(sample);
  REQUIRE(d.has_value());
  CHECK(*d >= bootstrap);
  CHECK(*d <= 1.3 * bootstrap);
}

TEST_CASE("weighted interval uses the effective sample size") {
  std::mt19937_64 rng(5);
  const auto a = testing::von_mises_sample(rng, 200, 0.0, 3.0);
  const std::vector<double> ones(a.size(), 1.0);
  CHECK(*confidence_interval(a, ones) == doctest::Approx(*confidence_interval(a)));
  std::vector<double> half(a.size(), 1.0);
  for (std::size_t i = 0; i < half.size() / 2; ++i) half[i] = 0.0;
  const std::vector<double> tail(a.begin() + 100, a.end());
  CHECK(*confidence_interval(a, half) == doctest::Approx(*confidence_interval(tail)));
}

TEST_CASE("one-sample mean test") {
  CHECK(one_sample_mean_test(0.002, 0.008) == 0);
  CHECK(one_sample_mean_test(0.035, 0.006) == 1);
  CHECK(one_sample_mean_test(0.7, 0.0, 0.7) == 0);
  CHECK(one_sample_mean_test(kPi - 0.01, 0.05, -kPi + 0.01) == 0);
  const std::vector<double> uniform{0.0, kPi / 2, kPi, -kPi / 2};
  CHECK_THROWS_AS(one_sample_mean_test(uniform), AnalysisError);
}

TEST_CASE("von Mises concentration branches") {
  CHECK(von_mises_kappa(0.3) == doctest::Approx(2 * 0.3 + 0.027 + 5 * std::pow(0.3, 5) / 6));
  CHECK(von_mises_kappa(0.7) == doctest::Approx(-0.4 + 1.39 * 0.7 + 0.43 / 0.3));
  CHECK(von_mises_kappa(0.9) ==
        doctest::Approx(1.0 / (0.9 * 0.9 * 0.9 - 4 * 0.81 + 3 * 0.9)));
}

TEST_CASE("Watson-Williams") {
  std::mt19937_64 rng(9);
  const auto g = testing::von_mises_sample(rng, 50, 0.2, 5.0);
  const std::vector<std::vector<double>> same{g, g, g};
  CHECK(watson_williams(same) == doctest::Approx(1.0));

  const std::vector<std::vector<double>> apart{testing::von_mises_sample(rng, 200, 0.0, 10.0),
                                               testing::von_mises_sample(rng, 200, kPi / 2, 10.0)};
  CHECK(watson_williams(apart) < 1e-6);

  const std::vector<std::vector<double>> exact_same{{0.5, 0.5}, {0.5, 0.5, 0.5}};
  CHECK(watson_williams(exact_same) == 1.0);
  const std::vector<std::vector<double>> exact_apart{{0.5, 0.5}, {1.5, 1.5}};
  CHECK(watson_williams(exact_apart) == 0.0);

  const std::vector<std::vector<double>> single{g};
  CHECK_THROWS_AS(watson_williams(single), std::invalid_argument);
  const std::vector<std::vector<double>> tiny{g, {0.1}};
  CHECK_THROWS_AS(watson_williams(tiny), std::invalid_argument);
}

TEST_CASE("Watson-Williams agrees with a permutation test") {
  std::mt19937_64 rng(17);
  for (double shift : {0.0, 0.15, 0.6}) {
    const std::vector<std::vector<double>> groups{testing::von_mises_sample(rng, 40, 0.0, 4.0),
                                                  testing::von_mises_sample(rng, 40, shift, 4.0)};
    const double p = watson_williams(groups);
    const double perm = testing::permutation_p_value(groups, 4000, 3);
    CHECK((p < 0.05) == (perm < 0.05));
  }
}

TEST_CASE("lead/lag conversion") {
  const LeadLag zero = lead_lag(0.0, 0.01, 6000.0);
  CHECK(zero.lead == 0.0);
  const LeadLag l = lead_lag(0.1 * kPi, 0.02, 6000.0);
  CHECK(l.lead == doctest::Approx(300.0));
  CHECK(l.ci == doctest::Approx(0.02 / (2 * kPi) * 6000.0));
}

TEST_CASE("classification of reference values") {
  CHECK(classify_lead(0.012, 0.003) == LeadClass::PrimaryLeads);
  CHECK(classify_lead(-0.044, 0.006) == LeadClass::SecondaryLeads);
  CHECK(classify_lead(-0.000, 0.003) == LeadClass::Undecided);
  CHECK(classify_lead(3.0, 0.01) == LeadClass::NotPositivelyCorrelated);
  CHECK(classify_lead(-2.0, 0.01) == LeadClass::NotPositivelyCorrelated);
  CHECK(classify_lead(0.003, 0.003) == LeadClass::Undecided);
  CHECK(to_string(LeadClass::PrimaryLeads) == "primary_leads");
}

TEST_CASE("summary keeps undefined quantities empty") {
  const std::vector<double> uniform{0.0, kPi / 2, kPi, -kPi / 2};
  const CircularSummary s = summarize(uniform);
  CHECK(s.n == 4);
  CHECK_FALSE(s.mean_direction.has_value());
  CHECK_FALSE(s.skewness.has_value());
  CHECK_FALSE(s.ci_halfwidth.has_value());
  CHECK(s.variance == doctest::Approx(1.0));

  const std::vector<double> pts{0.1, 0.2, 0.15};
  const CircularSummary t = summarize(pts);
  REQUIRE(t.mean_direction.has_value());
  REQUIRE(t.weighted_mean.has_value());
  CHECK(*t.mean_direction == doctest::Approx(0.15));
  CHECK(t.effective_n > 2.9);
  CHECK_THROWS_AS(summarize(std::vector<double>{}), std::invalid_argument);
}
