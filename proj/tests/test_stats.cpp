#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sphdist/distribution.hpp"
#include "sphdist/stats.hpp"

using namespace sphdist;

TEST(Dkw, FormulaValues) {
  EXPECT_NEAR(dkw_tolerance(1'000'000, 1e-3), std::sqrt(std::log(2000.0) / 2e6), 1e-15);
  EXPECT_NEAR(dkw_tolerance(1'000'000, 1e-3), 0.0019495, 1e-7);
  EXPECT_NEAR(dkw_tolerance(1, 2.0 * std::exp(-2.0)), 1.0, 1e-15);
  double prev = 2.0;
  for (std::size_t n = 1; n < 100'000; n = n * 3 + 1) {
    const double t = dkw_tolerance(n, 1e-3);
    EXPECT_LT(t, prev);
    prev = t;
  }
  EXPECT_THROW(dkw_tolerance(0, 0.1), std::invalid_argument);
  EXPECT_THROW(dkw_tolerance(10, 1.0), std::invalid_argument);
}

TEST(Ks, ExtremeCases) {
  const std::vector<double> a = {0.1, 0.4, 0.9};
  EXPECT_EQ(ks_statistic(a, a), 0.0);
  const std::vector<double> lo = {0.0, 0.3, 0.7, 1.0};
  const std::vector<double> hi = {2.0, 2.5, 3.0};
  EXPECT_EQ(ks_statistic(lo, hi), 1.0);
  EXPECT_EQ(ks_statistic(hi, lo), 1.0);
}

TEST(Ks, MatchesBruteForceOnTies) {
  // Brute force: evaluate both empirical CDFs at every sample value.
  const std::vector<double> a = {0.0, 0.5, 0.5, 0.5, 1.0, 2.0};
  const std::vector<double> b = {0.5, 0.5, 1.5, 2.0};
  const auto ecdf = [](const std::vector<double>& s, double x) {
    double c = 0;
    for (double v : s) c += v <= x;
    return c / s.size();
  };
  double brute = 0.0;
  for (const auto* s : {&a, &b}) {
    for (double x : *s) brute = std::max(brute, std::abs(ecdf(a, x) - ecdf(b, x)));
  }
  EXPECT_DOUBLE_EQ(ks_statistic(a, b), brute);
}

TEST(Ks, IndependentSeedsOfOneLaw) {
  // Twenty independent pairs of runs: each KS stays below 2 * DKW.
  const std::size_t pairs = 100'000;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto d1 = estimate_self(Region::full(), SpaceSpec::sphere(2), MetricKind::euclidean, pairs, 2 * s + 1);
    const auto d2 = estimate_self(Region::full(), SpaceSpec::sphere(2), MetricKind::euclidean, pairs, 2 * s + 2);
    EXPECT_LE(ks_two_sample(d1, d2), 2 * dkw_tolerance(pairs, 1e-3)) << s;
  }
}

TEST(Ks, NormalizesByMassAndRejectsMetricMismatch) {
  const EmpiricalDistribution d1({0.2, 0.4}, 1.0, MetricKind::euclidean, 2.0, 1);
  const EmpiricalDistribution d2({0.2, 0.4}, 7.0, MetricKind::euclidean, 2.0, 1);
  EXPECT_EQ(ks_two_sample(d1, d2), 0.0);
  const EmpiricalDistribution d3({0.2, 0.4}, 1.0, MetricKind::angular, kPi, 1);
  EXPECT_THROW(ks_two_sample(d1, d3), std::invalid_argument);
}
