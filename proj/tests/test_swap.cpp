#include <gtest/gtest.h>

#include <cmath>

#include "sphdist/errors.hpp"
#include "sphdist/stats.hpp"
#include "sphdist/swap.hpp"

using namespace sphdist;

namespace {

const SpaceSpec kS2 = SpaceSpec::sphere(2);
const SpherePoint kNorth = SpherePoint::basis(2, 2);
const SpherePoint kSouth = SpherePoint::basis(2, 2, true);
const Region kUpper = Region::hemisphere(kNorth);

}  // namespace

TEST(SwapBalls, DegenerateSwapIsIdentity) {
  const Region a = Region::cap(kNorth, 1.0);
  const Region swapped = swap_balls(a, kNorth, kNorth, 0.5);
  const auto pts = sample_uniform_points(kS2, 100'000, 1);
  for (std::size_t i = 0; i < pts.size(); ++i) ASSERT_EQ(contains(a, kS2, pts[i]), contains(swapped, kS2, pts[i]));
}

TEST(SwapBalls, AntipodalSwapKeepsExactMeasure) {
  const Region swapped = swap_balls(kUpper, kNorth, kSouth, kPi / 6);
  const auto m = exact_measure(swapped, kS2);
  ASSERT_TRUE(m);
  EXPECT_NEAR(m->value, 2 * kPi, 1e-12);
}

TEST(SwapBalls, MembershipFlipsOnlyInsideTheBalls) {
  const SpherePoint p = SpherePoint::normalized({0.3, 0.2, 0.9});
  const SpherePoint pbar = SpherePoint::normalized({-0.4, 0.5, -0.7});
  const double theta = 0.3;
  const Region swapped = swap_balls(kUpper, p, pbar, theta);
  const auto pts = sample_uniform(kS2, 100'000, 2);
  std::size_t flips = 0;
  for (const auto& x : pts) {
    const auto& q = x.factor(0);
    const bool in_balls = angular_distance(q, p) <= theta || angular_distance(q, pbar) <= theta;
    const bool flipped = contains(kUpper, kS2, q) != contains(swapped, kS2, q);
    ASSERT_EQ(flipped, in_balls);
    flips += flipped;
  }
  EXPECT_GT(flips, 0u);
}

TEST(SwapBalls, RejectsBallsThatDoNotFit) {
  EXPECT_THROW(swap_balls(kUpper, SpherePoint::basis(2, 0), kSouth, 0.2), HypothesisError);
  EXPECT_THROW(swap_balls(kUpper, kNorth, SpherePoint::basis(2, 0), 0.2), HypothesisError);
  const auto rec = check_swap(kUpper, kNorth, kSouth, kPi / 8);
  EXPECT_EQ(rec.fit_in_a.verdict, Verdict::yes);
  EXPECT_EQ(rec.fit_in_abar.verdict, Verdict::yes);
}

TEST(SwapInvariance, DegenerateAndAntipodal) {
  const auto grid = uniform_grid(2.0, 256);
  const std::size_t pairs = 200'000;
  const auto same = check_swap(kUpper, kNorth, kNorth, kPi / 8);
  const auto r0 = verify_swap_invariance(kUpper, kS2, same, pairs, 3, grid);
  EXPECT_TRUE(r0.pass) << r0.statistic << " > " << r0.tolerance;
  EXPECT_EQ(r0.claim, Claim::lemma);

  const auto rec = check_swap(kUpper, kNorth, kSouth, kPi / 8);
  const auto r = verify_swap_invariance(kUpper, kS2, rec, pairs, 4, grid);
  EXPECT_TRUE(r.pass) << r.statistic << " > " << r.tolerance;
  EXPECT_EQ(r.seeds.size(), 4u);
  // Four cdf tolerances of mass (2 pi)^2 each.
  EXPECT_NEAR(r.tolerance, 4 * 4 * kPi * kPi * dkw_tolerance(pairs, 1e-3), 1e-9);
}

TEST(SwapInvariance, ReflectionPairingIsExact) {
  EXPECT_LT(reflection_pairing_error(kNorth, kSouth, kPi / 8, 100'000, 5), 1e-12);
  const SpherePoint p = SpherePoint::normalized({0.3, 0.2, 0.9});
  const SpherePoint pbar = SpherePoint::normalized({-0.4, 0.5, -0.7});
  EXPECT_LT(reflection_pairing_error(p, pbar, 0.4, 100'000, 6), 1e-12);
}

TEST(LargestBall, CapInradius) {
  BallSearchOptions opt;
  opt.candidates = 10'000;
  const auto fit = largest_ball(Region::cap(kNorth, kPi / 4), 2, 1, opt);
  EXPECT_LT(angular_distance(fit.center, kNorth), 0.05);
  EXPECT_NEAR(fit.angular_radius, kPi / 4, 0.05);
  EXPECT_EQ(fit.radius_tolerance, opt.radius_tolerance);
}

TEST(LargestBall, HemisphereAndEmpty) {
  const auto fit = largest_ball(kUpper, 2, 2);
  EXPECT_NEAR(fit.angular_radius, kPi / 2, 0.01);
  EXPECT_THROW(largest_ball(Region::empty(), 2, 3), SamplingBudgetExhausted);
}

TEST(LargestBall, ResultFitsRegion) {
  const Region lune = Region::intersection_of({kUpper, Region::hemisphere(SpherePoint::basis(2, 0))});
  const auto fit = largest_ball(lune, 2, 4);
  // The inradius of a quarter lune is pi/4.
  EXPECT_NEAR(fit.angular_radius, kPi / 4, 0.02);
  EXPECT_TRUE(check_ball_fits(lune, fit.center, fit.angular_radius, 4096, 9).fits());
}

TEST(GreedyDecomposition, IdenticalSetsNeedNoSwaps) {
  DecompositionParams params;
  params.residual_samples = 10'000;
  const auto t = greedy_decomposition(kUpper, kUpper, kS2, params);
  EXPECT_TRUE(t.swaps.empty());
  EXPECT_EQ(t.initial_residual, 0.0);
}

TEST(GreedyDecomposition, RejectsUnequalMeasures) {
  DecompositionParams params;
  EXPECT_THROW(greedy_decomposition(kUpper, Region::cap(kNorth, 1.0), kS2, params), HypothesisError);
}

TEST(GreedyDecomposition, ShortRunShrinksResidual) {
  DecompositionParams params;
  params.max_swaps = 4;
  params.residual_samples = 100'000;
  params.drift_pairs = 50'000;
  params.search.candidates = 256;
  params.seed = 7;
  const Region b = Region::hemisphere(SpherePoint::basis(2, 0));
  const auto t = greedy_decomposition(kUpper, b, kS2, params);
  ASSERT_EQ(t.swaps.size(), 4u);
  ASSERT_TRUE(t.final_region);
  EXPECT_NEAR(t.initial_residual, kPi, 2 * t.residual_half_width);
  double prev = t.initial_residual;
  for (std::size_t k = 0; k < t.swaps.size(); ++k) {
    EXPECT_LT(t.residual_measure[k], prev + 2 * t.residual_half_width);
    prev = t.residual_measure[k];
    EXPECT_LE(t.invariant_drift[k], t.drift_tolerance[k]);
    EXPECT_GT(t.swaps[k].angular_radius, params.min_radius);
  }
  EXPECT_LT(t.residual_measure.back(), t.initial_residual);
  // Every swap exchanges equal balls, so the measure stays 2 pi.
  const auto m = measure(*t.final_region, kS2, 200'000, 1, 1e-3);
  EXPECT_NEAR(m.value, 2 * kPi, m.exact ? 1e-9 : m.half_width);
}

TEST(GreedyDecomposition, DeterministicAcrossThreads) {
  DecompositionParams params;
  params.max_swaps = 2;
  params.residual_samples = 50'000;
  params.drift_pairs = 20'000;
  params.search.candidates = 128;
  const Region b = Region::hemisphere(SpherePoint::basis(2, 0));
  const auto t1 = greedy_decomposition(kUpper, b, kS2, params, Exec{1});
  const auto t2 = greedy_decomposition(kUpper, b, kS2, params, Exec{3});
  EXPECT_EQ(t1.residual_measure, t2.residual_measure);
  EXPECT_EQ(t1.invariant_drift, t2.invariant_drift);
}
