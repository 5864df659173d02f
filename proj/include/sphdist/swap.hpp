#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sphdist/distribution.hpp"
#include "sphdist/geometry.hpp"
#include "sphdist/region.hpp"
#include "sphdist/report.hpp"

namespace sphdist {

/// One exchange of equal balls: Cap(center_in_a, r) leaves A, Cap(center_in_abar, r) joins it.
struct SwapRecord {
  SpherePoint center_in_a;
  SpherePoint center_in_abar;
  double angular_radius = 0.0;
  FitCheck fit_in_a;
  FitCheck fit_in_abar;
};

/// Checks that Cap(p, theta) ⊆ A and Cap(pbar, theta) ⊆ Ā. When p == pbar
/// only the first ball is checked (the swap is the identity).
/// Throws HypothesisError when a ball does not fit.
SwapRecord check_swap(const Region& a, const SpherePoint& p, const SpherePoint& pbar, double theta,
                      std::size_t probes = 256, std::uint64_t seed = 0);

/// (A \ Cap(p, r)) ∪ Cap(pbar, r), without precondition checks.
Region apply_swap(const Region& a, const SwapRecord& swap);

/// check_swap followed by apply_swap.
Region swap_balls(const Region& a, const SpherePoint& p, const SpherePoint& pbar, double theta,
                  std::size_t probes = 256, std::uint64_t seed = 0);

/// St_A - St_Ā sampled on a grid, with its sup-norm error bound.
struct DifferenceCurve {
  std::vector<double> grid;
  std::vector<double> values;
  double tolerance = 0.0;  // sum of the two cdf tolerances
  std::vector<std::uint64_t> seeds;
};

DifferenceCurve complement_difference(const Region& a, const SpaceSpec& space, MetricKind metric,
                                      std::size_t pairs, std::uint64_t seed, std::span<const double> grid,
                                      double delta, const Exec& exec = {});

double sup_distance(const DifferenceCurve& x, const DifferenceCurve& y);

/// Estimates St_A - St_Ā before and after the swap and compares them in
/// sup norm against the four summed cdf tolerances.
VerificationReport verify_swap_invariance(const Region& a, const SpaceSpec& space, const SwapRecord& swap,
                                          std::size_t pairs, std::uint64_t seed, std::span<const double> grid,
                                          MetricKind metric = MetricKind::euclidean, double delta = 1e-3,
                                          const Exec& exec = {});

/// max | |pbar' - q| - |p' - r(q)| | over `draws` points pbar' in
/// Cap(pbar, theta) and uniform q, with p' and r(q) the bisector images.
double reflection_pairing_error(const SpherePoint& p, const SpherePoint& pbar, double theta,
                                std::size_t draws, std::uint64_t seed);

struct BallFit {
  SpherePoint center;
  double angular_radius = 0.0;
  double radius_tolerance = 0.0;
};

struct BallSearchOptions {
  std::size_t candidates = 1024;
  double radius_tolerance = 1e-3;
  std::size_t probes = 256;
  std::size_t max_rejection_factor = 2000;
};

/// Approximately the largest cap inside a sphere-level region: random
/// candidate centers, a bisection on the radius per candidate, then a local
/// refinement of the best center. Throws SamplingBudgetExhausted when no
/// candidate center can be drawn.
BallFit largest_ball(const Region& region, int n, std::uint64_t seed, const BallSearchOptions& options = {});

struct DecompositionParams {
  std::size_t max_swaps = 64;
  /// Smallest angular radius worth swapping.
  double min_radius = 0.05;
  BallSearchOptions search;
  std::size_t residual_samples = 400'000;
  std::size_t drift_pairs = 200'000;
  std::size_t grid_points = 256;
  double delta = 1e-3;
  MetricKind metric = MetricKind::euclidean;
  std::size_t max_depth = 1024;
  std::uint64_t seed = 0;
};

struct DecompositionTrace {
  std::vector<SwapRecord> swaps;
  double initial_residual = 0.0;
  double residual_half_width = 0.0;
  /// Estimated mu(A_k - B) after each swap.
  std::vector<double> residual_measure;
  /// sup |(St_{A_k} - St_{Ā_k}) - (St_{A_{k-1}} - St_{Ā_{k-1}})| per swap.
  std::vector<double> invariant_drift;
  std::vector<double> drift_tolerance;
  std::vector<std::size_t> expression_depth;
  std::string stop_reason;
  std::uint64_t seed = 0;
  std::optional<Region> final_region;
};

/// Repeatedly swaps equal balls from A - B (out of A) and B - A (into A),
/// recording the residual measure and the drift of St_A - St_Ā.
/// Throws HypothesisError if mu(A) and mu(B) differ beyond their uncertainty.
DecompositionTrace greedy_decomposition(const Region& a, const Region& b, const SpaceSpec& space,
                                        const DecompositionParams& params, const Exec& exec = {});

}  // namespace sphdist
