#include "sphdist/swap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sphdist/errors.hpp"

namespace sphdist {

namespace {

std::string describe(const FitCheck& f) {
  std::string s(to_string(f.verdict));
  if (f.sampled) s += *f.sampled ? " (sampled: fits)" : " (sampled: does not fit)";
  return s;
}

}  // namespace

SwapRecord check_swap(const Region& a, const SpherePoint& p, const SpherePoint& pbar, double theta,
                      std::size_t probes, std::uint64_t seed) {
  SwapRecord rec{p, pbar, theta, check_ball_fits(a, p, theta, probes, derive_seed(seed, "fit-a")), {}};
  if (!rec.fit_in_a.fits()) throw HypothesisError("ball leaving A does not fit in A: " + describe(rec.fit_in_a));
  if (p == pbar) {
    rec.fit_in_abar = rec.fit_in_a;
    return rec;
  }
  rec.fit_in_abar = check_ball_fits(Region::complement(a), pbar, theta, probes, derive_seed(seed, "fit-abar"));
  if (!rec.fit_in_abar.fits()) {
    throw HypothesisError("ball entering A does not fit in its complement: " + describe(rec.fit_in_abar));
  }
  return rec;
}

Region apply_swap(const Region& a, const SwapRecord& swap) {
  return Region::union_of({Region::difference(a, Region::cap(swap.center_in_a, swap.angular_radius)),
                           Region::cap(swap.center_in_abar, swap.angular_radius)});
}

Region swap_balls(const Region& a, const SpherePoint& p, const SpherePoint& pbar, double theta,
                  std::size_t probes, std::uint64_t seed) {
  return apply_swap(a, check_swap(a, p, pbar, theta, probes, seed));
}

DifferenceCurve complement_difference(const Region& a, const SpaceSpec& space, MetricKind metric,
                                      std::size_t pairs, std::uint64_t seed, std::span<const double> grid,
                                      double delta, const Exec& exec) {
  const std::uint64_t seed_a = derive_seed(seed, "part");
  const std::uint64_t seed_rest = derive_seed(seed, "rest");
  const auto da = estimate_self(a, space, metric, pairs, seed_a, exec);
  const auto drest = estimate_self(Region::complement(a), space, metric, pairs, seed_rest, exec);
  DifferenceCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  for (const auto& [ell, diff] : signed_difference(da, drest, grid)) curve.values.push_back(diff);
  curve.tolerance = da.tolerance(delta) + drest.tolerance(delta);
  curve.seeds = {seed_a, seed_rest};
  return curve;
}

double sup_distance(const DifferenceCurve& x, const DifferenceCurve& y) {
  if (x.values.size() != y.values.size()) throw std::invalid_argument("curves use different grids");
  double sup = 0.0;
  for (std::size_t i = 0; i < x.values.size(); ++i) sup = std::max(sup, std::abs(x.values[i] - y.values[i]));
  return sup;
}

VerificationReport verify_swap_invariance(const Region& a, const SpaceSpec& space, const SwapRecord& swap,
                                          std::size_t pairs, std::uint64_t seed, std::span<const double> grid,
                                          MetricKind metric, double delta, const Exec& exec) {
  const Region after = apply_swap(a, swap);
  const auto before_curve = complement_difference(a, space, metric, pairs, derive_seed(seed, "before"), grid, delta, exec);
  const auto after_curve = complement_difference(after, space, metric, pairs, derive_seed(seed, "after"), grid, delta, exec);

  VerificationReport r;
  r.claim = Claim::lemma;
  r.statistic = sup_distance(before_curve, after_curve);
  r.tolerance = before_curve.tolerance + after_curve.tolerance;
  r.pairs = pairs;
  r.seeds = before_curve.seeds;
  r.seeds.insert(r.seeds.end(), after_curve.seeds.begin(), after_curve.seeds.end());
  r.metric = std::string(to_string(metric));
  r.fixtures = "ball swap, angular radius " + format_double(swap.angular_radius) +
               ", fit in A: " + describe(swap.fit_in_a) + ", fit in complement: " + describe(swap.fit_in_abar);
  r.note = "sup over grid of |(St_A - St_Ā) before - after|";
  r.decide();
  return r;
}

double reflection_pairing_error(const SpherePoint& p, const SpherePoint& pbar, double theta,
                                std::size_t draws, std::uint64_t seed) {
  const auto sources = cap_probes(pbar, theta, draws, derive_seed(seed, "ball"));
  const auto qs = sample_uniform(SpaceSpec::sphere(p.dim()), draws, derive_seed(seed, "q"), Exec{1});
  double worst = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    const SpherePoint& q = qs[i].factor(0);
    const SpherePoint image = bisector_reflect(sources[i], p, pbar);
    const SpherePoint rq = bisector_reflect(q, p, pbar);
    worst = std::max(worst, std::abs(euclidean_distance(sources[i], q) - euclidean_distance(image, rq)));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Largest ball

namespace {

class BallSearch {
 public:
  BallSearch(const Region& region, std::uint64_t seed, const BallSearchOptions& options)
      : region_(region), seed_(seed), options_(options) {}

  bool fits(const SpherePoint& center, double theta) {
    if (theta <= 0.0) return true;
    return check_ball_fits(region_, center, std::min(theta, kPi), options_.probes, derive_seed(seed_, calls_++))
        .fits();
  }

  /// Largest radius in [lo, pi] that fits at `center`, assuming lo fits.
  double radius_at(const SpherePoint& center, double lo) {
    if (fits(center, kPi)) return kPi;
    double hi = kPi;
    while (hi - lo > options_.radius_tolerance) {
      const double mid = 0.5 * (lo + hi);
      (fits(center, mid) ? lo : hi) = mid;
    }
    return lo;
  }

 private:
  const Region& region_;
  std::uint64_t seed_;
  const BallSearchOptions& options_;
  std::uint64_t calls_ = 0;
};

/// Point at angular distance `step` from `center` in a random direction.
SpherePoint nudge(const SpherePoint& center, double step, CounterRng& rng) {
  std::normal_distribution<double> normal;
  const auto c = center.coords();
  std::vector<double> v(c.size());
  double len = 0.0;
  do {
    for (double& x : v) x = normal(rng);
    const double along = dot(v, c);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] -= along * c[k];
    len = std::sqrt(dot(v, v));
  } while (!(len > 1e-9));
  std::vector<double> out(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) out[k] = std::cos(step) * c[k] + std::sin(step) * v[k] / len;
  return SpherePoint::normalized(std::move(out));
}

}  // namespace

BallFit largest_ball(const Region& region, int n, std::uint64_t seed, const BallSearchOptions& options) {
  if (options.candidates < 1) throw std::invalid_argument("largest_ball needs at least one candidate");
  const SpaceSpec space = SpaceSpec::sphere(n);
  const PointSet candidates = sample_region(region, space, options.candidates, derive_seed(seed, "candidates"),
                                            options.max_rejection_factor, Exec{1});
  BallSearch search(region, derive_seed(seed, "probes"), options);
  const double tol = options.radius_tolerance;

  std::optional<SpherePoint> best;
  double best_theta = 0.0;
  const auto consider = [&](const SpherePoint& c) {
    if (best && !search.fits(c, best_theta + tol)) return false;
    const double theta = search.radius_at(c, best ? best_theta + tol : 0.0);
    if (best && theta <= best_theta) return false;
    best = c;
    best_theta = theta;
    return true;
  };

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    consider(SpherePoint::normalized({candidates[i].begin(), candidates[i].end()}));
  }

  // Local refinement: random moves around the best center with a shrinking step.
  CounterRng rng(derive_seed(seed, "refine"), 0);
  double step = std::max(0.5 * best_theta, 4.0 * tol);
  while (step > tol && best_theta < kPi) {
    bool improved = false;
    for (int k = 0; k < 12 && !improved; ++k) improved = consider(nudge(*best, step, rng));
    if (!improved) step *= 0.5;
  }

  if (best_theta <= 0.0) {
    throw SamplingBudgetExhausted("no candidate center admits a ball of positive radius", 0.0);
  }
  // Back off by one tolerance: the bisection edge sits on the region's
  // boundary, where sampled verdicts are unreliable.
  return BallFit{*best, best_theta >= kPi ? kPi : std::max(best_theta - tol, 0.5 * best_theta), tol};
}

// ---------------------------------------------------------------------------
// Greedy decomposition

DecompositionTrace greedy_decomposition(const Region& a, const Region& b, const SpaceSpec& space,
                                        const DecompositionParams& params, const Exec& exec) {
  if (!space.is_sphere()) throw DimensionMismatch("greedy decomposition works on a single sphere");
  validate(a, space);
  validate(b, space);
  const int n = space.dims()[0];
  const std::uint64_t seed = params.seed;

  const auto ma = measure(a, space, params.residual_samples, derive_seed(seed, "mu-a"), params.delta, exec);
  const auto mb = measure(b, space, params.residual_samples, derive_seed(seed, "mu-b"), params.delta, exec);
  const double slack = (ma.exact && mb.exact) ? 1e-9 * space.measure() : ma.half_width + mb.half_width;
  if (std::abs(ma.value - mb.value) > slack) {
    throw HypothesisError("decomposition needs mu(A) = mu(B); got " + format_double(ma.value) + " vs " +
                          format_double(mb.value));
  }

  DecompositionTrace trace;
  trace.seed = seed;
  const std::uint64_t residual_seed = derive_seed(seed, "residual");
  const auto residual = [&](const Region& current) {
    // The same seed at every step: removals only ever drop sampled hits.
    return mc_measure(Region::difference(current, b), space, params.residual_samples, residual_seed,
                      params.delta, exec);
  };
  const auto grid = uniform_grid(Metric(space, params.metric).diameter(), params.grid_points);
  const auto curve = [&](const Region& current, std::size_t step) {
    return complement_difference(current, space, params.metric, params.drift_pairs,
                                 derive_seed(seed, 1000 + step), grid, params.delta, exec);
  };

  Region current = a;
  const auto initial = residual(current);
  trace.initial_residual = initial.value;
  trace.residual_half_width = initial.half_width;
  if (initial.value == 0.0 && a.same_node(b)) {
    trace.stop_reason = "A and B coincide";
    trace.final_region = current;
    return trace;
  }
  DifferenceCurve previous = curve(current, 0);

  trace.stop_reason = "max_swaps reached";
  for (std::size_t k = 0; k < params.max_swaps; ++k) {
    const std::uint64_t step_seed = derive_seed(seed, 10 * (k + 1));
    BallFit out_of_a{SpherePoint::basis(n, 0), 0.0, 0.0};
    BallFit into_a{SpherePoint::basis(n, 0), 0.0, 0.0};
    try {
      out_of_a = largest_ball(Region::difference(current, b), n, derive_seed(step_seed, "a"), params.search);
      into_a = largest_ball(Region::difference(b, current), n, derive_seed(step_seed, "b"), params.search);
    } catch (const SamplingBudgetExhausted&) {
      trace.stop_reason = "no ball found in the residual regions";
      break;
    }
    const double theta = std::min(out_of_a.angular_radius, into_a.angular_radius);
    if (theta < params.min_radius) {
      trace.stop_reason = "largest ball below min_radius";
      break;
    }
    SwapRecord record{out_of_a.center, into_a.center, theta, {}, {}};
    try {
      record = check_swap(current, out_of_a.center, into_a.center, theta, params.search.probes,
                          derive_seed(step_seed, "check"));
    } catch (const HypothesisError& e) {
      trace.stop_reason = std::string("swap precondition failed: ") + e.what();
      break;
    }
    Region next = apply_swap(current, record);
    if (next.depth() > params.max_depth) {
      trace.stop_reason = "expression depth limit reached";
      break;
    }
    DifferenceCurve next_curve = curve(next, k + 1);
    trace.swaps.push_back(record);
    trace.residual_measure.push_back(residual(next).value);
    trace.invariant_drift.push_back(sup_distance(previous, next_curve));
    trace.drift_tolerance.push_back(previous.tolerance + next_curve.tolerance);
    trace.expression_depth.push_back(next.depth());
    current = std::move(next);
    previous = std::move(next_curve);
  }
  trace.final_region = current;
  return trace;
}

}  // namespace sphdist
