#include "sphdist/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sphdist/errors.hpp"
#include "sphdist/stats.hpp"

namespace sphdist {

namespace {

constexpr std::array<std::string_view, 5> kClaimNames = {"lemma", "main_lemma", "theorem1", "theorem2",
                                                         "theorem3"};

MeasureEstimate mass_of(const Region& r, const SpaceSpec& space, std::uint64_t seed, const VerifyOptions& o,
                        const Exec& exec) {
  return measure(r, space, o.estimate.mass_samples, seed, o.estimate.mass_delta, exec);
}

bool same_measure(const MeasureEstimate& x, const MeasureEstimate& y, const SpaceSpec& space) {
  const double slack = (x.exact && y.exact) ? 1e-9 * space.measure() : x.half_width + y.half_width;
  return std::abs(x.value - y.value) <= slack;
}

CheckDetail check(std::string name, double statistic, double tolerance) {
  return CheckDetail{std::move(name), statistic, tolerance, statistic <= tolerance};
}

double sup_abs(const std::vector<std::pair<double, double>>& rows) {
  double sup = 0.0;
  for (const auto& row : rows) sup = std::max(sup, std::abs(row.second));
  return sup;
}

void add_seeds(VerificationReport& r, std::initializer_list<const EmpiricalDistribution*> dists) {
  for (const auto* d : dists) r.seeds.push_back(d->seed());
}

}  // namespace

std::string_view to_string(Claim c) noexcept { return kClaimNames[static_cast<std::size_t>(c)]; }

Claim parse_claim(std::string_view name) {
  for (std::size_t i = 0; i < kClaimNames.size(); ++i) {
    if (kClaimNames[i] == name) return static_cast<Claim>(i);
  }
  throw std::invalid_argument("unknown claim '" + std::string(name) + "'");
}

VerificationReport verify_theorem1(const Partition& partition, MetricKind metric, const VerifyOptions& options,
                                   const Exec& exec) {
  const SpaceSpec& space = partition.space;
  const std::uint64_t seed = options.seed;
  const auto mu_part = mass_of(partition.part, space, derive_seed(seed, "mu-part"), options, exec);
  const auto mu_rest = mass_of(partition.rest, space, derive_seed(seed, "mu-rest"), options, exec);

  const auto d_part = estimate_self(partition.part, space, metric, options.pairs, derive_seed(seed, "part"), exec,
                                    options.estimate);
  const auto d_rest = estimate_self(partition.rest, space, metric, options.pairs, derive_seed(seed, "rest"), exec,
                                    options.estimate);

  VerificationReport r;
  r.claim = Claim::theorem1;
  r.statistic = ks_two_sample(d_part, d_rest);
  r.tolerance = 2.0 * dkw_tolerance(options.pairs, options.delta);
  r.pairs = options.pairs;
  add_seeds(r, {&d_part, &d_rest});
  r.fixtures = partition.name + " on " + space.name();
  r.metric = std::string(to_string(metric));
  r.details.push_back(check("ks_normalized", r.statistic, r.tolerance));
  if (!same_measure(mu_part, mu_rest, space)) {
    r.premise_ok = false;
    r.note = "unequal measures " + format_double(mu_part.value) + " vs " + format_double(mu_rest.value);
  }
  r.decide();
  return r;
}

VerificationReport verify_main_lemma(const Partition& a, const Partition& b, MetricKind metric,
                                     const VerifyOptions& options, const Exec& exec) {
  if (!(a.space == b.space)) throw DimensionMismatch("partitions live in different spaces");
  const SpaceSpec& space = a.space;
  const std::uint64_t seed = options.seed;
  const auto mu_a = mass_of(a.part, space, derive_seed(seed, "mu-a"), options, exec);
  const auto mu_abar = mass_of(a.rest, space, derive_seed(seed, "mu-abar"), options, exec);
  const auto mu_b = mass_of(b.part, space, derive_seed(seed, "mu-b"), options, exec);
  const auto mu_bbar = mass_of(b.rest, space, derive_seed(seed, "mu-bbar"), options, exec);

  const auto est = [&](const Region& r, std::string_view tag) {
    return estimate_self(r, space, metric, options.pairs, derive_seed(seed, tag), exec, options.estimate);
  };
  const auto d_a = est(a.part, "a");
  const auto d_abar = est(a.rest, "abar");
  const auto d_b = est(b.part, "b");
  const auto d_bbar = est(b.rest, "bbar");

  const auto grid = uniform_grid(Metric(space, metric).diameter(), options.grid_points);
  const auto diff_a = signed_difference(d_a, d_abar, grid);
  const auto diff_b = signed_difference(d_b, d_bbar, grid);
  std::vector<std::pair<double, double>> gap(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) gap[i] = {grid[i], diff_a[i].second - diff_b[i].second};

  VerificationReport r;
  r.claim = Claim::main_lemma;
  r.statistic = sup_abs(gap);
  r.tolerance = d_a.tolerance(options.delta) + d_abar.tolerance(options.delta) + d_b.tolerance(options.delta) +
                d_bbar.tolerance(options.delta);
  r.pairs = options.pairs;
  add_seeds(r, {&d_a, &d_abar, &d_b, &d_bbar});
  r.fixtures = "A: " + a.name + ", B: " + b.name + " on " + space.name();
  r.metric = std::string(to_string(metric));
  r.details.push_back(check("sup_gap", r.statistic, r.tolerance));

  // At the diameter each difference is the exact mass gap mu^2 - mu_bar^2.
  const double predicted = std::abs(mu_a.value * mu_a.value - mu_abar.value * mu_abar.value -
                                    mu_b.value * mu_b.value + mu_bbar.value * mu_bbar.value);
  const double mass_slack = d_a.mass_half_width() + d_abar.mass_half_width() + d_b.mass_half_width() +
                            d_bbar.mass_half_width();
  r.details.push_back(check("endpoint_gap", std::abs(std::abs(gap.back().second) - predicted),
                             mass_slack + 1e-9 * space.measure() * space.measure()));
  r.details.push_back(CheckDetail{"predicted_endpoint_gap", predicted, 0.0, true});

  if (!same_measure(mu_a, mu_b, space)) {
    r.premise_ok = false;
    r.note = "mu(A) = " + format_double(mu_a.value) + " differs from mu(B) = " + format_double(mu_b.value);
  }
  r.decide();
  return r;
}

VerificationReport verify_theorem2(const Region& s, const Region& s_prime, const SpaceSpec& space,
                                   MetricKind metric, const VerifyOptions& options, const Exec& exec) {
  const std::uint64_t seed = options.seed;
  const Region s_bar = Region::complement(s);
  const Region s_prime_bar = Region::complement(s_prime);
  const auto est = [&](const Region& r, std::string_view tag) {
    return estimate_self(r, space, metric, options.pairs, derive_seed(seed, tag), exec, options.estimate);
  };
  const double ks_tol = 2.0 * dkw_tolerance(options.pairs, options.delta);

  VerificationReport r;
  r.claim = Claim::theorem2;
  r.pairs = options.pairs;
  r.fixtures = "S and S' on " + space.name();
  r.metric = std::string(to_string(metric));

  // Gate: mass-scaled sup |St_S - St_S'| relative to the larger mass.
  const auto d_s = est(s, "s");
  const auto d_sp = est(s_prime, "s-prime");
  add_seeds(r, {&d_s, &d_sp});
  const double scale = std::max(d_s.mass_scale(), d_sp.mass_scale());
  double gate = 0.0;
  double gate_tol = ks_tol;
  if (scale > 0.0) {
    std::vector<double> merged(d_s.distances());
    merged.insert(merged.end(), d_sp.distances().begin(), d_sp.distances().end());
    merged.push_back(std::max(d_s.diameter(), d_sp.diameter()));
    for (double ell : merged) gate = std::max(gate, std::abs(d_s.cdf(ell) - d_sp.cdf(ell)));
    gate /= scale;
    gate_tol += (d_s.mass_half_width() + d_sp.mass_half_width()) / scale;
  }
  r.details.push_back(check("premise_gate", gate, gate_tol));
  if (gate > gate_tol) {
    r.premise_ok = false;
    r.note = "premise violated";
    r.statistic = gate;
    r.tolerance = gate_tol;
    r.decide();
    return r;
  }

  const auto d_sbar = est(s_bar, "s-bar");
  const auto d_spbar = est(s_prime_bar, "s-prime-bar");
  const auto x_s = estimate_cross(s, s_bar, space, metric, options.pairs, derive_seed(seed, "cross-s"), exec,
                                  options.estimate);
  const auto x_sp = estimate_cross(s_prime, s_prime_bar, space, metric, options.pairs,
                                   derive_seed(seed, "cross-s-prime"), exec, options.estimate);
  add_seeds(r, {&d_sbar, &d_spbar, &x_s, &x_sp});

  const double ks_complement = ks_two_sample(d_sbar, d_spbar);
  const double ks_cross = ks_two_sample(x_s, x_sp);
  r.details.push_back(check("complement_ks", ks_complement, ks_tol));
  r.details.push_back(check("cross_ks", ks_cross, ks_tol));
  r.statistic = std::max(ks_complement, ks_cross);
  r.tolerance = ks_tol;
  r.decide();
  return r;
}

VerificationReport verify_theorem3(const Partition& partition, const VerifyOptions& options, const Exec& exec) {
  VerificationReport r = verify_theorem1(partition, MetricKind::product, options, exec);
  r.claim = Claim::theorem3;
  r.metric = std::string(to_string(partition.space.combiner()));
  return r;
}

VerificationReport verify_decomposition_identity(const Partition& partition, MetricKind metric,
                                                 const VerifyOptions& options, const Exec& exec) {
  const SpaceSpec& space = partition.space;
  const std::uint64_t seed = options.seed;
  const auto d_part = estimate_self(partition.part, space, metric, options.pairs, derive_seed(seed, "part"), exec,
                                    options.estimate);
  const auto d_rest = estimate_self(partition.rest, space, metric, options.pairs, derive_seed(seed, "rest"), exec,
                                    options.estimate);
  const auto d_cross = estimate_cross(partition.part, partition.rest, space, metric, options.pairs,
                                      derive_seed(seed, "cross"), exec, options.estimate);
  const auto grid = uniform_grid(Metric(space, metric).diameter(), options.grid_points);

  VerificationReport r;
  r.claim = Claim::theorem2;
  r.pairs = options.pairs;
  add_seeds(r, {&d_part, &d_rest, &d_cross});
  r.fixtures = partition.name + " on " + space.name() + " (decomposition identity)";
  r.metric = std::string(to_string(metric));
  r.tolerance = d_part.tolerance(options.delta) + d_rest.tolerance(options.delta) + d_cross.tolerance(options.delta);

  std::vector<double> whole(grid.size());
  if (space.is_sphere() && metric != MetricKind::product) {
    for (std::size_t i = 0; i < grid.size(); ++i) whole[i] = analytic_fullsphere_cdf(space.dims()[0], metric, grid[i]);
  } else {
    const auto d_full = estimate_self(Region::full(), space, metric, options.pairs, derive_seed(seed, "full"), exec,
                                      options.estimate);
    r.seeds.push_back(d_full.seed());
    r.tolerance += d_full.tolerance(options.delta);
    for (std::size_t i = 0; i < grid.size(); ++i) whole[i] = d_full.cdf(grid[i]);
  }
  double sup = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double ell = grid[i];
    sup = std::max(sup, std::abs(d_part.cdf(ell) + d_rest.cdf(ell) + d_cross.cdf(ell) - whole[i]));
  }
  r.statistic = sup;
  r.details.push_back(check("decomposition_sup", r.statistic, r.tolerance));
  r.decide();
  return r;
}

}  // namespace sphdist
