// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: sphdist_acceptance [criterion ...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "sphdist/config.hpp"
#include "sphdist/distribution.hpp"
#include "sphdist/fixtures.hpp"
#include "sphdist/geometry.hpp"
#include "sphdist/stats.hpp"
#include "sphdist/swap.hpp"
#include "sphdist/verify.hpp"

using namespace sphdist;

namespace {

constexpr std::size_t kPairs = 1'000'000;
constexpr double kDelta = 1e-3;
const SpaceSpec kS2 = SpaceSpec::sphere(2);
const SpherePoint kNorth = SpherePoint::basis(2, 2);

struct Outcome {
  bool pass = true;
  std::string detail;

  // `relation` is the condition that must hold between stat and bound.
  void add(const std::string& name, bool ok, double stat, double bound, const char* relation = "<=") {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += name + (ok ? " ok " : " FAILED ") + format_double(stat) + " " + relation + " " + format_double(bound);
  }
  void add(const std::string& name, const VerificationReport& r) { add(name, r.pass, r.statistic, r.tolerance); }
};

struct Criterion {
  int id;
  std::string title;
  double budget_s;
  std::function<Outcome()> body;
};

VerifyOptions options(std::uint64_t seed) {
  VerifyOptions o;
  o.pairs = kPairs;
  o.seed = seed;
  o.delta = kDelta;
  return o;
}

Outcome chord_angle_identity() {
  const auto a = sample_uniform_points(kS2, kPairs, 101);
  const auto b = sample_uniform_points(kS2, kPairs, 102);
  double worst = 0.0;
  for (std::size_t i = 0; i < kPairs; ++i) {
    worst = std::max(worst, std::abs(2 * std::sin(arc_angle(a[i], b[i]) / 2) - chord_length(a[i], b[i])));
  }
  Outcome o;
  o.add("max |2 sin(a/2) - d|", worst < 1e-12, worst, 1e-12);
  return o;
}

Outcome full_sphere_oracle() {
  Outcome o;
  const double tol = dkw_tolerance(kPairs, kDelta);
  for (int n = 1; n <= 3; ++n) {
    const auto d = estimate_self(Region::full(), SpaceSpec::sphere(n), MetricKind::euclidean, kPairs, 200 + n);
    const double mass = sphere_area(n) * sphere_area(n);
    double sup = 0.0;
    for (double ell : uniform_grid(2.0, 256)) {
      sup = std::max(sup, std::abs(d.probability_cdf(ell) - analytic_fullsphere_cdf(n, MetricKind::euclidean, ell) / mass));
    }
    o.add("S" + std::to_string(n), sup <= tol, sup, tol);
  }
  return o;
}

Outcome swap_lemma() {
  Outcome o;
  const Region upper = Region::hemisphere(kNorth);
  const SpherePoint south = SpherePoint::basis(2, 2, true);
  const auto rec = check_swap(upper, kNorth, south, kPi / 8);
  const auto r = verify_swap_invariance(upper, kS2, rec, kPairs, 300, uniform_grid(2.0, 256));
  o.add("sup drift", r);
  const double err = reflection_pairing_error(kNorth, south, kPi / 8, 100'000, 301);
  o.add("reflection pairing", err <= 1e-12, err, 1e-12);
  return o;
}

Outcome main_lemma() {
  Outcome o;
  const auto cap = cap_partition(cap_radius_for_area(2, kPi));
  const double theta = cap_radius_for_area(2, kPi / 2);
  const auto two_caps = make_partition("two caps", kS2,
                                       Region::union_of({Region::cap(SpherePoint::basis(2, 0), theta),
                                                         Region::cap(SpherePoint::basis(2, 0, true), theta)}));
  o.add("cap vs two caps", verify_main_lemma(cap, two_caps, MetricKind::euclidean, options(400)));

  // Control: cap of area pi against a hemisphere; the gap at the diameter is 8 pi^2.
  const auto r = verify_main_lemma(cap, hemisphere_partition(2), MetricKind::euclidean, options(401));
  o.add("control fails", !r.pass, r.statistic, r.tolerance, ">");
  for (const auto& d : r.details) {
    if (d.name == "endpoint_gap") o.add("control endpoint gap", d.pass, d.statistic, d.tolerance);
  }
  return o;
}

Outcome theorem1() {
  Outcome o;
  o.add("4 bands", verify_theorem1(band_partition(4), MetricKind::euclidean, options(500)));
  o.add("hemisphere", verify_theorem1(hemisphere_partition(2), MetricKind::euclidean, options(501)));
  const auto control = verify_theorem1(cap_partition(kPi / 3), MetricKind::euclidean, options(502));
  o.add("unequal control exceeds", control.statistic > control.tolerance, control.statistic, control.tolerance, ">");
  return o;
}

Outcome theorem2() {
  Outcome o;
  const Region cap = Region::cap(kNorth, kPi / 4);
  o.add("rotated cap",
        verify_theorem2(cap, rotate(cap, Rotation::random(2, 600)), kS2, MetricKind::euclidean, options(600)));
  const auto bands = band_partition(4);
  o.add("band vs rotated complement",
        verify_theorem2(bands.part, rotate(bands.rest, Rotation::random(2, 601)), kS2, MetricKind::euclidean,
                        options(601)));
  o.add("identity bands", verify_decomposition_identity(bands, MetricKind::euclidean, options(602)));
  o.add("identity cap", verify_decomposition_identity(cap_partition(kPi / 4), MetricKind::euclidean, options(603)));
  return o;
}

Outcome theorem3() {
  Outcome o;
  o.add("torus half", verify_theorem3(torus_half_partition(), options(700)));
  o.add("hemisphere x S1", verify_theorem3(hemisphere_times_circle_partition(), options(701)));
  const double w = torus_angle_distance(0.1, 2 * kPi - 0.1);
  o.add("wraparound", std::abs(w - 0.2) <= 1e-15, std::abs(w - 0.2), 1e-15);
  return o;
}

Outcome greedy() {
  DecompositionParams params;
  params.max_swaps = 64;
  params.min_radius = 0.05;
  params.seed = 800;
  const auto t = greedy_decomposition(Region::hemisphere(kNorth), Region::hemisphere(SpherePoint::basis(2, 0)), kS2,
                                      params);
  Outcome o;
  const double last = t.residual_measure.empty() ? t.initial_residual : t.residual_measure.back();
  const double decrease = 1.0 - last / t.initial_residual;
  o.add("residual decrease (" + std::to_string(t.swaps.size()) + " swaps, " + t.stop_reason + ")", decrease >= 0.5,
        decrease, 0.5, ">=");
  double worst = 0.0;
  bool drifts_ok = true;
  for (std::size_t k = 0; k < t.invariant_drift.size(); ++k) {
    drifts_ok = drifts_ok && t.invariant_drift[k] <= t.drift_tolerance[k];
    worst = std::max(worst, t.invariant_drift[k] / t.drift_tolerance[k]);
  }
  o.add("max drift / tolerance", drifts_ok, worst, 1.0);
  return o;
}

std::string run_bytes(const std::string& text, unsigned threads, int& code) {
  RunConfig c = parse_config(text);
  c.threads = threads;
  std::ostringstream out, err;
  code = run(c, out, err);
  return out.str() + err.str();
}

Outcome determinism() {
  const std::string common =
      "seed = 900\n"
      "region A = union(band([0,0,1], -1, -0.5), band([0,0,1], 0, 0.5))\n"
      "region B = hemisphere([1,0,0])\n"
      "region H = hemisphere([0,0,1])\n";
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"verify theorem1", "command = verify\nclaim = theorem1\n"},
      {"verify lemma",
       "command = verify\nclaim = lemma\na = H\nswap_p = [0,0,1]\nswap_pbar = [0,0,-1]\nswap_theta = pi/8\n"},
      {"dist cdf", "command = dist\n"},
      {"dist cross histogram", "command = dist\ncross = true\nbins = 64\n"},
      {"measure", "command = measure\na = B\nformat = json\n"},
      {"torus dist",
       "command = dist\nspace = S1xS1\ncombiner = l2-of-angular\nregion T = anglesum(0, pi)\na = T\n"},
      {"decompose", "command = decompose\na = H\nmax_swaps = 6\n"},
  };
  Outcome o;
  for (const auto& [name, text] : runs) {
    int c1 = 0, c4 = 0;
    const auto one = run_bytes(common + text, 1, c1);
    const auto four = run_bytes(common + text, 4, c4);
    const bool same = one == four && c1 == c4 && !one.empty();
    o.add(name + " differing bytes", same, same ? 0.0 : 1.0, 0.0, "==");
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "chord-angle identity", 5, chord_angle_identity},
      {2, "full-sphere oracle", 30, full_sphere_oracle},
      {3, "swap invariance", 60, swap_lemma},
      {4, "main lemma", 90, main_lemma},
      {5, "equal-area partitions", 60, theorem1},
      {6, "complements and cross measures", 90, theorem2},
      {7, "product spaces", 60, theorem3},
      {8, "greedy decomposition", 300, greedy},
      {9, "determinism across thread counts", 0, determinism},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_s <= 0 || secs < c.budget_s;
    if (!in_time) o.detail += "; over the " + format_double(c.budget_s) + " s budget";
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s criterion %d: %s (%.1f s) %s\n", pass ? "PASS" : "FAIL", c.id, c.title.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
