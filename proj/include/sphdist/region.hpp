#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sphdist/geometry.hpp"
#include "sphdist/parallel.hpp"

namespace sphdist {

namespace detail {
struct RegionNode;
}

/// Immutable expression tree describing a measurable subset of a sphere or
/// of a product of spheres. Copies share structure.
///
/// Sphere-level constructors (cap, hemisphere, band) describe subsets of a
/// single S^n. On a product space they must appear inside `product`.
/// Caps and bands are closed.
class Region {
 public:
  enum class Kind {
    full,
    empty,
    cap,
    hemisphere,
    band,
    union_of,
    intersection,
    complement,
    difference,
    product,
    angle_sum,
  };

  static Region full();
  static Region empty();
  /// Points within angular distance theta of center; theta in (0, pi].
  static Region cap(SpherePoint center, double theta);
  /// The ball BB(center, r) = B(center, r) ∩ S^n for a chord radius r in (0, 2].
  static Region ball(const SpherePoint& center, double chord_radius);
  /// {x : <x, normal> >= 0}.
  static Region hemisphere(SpherePoint normal);
  /// {x : z_lo <= <x, axis> <= z_hi} with -1 <= z_lo < z_hi <= 1.
  static Region band(SpherePoint axis, double z_lo, double z_hi);
  static Region union_of(std::vector<Region> parts);
  static Region intersection_of(std::vector<Region> parts);
  static Region complement(Region r);
  static Region difference(Region a, Region b);
  /// One sphere-level region per factor of the space.
  static Region product(std::vector<Region> factors);
  /// On (S^1)^r: {(t_1..t_r) : (t_1 + ... + t_r) mod 2pi in [lo, hi)}.
  static Region angle_sum(double lo, double hi);

  Kind kind() const noexcept;

  /// Cap center, hemisphere normal or band axis.
  const SpherePoint& point() const;
  /// Cap angular radius (pi/2 for a hemisphere).
  double theta() const;
  /// Band z-range or angle-sum range.
  double lower() const;
  double upper() const;
  const std::vector<Region>& children() const;

  /// Sphere dimension of sphere-level leaves; nullopt for dimension-free
  /// trees (full/empty combinations) and for product-level trees.
  std::optional<int> sphere_dim() const;
  /// True when the tree contains product or angle_sum nodes.
  bool product_level() const;
  std::size_t depth() const;

  bool same_node(const Region& other) const noexcept { return node_ == other.node_; }
  const detail::RegionNode& node() const noexcept { return *node_; }

 private:
  explicit Region(std::shared_ptr<const detail::RegionNode> node) : node_(std::move(node)) {}
  friend struct detail::RegionNode;

  std::shared_ptr<const detail::RegionNode> node_;
};

enum class Verdict { yes, no, unknown };

std::string_view to_string(Verdict v) noexcept;

/// Throws DimensionMismatch unless every leaf fits `space`.
void validate(const Region& region, const SpaceSpec& space);

/// Membership of a flat point of `space`. The region must be valid for it.
bool contains(const Region& region, const SpaceSpec& space, std::span<const double> point);
bool contains(const Region& region, const SpaceSpec& space, const ProductPoint& point);

/// n-area of a region, exact or Monte Carlo.
struct MeasureEstimate {
  double value = 0.0;
  double half_width = 0.0;
  bool exact = false;
};

/// n-area of {x : <x, e> >= cos theta} on S^n.
double cap_area(int n, double theta);
/// n-area of {x : a <= <x, e> <= b} on S^n.
double zone_area(int n, double a, double b);

/// Exact measure when the tree's structure makes it decidable (leaves,
/// complements, same-axis interval algebra, provably disjoint or nested
/// boolean combinations, products); nullopt otherwise.
std::optional<MeasureEstimate> exact_measure(const Region& region, const SpaceSpec& space);

/// Hit-fraction estimate with Hoeffding half-width sqrt(ln(2/delta)/(2 samples)) * mu(space).
MeasureEstimate mc_measure(const Region& region, const SpaceSpec& space, std::size_t samples,
                           std::uint64_t seed, double delta, const Exec& exec = {});

/// Exact measure if available, otherwise mc_measure.
MeasureEstimate measure(const Region& region, const SpaceSpec& space, std::size_t samples,
                        std::uint64_t seed, double delta, const Exec& exec = {});

inline constexpr std::size_t kDefaultRejectionFactor = 1000;

/// Rejection sampler for one region. Each fill() may draw at most
/// max_rejection_factor * count ambient points.
class RegionSampler {
 public:
  RegionSampler(Region region, SpaceSpec space,
                std::size_t max_rejection_factor = kDefaultRejectionFactor);

  /// Writes `count` points into out (count * ambient_size doubles).
  void fill(CounterRng& rng, std::size_t count, std::span<double> out);

 private:
  Region region_;
  SpaceSpec space_;
  UniformSampler uniform_;
  std::size_t max_rejection_factor_;
};

/// i.i.d. uniform points of the region. Throws SamplingBudgetExhausted.
PointSet sample_region(const Region& region, const SpaceSpec& space, std::size_t count,
                       std::uint64_t seed,
                       std::size_t max_rejection_factor = kDefaultRejectionFactor,
                       const Exec& exec = {});

/// Whether Cap(center, theta) ⊆ region, decided from the tree structure.
/// Region must be sphere-level on the sphere of `center`.
Verdict ball_fits(const Region& region, const SpherePoint& center, double theta);

/// Whether Cap(center, theta) ∩ region is null, decided from the tree structure.
Verdict ball_disjoint(const Region& region, const SpherePoint& center, double theta);

/// ball_fits plus a sampled verdict when the structural one is unknown.
struct FitCheck {
  Verdict verdict = Verdict::unknown;
  std::optional<bool> sampled;  // set only when verdict is unknown

  bool fits() const noexcept {
    return verdict == Verdict::yes || (verdict == Verdict::unknown && sampled.value_or(false));
  }
};

FitCheck check_ball_fits(const Region& region, const SpherePoint& center, double theta,
                         std::size_t probes, std::uint64_t seed);

/// Probe points inside Cap(center, theta), half of them on its rim.
std::vector<SpherePoint> cap_probes(const SpherePoint& center, double theta, std::size_t count,
                                    std::uint64_t seed);

/// Image of a sphere-level region under a rotation.
Region rotate(const Region& region, const Rotation& rotation);

}  // namespace sphdist
