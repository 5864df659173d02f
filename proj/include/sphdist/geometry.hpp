#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sphdist/parallel.hpp"
#include "sphdist/rng.hpp"

namespace sphdist {

inline constexpr double kPi = std::numbers::pi;

/// Allowed deviation of a SpherePoint from unit norm.
inline constexpr double kUnitNormTolerance = 1e-12;

/// A point on the unit sphere S^n, stored by its n+1 ambient coordinates.
class SpherePoint {
 public:
  /// Throws std::invalid_argument unless coords has length >= 2 and unit norm.
  explicit SpherePoint(std::vector<double> coords);

  /// Scales v onto the sphere. v must be nonzero.
  static SpherePoint normalized(std::vector<double> v);

  /// The basis vector +e_axis (or -e_axis) on S^n.
  static SpherePoint basis(int n, int axis, bool negative = false);

  /// (cos theta, sin theta) on S^1.
  static SpherePoint on_circle(double theta);

  int dim() const noexcept { return static_cast<int>(coords_.size()) - 1; }
  std::size_t size() const noexcept { return coords_.size(); }
  std::span<const double> coords() const noexcept { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }

  bool operator==(const SpherePoint&) const = default;

 private:
  std::vector<double> coords_;
};

/// A point of S^{n1} x ... x S^{nr}.
class ProductPoint {
 public:
  explicit ProductPoint(std::vector<SpherePoint> factors);
  ProductPoint(SpherePoint single);  // NOLINT: a sphere point is a 1-factor product

  const std::vector<SpherePoint>& factors() const noexcept { return factors_; }
  std::size_t factor_count() const noexcept { return factors_.size(); }
  const SpherePoint& factor(std::size_t i) const { return factors_.at(i); }

  /// Concatenated ambient coordinates of all factors.
  std::vector<double> flatten() const;

  bool operator==(const ProductPoint&) const = default;

 private:
  std::vector<SpherePoint> factors_;
};

/// How per-factor distances combine into the product metric.
enum class Combiner { l2_of_euclidean, l2_of_angular, l1_of_angular, max_of_angular };

std::string_view to_string(Combiner c) noexcept;
/// Throws std::invalid_argument for unknown names.
Combiner parse_combiner(std::string_view name);

/// Metric used for distance distributions. `euclidean` and `angular` apply
/// to single spheres; `product` applies the space's combiner.
enum class MetricKind { euclidean, angular, product };

std::string_view to_string(MetricKind k) noexcept;
MetricKind parse_metric_kind(std::string_view name);

/// n-area of the unit sphere S^n: 2 pi^{(n+1)/2} / Gamma((n+1)/2).
double sphere_area(int n);

/// The ambient space S^{n1} x ... x S^{nr} with its product metric.
class SpaceSpec {
 public:
  explicit SpaceSpec(std::vector<int> dims, Combiner combiner = Combiner::l2_of_euclidean);

  static SpaceSpec sphere(int n) { return SpaceSpec({n}); }

  const std::vector<int>& dims() const noexcept { return dims_; }
  Combiner combiner() const noexcept { return combiner_; }
  std::size_t factor_count() const noexcept { return dims_.size(); }
  bool is_sphere() const noexcept { return dims_.size() == 1; }

  /// Total number of ambient coordinates of a point.
  std::size_t ambient_size() const noexcept { return offsets_.back(); }
  std::size_t offset(std::size_t factor) const { return offsets_.at(factor); }
  std::size_t factor_size(std::size_t factor) const {
    return static_cast<std::size_t>(dims_.at(factor)) + 1;
  }

  /// Product measure of the whole space.
  double measure() const;

  /// "S2", "S1xS1", ...
  std::string name() const;

  bool operator==(const SpaceSpec& other) const noexcept {
    return dims_ == other.dims_ && combiner_ == other.combiner_;
  }

  /// Throws DimensionMismatch unless p belongs to this space.
  void check(const ProductPoint& p) const;

 private:
  std::vector<int> dims_;
  Combiner combiner_;
  std::vector<std::size_t> offsets_;
};

// Flat kernels on raw coordinate spans of equal length.
double dot(std::span<const double> a, std::span<const double> b) noexcept;
double chord_length(std::span<const double> a, std::span<const double> b) noexcept;
/// Great-circle angle, computed as 2 atan2(|a-b|, |a+b|) for full accuracy
/// at both coincident and antipodal pairs.
double arc_angle(std::span<const double> a, std::span<const double> b) noexcept;

double euclidean_distance(const SpherePoint& p, const SpherePoint& q);
double angular_distance(const SpherePoint& p, const SpherePoint& q);

/// 2 sin(alpha/2), alpha in [0, pi].
double chord_from_angle(double alpha);
/// 2 asin(d/2), d in [0, 2].
double angle_from_chord(double d);

/// Flat-torus coordinate distance min(|a-b|, 2pi - |a-b|) for angles in [0, 2pi).
double torus_angle_distance(double a, double b);

/// Reflects q across the hyperplane through the origin that bisects the
/// angle (p, O, pbar). The map is an isometry swapping p and pbar.
/// Throws std::invalid_argument when p == pbar.
SpherePoint bisector_reflect(const SpherePoint& q, const SpherePoint& p, const SpherePoint& pbar);

/// Applies the combiner to per-factor distances.
double product_distance(Combiner combiner, const ProductPoint& x, const ProductPoint& y);

/// Distance function on flat points of a given space.
class Metric {
 public:
  /// Throws DimensionMismatch if kind is euclidean/angular on a product space.
  Metric(const SpaceSpec& space, MetricKind kind);

  double operator()(std::span<const double> a, std::span<const double> b) const noexcept;

  /// Largest possible distance in the space.
  double diameter() const noexcept { return diameter_; }
  MetricKind kind() const noexcept { return kind_; }
  const SpaceSpec& space() const noexcept { return space_; }

 private:
  SpaceSpec space_;
  MetricKind kind_;
  double diameter_;
};

/// Orthogonal map of R^{n+1}; acts on S^n.
class Rotation {
 public:
  static Rotation identity(int n);
  /// Haar-distributed rotation (det = +1).
  static Rotation random(int n, std::uint64_t seed);
  /// Rotation by `angle` in the (i, j) coordinate plane.
  static Rotation plane(int n, int i, int j, double angle);

  int dim() const noexcept { return n_; }
  SpherePoint apply(const SpherePoint& p) const;
  void apply(std::span<const double> in, std::span<double> out) const;
  Rotation inverse() const;

 private:
  Rotation(int n, std::vector<double> m) : n_(n), m_(std::move(m)) {}

  int n_;
  std::vector<double> m_;  // row-major (n+1) x (n+1)
};

/// Draws uniform points of a space: each factor is a normalized vector of
/// independent standard normals.
class UniformSampler {
 public:
  explicit UniformSampler(SpaceSpec space) : space_(std::move(space)) {}

  void draw(CounterRng& rng, std::span<double> out);

 private:
  SpaceSpec space_;
  std::normal_distribution<double> normal_;
};

/// Contiguous storage for many points of one space.
class PointSet {
 public:
  explicit PointSet(SpaceSpec space) : space_(std::move(space)) {}

  const SpaceSpec& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return coords_.size() / space_.ambient_size(); }
  bool empty() const noexcept { return coords_.empty(); }

  std::span<const double> operator[](std::size_t i) const {
    const std::size_t stride = space_.ambient_size();
    return std::span<const double>(coords_).subspan(i * stride, stride);
  }
  ProductPoint point(std::size_t i) const;
  std::vector<ProductPoint> to_points() const;

  void resize(std::size_t count) { coords_.resize(count * space_.ambient_size()); }
  std::span<double> mutable_point(std::size_t i) {
    const std::size_t stride = space_.ambient_size();
    return std::span<double>(coords_).subspan(i * stride, stride);
  }

 private:
  SpaceSpec space_;
  std::vector<double> coords_;
};

/// Converts flat coordinates of `space` back to a ProductPoint.
ProductPoint unflatten(const SpaceSpec& space, std::span<const double> flat);

PointSet sample_uniform_points(const SpaceSpec& space, std::size_t count, std::uint64_t seed,
                               const Exec& exec = {});

/// i.i.d. uniform points; deterministic in (seed, count) for any thread count.
std::vector<ProductPoint> sample_uniform(const SpaceSpec& space, std::size_t count,
                                         std::uint64_t seed, const Exec& exec = {});

}  // namespace sphdist
