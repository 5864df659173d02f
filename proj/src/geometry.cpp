#include "sphdist/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sphdist/errors.hpp"

namespace sphdist {

namespace {

double norm(std::span<const double> v) noexcept { return std::sqrt(dot(v, v)); }

double combine_angles(Combiner c, std::span<const double> angles) noexcept {
  double acc = 0.0;
  switch (c) {
    case Combiner::l2_of_angular:
      for (double a : angles) acc += a * a;
      return std::sqrt(acc);
    case Combiner::l1_of_angular:
      for (double a : angles) acc += a;
      return acc;
    case Combiner::max_of_angular:
      for (double a : angles) acc = std::max(acc, a);
      return acc;
    case Combiner::l2_of_euclidean:
      break;
  }
  for (double d : angles) acc += d * d;
  return std::sqrt(acc);
}

}  // namespace

// ---------------------------------------------------------------------------
// Points

SpherePoint::SpherePoint(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.size() < 2) throw std::invalid_argument("sphere point needs at least 2 coordinates");
  const double n = norm(coords_);
  if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitNormTolerance) {
    throw std::invalid_argument("sphere point is not unit norm (|x| = " + std::to_string(n) + ")");
  }
}

SpherePoint SpherePoint::normalized(std::vector<double> v) {
  const double n = norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("cannot normalize a zero vector");
  for (double& x : v) x /= n;
  return SpherePoint(std::move(v));
}

SpherePoint SpherePoint::basis(int n, int axis, bool negative) {
  if (n < 1 || axis < 0 || axis > n) throw std::invalid_argument("basis axis out of range");
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  v[static_cast<std::size_t>(axis)] = negative ? -1.0 : 1.0;
  return SpherePoint(std::move(v));
}

SpherePoint SpherePoint::on_circle(double theta) {
  return SpherePoint::normalized({std::cos(theta), std::sin(theta)});
}

ProductPoint::ProductPoint(std::vector<SpherePoint> factors) : factors_(std::move(factors)) {
  if (factors_.empty()) throw std::invalid_argument("product point needs at least one factor");
}

ProductPoint::ProductPoint(SpherePoint single) : factors_{std::move(single)} {}

std::vector<double> ProductPoint::flatten() const {
  std::vector<double> out;
  for (const auto& f : factors_) out.insert(out.end(), f.coords().begin(), f.coords().end());
  return out;
}

// ---------------------------------------------------------------------------
// Names

std::string_view to_string(Combiner c) noexcept {
  switch (c) {
    case Combiner::l2_of_euclidean: return "l2-of-euclidean";
    case Combiner::l2_of_angular: return "l2-of-angular";
    case Combiner::l1_of_angular: return "l1-of-angular";
    case Combiner::max_of_angular: return "max-of-angular";
  }
  return "?";
}

Combiner parse_combiner(std::string_view name) {
  for (Combiner c : {Combiner::l2_of_euclidean, Combiner::l2_of_angular, Combiner::l1_of_angular,
                     Combiner::max_of_angular}) {
    if (to_string(c) == name) return c;
  }
  throw std::invalid_argument("unknown combiner '" + std::string(name) + "'");
}

std::string_view to_string(MetricKind k) noexcept {
  switch (k) {
    case MetricKind::euclidean: return "euclidean";
    case MetricKind::angular: return "angular";
    case MetricKind::product: return "product";
  }
  return "?";
}

MetricKind parse_metric_kind(std::string_view name) {
  for (MetricKind k : {MetricKind::euclidean, MetricKind::angular, MetricKind::product}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Space

double sphere_area(int n) {
  if (n < 0) throw std::invalid_argument("sphere dimension must be >= 0");
  const double h = 0.5 * (n + 1);
  return 2.0 * std::pow(kPi, h) / std::tgamma(h);
}

SpaceSpec::SpaceSpec(std::vector<int> dims, Combiner combiner)
    : dims_(std::move(dims)), combiner_(combiner) {
  if (dims_.empty()) throw std::invalid_argument("space needs at least one sphere factor");
  offsets_.push_back(0);
  for (int n : dims_) {
    if (n < 1) throw std::invalid_argument("sphere dimensions must be >= 1");
    offsets_.push_back(offsets_.back() + static_cast<std::size_t>(n) + 1);
  }
}

double SpaceSpec::measure() const {
  double m = 1.0;
  for (int n : dims_) m *= sphere_area(n);
  return m;
}

std::string SpaceSpec::name() const {
  std::string out;
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (i > 0) out += "x";
    out += "S" + std::to_string(dims_[i]);
  }
  return out;
}

void SpaceSpec::check(const ProductPoint& p) const {
  if (p.factor_count() != dims_.size()) throw DimensionMismatch("point has wrong number of factors");
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (p.factor(i).dim() != dims_[i]) throw DimensionMismatch("point factor has wrong dimension");
  }
}

// ---------------------------------------------------------------------------
// Distances

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double chord_length(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double arc_angle(std::span<const double> a, std::span<const double> b) noexcept {
  double diff = 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    const double s = a[i] + b[i];
    diff += d * d;
    sum += s * s;
  }
  return 2.0 * std::atan2(std::sqrt(diff), std::sqrt(sum));
}

namespace {
void require_same_sphere(const SpherePoint& p, const SpherePoint& q) {
  if (p.size() != q.size()) throw DimensionMismatch("points lie on spheres of different dimension");
}
}  // namespace

double euclidean_distance(const SpherePoint& p, const SpherePoint& q) {
  require_same_sphere(p, q);
  return std::min(2.0, chord_length(p.coords(), q.coords()));
}

double angular_distance(const SpherePoint& p, const SpherePoint& q) {
  require_same_sphere(p, q);
  return arc_angle(p.coords(), q.coords());
}

double chord_from_angle(double alpha) {
  if (!(alpha >= 0.0 && alpha <= kPi)) throw std::out_of_range("angle must lie in [0, pi]");
  return 2.0 * std::sin(0.5 * alpha);
}

double angle_from_chord(double d) {
  if (!(d >= 0.0 && d <= 2.0)) throw std::out_of_range("chord must lie in [0, 2]");
  return 2.0 * std::asin(0.5 * d);
}

double torus_angle_distance(double a, double b) {
  const double diff = std::abs(a - b);
  return std::min(diff, 2.0 * kPi - diff);
}

SpherePoint bisector_reflect(const SpherePoint& q, const SpherePoint& p, const SpherePoint& pbar) {
  require_same_sphere(q, p);
  require_same_sphere(p, pbar);
  std::vector<double> u(p.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = p[i] - pbar[i];
  const double len = norm(u);
  if (!(len > 0.0)) throw std::invalid_argument("bisector undefined for coincident points");
  for (double& x : u) x /= len;

  const double proj = 2.0 * dot(q.coords(), u);
  std::vector<double> out(q.coords().begin(), q.coords().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= proj * u[i];
  // Reflection preserves the norm up to rounding; renormalize the residue.
  return SpherePoint::normalized(std::move(out));
}

double product_distance(Combiner combiner, const ProductPoint& x, const ProductPoint& y) {
  if (x.factor_count() != y.factor_count()) throw DimensionMismatch("points have different factor counts");
  std::vector<double> per_factor;
  per_factor.reserve(x.factor_count());
  for (std::size_t i = 0; i < x.factor_count(); ++i) {
    per_factor.push_back(combiner == Combiner::l2_of_euclidean
                             ? euclidean_distance(x.factor(i), y.factor(i))
                             : angular_distance(x.factor(i), y.factor(i)));
  }
  return combine_angles(combiner, per_factor);
}

Metric::Metric(const SpaceSpec& space, MetricKind kind) : space_(space), kind_(kind) {
  const double r = static_cast<double>(space.factor_count());
  switch (kind) {
    case MetricKind::euclidean:
    case MetricKind::angular:
      if (!space.is_sphere()) {
        throw DimensionMismatch(std::string(to_string(kind)) + " metric needs a single sphere; use product");
      }
      diameter_ = kind == MetricKind::euclidean ? 2.0 : kPi;
      break;
    case MetricKind::product:
      switch (space.combiner()) {
        case Combiner::l2_of_euclidean: diameter_ = 2.0 * std::sqrt(r); break;
        case Combiner::l2_of_angular: diameter_ = kPi * std::sqrt(r); break;
        case Combiner::l1_of_angular: diameter_ = kPi * r; break;
        case Combiner::max_of_angular: diameter_ = kPi; break;
      }
      break;
  }
}

double Metric::operator()(std::span<const double> a, std::span<const double> b) const noexcept {
  switch (kind_) {
    case MetricKind::euclidean: return chord_length(a, b);
    case MetricKind::angular: return arc_angle(a, b);
    case MetricKind::product: break;
  }
  // Small fixed buffer; products with more factors fall back to the heap.
  constexpr std::size_t kInline = 8;
  double inline_buf[kInline];
  std::vector<double> heap;
  const std::size_t r = space_.factor_count();
  std::span<double> per_factor;
  if (r <= kInline) {
    per_factor = std::span<double>(inline_buf, r);
  } else {
    heap.resize(r);
    per_factor = heap;
  }
  const bool euclid = space_.combiner() == Combiner::l2_of_euclidean;
  for (std::size_t f = 0; f < r; ++f) {
    const auto fa = a.subspan(space_.offset(f), space_.factor_size(f));
    const auto fb = b.subspan(space_.offset(f), space_.factor_size(f));
    per_factor[f] = euclid ? chord_length(fa, fb) : arc_angle(fa, fb);
  }
  return combine_angles(space_.combiner(), per_factor);
}

// ---------------------------------------------------------------------------
// Rotations

Rotation Rotation::identity(int n) {
  const std::size_t k = static_cast<std::size_t>(n) + 1;
  std::vector<double> m(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) m[i * k + i] = 1.0;
  return Rotation(n, std::move(m));
}

Rotation Rotation::random(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("rotation dimension must be >= 1");
  const std::size_t k = static_cast<std::size_t>(n) + 1;
  CounterRng rng(seed, 0);
  std::normal_distribution<double> normal;
  std::vector<double> m(k * k);
  // Gram-Schmidt on Gaussian rows gives a Haar-distributed orthogonal matrix.
  for (std::size_t row = 0; row < k; ++row) {
    std::span<double> r(&m[row * k], k);
    for (;;) {
      for (double& x : r) x = normal(rng);
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t prev = 0; prev < row; ++prev) {
          std::span<const double> p(&m[prev * k], k);
          const double c = dot(r, p);
          for (std::size_t i = 0; i < k; ++i) r[i] -= c * p[i];
        }
      }
      const double len = norm(r);
      if (len > 1e-6) {
        for (double& x : r) x /= len;
        break;
      }
    }
  }
  // Force det = +1 by flipping the last row when needed. The determinant
  // sign of an orthogonal matrix is read off an LU factorization.
  std::vector<double> lu = m;
  double sign = 1.0;
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < k; ++r) {
      if (std::abs(lu[r * k + col]) > std::abs(lu[pivot * k + col])) pivot = r;
    }
    if (pivot != col) {
      for (std::size_t c = 0; c < k; ++c) std::swap(lu[pivot * k + c], lu[col * k + c]);
      sign = -sign;
    }
    const double d = lu[col * k + col];
    if (d < 0) sign = -sign;
    for (std::size_t r = col + 1; r < k; ++r) {
      const double f = lu[r * k + col] / d;
      for (std::size_t c = col; c < k; ++c) lu[r * k + c] -= f * lu[col * k + c];
    }
  }
  if (sign < 0) {
    for (std::size_t c = 0; c < k; ++c) m[(k - 1) * k + c] = -m[(k - 1) * k + c];
  }
  return Rotation(n, std::move(m));
}

Rotation Rotation::plane(int n, int i, int j, double angle) {
  if (i == j || i < 0 || j < 0 || i > n || j > n) throw std::invalid_argument("invalid rotation plane");
  Rotation r = identity(n);
  const std::size_t k = static_cast<std::size_t>(n) + 1;
  const auto ui = static_cast<std::size_t>(i);
  const auto uj = static_cast<std::size_t>(j);
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  r.m_[ui * k + ui] = c;
  r.m_[ui * k + uj] = -s;
  r.m_[uj * k + ui] = s;
  r.m_[uj * k + uj] = c;
  return r;
}

void Rotation::apply(std::span<const double> in, std::span<double> out) const {
  const std::size_t k = static_cast<std::size_t>(n_) + 1;
  for (std::size_t r = 0; r < k; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < k; ++c) s += m_[r * k + c] * in[c];
    out[r] = s;
  }
}

SpherePoint Rotation::apply(const SpherePoint& p) const {
  if (p.dim() != n_) throw DimensionMismatch("rotation and point dimensions differ");
  std::vector<double> out(p.size());
  apply(p.coords(), out);
  return SpherePoint::normalized(std::move(out));
}

Rotation Rotation::inverse() const {
  const std::size_t k = static_cast<std::size_t>(n_) + 1;
  std::vector<double> t(k * k);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < k; ++c) t[c * k + r] = m_[r * k + c];
  return Rotation(n_, std::move(t));
}

// ---------------------------------------------------------------------------
// Sampling

void UniformSampler::draw(CounterRng& rng, std::span<double> out) {
  for (std::size_t f = 0; f < space_.factor_count(); ++f) {
    auto v = out.subspan(space_.offset(f), space_.factor_size(f));
    double len = 0.0;
    do {
      for (double& x : v) x = normal_(rng);
      len = norm(v);
    } while (!(len > 1e-300));
    for (double& x : v) x /= len;
  }
}

ProductPoint unflatten(const SpaceSpec& space, std::span<const double> flat) {
  if (flat.size() != space.ambient_size()) throw DimensionMismatch("flat point has wrong length");
  std::vector<SpherePoint> factors;
  factors.reserve(space.factor_count());
  for (std::size_t f = 0; f < space.factor_count(); ++f) {
    auto v = flat.subspan(space.offset(f), space.factor_size(f));
    factors.push_back(SpherePoint::normalized({v.begin(), v.end()}));
  }
  return ProductPoint(std::move(factors));
}

ProductPoint PointSet::point(std::size_t i) const { return unflatten(space_, (*this)[i]); }

std::vector<ProductPoint> PointSet::to_points() const {
  std::vector<ProductPoint> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.push_back(point(i));
  return out;
}

PointSet sample_uniform_points(const SpaceSpec& space, std::size_t count, std::uint64_t seed,
                               const Exec& exec) {
  PointSet points(space);
  points.resize(count);
  const std::uint64_t stream_seed = derive_seed(seed, "uniform");
  parallel_for(chunk_count(count), exec, [&](std::size_t chunk) {
    CounterRng rng(stream_seed, chunk);
    UniformSampler sampler(space);
    const std::size_t end = std::min(count, (chunk + 1) * kChunkSize);
    for (std::size_t i = chunk * kChunkSize; i < end; ++i) sampler.draw(rng, points.mutable_point(i));
  });
  return points;
}

std::vector<ProductPoint> sample_uniform(const SpaceSpec& space, std::size_t count,
                                         std::uint64_t seed, const Exec& exec) {
  return sample_uniform_points(space, count, seed, exec).to_points();
}

}  // namespace sphdist
