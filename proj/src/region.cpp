#include "sphdist/region.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <utility>

#include "sphdist/errors.hpp"

namespace sphdist {

namespace detail {

/// Finite union of closed intervals of [-1, 1], sorted and pairwise
/// separated. Zero-length pieces are dropped (they carry no measure).
struct IntervalSet {
  std::vector<std::pair<double, double>> parts;

  static IntervalSet of(double lo, double hi) {
    IntervalSet s;
    lo = std::max(lo, -1.0);
    hi = std::min(hi, 1.0);
    if (hi > lo) s.parts.emplace_back(lo, hi);
    return s;
  }
  static IntervalSet all() { return of(-1.0, 1.0); }

  IntervalSet mirrored() const {
    IntervalSet s;
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) s.parts.emplace_back(-it->second, -it->first);
    return s;
  }

  IntervalSet united(const IntervalSet& o) const {
    std::vector<std::pair<double, double>> all_parts = parts;
    all_parts.insert(all_parts.end(), o.parts.begin(), o.parts.end());
    std::sort(all_parts.begin(), all_parts.end());
    IntervalSet s;
    for (const auto& p : all_parts) {
      if (!s.parts.empty() && p.first <= s.parts.back().second) {
        s.parts.back().second = std::max(s.parts.back().second, p.second);
      } else {
        s.parts.push_back(p);
      }
    }
    return s;
  }

  IntervalSet intersected(const IntervalSet& o) const {
    IntervalSet s;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < parts.size() && j < o.parts.size()) {
      const double lo = std::max(parts[i].first, o.parts[j].first);
      const double hi = std::min(parts[i].second, o.parts[j].second);
      if (hi > lo) s.parts.emplace_back(lo, hi);
      if (parts[i].second < o.parts[j].second) {
        ++i;
      } else {
        ++j;
      }
    }
    return s;
  }

  IntervalSet complemented() const {
    IntervalSet s;
    double cursor = -1.0;
    for (const auto& p : parts) {
      if (p.first > cursor) s.parts.emplace_back(cursor, p.first);
      cursor = std::max(cursor, p.second);
    }
    if (cursor < 1.0) s.parts.emplace_back(cursor, 1.0);
    return s;
  }

  bool covers(double lo, double hi) const {
    for (const auto& p : parts) {
      if (p.first <= lo && hi <= p.second) return true;
    }
    return false;
  }

  bool overlaps(double lo, double hi) const {
    for (const auto& p : parts) {
      if (std::min(hi, p.second) > std::max(lo, p.first)) return true;
    }
    return false;
  }

  bool covers(const IntervalSet& o) const {
    return std::all_of(o.parts.begin(), o.parts.end(),
                       [&](const auto& p) { return covers(p.first, p.second); });
  }

  bool overlaps(const IntervalSet& o) const { return !intersected(o).parts.empty(); }

  double area(int n) const {
    double total = 0.0;
    for (const auto& p : parts) total += zone_area(n, p.first, p.second);
    return total;
  }
};

/// A sphere-level region that depends only on z = <x, axis>.
/// An absent axis means the region is full or empty and fits any axis.
struct Axial {
  std::optional<std::vector<double>> axis;
  IntervalSet set;
};

struct RegionNode {
  Region::Kind kind = Region::Kind::full;
  std::optional<SpherePoint> point;
  double a = 0.0;  // cap theta, band z_lo, angle-sum lo
  double b = 0.0;  // band z_hi, angle-sum hi
  double cos_theta = 1.0;
  std::vector<Region> children;

  std::optional<int> dim;
  bool product_level = false;
  std::size_t depth = 1;
  std::optional<Axial> axial;

  static Region make(RegionNode node);
};

namespace {

constexpr double kParallelTolerance = 1e-12;

std::optional<Axial> align(const Axial& lhs, const Axial& rhs, IntervalSet& rhs_set) {
  rhs_set = rhs.set;
  if (!lhs.axis) return Axial{rhs.axis, lhs.set};
  if (!rhs.axis) return lhs;
  const double d = dot(*lhs.axis, *rhs.axis);
  if (d >= 1.0 - kParallelTolerance) return lhs;
  if (d <= -1.0 + kParallelTolerance) {
    rhs_set = rhs.set.mirrored();
    return lhs;
  }
  return std::nullopt;
}

std::optional<Axial> combine_axial(const RegionNode& node) {
  using K = Region::Kind;
  const auto axis_of = [&] {
    return std::vector<double>(node.point->coords().begin(), node.point->coords().end());
  };
  switch (node.kind) {
    case K::full: return Axial{std::nullopt, IntervalSet::all()};
    case K::empty: return Axial{std::nullopt, IntervalSet{}};
    case K::cap: return Axial{axis_of(), IntervalSet::of(node.cos_theta, 1.0)};
    case K::hemisphere: return Axial{axis_of(), IntervalSet::of(0.0, 1.0)};
    case K::band: return Axial{axis_of(), IntervalSet::of(node.a, node.b)};
    case K::product:
    case K::angle_sum: return std::nullopt;
    case K::complement: {
      const auto& c = node.children[0].node().axial;
      if (!c) return std::nullopt;
      return Axial{c->axis, c->set.complemented()};
    }
    case K::union_of:
    case K::intersection:
    case K::difference: break;
  }
  std::optional<Axial> acc;
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    const auto& c = node.children[i].node().axial;
    if (!c) return std::nullopt;
    if (i == 0) {
      acc = c;
      continue;
    }
    IntervalSet rhs;
    auto merged = align(*acc, *c, rhs);
    if (!merged) return std::nullopt;
    switch (node.kind) {
      case K::union_of: merged->set = merged->set.united(rhs); break;
      case K::intersection: merged->set = merged->set.intersected(rhs); break;
      default: merged->set = merged->set.intersected(rhs.complemented()); break;
    }
    acc = std::move(merged);
  }
  return acc;
}

}  // namespace

Region RegionNode::make(RegionNode node) {
  for (const auto& c : node.children) {
    const RegionNode& cn = c.node();
    node.depth = std::max(node.depth, cn.depth + 1);
    if (node.kind == Region::Kind::product) continue;
    node.product_level = node.product_level || cn.product_level;
    if (cn.dim) {
      if (node.dim && *node.dim != *cn.dim) {
        throw DimensionMismatch("boolean combination of regions on spheres of different dimension");
      }
      node.dim = cn.dim;
    }
  }
  if (node.kind == Region::Kind::product || node.kind == Region::Kind::angle_sum) {
    node.product_level = true;
    node.dim.reset();
  }
  node.axial = combine_axial(node);
  return Region(std::make_shared<const RegionNode>(std::move(node)));
}

}  // namespace detail

using detail::RegionNode;
using detail::IntervalSet;
using detail::Axial;
using detail::align;
using Kind = Region::Kind;

// ---------------------------------------------------------------------------
// Constructors and accessors

Region Region::full() { return RegionNode::make(RegionNode{.kind = Kind::full}); }
Region Region::empty() { return RegionNode::make(RegionNode{.kind = Kind::empty}); }

Region Region::cap(SpherePoint center, double theta) {
  if (!(theta > 0.0 && theta <= kPi)) throw std::invalid_argument("cap radius must lie in (0, pi]");
  RegionNode n{.kind = Kind::cap, .point = std::move(center), .a = theta, .cos_theta = std::cos(theta)};
  n.dim = n.point->dim();
  return RegionNode::make(std::move(n));
}

Region Region::ball(const SpherePoint& center, double chord_radius) {
  if (!(chord_radius > 0.0 && chord_radius <= 2.0)) {
    throw std::invalid_argument("ball radius must lie in (0, 2]");
  }
  return cap(center, angle_from_chord(chord_radius));
}

Region Region::hemisphere(SpherePoint normal) {
  RegionNode n{.kind = Kind::hemisphere, .point = std::move(normal), .a = kPi / 2, .cos_theta = 0.0};
  n.dim = n.point->dim();
  return RegionNode::make(std::move(n));
}

Region Region::band(SpherePoint axis, double z_lo, double z_hi) {
  if (!(z_lo >= -1.0 && z_lo < z_hi && z_hi <= 1.0)) {
    throw std::invalid_argument("band needs -1 <= z_lo < z_hi <= 1");
  }
  RegionNode n{.kind = Kind::band, .point = std::move(axis), .a = z_lo, .b = z_hi};
  n.dim = n.point->dim();
  return RegionNode::make(std::move(n));
}

namespace {
Region make_nary(Kind kind, std::vector<Region> parts, const char* name) {
  if (parts.empty()) throw std::invalid_argument(std::string(name) + " needs at least one operand");
  return RegionNode::make(RegionNode{.kind = kind, .children = std::move(parts)});
}
}  // namespace

Region Region::union_of(std::vector<Region> parts) {
  return make_nary(Kind::union_of, std::move(parts), "union");
}

Region Region::intersection_of(std::vector<Region> parts) {
  return make_nary(Kind::intersection, std::move(parts), "intersection");
}

Region Region::complement(Region r) {
  return RegionNode::make(RegionNode{.kind = Kind::complement, .children = {std::move(r)}});
}

Region Region::difference(Region a, Region b) {
  return RegionNode::make(RegionNode{.kind = Kind::difference, .children = {std::move(a), std::move(b)}});
}

Region Region::product(std::vector<Region> factors) {
  if (factors.empty()) throw std::invalid_argument("product needs at least one factor");
  for (const auto& f : factors) {
    if (f.product_level()) throw std::invalid_argument("product factors must be sphere-level regions");
  }
  return make_nary(Kind::product, std::move(factors), "product");
}

Region Region::angle_sum(double lo, double hi) {
  if (!(lo >= 0.0 && lo < hi && hi <= 2.0 * kPi)) {
    throw std::invalid_argument("angle_sum needs 0 <= lo < hi <= 2pi");
  }
  return RegionNode::make(RegionNode{.kind = Kind::angle_sum, .a = lo, .b = hi});
}

Kind Region::kind() const noexcept { return node_->kind; }

const SpherePoint& Region::point() const {
  if (!node_->point) throw std::logic_error("region has no defining point");
  return *node_->point;
}

double Region::theta() const {
  if (node_->kind != Kind::cap && node_->kind != Kind::hemisphere) throw std::logic_error("region is not a cap");
  return node_->a;
}

double Region::lower() const { return node_->a; }
double Region::upper() const { return node_->b; }
const std::vector<Region>& Region::children() const { return node_->children; }
std::optional<int> Region::sphere_dim() const { return node_->dim; }
bool Region::product_level() const { return node_->product_level; }
std::size_t Region::depth() const { return node_->depth; }

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::yes: return "yes";
    case Verdict::no: return "no";
    case Verdict::unknown: return "unknown";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Validation and membership

namespace {

// Dimension of the sphere the node is evaluated on; 0 = product top level.
void check_node(const RegionNode& node, const SpaceSpec& space, int sphere) {
  switch (node.kind) {
    case Kind::full:
    case Kind::empty: return;
    case Kind::cap:
    case Kind::hemisphere:
    case Kind::band:
      if (sphere == 0) throw DimensionMismatch("sphere-level region used on a product space outside product()");
      if (node.point->dim() != sphere) {
        throw DimensionMismatch("region point on S^" + std::to_string(node.point->dim()) + " used on S^" +
                                std::to_string(sphere));
      }
      return;
    case Kind::product:
      if (sphere != 0 && !space.is_sphere()) throw DimensionMismatch("nested product");
      if (node.children.size() != space.factor_count()) {
        throw DimensionMismatch("product arity " + std::to_string(node.children.size()) + " does not match " +
                                space.name());
      }
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        check_node(node.children[i].node(), space, space.dims()[i]);
      }
      return;
    case Kind::angle_sum:
      for (int n : space.dims()) {
        if (n != 1) throw DimensionMismatch("angle_sum needs every factor to be S^1");
      }
      return;
    default:
      for (const auto& c : node.children) check_node(c.node(), space, sphere);
  }
}

double circle_angle(std::span<const double> x) {
  const double t = std::atan2(x[1], x[0]);
  return t < 0.0 ? t + 2.0 * kPi : t;
}

bool member(const RegionNode& node, const SpaceSpec& space, std::span<const double> x) {
  switch (node.kind) {
    case Kind::full: return true;
    case Kind::empty: return false;
    case Kind::cap: return node.a >= kPi || dot(x, node.point->coords()) >= node.cos_theta;
    case Kind::hemisphere: return dot(x, node.point->coords()) >= 0.0;
    case Kind::band: {
      const double z = dot(x, node.point->coords());
      return node.a <= z && z <= node.b;
    }
    case Kind::union_of:
      for (const auto& c : node.children) {
        if (member(c.node(), space, x)) return true;
      }
      return false;
    case Kind::intersection:
      for (const auto& c : node.children) {
        if (!member(c.node(), space, x)) return false;
      }
      return true;
    case Kind::complement: return !member(node.children[0].node(), space, x);
    case Kind::difference:
      return member(node.children[0].node(), space, x) && !member(node.children[1].node(), space, x);
    case Kind::product:
      for (std::size_t f = 0; f < node.children.size(); ++f) {
        if (!member(node.children[f].node(), space, x.subspan(space.offset(f), space.factor_size(f)))) {
          return false;
        }
      }
      return true;
    case Kind::angle_sum: {
      double s = 0.0;
      for (std::size_t f = 0; f < space.factor_count(); ++f) {
        s += circle_angle(x.subspan(space.offset(f), 2));
      }
      s = std::fmod(s, 2.0 * kPi);
      return node.a <= s && s < node.b;
    }
  }
  return false;
}

}  // namespace

void validate(const Region& region, const SpaceSpec& space) {
  check_node(region.node(), space, space.is_sphere() ? space.dims()[0] : 0);
}

bool contains(const Region& region, const SpaceSpec& space, std::span<const double> point) {
  return member(region.node(), space, point);
}

bool contains(const Region& region, const SpaceSpec& space, const ProductPoint& point) {
  space.check(point);
  validate(region, space);
  const auto flat = point.flatten();
  return member(region.node(), space, flat);
}

// ---------------------------------------------------------------------------
// Structural reasoning

double cap_area(int n, double theta) {
  if (n < 1) throw std::invalid_argument("sphere dimension must be >= 1");
  theta = std::clamp(theta, 0.0, kPi);
  // I_m(theta) = int_0^theta sin^m t dt by the standard reduction formula.
  const int m = n - 1;
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  double prev = theta;       // I_{k-2}
  double current = 1.0 - c;  // I_{k-1}
  if (m == 0) return sphere_area(0) * prev;
  for (int k = 2; k <= m; ++k) {
    const double next = -std::pow(s, k - 1) * c / k + (k - 1.0) / k * prev;
    prev = current;
    current = next;
  }
  const double integral = current;
  return sphere_area(n - 1) * integral;
}

double zone_area(int n, double a, double b) {
  a = std::clamp(a, -1.0, 1.0);
  b = std::clamp(b, -1.0, 1.0);
  if (b <= a) return 0.0;
  return cap_area(n, std::acos(a)) - cap_area(n, std::acos(b));
}

namespace {

/// Decides containment and disjointness of one fixed cap K against region
/// nodes on S^n. Results are memoized per node, so a query costs one pass
/// over the expression DAG.
class CapQuery {
 public:
  CapQuery(std::span<const double> center, double theta, int n)
      : center_(center.begin(), center.end()), theta_(theta), space_(SpaceSpec::sphere(n)) {}

  Verdict fits(const RegionNode& node) {
    if (auto it = fits_memo_.find(&node); it != fits_memo_.end()) return it->second;
    const Verdict v = compute_fits(node);
    fits_memo_.emplace(&node, v);
    return v;
  }

  Verdict disjoint(const RegionNode& node) {
    if (auto it = disjoint_memo_.find(&node); it != disjoint_memo_.end()) return it->second;
    const Verdict v = compute_disjoint(node);
    disjoint_memo_.emplace(&node, v);
    return v;
  }

 private:
  /// Range of <x, axis> over x in K, relative to the stored axis orientation.
  std::pair<double, double> z_range(const std::vector<double>& axis) const {
    const double d = arc_angle(center_, axis);
    return {std::cos(std::min(kPi, d + theta_)), std::cos(std::max(0.0, d - theta_))};
  }

  bool center_inside(const RegionNode& node) {
    if (auto it = inside_memo_.find(&node); it != inside_memo_.end()) return it->second;
    const bool v = member(node, space_, center_);
    inside_memo_.emplace(&node, v);
    return v;
  }

  Verdict compute_fits(const RegionNode& node) {
    if (node.axial) {
      if (!node.axial->axis) return node.axial->set.parts.empty() ? Verdict::no : Verdict::yes;
      const auto [lo, hi] = z_range(*node.axial->axis);
      return node.axial->set.covers(lo, hi) ? Verdict::yes : Verdict::no;
    }
    Verdict v = Verdict::unknown;
    switch (node.kind) {
      case Kind::complement: v = disjoint(node.children[0].node()); break;
      case Kind::intersection: {
        v = Verdict::yes;
        for (const auto& c : node.children) {
          const Verdict cv = fits(c.node());
          if (cv == Verdict::no) return Verdict::no;
          if (cv == Verdict::unknown) v = Verdict::unknown;
        }
        break;
      }
      case Kind::union_of: {
        bool all_disjoint = true;
        for (const auto& c : node.children) {
          if (fits(c.node()) == Verdict::yes) return Verdict::yes;
          if (disjoint(c.node()) != Verdict::yes) all_disjoint = false;
        }
        if (all_disjoint) return Verdict::no;
        break;
      }
      case Kind::difference: {
        const Verdict fa = fits(node.children[0].node());
        if (fa == Verdict::no) return Verdict::no;
        const Verdict db = disjoint(node.children[1].node());
        if (db == Verdict::no) return Verdict::no;
        if (fa == Verdict::yes && db == Verdict::yes) return Verdict::yes;
        break;
      }
      default: break;
    }
    if (v == Verdict::unknown && !center_inside(node)) return Verdict::no;
    return v;
  }

  Verdict compute_disjoint(const RegionNode& node) {
    if (node.axial) {
      if (!node.axial->axis) return node.axial->set.parts.empty() ? Verdict::yes : Verdict::no;
      const auto [lo, hi] = z_range(*node.axial->axis);
      return node.axial->set.overlaps(lo, hi) ? Verdict::no : Verdict::yes;
    }
    Verdict v = Verdict::unknown;
    switch (node.kind) {
      case Kind::complement: v = fits(node.children[0].node()); break;
      case Kind::union_of: {
        v = Verdict::yes;
        for (const auto& c : node.children) {
          const Verdict cv = disjoint(c.node());
          if (cv == Verdict::no) return Verdict::no;
          if (cv == Verdict::unknown) v = Verdict::unknown;
        }
        break;
      }
      case Kind::intersection:
        for (const auto& c : node.children) {
          if (disjoint(c.node()) == Verdict::yes) return Verdict::yes;
        }
        break;
      case Kind::difference:
        if (disjoint(node.children[0].node()) == Verdict::yes) return Verdict::yes;
        if (fits(node.children[1].node()) == Verdict::yes) return Verdict::yes;
        break;
      default: break;
    }
    if (v == Verdict::unknown && center_inside(node)) return Verdict::no;
    return v;
  }

  std::vector<double> center_;
  double theta_;
  SpaceSpec space_;
  std::unordered_map<const RegionNode*, Verdict> fits_memo_;
  std::unordered_map<const RegionNode*, Verdict> disjoint_memo_;
  std::unordered_map<const RegionNode*, bool> inside_memo_;
};

bool is_cap_like(const RegionNode& node) {
  return node.kind == Kind::cap || node.kind == Kind::hemisphere;
}

/// Proves subset / disjointness relations between two regions from their
/// structure. Only ever answers "proven" or "not proven".
class Reasoner {
 public:
  /// sphere = dimension of the sphere the nodes live on, 0 for a product top level.
  Reasoner(const SpaceSpec& space, int sphere) : space_(space), sphere_(sphere) {}

  bool subset(const RegionNode& x, const RegionNode& y) {
    const auto key = std::make_pair(&x, &y);
    if (auto it = subset_memo_.find(key); it != subset_memo_.end()) return it->second;
    const bool v = compute_subset(x, y);
    subset_memo_.emplace(key, v);
    return v;
  }

  bool disjoint(const RegionNode& x, const RegionNode& y) {
    const auto key = std::make_pair(std::min(&x, &y), std::max(&x, &y));
    if (auto it = disjoint_memo_.find(key); it != disjoint_memo_.end()) return it->second;
    const bool v = disjoint_directed(x, y) || disjoint_directed(y, x);
    disjoint_memo_.emplace(key, v);
    return v;
  }

 private:
  CapQuery& query(const RegionNode& cap) {
    auto& q = queries_[&cap];
    if (!q) q = std::make_unique<CapQuery>(cap.point->coords(), cap.a, sphere_);
    return *q;
  }

  std::optional<std::pair<IntervalSet, IntervalSet>> aligned(const RegionNode& x, const RegionNode& y) const {
    if (!x.axial || !y.axial) return std::nullopt;
    IntervalSet rhs;
    if (!align(*x.axial, *y.axial, rhs)) return std::nullopt;
    return std::make_pair(x.axial->set, rhs);
  }

  bool compute_subset(const RegionNode& x, const RegionNode& y) {
    if (&x == &y || x.kind == Kind::empty || y.kind == Kind::full) return true;
    if (sphere_ > 0) {
      if (auto sets = aligned(x, y)) return sets->second.covers(sets->first);
      if (is_cap_like(x)) return query(x).fits(y) == Verdict::yes;
    }
    if (x.kind == Kind::product && y.kind == Kind::product) {
      for (std::size_t f = 0; f < x.children.size(); ++f) {
        Reasoner factor(space_, space_.dims()[f]);
        if (!factor.subset(x.children[f].node(), y.children[f].node())) return false;
      }
      return true;
    }
    switch (x.kind) {
      case Kind::union_of:
        if (std::all_of(x.children.begin(), x.children.end(),
                        [&](const Region& c) { return subset(c.node(), y); })) {
          return true;
        }
        break;
      case Kind::intersection:
        for (const auto& c : x.children) {
          if (subset(c.node(), y)) return true;
        }
        break;
      case Kind::difference:
        if (subset(x.children[0].node(), y)) return true;
        break;
      default: break;
    }
    switch (y.kind) {
      case Kind::complement: return disjoint(x, y.children[0].node());
      case Kind::union_of:
        for (const auto& c : y.children) {
          if (subset(x, c.node())) return true;
        }
        return false;
      case Kind::intersection:
        return std::all_of(y.children.begin(), y.children.end(),
                           [&](const Region& c) { return subset(x, c.node()); });
      case Kind::difference:
        return subset(x, y.children[0].node()) && disjoint(x, y.children[1].node());
      default: return false;
    }
  }

  bool disjoint_directed(const RegionNode& x, const RegionNode& y) {
    if (x.kind == Kind::empty) return true;
    if (sphere_ > 0) {
      if (auto sets = aligned(x, y)) return !sets->first.overlaps(sets->second);
      if (is_cap_like(x)) return query(x).disjoint(y) == Verdict::yes;
    }
    if (x.kind == Kind::product && y.kind == Kind::product) {
      for (std::size_t f = 0; f < x.children.size(); ++f) {
        Reasoner factor(space_, space_.dims()[f]);
        if (factor.disjoint(x.children[f].node(), y.children[f].node())) return true;
      }
      return false;
    }
    switch (x.kind) {
      case Kind::union_of:
        return std::all_of(x.children.begin(), x.children.end(),
                           [&](const Region& c) { return disjoint(c.node(), y); });
      case Kind::intersection:
        return std::any_of(x.children.begin(), x.children.end(),
                           [&](const Region& c) { return disjoint(c.node(), y); });
      case Kind::difference:
        return disjoint(x.children[0].node(), y) || subset(y, x.children[1].node());
      case Kind::complement: return subset(y, x.children[0].node());
      default: return false;
    }
  }

  const SpaceSpec& space_;
  int sphere_;
  std::map<std::pair<const RegionNode*, const RegionNode*>, bool> subset_memo_;
  std::map<std::pair<const RegionNode*, const RegionNode*>, bool> disjoint_memo_;
  std::unordered_map<const RegionNode*, std::unique_ptr<CapQuery>> queries_;
};

class ExactEvaluator {
 public:
  explicit ExactEvaluator(const SpaceSpec& space)
      : space_(space), top_sphere_(space.is_sphere() ? space.dims()[0] : 0) {}

  std::optional<double> top(const RegionNode& node) { return eval(node, top_sphere_); }

 private:
  double total(int sphere) const { return sphere == 0 ? space_.measure() : sphere_area(sphere); }

  Reasoner& reasoner(int sphere) {
    auto& r = reasoners_[sphere];
    if (!r) r = std::make_unique<Reasoner>(space_, sphere);
    return *r;
  }

  std::optional<double> eval(const RegionNode& node, int sphere) {
    const auto key = std::make_pair(&node, sphere);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const auto v = compute(node, sphere);
    memo_.emplace(key, v);
    return v;
  }

  std::optional<double> compute(const RegionNode& node, int sphere) {
    if (node.kind == Kind::full) return total(sphere);
    if (node.kind == Kind::empty) return 0.0;
    if (sphere > 0 && node.axial) return node.axial->set.area(sphere);

    Reasoner& why = reasoner(sphere);
    switch (node.kind) {
      case Kind::product: {
        double m = 1.0;
        for (std::size_t f = 0; f < node.children.size(); ++f) {
          const auto v = eval(node.children[f].node(), space_.dims()[f]);
          if (!v) return std::nullopt;
          m *= *v;
        }
        return m;
      }
      case Kind::angle_sum:
        return (node.b - node.a) / (2.0 * kPi) * space_.measure();
      case Kind::complement: {
        const auto v = eval(node.children[0].node(), sphere);
        if (!v) return std::nullopt;
        return total(sphere) - *v;
      }
      case Kind::union_of: {
        const auto& cs = node.children;
        double sum = 0.0;
        bool all_exact = true;
        for (const auto& c : cs) {
          const auto v = eval(c.node(), sphere);
          if (!v) {
            all_exact = false;
            break;
          }
          sum += *v;
        }
        bool pairwise = all_exact;
        for (std::size_t i = 0; pairwise && i < cs.size(); ++i) {
          for (std::size_t j = i + 1; pairwise && j < cs.size(); ++j) {
            pairwise = why.disjoint(cs[i].node(), cs[j].node());
          }
        }
        if (pairwise) return sum;
        // A member containing every other member determines the union.
        for (const auto& c : cs) {
          const bool dominates = std::all_of(cs.begin(), cs.end(), [&](const Region& o) {
            return why.subset(o.node(), c.node());
          });
          if (dominates) return eval(c.node(), sphere);
        }
        return std::nullopt;
      }
      case Kind::intersection: {
        const auto& cs = node.children;
        for (const auto& c : cs) {
          const bool dominated = std::all_of(cs.begin(), cs.end(), [&](const Region& o) {
            return why.subset(c.node(), o.node());
          });
          if (dominated) return eval(c.node(), sphere);
        }
        for (std::size_t i = 0; i < cs.size(); ++i) {
          for (std::size_t j = i + 1; j < cs.size(); ++j) {
            if (why.disjoint(cs[i].node(), cs[j].node())) return 0.0;
          }
        }
        return std::nullopt;
      }
      case Kind::difference: {
        const RegionNode& a = node.children[0].node();
        const RegionNode& b = node.children[1].node();
        if (why.subset(a, b)) return 0.0;
        const auto ma = eval(a, sphere);
        if (!ma) return std::nullopt;
        if (why.disjoint(a, b)) return ma;
        if (why.subset(b, a)) {
          const auto mb = eval(b, sphere);
          if (mb) return *ma - *mb;
        }
        return std::nullopt;
      }
      default: return std::nullopt;
    }
  }

  const SpaceSpec& space_;
  int top_sphere_;
  std::map<std::pair<const RegionNode*, int>, std::optional<double>> memo_;
  std::map<int, std::unique_ptr<Reasoner>> reasoners_;
};

void require_sphere_level(const Region& region, const SpherePoint& center, double theta) {
  if (region.product_level()) throw DimensionMismatch("ball queries need a sphere-level region");
  if (region.sphere_dim() && *region.sphere_dim() != center.dim()) {
    throw DimensionMismatch("ball center and region live on different spheres");
  }
  if (!(theta > 0.0 && theta <= kPi)) throw std::invalid_argument("ball radius must lie in (0, pi]");
}

}  // namespace

std::optional<MeasureEstimate> exact_measure(const Region& region, const SpaceSpec& space) {
  validate(region, space);
  ExactEvaluator evaluator(space);
  const auto v = evaluator.top(region.node());
  if (!v) return std::nullopt;
  return MeasureEstimate{std::clamp(*v, 0.0, space.measure()), 0.0, true};
}

Verdict ball_fits(const Region& region, const SpherePoint& center, double theta) {
  require_sphere_level(region, center, theta);
  CapQuery q(center.coords(), theta, center.dim());
  return q.fits(region.node());
}

Verdict ball_disjoint(const Region& region, const SpherePoint& center, double theta) {
  require_sphere_level(region, center, theta);
  CapQuery q(center.coords(), theta, center.dim());
  return q.disjoint(region.node());
}

std::vector<SpherePoint> cap_probes(const SpherePoint& center, double theta, std::size_t count,
                                    std::uint64_t seed) {
  CounterRng rng(derive_seed(seed, "cap-probes"), 0);
  std::normal_distribution<double> normal;
  const auto c = center.coords();
  std::vector<SpherePoint> out;
  out.reserve(count);
  std::vector<double> v(c.size());
  for (std::size_t i = 0; i < count; ++i) {
    double len = 0.0;
    do {
      for (double& x : v) x = normal(rng);
      const double along = dot(v, c);
      for (std::size_t k = 0; k < v.size(); ++k) v[k] -= along * c[k];
      len = std::sqrt(dot(v, v));
    } while (!(len > 1e-9));
    // Even probes sit on the rim, where containment failures show up first.
    const double t = (i % 2 == 0) ? theta : theta * std::sqrt(rng.uniform());
    std::vector<double> p(c.size());
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = std::cos(t) * c[k] + std::sin(t) * v[k] / len;
    out.push_back(SpherePoint::normalized(std::move(p)));
  }
  return out;
}

FitCheck check_ball_fits(const Region& region, const SpherePoint& center, double theta,
                         std::size_t probes, std::uint64_t seed) {
  FitCheck check{ball_fits(region, center, theta), std::nullopt};
  if (check.verdict != Verdict::unknown) return check;
  const SpaceSpec space = SpaceSpec::sphere(center.dim());
  bool ok = member(region.node(), space, center.coords());
  if (ok) {
    for (const auto& p : cap_probes(center, theta, probes, seed)) {
      if (!member(region.node(), space, p.coords())) {
        ok = false;
        break;
      }
    }
  }
  check.sampled = ok;
  return check;
}

// ---------------------------------------------------------------------------
// Monte Carlo

MeasureEstimate mc_measure(const Region& region, const SpaceSpec& space, std::size_t samples,
                           std::uint64_t seed, double delta, const Exec& exec) {
  if (samples < 1) throw std::invalid_argument("mc_measure needs at least one sample");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  validate(region, space);
  const std::uint64_t stream_seed = derive_seed(seed, "mc-measure");
  const std::size_t chunks = chunk_count(samples);
  std::vector<std::size_t> hits(chunks, 0);
  parallel_for(chunks, exec, [&](std::size_t chunk) {
    CounterRng rng(stream_seed, chunk);
    UniformSampler sampler(space);
    std::vector<double> x(space.ambient_size());
    const std::size_t end = std::min(samples, (chunk + 1) * kChunkSize);
    std::size_t h = 0;
    for (std::size_t i = chunk * kChunkSize; i < end; ++i) {
      sampler.draw(rng, x);
      if (member(region.node(), space, x)) ++h;
    }
    hits[chunk] = h;
  });
  std::size_t total_hits = 0;
  for (std::size_t h : hits) total_hits += h;
  const double mu = space.measure();
  const double half_width = std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(samples))) * mu;
  return MeasureEstimate{static_cast<double>(total_hits) / static_cast<double>(samples) * mu, half_width, false};
}

MeasureEstimate measure(const Region& region, const SpaceSpec& space, std::size_t samples,
                        std::uint64_t seed, double delta, const Exec& exec) {
  if (auto exact = exact_measure(region, space)) return *exact;
  return mc_measure(region, space, samples, seed, delta, exec);
}

RegionSampler::RegionSampler(Region region, SpaceSpec space, std::size_t max_rejection_factor)
    : region_(std::move(region)),
      space_(std::move(space)),
      uniform_(space_),
      max_rejection_factor_(max_rejection_factor) {
  validate(region_, space_);
}

void RegionSampler::fill(CounterRng& rng, std::size_t count, std::span<double> out) {
  const std::size_t stride = space_.ambient_size();
  const std::size_t budget = max_rejection_factor_ * count;
  std::size_t attempts = 0;
  for (std::size_t accepted = 0; accepted < count;) {
    if (attempts == budget) {
      throw SamplingBudgetExhausted(
          "rejection budget exhausted after " + std::to_string(attempts) + " draws (" +
              std::to_string(accepted) + " accepted); region has (near) zero measure",
          attempts == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(attempts));
    }
    auto x = out.subspan(accepted * stride, stride);
    uniform_.draw(rng, x);
    ++attempts;
    if (member(region_.node(), space_, x)) ++accepted;
  }
}

PointSet sample_region(const Region& region, const SpaceSpec& space, std::size_t count,
                       std::uint64_t seed, std::size_t max_rejection_factor, const Exec& exec) {
  PointSet points(space);
  points.resize(count);
  const std::uint64_t stream_seed = derive_seed(seed, "region");
  const std::size_t stride = space.ambient_size();
  RegionSampler prototype(region, space, max_rejection_factor);
  parallel_for(chunk_count(count), exec, [&](std::size_t chunk) {
    CounterRng rng(stream_seed, chunk);
    RegionSampler sampler = prototype;
    const std::size_t begin = chunk * kChunkSize;
    const std::size_t n = std::min(count, begin + kChunkSize) - begin;
    sampler.fill(rng, n, std::span<double>(points.mutable_point(begin).data(), n * stride));
  });
  return points;
}

// ---------------------------------------------------------------------------
// Rotation

Region rotate(const Region& region, const Rotation& rotation) {
  const auto rebuild = [&](const std::vector<Region>& cs) {
    std::vector<Region> out;
    out.reserve(cs.size());
    for (const auto& c : cs) out.push_back(rotate(c, rotation));
    return out;
  };
  switch (region.kind()) {
    case Kind::full:
    case Kind::empty: return region;
    case Kind::cap: return Region::cap(rotation.apply(region.point()), region.theta());
    case Kind::hemisphere: return Region::hemisphere(rotation.apply(region.point()));
    case Kind::band: return Region::band(rotation.apply(region.point()), region.lower(), region.upper());
    case Kind::union_of: return Region::union_of(rebuild(region.children()));
    case Kind::intersection: return Region::intersection_of(rebuild(region.children()));
    case Kind::complement: return Region::complement(rotate(region.children()[0], rotation));
    case Kind::difference:
      return Region::difference(rotate(region.children()[0], rotation), rotate(region.children()[1], rotation));
    case Kind::product:
    case Kind::angle_sum: break;
  }
  throw std::invalid_argument("only sphere-level regions can be rotated");
}

}  // namespace sphdist
