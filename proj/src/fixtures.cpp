#include "sphdist/fixtures.hpp"

#include <stdexcept>
#include <vector>

namespace sphdist {

Partition make_partition(std::string name, SpaceSpec space, Region part) {
  validate(part, space);
  Region rest = Region::complement(part);
  return Partition{std::move(name), std::move(space), std::move(part), std::move(rest)};
}

Partition hemisphere_partition(int n) {
  return make_partition("hemisphere(S" + std::to_string(n) + ")", SpaceSpec::sphere(n),
                        Region::hemisphere(SpherePoint::basis(n, n)));
}

Partition band_partition(int bands) {
  if (bands < 2) throw std::invalid_argument("band partition needs at least two bands");
  const SpherePoint axis = SpherePoint::basis(2, 2);
  std::vector<Region> picked;
  for (int i = 0; i < bands; i += 2) {
    const double lo = -1.0 + 2.0 * i / bands;
    const double hi = -1.0 + 2.0 * (i + 1) / bands;
    picked.push_back(Region::band(axis, lo, hi));
  }
  return make_partition(std::to_string(bands) + "-band alternating(S2)", SpaceSpec::sphere(2),
                        Region::union_of(std::move(picked)));
}

Partition cap_partition(double theta) {
  return make_partition("cap(north, " + std::to_string(theta) + ")(S2)", SpaceSpec::sphere(2),
                        Region::cap(SpherePoint::basis(2, 2), theta));
}

Partition torus_half_partition() {
  return make_partition("torus half (t1+t2 mod 2pi < pi)", SpaceSpec({1, 1}, Combiner::l2_of_angular),
                        Region::angle_sum(0.0, kPi));
}

Partition hemisphere_times_circle_partition() {
  return make_partition("hemisphere x S1", SpaceSpec({2, 1}, Combiner::l2_of_euclidean),
                        Region::product({Region::hemisphere(SpherePoint::basis(2, 2)), Region::full()}));
}

double cap_radius_for_area(int n, double area) {
  if (!(area > 0.0 && area <= sphere_area(n))) throw std::invalid_argument("cap area out of range");
  double lo = 0.0;
  double hi = kPi;
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cap_area(n, mid) < area ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace sphdist
