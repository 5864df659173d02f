#pragma once

#include <string>

#include "sphdist/geometry.hpp"
#include "sphdist/region.hpp"

namespace sphdist {

/// A region of a space together with its complement.
struct Partition {
  std::string name;
  SpaceSpec space;
  Region part;
  Region rest;
};

Partition make_partition(std::string name, SpaceSpec space, Region part);

/// Hemisphere {x_n >= 0} of S^n and its complement.
Partition hemisphere_partition(int n);

/// S^2 cut into `bands` equal-area latitude bands (cuts equally spaced in z
/// on [-1, 1]); the part holds the 1st, 3rd, ... band counted from z = -1.
Partition band_partition(int bands);

/// Cap(north, theta) on S^2 and its complement; unequal areas unless theta = pi/2.
Partition cap_partition(double theta);

/// Flat torus S^1 x S^1 (l2-of-angular) split by (t1 + t2) mod 2pi < pi.
Partition torus_half_partition();

/// Hemisphere x S^1 inside S^2 x S^1 (l2-of-euclidean).
Partition hemisphere_times_circle_partition();

/// Angular radius of the cap of S^n with the given area (bisection on cap_area).
double cap_radius_for_area(int n, double area);

}  // namespace sphdist
