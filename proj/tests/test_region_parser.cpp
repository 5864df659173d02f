#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "sphdist/distribution.hpp"
#include "sphdist/errors.hpp"
#include "sphdist/fixtures.hpp"
#include "sphdist/region_parser.hpp"

using namespace sphdist;

namespace {

const SpaceSpec kS2 = SpaceSpec::sphere(2);
const SpherePoint kNorth = SpherePoint::basis(2, 2);

using Pos = std::pair<std::size_t, std::size_t>;

// Position of the ParseError thrown by `f`, or (0, 0) if nothing was thrown.
template <class F>
std::pair<std::size_t, std::size_t> error_at(F&& f) {
  try {
    f();
  } catch (const ParseError& e) {
    return {e.line(), e.column()};
  }
  return {0, 0};
}

}  // namespace

TEST(ParseNumber, Arithmetic) {
  EXPECT_DOUBLE_EQ(parse_number("pi/8"), kPi / 8);
  EXPECT_DOUBLE_EQ(parse_number("1e-3"), 1e-3);
  EXPECT_DOUBLE_EQ(parse_number("-2 * (1 + 0.5)"), -3.0);
  EXPECT_DOUBLE_EQ(parse_number("acos(0.75)"), std::acos(0.75));
  EXPECT_DOUBLE_EQ(parse_number("sqrt(2)/2"), std::sqrt(2.0) / 2);
  EXPECT_DOUBLE_EQ(parse_number("2*pi - sin(0) + cos(0)"), 2 * kPi + 1);
  EXPECT_THROW(parse_number("pi/"), ParseError);
  EXPECT_THROW(parse_number("tau"), ParseError);
  EXPECT_THROW(parse_number("1 2"), ParseError);
}

TEST(ParsePoint, NormalizesUnlessUnit) {
  const auto p = parse_point("[0, 0, 2]");
  EXPECT_EQ(p, kNorth);
  const auto q = parse_point("[1, 1, 0]");
  EXPECT_DOUBLE_EQ(q[0], 1 / std::sqrt(2.0));
  const SpherePoint exact = SpherePoint::normalized({0.3, 0.2, 0.9});
  const auto r = parse_point("[" + format_double(exact[0]) + ", " + format_double(exact[1]) + ", " +
                             format_double(exact[2]) + "]");
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(r[i], exact[i]);
  EXPECT_THROW(parse_point("[0, 0, 0]"), ParseError);
  EXPECT_THROW(parse_point("[1, 0"), ParseError);
}

TEST(ParseRegion, ConstructorsMatchDirectBuilds) {
  EXPECT_TRUE(structurally_equal(parse_region("cap([0,0,1], pi/3)"), Region::cap(kNorth, kPi / 3)));
  EXPECT_TRUE(structurally_equal(parse_region("cap(center=[0,0,1], theta=pi/3)"), Region::cap(kNorth, kPi / 3)));
  EXPECT_TRUE(structurally_equal(parse_region("cap(theta=pi/3, center=[0,0,1])"), Region::cap(kNorth, kPi / 3)));
  EXPECT_TRUE(structurally_equal(parse_region("hemisphere([0,0,1])"), Region::hemisphere(kNorth)));
  EXPECT_TRUE(structurally_equal(parse_region("band([0,0,1], -0.5, 0)"), Region::band(kNorth, -0.5, 0.0)));
  EXPECT_TRUE(structurally_equal(parse_region("ball([0,0,1], 1)"), Region::ball(kNorth, 1.0)));
  EXPECT_TRUE(structurally_equal(parse_region("anglesum(0, pi)"), Region::angle_sum(0.0, kPi)));
  EXPECT_TRUE(structurally_equal(parse_region("full"), Region::full()));
  EXPECT_TRUE(structurally_equal(parse_region("empty()"), Region::empty()));
  EXPECT_TRUE(structurally_equal(
      parse_region("difference(full, cap([1,0,0], 0.5))"),
      Region::difference(Region::full(), Region::cap(SpherePoint::basis(2, 0), 0.5))));
  EXPECT_FALSE(structurally_equal(parse_region("cap([0,0,1], 0.5)"), parse_region("cap([0,0,1], 0.6)")));
}

TEST(ParseRegion, SemanticsOfCompoundExpression) {
  const Region r = parse_region(
      "union(cap(center=[0,0,1], theta=pi/3),  # the polar cap\n"
      "      complement(band([0,0,1], -0.5, 0)))");
  EXPECT_TRUE(contains(r, kS2, kNorth));
  EXPECT_TRUE(contains(r, kS2, SpherePoint::basis(2, 2, true)));
  EXPECT_FALSE(contains(r, kS2, SpherePoint::normalized({1, 0, -0.2})));
}

TEST(ParseRegion, Bindings) {
  RegionBindings b;
  b.emplace("polar", Region::cap(kNorth, 0.4));
  const Region r = parse_region("complement(polar)", b);
  EXPECT_TRUE(structurally_equal(r, Region::complement(Region::cap(kNorth, 0.4))));
  EXPECT_THROW(parse_region("complement(missing)", b), ParseError);
}

TEST(ParseRegion, ErrorsCarryLineAndColumn) {
  EXPECT_EQ(error_at([] { parse_region("cap([0,0,1], pi/3"); }).first, 1u);
  EXPECT_EQ(error_at([] { parse_region("blob([0,0,1])"); }), (Pos{1, 1}));
  EXPECT_EQ(error_at([] { parse_region("union(full,\n  nope(1))"); }), (Pos{2, 3}));
  // Offsets shift with the caller-supplied origin.
  EXPECT_EQ(error_at([] { parse_region("blob()", {}, 7, 10); }), (Pos{7, 10}));
  // Constructor preconditions are reported where the constructor call sits.
  const auto pos = error_at([] { parse_region("union(full, cap([0,0,1], -1))"); });
  EXPECT_EQ(pos, (Pos{1, 13}));
  EXPECT_THROW(parse_region("cap([0,0,1])"), ParseError);
  EXPECT_THROW(parse_region("complement(full, full)"), ParseError);
  EXPECT_THROW(parse_region("cap(center=[0,0,1], radius=1)"), ParseError);
  EXPECT_THROW(parse_region("full extra"), ParseError);
}

TEST(FormatRegion, RoundTripsBitExact) {
  const std::vector<Region> regions = {
      Region::cap(SpherePoint::normalized({0.3, 0.2, 0.9}), 0.123456789012345),
      band_partition(4).part,
      Region::difference(Region::hemisphere(kNorth), Region::cap(SpherePoint::basis(2, 0), kPi / 7)),
      torus_half_partition().part,
      hemisphere_times_circle_partition().part,
      Region::intersection_of({Region::ball(kNorth, 0.7), Region::complement(Region::empty())}),
  };
  for (const auto& r : regions) {
    const std::string text = format_region(r);
    const Region back = parse_region(text);
    EXPECT_TRUE(structurally_equal(r, back)) << text;
    EXPECT_EQ(format_region(back), text);
  }
}

TEST(FormatRegion, RandomCapsRoundTrip) {
  // Property: any rotated cap survives format -> parse unchanged.
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Region r = rotate(Region::cap(kNorth, 0.01 + 0.06 * static_cast<double>(s)), Rotation::random(2, s));
    EXPECT_TRUE(structurally_equal(r, parse_region(format_region(r)))) << s;
  }
}
