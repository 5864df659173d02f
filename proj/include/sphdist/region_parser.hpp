#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <string_view>

#include "sphdist/region.hpp"

namespace sphdist {

/// Named regions an expression may refer to.
using RegionBindings = std::map<std::string, Region, std::less<>>;

/// Parses one region expression, e.g.
///
///   union(cap(center=[0,0,1], theta=pi/3), complement(band([0,0,1], -0.5, 0)))
///
/// Identifiers not followed by '(' resolve through `bindings`. Numbers may
/// be arithmetic over pi, sqrt, sin, cos, asin, acos. Points are normalized
/// unless already unit within the SpherePoint tolerance. `line` and
/// `column` locate text[0] for error messages. Throws ParseError.
Region parse_region(std::string_view text, const RegionBindings& bindings = {}, std::size_t line = 1,
                    std::size_t column = 1);

/// A numeric expression ("pi/8", "1e-3") or a point ("[0, 0, 1]") in the
/// same syntax. Throw ParseError.
double parse_number(std::string_view text, std::size_t line = 1, std::size_t column = 1);
SpherePoint parse_point(std::string_view text, std::size_t line = 1, std::size_t column = 1);

/// Canonical text for a region; parse_region(format_region(r)) rebuilds the
/// same tree with bit-identical parameters.
std::string format_region(const Region& region);

/// Same constructors with the same parameters at every node.
bool structurally_equal(const Region& a, const Region& b);

}  // namespace sphdist
