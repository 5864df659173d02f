#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sphdist/geometry.hpp"
#include "sphdist/region_parser.hpp"
#include "sphdist/report.hpp"
#include "sphdist/swap.hpp"

namespace sphdist {

/// Everything one CLI run needs. Built from a config document, then
/// overridden by flags.
struct RunConfig {
  std::string command;  // measure | dist | compare | verify | decompose
  std::vector<int> dims = {2};
  Combiner combiner = Combiner::l2_of_euclidean;
  std::optional<MetricKind> metric;  // default: euclidean on a sphere, product otherwise
  RegionBindings regions;
  std::string a = "A";
  std::string b = "B";
  bool cross = false;  // dist: cross distribution of a and b
  std::size_t pairs = 1'000'000;
  std::size_t samples = 1'000'000;
  std::size_t grid = 256;
  std::size_t bins = 0;  // dist: histogram with this many bins instead of a cdf table
  std::uint64_t seed = 0;
  double delta = 1e-3;
  std::string out;     // empty: standard output
  std::string format;  // csv | json; empty: per-command default
  unsigned threads = 0;
  std::optional<Claim> claim;
  // Lemma check: the swap Cap(swap_p, swap_theta) <-> Cap(swap_pbar, swap_theta).
  std::optional<SpherePoint> swap_p;
  std::optional<SpherePoint> swap_pbar;
  double swap_theta = 0.0;
  DecompositionParams decompose;

  SpaceSpec space() const { return SpaceSpec(dims, combiner); }
  MetricKind resolved_metric() const;
};

/// Applies one `key = value` setting. Throws ParseError at (line, column).
void apply_setting(RunConfig& config, std::string_view key, std::string_view value, std::size_t line = 1,
                   std::size_t column = 1);

/// Parses a config document: `key = value` lines, `#` comments, and
/// `region NAME = EXPR` bindings that may span lines while brackets are open.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// "S2", "S1xS1", "S2xS1" -> sphere dimensions.
std::vector<int> parse_space(std::string_view name);

/// Exit codes of run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRuntime = 3;

/// Executes the configured command. Artifacts go to config.out (or `out`
/// when empty); diagnostics go to `err`. Returns an exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace sphdist
