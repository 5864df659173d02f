#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sphdist {

enum class Claim { lemma, main_lemma, theorem1, theorem2, theorem3 };

std::string_view to_string(Claim c) noexcept;
Claim parse_claim(std::string_view name);

/// One named comparison inside a report.
struct CheckDetail {
  std::string name;
  double statistic = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Outcome of a numerical check. pass == (statistic <= tolerance).
struct VerificationReport {
  Claim claim = Claim::theorem1;
  double statistic = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  /// False when the claim's hypothesis does not hold for the fixture.
  bool premise_ok = true;
  std::string note;
  std::size_t pairs = 0;
  std::vector<std::uint64_t> seeds;
  std::string fixtures;
  std::string metric;
  std::vector<CheckDetail> details;

  void decide() { pass = statistic <= tolerance; }
};

}  // namespace sphdist
