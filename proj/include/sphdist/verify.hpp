#pragma once

#include <cstddef>
#include <cstdint>

#include "sphdist/distribution.hpp"
#include "sphdist/fixtures.hpp"
#include "sphdist/region.hpp"
#include "sphdist/report.hpp"

namespace sphdist {

struct VerifyOptions {
  std::size_t pairs = 1'000'000;
  std::uint64_t seed = 0;
  double delta = 1e-3;
  std::size_t grid_points = 256;
  EstimateOptions estimate;
};

/// Equal-area halves share their distance law: KS between the normalized
/// distributions of the part and of its complement, against 2 * DKW.
/// Unequal areas are reported with premise_ok = false rather than thrown.
VerificationReport verify_theorem1(const Partition& partition, MetricKind metric,
                                   const VerifyOptions& options, const Exec& exec = {});

/// sup over the grid of |(St_A - St_Ā) - (St_B - St_B̄)|, mass-scaled,
/// against the four summed tolerances. Both partitions must live in one
/// space. The detail "endpoint_gap" compares the estimated gap at the
/// diameter with the exact |mu(A)^2 - mu(Ā)^2 - mu(B)^2 + mu(B̄)^2|.
VerificationReport verify_main_lemma(const Partition& a, const Partition& b, MetricKind metric,
                                     const VerifyOptions& options, const Exec& exec = {});

/// If St_S = St_S' then the complements and the cross measures agree.
/// A sanity gate first compares St_S with St_S'; when it fails the report
/// has premise_ok = false, pass = false and note "premise violated".
VerificationReport verify_theorem2(const Region& s, const Region& s_prime, const SpaceSpec& space,
                                   MetricKind metric, const VerifyOptions& options, const Exec& exec = {});

/// The equal-area check on a product space under its combiner metric.
VerificationReport verify_theorem3(const Partition& partition, const VerifyOptions& options,
                                   const Exec& exec = {});

/// sup over the grid of |St_A + St_Ā + St_{A,Ā} - St_space| against the
/// summed tolerances. St_space is analytic on single spheres, sampled otherwise.
VerificationReport verify_decomposition_identity(const Partition& partition, MetricKind metric,
                                                 const VerifyOptions& options, const Exec& exec = {});

}  // namespace sphdist
