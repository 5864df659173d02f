#pragma once

#include <cstddef>
#include <span>

namespace sphdist {

class EmpiricalDistribution;

/// Dvoretzky-Kiefer-Wolfowitz half-width sqrt(ln(2/delta) / (2 n)): with
/// probability >= 1 - delta the empirical CDF of n i.i.d. draws stays
/// within it of the true CDF everywhere.
double dkw_tolerance(std::size_t n, double delta);

/// Two-sample Kolmogorov-Smirnov statistic sup |F1 - F2| between the
/// probability-normalized CDFs of two sorted samples.
double ks_statistic(std::span<const double> sorted1, std::span<const double> sorted2);

/// ks_statistic on two distance distributions. Throws std::invalid_argument
/// on metric mismatch.
double ks_two_sample(const EmpiricalDistribution& d1, const EmpiricalDistribution& d2);

}  // namespace sphdist
