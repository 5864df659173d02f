#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sphdist/geometry.hpp"
#include "sphdist/parallel.hpp"
#include "sphdist/region.hpp"

namespace sphdist {

/// Empirical version of the cumulative distance measure
///   St(l) = mass_scale * P(d <= l)
/// built from i.i.d. pair distances. For a self distribution mass_scale is
/// mu(A)^2; for a cross distribution it is 2 mu(A) mu(B).
class EmpiricalDistribution {
 public:
  /// Sorts the distances and clamps them to [0, diameter].
  EmpiricalDistribution(std::vector<double> distances, double mass_scale, MetricKind metric,
                        double diameter, std::uint64_t seed, double mass_half_width = 0.0);

  const std::vector<double>& distances() const noexcept { return distances_; }
  double mass_scale() const noexcept { return mass_scale_; }
  /// Uncertainty of mass_scale when it comes from Monte Carlo measures.
  double mass_half_width() const noexcept { return mass_half_width_; }
  std::size_t pair_count() const noexcept { return distances_.size(); }
  MetricKind metric_kind() const noexcept { return metric_; }
  double diameter() const noexcept { return diameter_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// mass_scale * #{d <= ell} / pair_count.
  double cdf(double ell) const;
  /// cdf / mass_scale.
  double probability_cdf(double ell) const;

  /// Sup-norm error bound for cdf() at confidence 1 - delta: the DKW
  /// half-width scaled by the mass, plus the mass uncertainty.
  double tolerance(double delta) const;

 private:
  std::vector<double> distances_;
  double mass_scale_;
  double mass_half_width_;
  MetricKind metric_;
  double diameter_;
  std::uint64_t seed_;
};

struct EstimateOptions {
  /// Samples for Monte Carlo region measures when no exact measure exists.
  std::size_t mass_samples = 1'000'000;
  double mass_delta = 1e-3;
  std::size_t max_rejection_factor = kDefaultRejectionFactor;
};

/// Distances of `pairs` independent pairs of uniform points of `region`.
EmpiricalDistribution estimate_self(const Region& region, const SpaceSpec& space, MetricKind metric,
                                    std::size_t pairs, std::uint64_t seed, const Exec& exec = {},
                                    const EstimateOptions& options = {});

/// Distances between independent uniform points of a and of b, counting
/// both orderings (mass_scale = 2 mu(a) mu(b)).
EmpiricalDistribution estimate_cross(const Region& a, const Region& b, const SpaceSpec& space,
                                     MetricKind metric, std::size_t pairs, std::uint64_t seed,
                                     const Exec& exec = {}, const EstimateOptions& options = {});

/// (ell, cdf(d1, ell) - cdf(d2, ell)) for every grid point.
std::vector<std::pair<double, double>> signed_difference(const EmpiricalDistribution& d1,
                                                         const EmpiricalDistribution& d2,
                                                         std::span<const double> grid);

/// Exact St of the whole sphere S^n:
///   mu(S^n)^2 * int_0^a sin^{n-1} / int_0^pi sin^{n-1},
/// with a = ell (angular) or 2 asin(ell/2) (euclidean).
double analytic_fullsphere_cdf(int n, MetricKind metric, double ell);

/// `points` equally spaced values from 0 to diameter inclusive.
std::vector<double> uniform_grid(double diameter, std::size_t points);

/// Binned Stieltjes masses; density in bin i is mass / width.
struct DensityHistogram {
  std::vector<double> bin_edges;
  std::vector<double> bin_masses;

  double density(std::size_t bin) const {
    return bin_masses.at(bin) / (bin_edges.at(bin + 1) - bin_edges.at(bin));
  }
};

/// Equal-width bins over [0, diameter]; bin i holds the cdf increment over
/// (edge_i, edge_{i+1}] (the first bin also holds zero distances).
DensityHistogram histogram(const EmpiricalDistribution& dist, std::size_t bins);

/// Metadata line shared by the CSV exports.
struct CsvHeader {
  std::string kind;  // "cdf" or "histogram"
  std::string metric;
  std::uint64_t seed = 0;
  std::size_t pairs = 0;
  double mass_scale = 0.0;
  double mass_half_width = 0.0;
  std::string version;
};

struct CdfTable {
  CsvHeader header;
  std::vector<std::pair<double, double>> rows;  // (ell, cdf)
};

struct HistogramTable {
  CsvHeader header;
  DensityHistogram histogram;
};

void write_cdf_csv(std::ostream& out, const EmpiricalDistribution& dist, std::span<const double> grid);
void write_histogram_csv(std::ostream& out, const EmpiricalDistribution& dist,
                         const DensityHistogram& hist);

/// Parsers for the two CSV layouts. Throw ParseError citing the line.
CdfTable read_cdf_csv(std::istream& in);
HistogramTable read_histogram_csv(std::istream& in);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

}  // namespace sphdist
