#include "sphdist/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sphdist/distribution.hpp"

namespace sphdist {

double dkw_tolerance(std::size_t n, double delta) {
  if (n < 1) throw std::invalid_argument("dkw_tolerance needs n >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic needs non-empty samples");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double sup = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    sup = std::max(sup, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  // Past the end of one sample the gap only shrinks towards 0.
  return sup;
}

double ks_two_sample(const EmpiricalDistribution& d1, const EmpiricalDistribution& d2) {
  if (d1.metric_kind() != d2.metric_kind()) throw std::invalid_argument("distributions use different metrics");
  return ks_statistic(d1.distances(), d2.distances());
}

}  // namespace sphdist
