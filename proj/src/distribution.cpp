#include "sphdist/distribution.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sphdist/errors.hpp"
#include "sphdist/stats.hpp"

namespace sphdist {

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> distances, double mass_scale,
                                             MetricKind metric, double diameter, std::uint64_t seed,
                                             double mass_half_width)
    : distances_(std::move(distances)),
      mass_scale_(mass_scale),
      mass_half_width_(mass_half_width),
      metric_(metric),
      diameter_(diameter),
      seed_(seed) {
  if (distances_.empty()) throw std::invalid_argument("distribution needs at least one distance");
  if (!(mass_scale_ > 0.0)) throw std::invalid_argument("mass_scale must be positive");
  for (double& d : distances_) d = std::clamp(d, 0.0, diameter_);
  std::sort(distances_.begin(), distances_.end());
}

double EmpiricalDistribution::cdf(double ell) const { return mass_scale_ * probability_cdf(ell); }

double EmpiricalDistribution::probability_cdf(double ell) const {
  if (ell >= diameter_) return 1.0;
  const auto it = std::upper_bound(distances_.begin(), distances_.end(), ell);
  return static_cast<double>(it - distances_.begin()) / static_cast<double>(distances_.size());
}

double EmpiricalDistribution::tolerance(double delta) const {
  return mass_scale_ * dkw_tolerance(distances_.size(), delta) + mass_half_width_;
}

namespace {

struct Mass {
  double value;
  double half_width;
};

Mass region_mass(const Region& region, const SpaceSpec& space, std::uint64_t seed, const Exec& exec,
                 const EstimateOptions& options) {
  const auto m = measure(region, space, options.mass_samples, derive_seed(seed, "mass"), options.mass_delta, exec);
  return {m.value, m.half_width};
}

template <class PairFn>
std::vector<double> chunked_distances(std::size_t pairs, const Exec& exec, PairFn&& fill_chunk) {
  std::vector<double> out(pairs);
  parallel_for(chunk_count(pairs), exec, [&](std::size_t chunk) {
    const std::size_t begin = chunk * kChunkSize;
    const std::size_t n = std::min(pairs, begin + kChunkSize) - begin;
    fill_chunk(chunk, std::span<double>(out.data() + begin, n));
  });
  return out;
}

}  // namespace

EmpiricalDistribution estimate_self(const Region& region, const SpaceSpec& space, MetricKind metric,
                                    std::size_t pairs, std::uint64_t seed, const Exec& exec,
                                    const EstimateOptions& options) {
  if (pairs < 1) throw std::invalid_argument("estimate_self needs at least one pair");
  const Metric dist(space, metric);
  const RegionSampler prototype(region, space, options.max_rejection_factor);
  const std::uint64_t stream_seed = derive_seed(seed, "self-pairs");
  const std::size_t stride = space.ambient_size();

  auto distances = chunked_distances(pairs, exec, [&](std::size_t chunk, std::span<double> out) {
    CounterRng rng(stream_seed, chunk);
    RegionSampler sampler = prototype;
    std::vector<double> points(2 * out.size() * stride);
    sampler.fill(rng, 2 * out.size(), points);
    const std::span<const double> p(points);
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = dist(p.subspan(2 * i * stride, stride), p.subspan((2 * i + 1) * stride, stride));
    }
  });

  const Mass m = region_mass(region, space, seed, exec, options);
  const double half = 2.0 * m.value * m.half_width + m.half_width * m.half_width;
  return EmpiricalDistribution(std::move(distances), m.value * m.value, metric, dist.diameter(), seed, half);
}

EmpiricalDistribution estimate_cross(const Region& a, const Region& b, const SpaceSpec& space,
                                     MetricKind metric, std::size_t pairs, std::uint64_t seed,
                                     const Exec& exec, const EstimateOptions& options) {
  if (pairs < 1) throw std::invalid_argument("estimate_cross needs at least one pair");
  const Metric dist(space, metric);
  const RegionSampler proto_a(a, space, options.max_rejection_factor);
  const RegionSampler proto_b(b, space, options.max_rejection_factor);
  const std::uint64_t seed_a = derive_seed(seed, "cross-a");
  const std::uint64_t seed_b = derive_seed(seed, "cross-b");
  const std::size_t stride = space.ambient_size();

  auto distances = chunked_distances(pairs, exec, [&](std::size_t chunk, std::span<double> out) {
    CounterRng rng_a(seed_a, chunk);
    CounterRng rng_b(seed_b, chunk);
    RegionSampler sa = proto_a;
    RegionSampler sb = proto_b;
    std::vector<double> pa(out.size() * stride);
    std::vector<double> pb(out.size() * stride);
    sa.fill(rng_a, out.size(), pa);
    sb.fill(rng_b, out.size(), pb);
    const std::span<const double> va(pa);
    const std::span<const double> vb(pb);
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = dist(va.subspan(i * stride, stride), vb.subspan(i * stride, stride));
    }
  });

  const Mass ma = region_mass(a, space, derive_seed(seed, "a"), exec, options);
  const Mass mb = region_mass(b, space, derive_seed(seed, "b"), exec, options);
  const double mass = 2.0 * ma.value * mb.value;
  const double half = 2.0 * ((ma.value + ma.half_width) * (mb.value + mb.half_width) - ma.value * mb.value);
  return EmpiricalDistribution(std::move(distances), mass, metric, dist.diameter(), seed, half);
}

std::vector<std::pair<double, double>> signed_difference(const EmpiricalDistribution& d1,
                                                         const EmpiricalDistribution& d2,
                                                         std::span<const double> grid) {
  if (d1.metric_kind() != d2.metric_kind()) throw std::invalid_argument("distributions use different metrics");
  std::vector<std::pair<double, double>> out;
  out.reserve(grid.size());
  for (double ell : grid) out.emplace_back(ell, d1.cdf(ell) - d2.cdf(ell));
  return out;
}

double analytic_fullsphere_cdf(int n, MetricKind metric, double ell) {
  if (n < 1) throw std::invalid_argument("sphere dimension must be >= 1");
  double alpha = 0.0;
  switch (metric) {
    case MetricKind::euclidean:
      if (!(ell >= 0.0 && ell <= 2.0)) throw std::out_of_range("euclidean distance must lie in [0, 2]");
      alpha = angle_from_chord(ell);
      break;
    case MetricKind::angular:
      if (!(ell >= 0.0 && ell <= kPi)) throw std::out_of_range("angular distance must lie in [0, pi]");
      alpha = ell;
      break;
    case MetricKind::product:
      throw std::invalid_argument("no closed form for product metrics");
  }
  // The distance from a fixed point is at most alpha on a cap of radius alpha.
  const double area = sphere_area(n);
  return area * area * (cap_area(n, alpha) / area);
}

std::vector<double> uniform_grid(double diameter, std::size_t points) {
  if (points < 2) throw std::invalid_argument("grid needs at least two points");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = diameter * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  grid.back() = diameter;
  return grid;
}

DensityHistogram histogram(const EmpiricalDistribution& dist, std::size_t bins) {
  if (bins < 1) throw std::invalid_argument("histogram needs at least one bin");
  DensityHistogram h;
  h.bin_edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) {
    h.bin_edges[i] = dist.diameter() * static_cast<double>(i) / static_cast<double>(bins);
  }
  h.bin_edges.back() = dist.diameter();
  const auto& d = dist.distances();
  const double weight = dist.mass_scale() / static_cast<double>(d.size());
  std::size_t below = 0;
  for (std::size_t i = 0; i < bins; ++i) {
    const std::size_t upto =
        i + 1 == bins ? d.size()
                      : static_cast<std::size_t>(std::upper_bound(d.begin(), d.end(), h.bin_edges[i + 1]) - d.begin());
    h.bin_masses.push_back(static_cast<double>(upto - below) * weight);
    below = upto;
  }
  return h;
}

// ---------------------------------------------------------------------------
// CSV

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

void write_header(std::ostream& out, const char* kind, const EmpiricalDistribution& dist) {
  out << "# sphdist " << SPHDIST_VERSION << " kind=" << kind << " metric=" << to_string(dist.metric_kind())
      << " seed=" << dist.seed() << " pairs=" << dist.pair_count()
      << " mass_scale=" << format_double(dist.mass_scale())
      << " mass_half_width=" << format_double(dist.mass_half_width()) << "\n";
}

double parse_number(const std::string& text, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ParseError("invalid number '" + text + "'", line, 1);
  }
  return v;
}

CsvHeader read_header(std::istream& in, const std::string& expected_kind, const std::string& columns) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# sphdist ", 0) != 0) {
    throw ParseError("missing '# sphdist' metadata line", 1, 1);
  }
  std::istringstream fields(line.substr(10));
  CsvHeader h;
  fields >> h.version;
  std::map<std::string, std::string> kv;
  for (std::string tok; fields >> tok;) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ParseError("malformed metadata field '" + tok + "'", 1, 1);
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  for (const char* key : {"kind", "metric", "seed", "pairs", "mass_scale", "mass_half_width"}) {
    if (!kv.count(key)) throw ParseError(std::string("metadata lacks '") + key + "'", 1, 1);
  }
  h.kind = kv["kind"];
  if (h.kind != expected_kind) throw ParseError("expected kind=" + expected_kind, 1, 1);
  h.metric = kv["metric"];
  h.seed = std::stoull(kv["seed"]);
  h.pairs = std::stoull(kv["pairs"]);
  h.mass_scale = parse_number(kv["mass_scale"], 1);
  h.mass_half_width = parse_number(kv["mass_half_width"], 1);
  if (!std::getline(in, line) || line != columns) throw ParseError("expected column header '" + columns + "'", 2, 1);
  return h;
}

std::vector<std::vector<double>> read_rows(std::istream& in, std::size_t width) {
  std::vector<std::vector<double>> rows;
  std::string line;
  for (std::size_t lineno = 3; std::getline(in, line); ++lineno) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    for (std::string cell; std::getline(cells, cell, ',');) row.push_back(parse_number(cell, lineno));
    if (row.size() != width) throw ParseError("expected " + std::to_string(width) + " columns", lineno, 1);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void write_cdf_csv(std::ostream& out, const EmpiricalDistribution& dist, std::span<const double> grid) {
  write_header(out, "cdf", dist);
  out << "ell,cdf\n";
  for (double ell : grid) out << format_double(ell) << "," << format_double(dist.cdf(ell)) << "\n";
}

void write_histogram_csv(std::ostream& out, const EmpiricalDistribution& dist, const DensityHistogram& hist) {
  write_header(out, "histogram", dist);
  out << "bin_lo,bin_hi,mass\n";
  for (std::size_t i = 0; i < hist.bin_masses.size(); ++i) {
    out << format_double(hist.bin_edges[i]) << "," << format_double(hist.bin_edges[i + 1]) << ","
        << format_double(hist.bin_masses[i]) << "\n";
  }
}

CdfTable read_cdf_csv(std::istream& in) {
  CdfTable t;
  t.header = read_header(in, "cdf", "ell,cdf");
  for (const auto& row : read_rows(in, 2)) t.rows.emplace_back(row[0], row[1]);
  return t;
}

HistogramTable read_histogram_csv(std::istream& in) {
  HistogramTable t;
  t.header = read_header(in, "histogram", "bin_lo,bin_hi,mass");
  for (const auto& row : read_rows(in, 3)) {
    if (t.histogram.bin_edges.empty()) t.histogram.bin_edges.push_back(row[0]);
    t.histogram.bin_edges.push_back(row[1]);
    t.histogram.bin_masses.push_back(row[2]);
  }
  return t;
}

}  // namespace sphdist
