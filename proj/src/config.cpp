#include "sphdist/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "sphdist/distribution.hpp"
#include "sphdist/errors.hpp"
#include "sphdist/fixtures.hpp"
#include "sphdist/serialize.hpp"
#include "sphdist/stats.hpp"
#include "sphdist/verify.hpp"

namespace sphdist {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

/// Non-negative integer, written plainly or as an integral number like 1e6.
std::uint64_t parse_count(std::string_view value, std::size_t line, std::size_t column) {
  std::uint64_t n = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), n);
  if (res.ec == std::errc() && res.ptr == value.data() + value.size()) return n;
  const double x = parse_number(value, line, column);
  if (!(x >= 0.0 && x <= 1.8e19 && std::floor(x) == x)) {
    throw ParseError("expected a non-negative integer", line, column);
  }
  return static_cast<std::uint64_t>(x);
}

std::uint64_t parse_positive(std::string_view value, std::size_t line, std::size_t column) {
  const auto n = parse_count(value, line, column);
  if (n == 0) throw ParseError("expected a positive integer", line, column);
  return n;
}

bool parse_bool(std::string_view value, std::size_t line, std::size_t column) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ParseError("expected true or false", line, column);
}

template <typename F>
auto wrap(F&& f, std::size_t line, std::size_t column) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), line, column);
  }
}

int bracket_balance(std::string_view s) {
  int depth = 0;
  bool comment = false;
  for (char c : s) {
    if (c == '\n') comment = false;
    if (comment) continue;
    if (c == '#') comment = true;
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
  }
  return depth;
}

const Region& lookup(const RunConfig& config, const std::string& name) {
  const auto it = config.regions.find(name);
  if (it == config.regions.end()) throw std::invalid_argument("region '" + name + "' is not defined");
  return it->second;
}

nlohmann::json envelope(const RunConfig& config, std::string_view command) {
  return {{"version", SPHDIST_VERSION}, {"seed", config.seed}, {"command", std::string(command)}};
}

std::string csv_header(const RunConfig& config, std::string_view kind) {
  return "# sphdist " + std::string(SPHDIST_VERSION) + " kind=" + std::string(kind) +
         " seed=" + std::to_string(config.seed) + "\n";
}

std::string format_or(const RunConfig& config, std::string_view fallback) {
  if (config.format.empty()) return std::string(fallback);
  return config.format;
}

int run_command(const RunConfig& config, std::ostream& out) {
  const SpaceSpec space = config.space();
  const MetricKind metric = config.resolved_metric();
  const Exec exec{config.threads};
  const auto region = [&](const std::string& name) {
    const Region& r = lookup(config, name);
    validate(r, space);
    return r;
  };
  const std::string& cmd = config.command;

  if (cmd == "measure") {
    const Region a = region(config.a);
    const auto m = measure(a, space, config.samples, derive_seed(config.seed, "measure"), config.delta, exec);
    if (format_or(config, "csv") == "json") {
      auto j = envelope(config, cmd);
      j.update({{"region", config.a}, {"expression", format_region(a)}, {"space", space.name()},
                {"value", m.value}, {"half_width", m.half_width}, {"exact", m.exact}, {"samples", config.samples}});
      out << j.dump(2) << "\n";
    } else {
      out << csv_header(config, "measure") << "region,value,half_width,exact\n"
          << config.a << "," << format_double(m.value) << "," << format_double(m.half_width) << ","
          << (m.exact ? "true" : "false") << "\n";
    }
    return kExitOk;
  }

  if (cmd == "dist") {
    if (format_or(config, "csv") != "csv") throw std::invalid_argument("dist writes CSV only");
    const Region a = region(config.a);
    const auto dist = config.cross ? estimate_cross(a, region(config.b), space, metric, config.pairs, config.seed, exec)
                                   : estimate_self(a, space, metric, config.pairs, config.seed, exec);
    if (config.bins > 0) {
      write_histogram_csv(out, dist, histogram(dist, config.bins));
    } else {
      write_cdf_csv(out, dist, uniform_grid(dist.diameter(), config.grid));
    }
    return kExitOk;
  }

  if (cmd == "compare") {
    const auto d1 = estimate_self(region(config.a), space, metric, config.pairs, derive_seed(config.seed, "a"), exec);
    const auto d2 = estimate_self(region(config.b), space, metric, config.pairs, derive_seed(config.seed, "b"), exec);
    const double ks = ks_two_sample(d1, d2);
    const double tol = 2.0 * dkw_tolerance(config.pairs, config.delta);
    if (format_or(config, "json") == "json") {
      auto j = envelope(config, cmd);
      j.update({{"a", config.a}, {"b", config.b}, {"metric", std::string(to_string(metric))},
                {"pairs", config.pairs}, {"ks", ks}, {"tolerance", tol}, {"pass", ks <= tol}});
      out << j.dump(2) << "\n";
    } else {
      out << csv_header(config, "compare") << "a,b,metric,pairs,ks,tolerance,pass\n"
          << config.a << "," << config.b << "," << to_string(metric) << "," << config.pairs << ","
          << format_double(ks) << "," << format_double(tol) << "," << (ks <= tol ? "true" : "false") << "\n";
    }
    return kExitOk;
  }

  if (cmd == "verify") {
    if (!config.claim) throw std::invalid_argument("verify needs a claim");
    VerifyOptions options;
    options.pairs = config.pairs;
    options.seed = config.seed;
    options.delta = config.delta;
    options.grid_points = config.grid;
    options.estimate.mass_samples = config.samples;
    const auto partition = [&](const std::string& name) { return make_partition(name, space, region(name)); };

    VerificationReport report;
    switch (*config.claim) {
      case Claim::lemma: {
        if (!config.swap_p || !config.swap_pbar || !(config.swap_theta > 0.0)) {
          throw std::invalid_argument("lemma needs swap_p, swap_pbar and swap_theta");
        }
        if (!space.is_sphere()) throw DimensionMismatch("the swap check works on a single sphere");
        const Region a = region(config.a);
        const auto record = check_swap(a, *config.swap_p, *config.swap_pbar, config.swap_theta,
                                       config.decompose.search.probes, derive_seed(config.seed, "swap"));
        const auto grid = uniform_grid(Metric(space, metric).diameter(), config.grid);
        report = verify_swap_invariance(a, space, record, config.pairs, config.seed, grid, metric, config.delta, exec);
        if (!(*config.swap_p == *config.swap_pbar)) {
          const double err = reflection_pairing_error(*config.swap_p, *config.swap_pbar, config.swap_theta, 100'000,
                                                      derive_seed(config.seed, "pairing"));
          report.details.push_back(CheckDetail{"reflection_pairing", err, 1e-12, err <= 1e-12});
        }
        break;
      }
      case Claim::main_lemma:
        report = verify_main_lemma(partition(config.a), partition(config.b), metric, options, exec);
        break;
      case Claim::theorem1:
        report = verify_theorem1(partition(config.a), metric, options, exec);
        break;
      case Claim::theorem2:
        report = verify_theorem2(region(config.a), region(config.b), space, metric, options, exec);
        break;
      case Claim::theorem3:
        if (metric != MetricKind::product) throw std::invalid_argument("theorem3 uses the product metric");
        report = verify_theorem3(partition(config.a), options, exec);
        break;
    }
    if (format_or(config, "json") == "json") {
      auto j = envelope(config, cmd);
      j.update(report_to_json(report));
      out << j.dump(2) << "\n";
    } else {
      out << csv_header(config, "verify") << "claim,statistic,tolerance,pass,premise_ok,pairs\n"
          << to_string(report.claim) << "," << format_double(report.statistic) << ","
          << format_double(report.tolerance) << "," << (report.pass ? "true" : "false") << ","
          << (report.premise_ok ? "true" : "false") << "," << report.pairs << "\n";
    }
    return report.pass ? kExitOk : kExitVerifyFailed;
  }

  if (cmd == "decompose") {
    if (format_or(config, "json") != "json") throw std::invalid_argument("decompose writes JSON only");
    DecompositionParams params = config.decompose;
    params.seed = config.seed;
    params.delta = config.delta;
    params.metric = metric;
    params.grid_points = config.grid;
    const auto trace = greedy_decomposition(region(config.a), region(config.b), space, params, exec);
    auto j = envelope(config, cmd);
    j.update(trace_to_json(trace));
    out << j.dump(2) << "\n";
    return kExitOk;
  }

  throw std::invalid_argument("unknown command '" + cmd + "' (expected measure, dist, compare, verify, decompose)");
}

}  // namespace

MetricKind RunConfig::resolved_metric() const {
  if (metric) return *metric;
  return dims.size() == 1 ? MetricKind::euclidean : MetricKind::product;
}

std::vector<int> parse_space(std::string_view name) {
  std::vector<int> dims;
  std::size_t pos = 0;
  while (true) {
    if (pos >= name.size() || name[pos] != 'S') throw std::invalid_argument("space must look like S2 or S1xS1");
    ++pos;
    int n = 0;
    const auto res = std::from_chars(name.data() + pos, name.data() + name.size(), n);
    if (res.ec != std::errc() || n < 1) throw std::invalid_argument("sphere dimension must be a positive integer");
    dims.push_back(n);
    pos = static_cast<std::size_t>(res.ptr - name.data());
    if (pos == name.size()) return dims;
    if (name[pos] != 'x') throw std::invalid_argument("space factors are joined by 'x'");
    ++pos;
  }
}

void apply_setting(RunConfig& c, std::string_view key, std::string_view value, std::size_t line,
                   std::size_t column) {
  key = trim(key);
  if (key.starts_with("region") && key.size() > 6 && (key[6] == ' ' || key[6] == '\t')) {
    const std::string name(trim(key.substr(6)));
    if (name.empty()) throw ParseError("region binding needs a name", line, column);
    for (char ch : name) {
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_')) {
        throw ParseError("region names use letters, digits and '_'", line, column);
      }
    }
    Region r = parse_region(value, c.regions, line, column);
    c.regions.insert_or_assign(name, std::move(r));
    return;
  }
  const std::string_view v = trim(value);
  const auto count = [&] { return parse_count(v, line, column); };
  const auto positive = [&] { return parse_positive(v, line, column); };
  const auto number = [&] { return parse_number(v, line, column); };

  if (key == "command") {
    c.command = v;
  } else if (key == "space") {
    c.dims = wrap([&] { return parse_space(v); }, line, column);
  } else if (key == "combiner") {
    c.combiner = wrap([&] { return parse_combiner(v); }, line, column);
  } else if (key == "metric") {
    c.metric = wrap([&] { return parse_metric_kind(v); }, line, column);
  } else if (key == "a") {
    c.a = v;
  } else if (key == "b") {
    c.b = v;
  } else if (key == "cross") {
    c.cross = parse_bool(v, line, column);
  } else if (key == "pairs") {
    c.pairs = positive();
  } else if (key == "samples") {
    c.samples = positive();
  } else if (key == "grid") {
    c.grid = positive();
    if (c.grid < 2) throw ParseError("grid needs at least two points", line, column);
  } else if (key == "bins") {
    c.bins = count();
  } else if (key == "seed") {
    c.seed = count();
  } else if (key == "delta") {
    c.delta = number();
    if (!(c.delta > 0.0 && c.delta < 1.0)) throw ParseError("delta must lie in (0, 1)", line, column);
  } else if (key == "out") {
    c.out = v;
  } else if (key == "format") {
    if (v != "csv" && v != "json") throw ParseError("format must be csv or json", line, column);
    c.format = v;
  } else if (key == "threads") {
    c.threads = static_cast<unsigned>(count());
  } else if (key == "claim") {
    c.claim = wrap([&] { return parse_claim(v); }, line, column);
  } else if (key == "swap_p") {
    c.swap_p = parse_point(v, line, column);
  } else if (key == "swap_pbar") {
    c.swap_pbar = parse_point(v, line, column);
  } else if (key == "swap_theta") {
    c.swap_theta = number();
  } else if (key == "max_swaps") {
    c.decompose.max_swaps = count();
  } else if (key == "min_radius") {
    c.decompose.min_radius = number();
  } else if (key == "candidates") {
    c.decompose.search.candidates = positive();
  } else if (key == "probes") {
    c.decompose.search.probes = positive();
  } else if (key == "radius_tolerance") {
    c.decompose.search.radius_tolerance = number();
    if (!(c.decompose.search.radius_tolerance > 0.0)) throw ParseError("radius_tolerance must be positive", line, column);
  } else if (key == "residual_samples") {
    c.decompose.residual_samples = positive();
  } else if (key == "drift_pairs") {
    c.decompose.drift_pairs = positive();
  } else if (key == "max_depth") {
    c.decompose.max_depth = positive();
  } else {
    throw ParseError("unknown setting '" + std::string(key) + "'", line, column);
  }
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start <= text.size();) {
    const auto end = text.find('\n', start);
    if (end == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    std::string_view line = lines[i];
    const auto content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("expected 'key = value'", line_no, line.find_first_not_of(" \t") + 1);
    }
    const std::string_view key = line.substr(0, eq);
    if (trim(key).empty()) throw ParseError("missing key before '='", line_no, eq + 1);

    if (trim(key).starts_with("region")) {
      // The expression runs from after '=' until its brackets close.
      std::size_t first = i;
      std::size_t expr_start = static_cast<std::size_t>(line.data() - text.data()) + eq + 1;
      std::size_t expr_end = static_cast<std::size_t>(line.data() - text.data()) + line.size();
      while (bracket_balance(text.substr(expr_start, expr_end - expr_start)) > 0 && i + 1 < lines.size()) {
        ++i;
        expr_end = static_cast<std::size_t>(lines[i].data() - text.data()) + lines[i].size();
      }
      const std::string_view expr = text.substr(expr_start, expr_end - expr_start);
      if (bracket_balance(expr) > 0) throw ParseError("unclosed bracket in region expression", first + 1, eq + 2);
      apply_setting(config, key, expr, first + 1, eq + 2);
      continue;
    }

    // Strip a trailing comment from plain settings.
    std::string_view value = line.substr(eq + 1);
    if (const auto hash = value.find('#'); hash != std::string_view::npos) value = value.substr(0, hash);
    const std::size_t value_column = eq + 2 + (value.find_first_not_of(" \t") == std::string_view::npos
                                                   ? 0
                                                   : value.find_first_not_of(" \t"));
    apply_setting(config, key, trim(value), line_no, value_column);
  }
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.out.empty()) return run_command(config, out);
    // Write to a buffer first so a failed run leaves no partial artifact.
    std::ostringstream buffer;
    const int code = run_command(config, buffer);
    std::ofstream file(config.out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write '" + config.out + "'");
    file << buffer.str();
    return code;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const HypothesisError& e) {
    err << "hypothesis not met: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SamplingBudgetExhausted& e) {
    err << "sampling budget exhausted: " << e.what() << " (acceptance rate " << e.acceptance_rate() << ")\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace sphdist
