// Command-line front end: sphdist [command] [claim] --config FILE [flags]
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sphdist/config.hpp"
#include "sphdist/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Distance distributions of regions of spheres and products of spheres"};
  app.set_version_flag("--version", std::string(SPHDIST_VERSION));

  std::string command;
  std::string claim;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> pairs;
  std::optional<std::string> delta;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<unsigned> threads;
  std::optional<std::string> space;
  std::optional<std::string> metric;
  std::vector<std::string> regions;
  std::vector<std::string> settings;

  app.add_option("command", command, "measure | dist | compare | verify | decompose");
  app.add_option("claim", claim, "verify: lemma | main_lemma | theorem1 | theorem2 | theorem3");
  app.add_option("-c,--config", config_path, "Config file (key = value lines)");
  app.add_option("--seed", seed, "Master seed");
  app.add_option("--pairs", pairs, "Distance pairs per distribution");
  app.add_option("--delta", delta, "Failure probability of each DKW bound");
  app.add_option("-o,--out", out, "Output file (default: standard output)");
  app.add_option("--format", format, "csv | json");
  app.add_option("--threads", threads, "Worker threads, 0 = all cores (results do not depend on it)");
  app.add_option("--space", space, "S2, S1xS1, ...");
  app.add_option("--metric", metric, "euclidean | angular | product");
  app.add_option("--region", regions, "NAME=EXPR region binding (repeatable)");
  app.add_option("--set", settings, "KEY=VALUE for any config key (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sphdist::kExitUsage;
  }

  sphdist::RunConfig config;
  try {
    if (!config_path.empty()) config = sphdist::load_config(config_path);
    const auto set = [&](const std::string& key, const std::string& value) {
      sphdist::apply_setting(config, key, value);
    };
    const auto split = [](const std::string& kv, const char* what) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::invalid_argument(std::string(what) + " expects KEY=VALUE");
      return std::pair{kv.substr(0, eq), kv.substr(eq + 1)};
    };
    if (!command.empty()) set("command", command);
    if (!claim.empty()) set("claim", claim);
    if (space) set("space", *space);
    if (metric) set("metric", *metric);
    for (const auto& r : regions) {
      const auto [name, expr] = split(r, "--region");
      set("region " + name, expr);
    }
    for (const auto& s : settings) {
      const auto [key, value] = split(s, "--set");
      set(key, value);
    }
    if (seed) config.seed = *seed;
    if (pairs) set("pairs", *pairs);
    if (delta) set("delta", *delta);
    if (out) config.out = *out;
    if (format) set("format", *format);
    if (threads) config.threads = *threads;
  } catch (const sphdist::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return sphdist::kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return sphdist::kExitUsage;
  }
  if (config.command.empty()) {
    std::cerr << "no command given\n" << app.help();
    return sphdist::kExitUsage;
  }
  return sphdist::run(config, std::cout, std::cerr);
}
