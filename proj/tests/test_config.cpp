#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "sphdist/config.hpp"
#include "sphdist/distribution.hpp"
#include "sphdist/errors.hpp"
#include "sphdist/serialize.hpp"

using namespace sphdist;
using Pos = std::pair<std::size_t, std::size_t>;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_text(const std::string& text) {
  const RunConfig c = parse_config(text);
  std::ostringstream out, err;
  const int code = run(c, out, err);
  return {code, out.str(), err.str()};
}

Outcome run_config(const RunConfig& c) {
  std::ostringstream out, err;
  const int code = run(c, out, err);
  return {code, out.str(), err.str()};
}

const char* kBands =
    "space = S2\n"
    "seed = 3\n"
    "pairs = 50000\n"
    "samples = 50000\n"
    "region A = union(band([0,0,1], -1, -0.5),\n"
    "                 band([0,0,1], 0, 0.5))\n"
    "region B = hemisphere([1,0,0])\n";

}  // namespace

TEST(ParseSpace, Names) {
  EXPECT_EQ(parse_space("S2"), (std::vector<int>{2}));
  EXPECT_EQ(parse_space("S1xS1"), (std::vector<int>{1, 1}));
  EXPECT_EQ(parse_space("S2xS1xS3"), (std::vector<int>{2, 1, 3}));
  EXPECT_THROW(parse_space("T2"), std::invalid_argument);
  EXPECT_THROW(parse_space("S0"), std::invalid_argument);
  EXPECT_THROW(parse_space("S2x"), std::invalid_argument);
}

TEST(ParseConfig, SettingsCommentsAndMultiLineRegions) {
  const RunConfig c = parse_config(std::string("# a comment line\n\ncommand = verify   # trailing\nclaim = theorem1\n") +
                                   kBands + "delta = 0.01\ngrid = 64\nthreads = 2\nformat = csv\npairs = 1e5\n");
  EXPECT_EQ(c.command, "verify");
  EXPECT_EQ(c.claim, Claim::theorem1);
  EXPECT_EQ(c.seed, 3u);
  EXPECT_EQ(c.pairs, 100'000u);
  EXPECT_EQ(c.samples, 50'000u);
  EXPECT_DOUBLE_EQ(c.delta, 0.01);
  EXPECT_EQ(c.grid, 64u);
  EXPECT_EQ(c.threads, 2u);
  EXPECT_EQ(c.format, "csv");
  ASSERT_EQ(c.regions.size(), 2u);
  EXPECT_EQ(c.regions.at("A").kind(), Region::Kind::union_of);
  EXPECT_EQ(c.resolved_metric(), MetricKind::euclidean);
}

TEST(ParseConfig, ProductDefaultsToProductMetric) {
  const RunConfig c = parse_config("space = S1xS1\ncombiner = l2-of-angular\nmax_swaps = 3\nmin_radius = 0.1\n");
  EXPECT_EQ(c.resolved_metric(), MetricKind::product);
  EXPECT_EQ(c.space().name(), SpaceSpec({1, 1}, Combiner::l2_of_angular).name());
  EXPECT_EQ(c.decompose.max_swaps, 3u);
  EXPECT_DOUBLE_EQ(c.decompose.min_radius, 0.1);
}

TEST(ParseConfig, ErrorsPointAtTheValue) {
  const auto where = [](const std::string& text) -> std::pair<std::size_t, std::size_t> {
    try {
      parse_config(text);
    } catch (const ParseError& e) {
      return {e.line(), e.column()};
    }
    return {0, 0};
  };
  EXPECT_EQ(where("seed = 1\npairs = -5\n"), (Pos{2, 9}));
  EXPECT_EQ(where("bogus = 1\n").first, 1u);
  EXPECT_EQ(where("seed 1\n").first, 1u);
  EXPECT_EQ(where("grid = 1\n").first, 1u);
  EXPECT_EQ(where("delta = 1.5\n").first, 1u);
  EXPECT_EQ(where("format = xml\n").first, 1u);
  EXPECT_EQ(where("pairs = 2.5\n").first, 1u);
  EXPECT_EQ(where("region A = union(full,\n full\n").first, 1u);
  // Region errors keep the line of the offending token.
  EXPECT_EQ(where("seed = 1\nregion A = union(full,\n   cup([0,0,1], 1))\n").first, 3u);
}

TEST(ApplySetting, Overrides) {
  RunConfig c;
  apply_setting(c, "space", "S2xS1");
  apply_setting(c, "region A", "product(hemisphere([0,0,1]), full)");
  apply_setting(c, "swap_p", "[0, 0, 1]");
  apply_setting(c, "cross", "true");
  EXPECT_EQ(c.dims, (std::vector<int>{2, 1}));
  EXPECT_TRUE(c.regions.contains("A"));
  EXPECT_EQ(*c.swap_p, SpherePoint::basis(2, 2));
  EXPECT_TRUE(c.cross);
  EXPECT_THROW(apply_setting(c, "cross", "maybe"), ParseError);
  EXPECT_THROW(apply_setting(c, "claim", "theorem9"), ParseError);
}

TEST(Run, MeasureCsvAndJson) {
  auto r = run_text(std::string("command = measure\n") + kBands);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("# sphdist ", 0), 0u);
  EXPECT_NE(r.out.find("kind=measure"), std::string::npos);
  // Band areas are exact: 2 pi * (0.5 + 0.5).
  const auto row = r.out.find("\nA,");
  ASSERT_NE(row, std::string::npos) << r.out;
  EXPECT_NEAR(std::stod(r.out.substr(row + 3)), 2 * kPi, 1e-12);
  EXPECT_NE(r.out.find(",0,true\n", row), std::string::npos) << r.out;

  r = run_text(std::string("command = measure\nformat = json\na = B\n") + kBands);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("command"), "measure");
  EXPECT_EQ(j.at("version"), SPHDIST_VERSION);
  EXPECT_DOUBLE_EQ(j.at("value").get<double>(), 2 * kPi);
}

TEST(Run, DistWritesReadableCsv) {
  auto r = run_text(std::string("command = dist\ngrid = 33\n") + kBands);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream in(r.out);
  const auto table = read_cdf_csv(in);
  ASSERT_EQ(table.rows.size(), 33u);
  EXPECT_DOUBLE_EQ(table.rows.back().first, 2.0);
  EXPECT_NEAR(table.rows.back().second, 4 * kPi * kPi, 1e-9);

  r = run_text(std::string("command = dist\nbins = 10\ncross = true\n") + kBands);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  std::istringstream hin(r.out);
  EXPECT_EQ(read_histogram_csv(hin).histogram.bin_masses.size(), 10u);

  r = run_text(std::string("command = dist\nformat = json\n") + kBands);
  EXPECT_EQ(r.code, kExitUsage);
}

TEST(Run, VerifyExitCodes) {
  auto r = run_text(std::string("command = verify\nclaim = theorem1\n") + kBands);
  EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
  const auto report = report_from_json(nlohmann::json::parse(r.out));
  EXPECT_TRUE(report.pass);
  EXPECT_EQ(report.claim, Claim::theorem1);

  r = run_text(std::string("command = verify\nclaim = theorem1\nregion C = cap([0,0,1], pi/3)\na = C\n") + kBands);
  EXPECT_EQ(r.code, kExitVerifyFailed);

  r = run_text(std::string("command = verify\nclaim = lemma\n") + kBands);
  EXPECT_EQ(r.code, kExitUsage);  // swap parameters missing

  r = run_text(std::string("command = verify\nclaim = lemma\nregion H = hemisphere([0,0,1])\na = H\n"
                           "swap_p = [0,0,1]\nswap_pbar = [1,0,0]\nswap_theta = 0.2\n") +
               kBands);
  EXPECT_EQ(r.code, kExitUsage);  // the second ball is not in the complement
  EXPECT_NE(r.err.find("hypothesis"), std::string::npos);

  r = run_text(std::string("command = verify\nclaim = lemma\nregion H = hemisphere([0,0,1])\na = H\n"
                           "swap_p = [0,0,1]\nswap_pbar = [0,0,-1]\nswap_theta = 0.3\n") +
               kBands);
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("reflection_pairing"), std::string::npos);
}

TEST(Run, UsageAndRuntimeErrors) {
  EXPECT_EQ(run_text(std::string("command = frobnicate\n") + kBands).code, kExitUsage);
  EXPECT_EQ(run_text(std::string("command = measure\na = Z\n") + kBands).code, kExitUsage);
  EXPECT_EQ(run_text("command = measure\nspace = S3\nregion A = cap([0,0,1], 1)\n").code, kExitUsage);
  // Rejection sampling from an empty region exhausts its budget.
  const auto r = run_text("command = dist\npairs = 1000\nregion A = empty\n");
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(r.err.find("sampling budget"), std::string::npos);
}

TEST(Run, ByteIdenticalAcrossThreadCounts) {
  for (const char* cmd : {"command = verify\nclaim = theorem1\n", "command = dist\nbins = 16\n",
                          "command = compare\n"}) {
    RunConfig c = parse_config(std::string(cmd) + kBands);
    c.threads = 1;
    const auto one = run_config(c);
    c.threads = 4;
    const auto four = run_config(c);
    EXPECT_EQ(one.code, four.code);
    EXPECT_EQ(one.out, four.out) << cmd;
  }
}

TEST(Run, WritesToOutFile) {
  const std::string path = ::testing::TempDir() + "sphdist_measure.csv";
  RunConfig c = parse_config(std::string("command = measure\n") + kBands);
  c.out = path;
  const auto r = run_config(c);
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  EXPECT_EQ(buffer.str().rfind("# sphdist ", 0), 0u);
  std::remove(path.c_str());
}

TEST(Serialize, ReportRoundTrip) {
  VerificationReport r;
  r.claim = Claim::main_lemma;
  r.statistic = 0.125;
  r.tolerance = 0.5;
  r.decide();
  r.premise_ok = false;
  r.note = "unequal measures";
  r.pairs = 1000;
  r.seeds = {1, 2, 18446744073709551615ull};
  r.fixtures = "A vs B";
  r.metric = "euclidean";
  r.details = {{"sup_gap", 0.1, 0.2, true}, {"endpoint_gap", 3.0, 1.0, false}};
  const auto back = report_from_json(nlohmann::json::parse(report_to_json(r).dump()));
  EXPECT_EQ(report_to_json(back), report_to_json(r));
  EXPECT_EQ(back.seeds, r.seeds);
  EXPECT_EQ(back.details[1].name, "endpoint_gap");
  EXPECT_FALSE(back.premise_ok);
}

TEST(Serialize, TraceRoundTrip) {
  DecompositionParams params;
  params.max_swaps = 2;
  params.residual_samples = 20'000;
  params.drift_pairs = 10'000;
  params.search.candidates = 64;
  const auto t = greedy_decomposition(Region::hemisphere(SpherePoint::basis(2, 2)),
                                      Region::hemisphere(SpherePoint::basis(2, 0)), SpaceSpec::sphere(2), params);
  const auto j = trace_to_json(t);
  const auto back = trace_from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(trace_to_json(back), j);
  ASSERT_EQ(back.swaps.size(), t.swaps.size());
  ASSERT_TRUE(back.final_region);
  EXPECT_TRUE(structurally_equal(*back.final_region, *t.final_region));
  EXPECT_EQ(back.residual_measure, t.residual_measure);
}
