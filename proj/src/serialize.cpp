#include "sphdist/serialize.hpp"

#include <stdexcept>
#include <string>

#include "sphdist/region_parser.hpp"

namespace sphdist {

using nlohmann::json;

namespace {

Verdict parse_verdict(const std::string& s) {
  if (s == "yes") return Verdict::yes;
  if (s == "no") return Verdict::no;
  if (s == "unknown") return Verdict::unknown;
  throw std::invalid_argument("unknown verdict '" + s + "'");
}

json fit_to_json(const FitCheck& f) {
  json j = {{"verdict", std::string(to_string(f.verdict))}};
  j["sampled"] = f.sampled ? json(*f.sampled) : json(nullptr);
  return j;
}

FitCheck fit_from_json(const json& j) {
  FitCheck f;
  f.verdict = parse_verdict(j.at("verdict").get<std::string>());
  if (j.contains("sampled") && !j.at("sampled").is_null()) f.sampled = j.at("sampled").get<bool>();
  return f;
}

json point_to_json(const SpherePoint& p) { return json(std::vector<double>(p.coords().begin(), p.coords().end())); }

SpherePoint point_from_json(const json& j) { return SpherePoint(j.get<std::vector<double>>()); }

}  // namespace

json report_to_json(const VerificationReport& r) {
  json details = json::array();
  for (const auto& d : r.details) {
    details.push_back({{"name", d.name}, {"statistic", d.statistic}, {"tolerance", d.tolerance}, {"pass", d.pass}});
  }
  return {
      {"claim", std::string(to_string(r.claim))},
      {"pass", r.pass},
      {"premise_ok", r.premise_ok},
      {"statistic", r.statistic},
      {"tolerance", r.tolerance},
      {"pairs", r.pairs},
      {"seeds", r.seeds},
      {"fixtures", r.fixtures},
      {"metric", r.metric},
      {"note", r.note},
      {"details", details},
  };
}

VerificationReport report_from_json(const json& j) {
  VerificationReport r;
  r.claim = parse_claim(j.at("claim").get<std::string>());
  r.pass = j.at("pass").get<bool>();
  r.premise_ok = j.at("premise_ok").get<bool>();
  r.statistic = j.at("statistic").get<double>();
  r.tolerance = j.at("tolerance").get<double>();
  r.pairs = j.at("pairs").get<std::size_t>();
  r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  r.fixtures = j.at("fixtures").get<std::string>();
  r.metric = j.at("metric").get<std::string>();
  r.note = j.at("note").get<std::string>();
  for (const auto& d : j.at("details")) {
    r.details.push_back(CheckDetail{d.at("name").get<std::string>(), d.at("statistic").get<double>(),
                                    d.at("tolerance").get<double>(), d.at("pass").get<bool>()});
  }
  return r;
}

json swap_to_json(const SwapRecord& s) {
  return {
      {"center_in_a", point_to_json(s.center_in_a)},
      {"center_in_abar", point_to_json(s.center_in_abar)},
      {"angular_radius", s.angular_radius},
      {"fit_in_a", fit_to_json(s.fit_in_a)},
      {"fit_in_abar", fit_to_json(s.fit_in_abar)},
  };
}

SwapRecord swap_from_json(const json& j) {
  return SwapRecord{point_from_json(j.at("center_in_a")), point_from_json(j.at("center_in_abar")),
                    j.at("angular_radius").get<double>(), fit_from_json(j.at("fit_in_a")),
                    fit_from_json(j.at("fit_in_abar"))};
}

json trace_to_json(const DecompositionTrace& t) {
  json swaps = json::array();
  for (const auto& s : t.swaps) swaps.push_back(swap_to_json(s));
  json j = {
      {"seed", t.seed},
      {"stop_reason", t.stop_reason},
      {"initial_residual", t.initial_residual},
      {"residual_half_width", t.residual_half_width},
      {"swaps", swaps},
      {"residual_measure", t.residual_measure},
      {"invariant_drift", t.invariant_drift},
      {"drift_tolerance", t.drift_tolerance},
      {"expression_depth", t.expression_depth},
  };
  j["final_region"] = t.final_region ? json(format_region(*t.final_region)) : json(nullptr);
  return j;
}

DecompositionTrace trace_from_json(const json& j) {
  DecompositionTrace t;
  t.seed = j.at("seed").get<std::uint64_t>();
  t.stop_reason = j.at("stop_reason").get<std::string>();
  t.initial_residual = j.at("initial_residual").get<double>();
  t.residual_half_width = j.at("residual_half_width").get<double>();
  for (const auto& s : j.at("swaps")) t.swaps.push_back(swap_from_json(s));
  t.residual_measure = j.at("residual_measure").get<std::vector<double>>();
  t.invariant_drift = j.at("invariant_drift").get<std::vector<double>>();
  t.drift_tolerance = j.at("drift_tolerance").get<std::vector<double>>();
  t.expression_depth = j.at("expression_depth").get<std::vector<std::size_t>>();
  if (j.contains("final_region") && !j.at("final_region").is_null()) {
    t.final_region = parse_region(j.at("final_region").get<std::string>());
  }
  return t;
}

}  // namespace sphdist
