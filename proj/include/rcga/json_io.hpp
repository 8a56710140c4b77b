#pragma once

// JSON views of results and configs (nlohmann/json).

#include <fstream>
#include <string>

#include "json.hpp"
#include "rcga/analysis.hpp"
#include "rcga/engine.hpp"
#include "rcga/error.hpp"
#include "rcga/experiments.hpp"
#include "rcga/rng.hpp"

namespace rcga {

using nlohmann::json;

inline json matrix_to_json(const FrequencyMatrix& fm) {
  json rows = json::array();
  for (std::size_t i = 0; i < fm.n(); ++i) {
    rows.push_back(std::vector<double>(fm.row(i).begin(), fm.row(i).end()));
  }
  return rows;
}

inline json to_json(const StepRecord& s) {
  json kinds = json::array();
  for (auto k : s.kinds) kinds.push_back(to_string(k));
  return {{"iteration", s.iteration},
          {"x", std::vector<Value>(s.x.begin(), s.x.end())},
          {"y", std::vector<Value>(s.y.begin(), s.y.end())},
          {"swapped", s.swapped},
          {"kinds", kinds},
          {"p0_before", s.p0_before},
          {"raw_delta", s.raw_delta},
          {"delta", s.delta},
          {"critical_position", s.critical_position},
          {"snapshot", s.snapshot}};
}

inline json to_json(const RunResult& r, const RunConfig& cfg) {
  json j;
  j["n"] = cfg.n;
  j["r"] = cfg.r;
  j["K"] = cfg.K;
  j["seed"] = cfg.seed;
  j["rng"] = kRngName;
  j["fitness"] = cfg.fitness.descriptor();
  j["max_iterations"] = cfg.max_iterations;
  j["iterations"] = r.iterations;
  if (r.reached_optimum) {
    j["iterations_to_optimum"] = r.iterations;
  } else {
    j["iterations_to_optimum"] = nullptr;
  }
  j["termination"] = r.reached_optimum ? "optimum" : "horizon";
  j["fitness_evaluations"] = r.fitness_evaluations;
  j["min_p0"] = r.min_p0;
  if (cfg.trace != TraceLevel::None) {
    json hist = json::array();
    for (auto [t, m] : r.critical_history) hist.push_back({{"t", t}, {"m", m}});
    j["critical_history"] = hist;
    j["step_kind_counts"] = {{"inactive", r.kind_counts[0]},
                             {"biased", r.kind_counts[1]},
                             {"random_walk", r.kind_counts[2]}};
    if (r.final_matrix) j["final_matrix"] = matrix_to_json(*r.final_matrix);
  }
  if (cfg.trace == TraceLevel::Full) {
    json trace = json::array();
    for (const auto& s : r.trace) trace.push_back(to_json(s));
    j["trace"] = trace;
  }
  return j;
}

inline json to_json(const ConcentrationReport& r) {
  return {{"trials", r.trials},       {"horizon", r.horizon},
          {"violation_count", r.violation_count}, {"violation_rate", r.rate()},
          {"bound", r.bound},         {"threshold", r.threshold()},
          {"pass", r.passes()}};
}

inline json to_json(const std::optional<DriftEstimate>& e) {
  if (!e) return {{"no_data", true}};
  return {{"sample_count", e->sample_count}, {"mean_delta", e->mean_delta},
          {"standard_error", e->standard_error}, {"mean_p", e->mean_p},
          {"bound", e->bound}};
}

inline json to_json(const CellResult& c) {
  json j{{"n", c.n}, {"r", c.r}, {"K", c.K}, {"missing", c.missing}};
  if (!c.missing) {
    j["runs"] = c.runs;
    j["mean_iterations"] = c.mean_iterations;
    j["stddev"] = c.stddev;
    j["success_rate"] = c.success_rate;
    j["mean_evaluations"] = c.mean_evaluations;
    j["censored"] = c.censored();
  }
  return j;
}

inline json to_json(const SweepResult& sr) {
  json cells = json::array();
  for (const auto& c : sr.cells) cells.push_back(to_json(c));
  return {{"cells", cells}};
}

/// Sweep config file:
/// {"n": [..], "r": [..], "K": [..], "runs": 50, "base_seed": 1,
///  "max_iterations": {"multiple": 50} | {"absolute": 100000},
///  "fitness": "leadingones", "threads": 4, "iteration_budget": 0}
inline SweepConfig sweep_config_from_json(const json& j) {
  try {
    SweepConfig c;
    c.n = j.at("n").get<std::vector<std::size_t>>();
    c.r = j.at("r").get<std::vector<std::size_t>>();
    c.K = j.at("K").get<std::vector<double>>();
    c.runs = j.value("runs", std::uint64_t{1});
    c.base_seed = j.value("base_seed", std::uint64_t{0});
    c.fitness = j.value("fitness", std::string("leadingones"));
    c.threads = j.value("threads", std::size_t{0});
    c.iteration_budget = j.value("iteration_budget", std::uint64_t{0});
    if (j.contains("max_iterations")) {
      const auto& h = j.at("max_iterations");
      if (h.is_number()) {
        c.horizon = HorizonPolicy::absolute(h.get<std::uint64_t>());
      } else if (h.contains("absolute")) {
        c.horizon = HorizonPolicy::absolute(h.at("absolute").get<std::uint64_t>());
      } else {
        c.horizon = HorizonPolicy::multiple(h.at("multiple").get<double>());
      }
    }
    return c;
  } catch (const json::exception& e) {
    throw ParameterError(std::string("bad sweep config: ") + e.what());
  }
}

inline SweepConfig load_sweep_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open sweep config", path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParameterError(std::string("sweep config is not valid JSON: ") + e.what());
  }
  return sweep_config_from_json(j);
}

}  // namespace rcga
