// Command-line front end: single runs, sweeps, drift / concentration checks
// and closed-form bounds.
//
// Exit codes: 0 success, 1 validation error, 2 I/O error, 3 FAIL verdict.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rcga/analysis.hpp"
#include "rcga/engine.hpp"
#include "rcga/experiments.hpp"
#include "rcga/json_io.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kIo = 2;
constexpr int kFail = 3;

struct RunArgs {
  std::size_t n = 0;
  std::size_t r = 0;
  double K = 0;
  std::uint64_t seed = 0;
  std::string fitness = "leadingones";
  std::uint64_t max_iters = 0;
  std::string trace = "none";
};

struct SweepArgs {
  std::string config;
  std::string out;
  std::string format = "csv";
  std::string series;
  std::optional<std::uint64_t> runs;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

struct DriftArgs {
  std::size_t n = 20;
  std::size_t r = 3;
  double K = 500;
  std::size_t position = 1;
  std::uint64_t runs = 100;
  std::uint64_t seed = 1;
  std::uint64_t max_iters = 1'000'000;
  double p_lo = 0.3;
  double p_hi = 0.7;
  double bin_width = 0.05;
  bool martingale = false;
  std::uint64_t steps = 100'000;
};

struct ConcentrationArgs {
  std::size_t n = 10;
  std::size_t r = 3;
  double K = 0;
  std::uint64_t T = 0;
  std::uint64_t trials = 200;
  std::uint64_t seed = 1;
  std::string fitness = "constant";
  std::string event = "any";
  std::size_t position = 1;
};

struct BoundsArgs {
  std::size_t n = 0;
  std::size_t r = 0;
  double K = 0;
  double T = 0;
  double c = 1.0;
  double p = 0.5;
};

rcga::TraceLevel parse_trace(const std::string& s) {
  if (s == "none") return rcga::TraceLevel::None;
  if (s == "summary") return rcga::TraceLevel::Summary;
  if (s == "full") return rcga::TraceLevel::Full;
  throw rcga::ParameterError("unknown trace level: " + s);
}

int cmd_run(const RunArgs& a) {
  rcga::RunConfig cfg;
  cfg.n = a.n;
  cfg.r = a.r;
  cfg.K = a.K;
  cfg.seed = a.seed;
  cfg.fitness = rcga::Fitness::parse(a.fitness);
  cfg.max_iterations = a.max_iters;
  cfg.trace = parse_trace(a.trace);
  const auto result = rcga::run(cfg);
  std::cout << rcga::to_json(result, cfg).dump(2) << '\n';
  return kOk;
}

int cmd_sweep(const SweepArgs& a) {
  rcga::SweepConfig cfg = rcga::load_sweep_config(a.config);
  if (a.runs) cfg.runs = *a.runs;
  if (a.seed) cfg.base_seed = *a.seed;
  if (a.threads) cfg.threads = *a.threads;
  const auto result = rcga::run_sweep(cfg);

  std::string body;
  if (a.format == "json") {
    body = rcga::to_json(result).dump(2) + "\n";
  } else if (a.format == "csv") {
    body = rcga::to_csv(result);
  } else {
    throw rcga::ParameterError("unknown format: " + a.format);
  }

  if (a.out.empty()) {
    std::cout << body;
  } else {
    std::ofstream out(a.out, std::ios::binary);
    if (!out || !(out << body)) throw rcga::IoError("cannot write sweep output", a.out);
  }
  if (!a.series.empty()) {
    std::ofstream out(a.series, std::ios::binary);
    if (!out) throw rcga::IoError("cannot write series output", a.series);
    rcga::write_series(result, out);
  }
  return kOk;
}

int cmd_drift(const DriftArgs& a) {
  if (a.martingale) {
    const auto rep = rcga::run_martingale_check(a.n, a.r, a.K, a.steps, a.seed);
    const bool pass = rep.passes();
    rcga::json j{{"check", "martingale"},          {"n", a.n},
                 {"r", a.r},                       {"K", a.K},
                 {"steps", rep.steps},             {"max_abs_mean_change", rep.max_abs_mean()},
                 {"tolerance", rep.tolerance()},   {"verdict", pass ? "PASS" : "FAIL"}};
    std::cout << j.dump(2) << '\n';
    return pass ? kOk : kFail;
  }

  if (a.position < 1 || a.position > a.n) throw rcga::ParameterError("--position must be in [1, n]");
  rcga::DriftSetup s;
  s.n = a.n;
  s.r = a.r;
  s.K = a.K;
  s.position = a.position - 1;
  s.runs = a.runs;
  s.seed = a.seed;
  s.max_iterations = a.max_iters;
  s.p_lo = a.p_lo;
  s.p_hi = a.p_hi;
  s.bin_width = a.bin_width;
  s.threads = 0;
  const auto rep = rcga::run_drift_experiment(s);

  bool pass = true;
  rcga::json bins = rcga::json::array();
  for (const auto& b : rep.bins) {
    const bool ok = b.consistent(3.0);
    pass = pass && ok;
    bins.push_back({{"p_lo", b.lo}, {"p_hi", b.hi}, {"bound", b.bound},
                    {"estimate", rcga::to_json(b.estimate)}, {"verdict", ok ? "PASS" : "FAIL"}});
  }
  rcga::json j{{"check", "conditional-drift"},
               {"n", a.n}, {"r", a.r}, {"K", a.K}, {"position", a.position},
               {"tolerance", "mean >= bound - 3 standard errors"},
               {"bins", bins}, {"overall", rcga::to_json(rep.overall)},
               {"verdict", pass ? "PASS" : "FAIL"}};
  std::cout << j.dump(2) << '\n';
  return pass ? kOk : kFail;
}

int cmd_concentration(const ConcentrationArgs& a) {
  if (a.position < 1 || a.position > a.n) throw rcga::ParameterError("--position must be in [1, n]");
  rcga::ConcentrationSetup s;
  s.n = a.n;
  s.r = a.r;
  s.K = a.K > 0 ? a.K : static_cast<double>(rcga::recommended_K(a.n, a.r, 1.0));
  s.horizon = a.T;
  s.trials = a.trials;
  s.seed = a.seed;
  s.fitness = rcga::Fitness::parse(a.fitness);
  s.fitness.validate(a.n, a.r);
  if (a.event == "any") {
    s.event = rcga::DeviationEvent::AnyFrequency;
  } else if (a.event == "zero-drop") {
    s.event = rcga::DeviationEvent::ZeroFrequencyDrop;
  } else {
    throw rcga::ParameterError("unknown event: " + a.event);
  }
  s.position = a.position - 1;
  s.threads = 0;
  const auto rep = rcga::run_concentration_experiment(s);
  auto j = rcga::to_json(rep);
  j["check"] = "concentration";
  j["K"] = s.K;
  j["tolerance"] = "rate <= bound + 3 sqrt(bound (1 - bound) / trials)";
  j["verdict"] = rep.passes() ? "PASS" : "FAIL";
  std::cout << j.dump(2) << '\n';
  return rep.passes() ? kOk : kFail;
}

int cmd_bounds(const BoundsArgs& a) {
  const double n = static_cast<double>(a.n);
  const double e4 = std::exp(4.0);
  // Occupation bound instantiated for a frequency at the upper border:
  // drift 1/(2 e^4 n), unit steps, self-loop 1-4/n, distance K/n.
  rcga::json occupation = nullptr;
  if (a.n >= 4) occupation = rcga::occupation_bound(1.0 / (2.0 * e4 * n), 1.0, 1.0 - 4.0 / n, a.K / n);
  rcga::json j{{"n", a.n},
               {"r", a.r},
               {"K", a.K},
               {"T", a.T},
               {"genetic_drift_bound", rcga::genetic_drift_bound(a.K, a.T, static_cast<double>(a.r))},
               {"weak_preference_bound", rcga::weak_preference_bound(a.K, a.T, static_cast<double>(a.r))},
               {"drift_lower_bound", {{"p", a.p}, {"value", rcga::drift_lower_bound(a.p, a.K)}}},
               {"occupation_bound", occupation},
               {"recommended_K", {{"c", a.c}, {"value", rcga::recommended_K(a.n, a.r, a.c)}}}};
  std::cout << j.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-valued compact GA on r-LeadingOnes: runs, sweeps and drift checks"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Print errors with extra context");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Execute one run and print the result as JSON");
  run->add_option("--n", run_args.n, "Number of positions")->required()->check(CLI::Range(2, 1 << 24));
  run->add_option("--r", run_args.r, "Alphabet size")->required()->check(CLI::Range(2, 1 << 16));
  run->add_option("--K", run_args.K, "Hypothetical population size")->required()->check(CLI::PositiveNumber);
  run->add_option("--seed", run_args.seed, "RNG seed")->required();
  run->add_option("--fitness", run_args.fitness, "leadingones | leadingones-general(a=..,sigma=..) | constant");
  run->add_option("--max-iters", run_args.max_iters, "Iteration horizon")->required()->check(CLI::PositiveNumber);
  run->add_option("--trace", run_args.trace, "none | summary | full")
      ->check(CLI::IsMember({"none", "summary", "full"}));

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep from a JSON config; flags override the file");
  sweep->add_option("--config", sweep_args.config, "Sweep config (JSON)")->required();
  sweep->add_option("--out", sweep_args.out, "Output file (default stdout)");
  sweep->add_option("--format", sweep_args.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  sweep->add_option("--series", sweep_args.series, "Also write gnuplot series to this file");
  sweep->add_option("--runs", sweep_args.runs, "Override runs per cell")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", sweep_args.seed, "Override base seed");
  sweep->add_option("--threads", sweep_args.threads, "Override parallelism width")->check(CLI::PositiveNumber);

  DriftArgs drift_args;
  auto* drift = app.add_subcommand("drift-check", "Conditional drift of p_{i,0} vs its lower bound");
  drift->add_option("--n", drift_args.n)->check(CLI::Range(2, 1 << 20));
  drift->add_option("--r", drift_args.r)->check(CLI::Range(2, 1 << 16));
  drift->add_option("--K", drift_args.K)->check(CLI::PositiveNumber);
  drift->add_option("--position", drift_args.position, "1-based position");
  drift->add_option("--runs", drift_args.runs)->check(CLI::PositiveNumber);
  drift->add_option("--seed", drift_args.seed);
  drift->add_option("--max-iters", drift_args.max_iters)->check(CLI::PositiveNumber);
  drift->add_option("--p-lo", drift_args.p_lo)->check(CLI::Range(0.0, 1.0));
  drift->add_option("--p-hi", drift_args.p_hi)->check(CLI::Range(0.0, 1.0));
  drift->add_option("--bin-width", drift_args.bin_width)->check(CLI::PositiveNumber);
  drift->add_flag("--martingale", drift_args.martingale, "Check the neutral martingale property instead");
  drift->add_option("--steps", drift_args.steps, "Steps for --martingale")->check(CLI::PositiveNumber);

  ConcentrationArgs conc_args;
  auto* conc = app.add_subcommand("concentration-check", "Deviation rate of frequencies vs the drift bound");
  conc->add_option("--n", conc_args.n)->check(CLI::Range(2, 1 << 20));
  conc->add_option("--r", conc_args.r)->check(CLI::Range(2, 1 << 16));
  conc->add_option("--K", conc_args.K, "Default: recommended_K(n, r, 1)")->check(CLI::NonNegativeNumber);
  conc->add_option("--T", conc_args.T, "Horizon")->required();
  conc->add_option("--trials", conc_args.trials)->check(CLI::PositiveNumber);
  conc->add_option("--seed", conc_args.seed);
  conc->add_option("--fitness", conc_args.fitness);
  conc->add_option("--event", conc_args.event, "any | zero-drop")->check(CLI::IsMember({"any", "zero-drop"}));
  conc->add_option("--position", conc_args.position, "1-based position for zero-drop");

  BoundsArgs bounds_args;
  auto* bounds = app.add_subcommand("bounds", "Print every closed-form bound");
  bounds->add_option("--n", bounds_args.n)->required()->check(CLI::Range(2, 1 << 30));
  bounds->add_option("--r", bounds_args.r)->required()->check(CLI::Range(2, 1 << 30));
  bounds->add_option("--K", bounds_args.K)->required()->check(CLI::PositiveNumber);
  bounds->add_option("--T", bounds_args.T)->required()->check(CLI::PositiveNumber);
  bounds->add_option("--c", bounds_args.c, "Constant for recommended_K")->check(CLI::PositiveNumber);
  bounds->add_option("--p", bounds_args.p, "Frequency for the drift lower bound")->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kValidation;
  }

  try {
    if (*run) return cmd_run(run_args);
    if (*sweep) return cmd_sweep(sweep_args);
    if (*drift) return cmd_drift(drift_args);
    if (*conc) return cmd_concentration(conc_args);
    if (*bounds) return cmd_bounds(bounds_args);
  } catch (const rcga::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    if (verbose) std::cerr << app.help();
    return kValidation;
  }
  return kValidation;
}
