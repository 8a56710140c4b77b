#pragma once

// Parameter sweeps over (n, r, K): independent seeded runs per cell, mean
// runtime per cell, and the K minimising it per (n, r).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rcga/engine.hpp"
#include "rcga/error.hpp"
#include "rcga/parallel.hpp"
#include "rcga/rng.hpp"
#include "rcga/stats.hpp"

namespace rcga {

/// Per-run iteration cap: either a fixed number, or a multiple of
/// n K ln(r) ln(K).
struct HorizonPolicy {
  enum class Kind : std::uint8_t { Absolute, Multiple };
  Kind kind = Kind::Multiple;
  double value = 50.0;

  static HorizonPolicy absolute(std::uint64_t iterations) {
    return {Kind::Absolute, static_cast<double>(iterations)};
  }
  static HorizonPolicy multiple(double factor) { return {Kind::Multiple, factor}; }

  std::uint64_t horizon(std::size_t n, std::size_t r, double K) const {
    double h = value;
    if (kind == Kind::Multiple) {
      h = value * static_cast<double>(n) * K * std::log(static_cast<double>(r)) * std::log(K);
    }
    return static_cast<std::uint64_t>(std::max(1.0, std::ceil(h)));
  }
};

struct SweepConfig {
  std::vector<std::size_t> n;
  std::vector<std::size_t> r;
  std::vector<double> K;
  std::uint64_t runs = 1;
  std::uint64_t base_seed = 0;
  HorizonPolicy horizon;
  std::string fitness = "leadingones";
  std::size_t threads = 0;  // 0: hardware concurrency
  /// Cap on the summed worst-case iterations (runs x horizon) of executed
  /// cells; cells past it are reported missing. 0 disables the cap.
  std::uint64_t iteration_budget = 0;

  void validate() const {
    if (n.empty() || r.empty() || K.empty()) throw ParameterError("sweep lists n, r, K must be non-empty");
    if (runs < 1) throw ParameterError("runs must be >= 1");
    if (!(horizon.value > 0.0)) throw ParameterError("horizon value must be positive");
    for (auto v : n) if (v < 2) throw ParameterError("every n must be >= 2");
    for (auto v : r) if (v < 2) throw ParameterError("every r must be >= 2");
    for (auto v : K) if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError("every K must be positive");
    (void)Fitness::parse(fitness);
  }
};

struct CellResult {
  std::size_t n = 0;
  std::size_t r = 0;
  double K = 0.0;
  std::uint64_t runs = 0;
  double mean_iterations = 0.0;
  double stddev = 0.0;
  double success_rate = 0.0;
  double mean_evaluations = 0.0;
  bool missing = false;  // skipped by the iteration budget

  /// Some run hit the horizon; its horizon value is in the mean.
  bool censored() const noexcept { return !missing && success_rate < 1.0; }
};

struct SweepResult {
  std::vector<CellResult> cells;  // n-major, then r, then K, in config order

  const CellResult* find(std::size_t n, std::size_t r, double K) const {
    for (const auto& c : cells) {
      if (c.n == n && c.r == r && c.K == K) return &c;
    }
    return nullptr;
  }
};

/// Aggregates per-run iteration counts of one cell.
inline CellResult aggregate_cell(std::size_t n, std::size_t r, double K,
                                 std::span<const RunResult> runs) {
  CellResult c{n, r, K};
  c.runs = runs.size();
  RunningStats it;
  std::uint64_t ok = 0;
  for (const auto& run : runs) {
    it.add(static_cast<double>(run.iterations));
    if (run.reached_optimum) ++ok;
  }
  c.mean_iterations = it.mean();
  c.stddev = it.stddev();
  c.success_rate = runs.empty() ? 0.0 : static_cast<double>(ok) / static_cast<double>(runs.size());
  c.mean_evaluations = 2.0 * c.mean_iterations;
  return c;
}

/// Executes every (n, r, K, replicate) run and aggregates per cell.
/// Deterministic in the config: each replicate's seed is
/// derive_seed(base_seed, n, r, K, replicate) and results are reduced in
/// replicate order regardless of scheduling.
inline SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const Fitness fitness = Fitness::parse(cfg.fitness);

  struct Cell {
    std::size_t n, r;
    double K;
    std::uint64_t horizon;
    bool execute;
  };
  std::vector<Cell> cells;
  std::uint64_t planned = 0;
  for (auto n : cfg.n) {
    for (auto r : cfg.r) {
      for (auto K : cfg.K) {
        const std::uint64_t h = cfg.horizon.horizon(n, r, K);
        bool execute = true;
        if (cfg.iteration_budget) {
          const std::uint64_t cost = h * cfg.runs;
          execute = planned + cost <= cfg.iteration_budget;
          if (execute) planned += cost;
        }
        cells.push_back({n, r, K, h, execute});
      }
    }
  }

  std::vector<std::size_t> jobs;  // cell index per job
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].execute) jobs.insert(jobs.end(), cfg.runs, c);
  }
  std::vector<RunResult> results(jobs.size());
  parallel_for(jobs.size(), thread_width(cfg.threads), [&](std::size_t j) {
    const Cell& cell = cells[jobs[j]];
    const std::uint64_t replicate = j % cfg.runs;
    RunConfig rc;
    rc.n = cell.n;
    rc.r = cell.r;
    rc.K = cell.K;
    rc.fitness = fitness;
    rc.seed = derive_seed(cfg.base_seed, cell.n, cell.r, cell.K, replicate);
    rc.max_iterations = cell.horizon;
    results[j] = run(rc);
  });

  SweepResult out;
  std::size_t offset = 0;
  for (const auto& cell : cells) {
    if (!cell.execute) {
      CellResult missing{cell.n, cell.r, cell.K};
      missing.missing = true;
      out.cells.push_back(missing);
      continue;
    }
    out.cells.push_back(aggregate_cell(
        cell.n, cell.r, cell.K, std::span<const RunResult>(results).subspan(offset, cfg.runs)));
    offset += cfg.runs;
  }
  return out;
}

/// K with the smallest mean iterations for (n, r); ties go to the smaller K.
/// nullopt unless there are at least three K cells, all complete and
/// uncensored.
inline std::optional<double> find_min_K(const SweepResult& sr, std::size_t n, std::size_t r) {
  std::vector<const CellResult*> cells;
  for (const auto& c : sr.cells) {
    if (c.n != n || c.r != r) continue;
    if (c.missing || c.success_rate < 1.0) return std::nullopt;
    cells.push_back(&c);
  }
  if (cells.size() < 3) return std::nullopt;
  const CellResult* best = cells.front();
  for (const auto* c : cells) {
    if (c->mean_iterations < best->mean_iterations ||
        (c->mean_iterations == best->mean_iterations && c->K < best->K)) {
      best = c;
    }
  }
  return best->K;
}

// ---------------------------------------------------------------------------
// CSV

inline constexpr const char* kCsvHeader =
    "n,r,K,runs,mean_iterations,stddev,success_rate,mean_evaluations";

/// 6 significant digits, locale independent.
inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Writes the header and one row per cell. Missing cells keep n, r, K and
/// leave the statistics empty.
inline void write_csv(const SweepResult& sr, std::ostream& os) {
  os << kCsvHeader << '\n';
  for (const auto& c : sr.cells) {
    os << c.n << ',' << c.r << ',' << format_real(c.K) << ',';
    if (c.missing) {
      os << ",,,,\n";
      continue;
    }
    os << c.runs << ',' << format_real(c.mean_iterations) << ',' << format_real(c.stddev) << ','
       << format_real(c.success_rate) << ',' << format_real(c.mean_evaluations) << '\n';
  }
}

inline std::string to_csv(const SweepResult& sr) {
  std::ostringstream os;
  write_csv(sr, os);
  return os.str();
}

/// Writes the CSV to `path` (binary mode, so line endings stay LF).
inline void emit_csv(const SweepResult& sr, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open CSV output", path);
  write_csv(sr, out);
  out.flush();
  if (!out) throw IoError("cannot write CSV output", path);
}

/// Reads a file produced by write_csv back into cells.
inline SweepResult parse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) throw ParameterError("unexpected CSV header");
  SweepResult sr;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 8) throw ParameterError("CSV row must have 8 fields: " + line);
    CellResult c;
    c.n = std::stoul(f[0]);
    c.r = std::stoul(f[1]);
    c.K = std::stod(f[2]);
    if (f[3].empty()) {
      c.missing = true;
    } else {
      c.runs = std::stoull(f[3]);
      c.mean_iterations = std::stod(f[4]);
      c.stddev = std::stod(f[5]);
      c.success_rate = std::stod(f[6]);
      c.mean_evaluations = std::stod(f[7]);
    }
    sr.cells.push_back(c);
  }
  return sr;
}

/// gnuplot data: one block per (n, r) with "K mean_iterations" lines,
/// blocks separated by two blank lines so `index` selects them.
inline void write_series(const SweepResult& sr, std::ostream& os) {
  std::vector<std::pair<std::size_t, std::size_t>> keys;
  for (const auto& c : sr.cells) {
    if (std::find(keys.begin(), keys.end(), std::pair{c.n, c.r}) == keys.end()) keys.emplace_back(c.n, c.r);
  }
  bool first = true;
  for (auto [n, r] : keys) {
    if (!first) os << "\n\n";
    first = false;
    os << "# n=" << n << " r=" << r << "\n# K mean_iterations\n";
    for (const auto& c : sr.cells) {
      if (c.n == n && c.r == r && !c.missing) {
        os << format_real(c.K) << ' ' << format_real(c.mean_iterations) << '\n';
      }
    }
  }
}

}  // namespace rcga
