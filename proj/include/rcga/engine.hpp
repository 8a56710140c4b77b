#pragma once

// The r-cGA main loop: sample two individuals, let the fitter one win, move
// 1/K of mass towards it, restrict. Also classifies each position's step
// (biased / random walk / inactive) and tracks the critical position.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "rcga/error.hpp"
#include "rcga/fitness.hpp"
#include "rcga/model.hpp"
#include "rcga/rng.hpp"

namespace rcga {

enum class StepKind : std::uint8_t { Inactive = 0, Biased = 1, RandomWalk = 2 };

enum class TraceLevel : std::uint8_t { None, Summary, Full };

inline const char* to_string(StepKind k) noexcept {
  switch (k) {
    case StepKind::Inactive: return "inactive";
    case StepKind::Biased: return "biased";
    case StepKind::RandomWalk: return "random-walk";
  }
  return "?";
}

/// Number of leading positions where both x and y are 0.
inline std::size_t common_zero_prefix(const Individual& x, const Individual& y) noexcept {
  const std::size_t n = std::min(x.size(), y.size());
  std::size_t k = 0;
  while (k < n && x[k] == 0 && y[k] == 0) ++k;
  return k;
}

/// Kind of step position `pos` (0-based) takes when x and y are compared.
/// Inactive if x and y agree there; biased if every position to its left is
/// 0 in both; random walk otherwise. Position 0 is never a random walk.
inline StepKind classify_step(const Individual& x, const Individual& y, std::size_t pos) {
  if (pos >= x.size() || pos >= y.size()) throw ParameterError("position out of range");
  if (x[pos] == y[pos]) return StepKind::Inactive;
  for (std::size_t j = 0; j < pos; ++j) {
    if (x[j] != 0 || y[j] != 0) return StepKind::RandomWalk;
  }
  return StepKind::Biased;
}

/// classify_step for all positions at once, O(n).
inline void classify_all(const Individual& x, const Individual& y, std::vector<StepKind>& out) {
  const std::size_t z = common_zero_prefix(x, y);
  out.resize(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == y[i]) {
      out[i] = StepKind::Inactive;
    } else {
      out[i] = i <= z ? StepKind::Biased : StepKind::RandomWalk;
    }
  }
}

/// Tolerance for "p_{i,0} has reached the upper border".
inline constexpr double kBorderTolerance = 1e-12;

/// Smallest 0-based position whose flag is unset; flags.size() if all set.
inline std::size_t critical_position(std::span<const char> reached_border) noexcept {
  std::size_t m = 0;
  while (m < reached_border.size() && reached_border[m]) ++m;
  return m;
}

/// Tracks, per position, whether p_{i,0} has ever reached the upper border,
/// and from that the critical position m_t (0-based; n once every position
/// has reached the border). m_t never decreases.
class CriticalTracker {
 public:
  explicit CriticalTracker(std::size_t n = 0) : reached_(n, 0) {}

  void observe_row(const FrequencyMatrix& fm, std::size_t i) {
    if (!reached_[i] && fm(i, 0) >= fm.borders().upper - kBorderTolerance) reached_[i] = 1;
  }

  /// Refreshes every flag from the current matrix and returns m_t.
  std::size_t update(const FrequencyMatrix& fm) {
    for (std::size_t i = 0; i < fm.n(); ++i) observe_row(fm, i);
    return advance();
  }

  std::size_t advance() noexcept {
    while (m_ < reached_.size() && reached_[m_]) ++m_;
    return m_;
  }

  std::size_t position() const noexcept { return m_; }
  std::span<const char> flags() const noexcept { return reached_; }

 private:
  std::vector<char> reached_;
  std::size_t m_ = 0;
};

/// Two sampled individuals after the comparison: `winner` is the x of the
/// algorithm (after a possible swap), `loser` is y.
struct SampledPair {
  Individual winner;
  Individual loser;
  std::size_t winner_fitness = 0;
  std::size_t loser_fitness = 0;
  bool swapped = false;
};

/// Samples x then y, and swaps them only if f(x) < f(y). Ties keep x.
template <class Urbg>
inline void sample_pair(const FrequencyMatrix& fm, const Fitness& f, Urbg& gen, SampledPair& out) {
  sample_into(fm, gen, out.winner);
  sample_into(fm, gen, out.loser);
  out.winner_fitness = f(out.winner);
  out.loser_fitness = f(out.loser);
  out.swapped = out.winner_fitness < out.loser_fitness;
  if (out.swapped) {
    std::swap(out.winner, out.loser);
    std::swap(out.winner_fitness, out.loser_fitness);
  }
}

/// Per-iteration trace entry.
struct StepRecord {
  std::uint64_t iteration = 0;  // 1-based
  Individual x;                 // winner
  Individual y;                 // loser
  bool swapped = false;
  std::vector<StepKind> kinds;
  std::vector<double> p0_before;  // p_{i,0} before the update
  std::vector<double> raw_delta;  // change of p_{i,0} before restriction
  std::vector<double> delta;      // change of p_{i,0} after restriction
  std::size_t critical_position = 0;
  std::vector<double> snapshot;   // full matrix after the step (Full trace only)
};

/// Applies the update for an already compared pair and restricts the
/// touched rows. Fills `record` if given (everything except the iteration
/// number, critical position and snapshot).
inline void apply_step(FrequencyMatrix& fm, const SampledPair& pair, double K, UpdateDelta& d,
                       StepRecord* record = nullptr) {
  if (record) {
    record->x = pair.winner;
    record->y = pair.loser;
    record->swapped = pair.swapped;
    classify_all(pair.winner, pair.loser, record->kinds);
    record->p0_before.resize(fm.n());
    for (std::size_t i = 0; i < fm.n(); ++i) record->p0_before[i] = fm(i, 0);
  }
  apply_update(fm, pair.winner, pair.loser, K, d);
  if (record) {
    record->raw_delta.resize(fm.n());
    for (std::size_t i = 0; i < fm.n(); ++i) record->raw_delta[i] = fm(i, 0) - record->p0_before[i];
  }
  restrict_touched(fm, d);
  if (record) {
    record->delta.resize(fm.n());
    for (std::size_t i = 0; i < fm.n(); ++i) record->delta[i] = fm(i, 0) - record->p0_before[i];
  }
}

inline UpdateDelta apply_step(FrequencyMatrix& fm, const SampledPair& pair, double K,
                              StepRecord* record = nullptr) {
  UpdateDelta d;
  apply_step(fm, pair, K, d, record);
  return d;
}

/// One full iteration on a bare matrix: sample, compare, update, restrict.
template <class Urbg>
inline StepRecord step(FrequencyMatrix& fm, const Fitness& f, double K, Urbg& gen) {
  SampledPair pair;
  sample_pair(fm, f, gen, pair);
  StepRecord rec;
  apply_step(fm, pair, K, &rec);
  return rec;
}

struct RunConfig {
  std::size_t n = 0;
  std::size_t r = 2;
  double K = 1.0;
  Fitness fitness;
  std::uint64_t seed = 0;
  std::uint64_t max_iterations = 1;
  TraceLevel trace = TraceLevel::None;

  void validate() const {
    if (n < 2) throw ParameterError("n must be >= 2");
    if (r < 2) throw ParameterError("r must be >= 2");
    if (!(K > 0.0) || !std::isfinite(K)) throw ParameterError("K must be positive and finite");
    if (max_iterations < 1) throw ParameterError("max_iterations must be >= 1");
    fitness.validate(n, r);
  }
};

using StepKindCounts = std::array<std::uint64_t, 3>;  // indexed by StepKind

struct RunResult {
  std::uint64_t iterations = 0;
  bool reached_optimum = false;  // false: horizon exhausted
  std::uint64_t fitness_evaluations = 0;
  double min_p0 = 1.0;  // smallest p_{i,0} ever seen, over all i and t
  std::vector<std::pair<std::uint64_t, std::size_t>> critical_history;  // (t, m_t) at changes
  StepKindCounts kind_counts{};
  std::optional<FrequencyMatrix> final_matrix;
  std::vector<StepRecord> trace;
};

/// Stateful r-cGA run. Each call to `step` is one iteration of the loop.
template <class Urbg = Rng>
class Simulation {
 public:
  Simulation(std::size_t n, std::size_t r, double K, Fitness fitness, Urbg gen)
      : fm_(n, r), fitness_(std::move(fitness)), K_(K), gen_(std::move(gen)), tracker_(n),
        optimum_(fitness_.optimum(n)) {
    if (!(K > 0.0)) throw ParameterError("K must be positive");
    fitness_.validate(n, r);
    min_p0_ = fm_(0, 0);
    tracker_.update(fm_);
  }

  /// Runs one iteration. Returns true if either sample is optimal; in that
  /// case the model is not updated. `record`, if given, is filled for a
  /// regular (non-terminal) iteration.
  bool step(StepRecord* record = nullptr) {
    ++t_;
    sample_pair(fm_, fitness_, gen_, pair_);
    if (optimum_ && pair_.winner_fitness == *optimum_) return true;

    apply_step(fm_, pair_, K_, delta_, record);
    for (std::size_t i = 0; i < fm_.n(); ++i) {
      if (!delta_.rows[i]) continue;
      min_p0_ = std::min(min_p0_, fm_(i, 0));
      tracker_.observe_row(fm_, i);
    }
    tracker_.advance();
    if (record) {
      record->iteration = t_;
      record->critical_position = tracker_.position();
    }
    return false;
  }

  const FrequencyMatrix& matrix() const noexcept { return fm_; }
  FrequencyMatrix& matrix() noexcept { return fm_; }
  const SampledPair& last_pair() const noexcept { return pair_; }
  std::uint64_t iteration() const noexcept { return t_; }
  std::size_t critical_position() const noexcept { return tracker_.position(); }
  double min_p0() const noexcept { return min_p0_; }
  double K() const noexcept { return K_; }

  /// Re-reads border flags after the matrix was edited from outside.
  void resync() {
    for (std::size_t i = 0; i < fm_.n(); ++i) min_p0_ = std::min(min_p0_, fm_(i, 0));
    tracker_.update(fm_);
  }

 private:
  FrequencyMatrix fm_;
  Fitness fitness_;
  double K_;
  Urbg gen_;
  CriticalTracker tracker_;
  std::optional<std::size_t> optimum_;
  SampledPair pair_;
  UpdateDelta delta_;
  std::uint64_t t_ = 0;
  double min_p0_ = 1.0;
};

/// Runs until an optimal individual is sampled or the horizon is reached.
/// A pure function of the config (including its seed).
inline RunResult run(const RunConfig& config) {
  config.validate();
  Simulation<Rng> sim(config.n, config.r, config.K, config.fitness, Rng(config.seed));

  RunResult result;
  const bool summary = config.trace != TraceLevel::None;
  const bool full = config.trace == TraceLevel::Full;
  if (summary) result.critical_history.emplace_back(0, sim.critical_position());

  StepRecord rec;
  while (sim.iteration() < config.max_iterations) {
    const bool found = sim.step(summary ? &rec : nullptr);
    if (found) {
      result.reached_optimum = true;
      break;
    }
    if (!summary) continue;
    for (StepKind k : rec.kinds) ++result.kind_counts[static_cast<std::size_t>(k)];
    if (rec.critical_position != result.critical_history.back().second) {
      result.critical_history.emplace_back(sim.iteration(), rec.critical_position);
    }
    if (full) {
      const auto data = sim.matrix().data();
      rec.snapshot.assign(data.begin(), data.end());
      result.trace.push_back(rec);
    }
  }

  result.iterations = sim.iteration();
  result.fitness_evaluations = 2 * result.iterations;
  result.min_p0 = sim.min_p0();
  if (summary) result.final_matrix = sim.matrix();
  return result;
}

}  // namespace rcga
