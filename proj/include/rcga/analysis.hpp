#pragma once

// Closed-form bounds from the runtime analysis of the r-cGA, and Monte-Carlo
// experiments that hold simulated runs against them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "rcga/engine.hpp"
#include "rcga/error.hpp"
#include "rcga/parallel.hpp"
#include "rcga/rng.hpp"
#include "rcga/stats.hpp"

namespace rcga {

// ---------------------------------------------------------------------------
// Closed forms

/// Probability that a neutral frequency strays at least 1/(2r) from its
/// start within T steps: 2 exp(-K^2 / (8 T r^2)). Values above 1 are
/// vacuous but returned as computed.
inline double genetic_drift_bound(double K, double T, double r) noexcept {
  return 2.0 * std::exp(-(K * K) / (8.0 * T * r * r));
}

/// One-sided version for a position with weak preference for 0: bounds the
/// probability that p_{i,0} drops 1/(2r) below its start within T steps.
/// Same closed form as genetic_drift_bound.
inline double weak_preference_bound(double K, double T, double r) noexcept {
  return genetic_drift_bound(K, T, r);
}

/// Lower bound p(1-p) / (2 e^4 K) on the expected one-step change of p_{i,0}
/// while every frequency left of i is at least 1-2/n.
inline double drift_lower_bound(double p, double K) noexcept {
  const double e4 = std::exp(4.0);
  return p * (1.0 - p) / (2.0 * e4 * K);
}

/// Occupation probability bound for a process with additive drift `drift`
/// towards 0, step size at most `step`, self-loop probability at least
/// `self_loop`: Pr[X_t >= b] <= 2 exp(2d / (3c(1-p0)) * (1 - b/c)).
inline double occupation_bound(double drift, double step, double self_loop, double distance) {
  if (!(drift > 0.0) || !(step > 0.0) || self_loop < 0.0 || self_loop >= 1.0 || distance < 0.0) {
    throw ParameterError("occupation_bound needs d > 0, c > 0, p0 in [0,1), b >= 0");
  }
  return 2.0 * std::exp(2.0 * drift / (3.0 * step * (1.0 - self_loop)) * (1.0 - distance / step));
}

/// Hypothetical population size ceil(c n r^2 ln(n)^2 ln(r)).
inline std::uint64_t recommended_K(std::size_t n, std::size_t r, double c) {
  if (n < 2 || r < 2 || !(c > 0.0)) throw ParameterError("recommended_K needs n >= 2, r >= 2, c > 0");
  const double ln_n = std::log(static_cast<double>(n));
  const double rr = static_cast<double>(r);
  return static_cast<std::uint64_t>(
      std::ceil(c * static_cast<double>(n) * rr * rr * ln_n * ln_n * std::log(rr)));
}

// ---------------------------------------------------------------------------
// Concentration of neutral / weakly preferred frequencies

enum class DeviationEvent : std::uint8_t {
  /// Any tracked p_{i,j} moves at least 1/(2r) away from 1/r (two-sided).
  AnyFrequency,
  /// p_{pos,0} drops to 1/r - 1/(2r) or below (one-sided).
  ZeroFrequencyDrop,
};

struct ConcentrationReport {
  std::uint64_t trials = 0;
  std::uint64_t horizon = 0;
  std::uint64_t violation_count = 0;
  double bound = 0.0;

  double rate() const noexcept {
    return trials ? static_cast<double>(violation_count) / static_cast<double>(trials) : 0.0;
  }
  /// Bound plus three binomial standard deviations at the bound.
  double threshold() const noexcept {
    const double q = std::clamp(bound, 0.0, 1.0);
    return bound + 3.0 * std::sqrt(q * (1.0 - q) / static_cast<double>(trials));
  }
  bool passes() const noexcept { return rate() <= threshold(); }
};

struct ConcentrationSetup {
  std::size_t n = 10;
  std::size_t r = 2;
  double K = 100;
  std::uint64_t horizon = 1000;
  std::uint64_t trials = 100;
  std::uint64_t seed = 0;
  Fitness fitness = Fitness::constant();
  DeviationEvent event = DeviationEvent::AnyFrequency;
  std::size_t position = 0;  // used by ZeroFrequencyDrop
  std::size_t threads = 1;
};

namespace detail {

/// True if the run hits the deviation event within the horizon. The
/// matrix starts uniform, so only rows touched by an update can deviate.
inline bool deviates(const ConcentrationSetup& s, std::uint64_t seed) {
  Simulation<Rng> sim(s.n, s.r, s.K, s.fitness, Rng(seed));
  const double start = 1.0 / static_cast<double>(s.r);
  const double gap = 1.0 / (2.0 * static_cast<double>(s.r));
  for (std::uint64_t t = 0; t < s.horizon; ++t) {
    if (sim.step()) break;  // optimum sampled; the model is frozen from here
    const auto& fm = sim.matrix();
    const auto& pair = sim.last_pair();
    if (s.event == DeviationEvent::ZeroFrequencyDrop) {
      if (fm(s.position, 0) <= start - gap) return true;
      continue;
    }
    for (std::size_t i = 0; i < s.n; ++i) {
      if (pair.winner[i] == pair.loser[i]) continue;
      for (double p : fm.row(i)) {
        if (std::abs(p - start) >= gap) return true;
      }
    }
  }
  return false;
}

}  // namespace detail

/// Runs independent trials to the horizon and counts those hitting the
/// deviation event; reports the count next to the closed-form bound.
inline ConcentrationReport run_concentration_experiment(const ConcentrationSetup& s) {
  if (s.trials < 1) throw ParameterError("trials must be >= 1");
  if (s.position >= s.n) throw ParameterError("position out of range");

  std::vector<char> hit(s.trials, 0);
  parallel_for(s.trials, thread_width(s.threads), [&](std::size_t k) {
    hit[k] = detail::deviates(s, derive_seed(s.seed, s.n, s.r, s.K, k)) ? 1 : 0;
  });

  ConcentrationReport rep;
  rep.trials = s.trials;
  rep.horizon = s.horizon;
  rep.violation_count = static_cast<std::uint64_t>(std::count(hit.begin(), hit.end(), 1));
  rep.bound = s.horizon == 0 ? 0.0
                             : genetic_drift_bound(s.K, static_cast<double>(s.horizon),
                                                   static_cast<double>(s.r));
  return rep;
}

/// Neutral-position concentration: constant fitness, every frequency tracked.
inline ConcentrationReport run_neutral_concentration_experiment(
    std::size_t n, std::size_t r, double K, std::uint64_t T, std::uint64_t trials,
    std::uint64_t seed, std::size_t threads = 1) {
  ConcentrationSetup s;
  s.n = n;
  s.r = r;
  s.K = K;
  s.horizon = T;
  s.trials = trials;
  s.seed = seed;
  s.threads = threads;
  return run_concentration_experiment(s);
}

// ---------------------------------------------------------------------------
// Conditional drift of p_{i,0}

struct DriftEstimate {
  std::uint64_t sample_count = 0;
  double mean_delta = 0.0;
  double standard_error = 0.0;
  double mean_p = 0.0;  // mean p_{i,0} over the selected steps
  double bound = 0.0;   // drift_lower_bound(mean_p, K)
};

using StepPredicate = std::function<bool(const StepRecord&)>;

/// Selects steps meeting the drift lower bound's precondition at `pos`:
/// p_{j,0} >= 1-2/n for all j < pos and p_{pos,0} <= 1-1/n-1/K.
struct DriftPrecondition {
  std::size_t n;
  double K;
  std::size_t pos;

  bool operator()(const StepRecord& rec) const {
    const double nn = static_cast<double>(n);
    for (std::size_t j = 0; j < pos; ++j) {
      if (rec.p0_before[j] < 1.0 - 2.0 / nn) return false;
    }
    return rec.p0_before[pos] <= 1.0 - 1.0 / nn - 1.0 / K;
  }
};

/// Streams step records into a drift estimate for one position.
class DriftAccumulator {
 public:
  DriftAccumulator(std::size_t pos, double K) : pos_(pos), K_(K) {}

  void add(const StepRecord& rec) {
    delta_.add(rec.delta[pos_]);
    p_.add(rec.p0_before[pos_]);
  }

  void merge(const DriftAccumulator& o) {
    delta_.merge(o.delta_);
    p_.merge(o.p_);
  }

  std::optional<DriftEstimate> estimate() const {
    if (delta_.count() == 0) return std::nullopt;
    DriftEstimate e;
    e.sample_count = delta_.count();
    e.mean_delta = delta_.mean();
    e.standard_error = delta_.standard_error();
    e.mean_p = p_.mean();
    e.bound = drift_lower_bound(e.mean_p, K_);
    return e;
  }

 private:
  std::size_t pos_;
  double K_;
  RunningStats delta_;
  RunningStats p_;
};

/// Mean observed change of p_{pos,0} over the steps selected by
/// `predicate`. nullopt if no step was selected.
inline std::optional<DriftEstimate> estimate_conditional_drift(
    std::span<const StepRecord> traces, std::size_t pos, double K, const StepPredicate& predicate) {
  DriftAccumulator acc(pos, K);
  for (const auto& rec : traces) {
    if (pos < rec.delta.size() && predicate(rec)) acc.add(rec);
  }
  return acc.estimate();
}

/// Drift estimate for steps whose p_{pos,0} lies in [lo, hi). `bound` is
/// evaluated at the bin's smallest p(1-p), the conservative end.
struct DriftBin {
  double lo = 0.0;
  double hi = 0.0;
  std::optional<DriftEstimate> estimate;
  double bound = 0.0;

  /// Estimate not below the bound by more than `sigmas` standard errors.
  bool consistent(double sigmas = 3.0) const {
    return estimate && estimate->mean_delta >= bound - sigmas * estimate->standard_error;
  }
};

struct DriftSetup {
  std::size_t n = 20;
  std::size_t r = 3;
  double K = 500;
  std::size_t position = 0;
  std::uint64_t runs = 100;
  std::uint64_t seed = 0;
  std::uint64_t max_iterations = 1'000'000;  // per run
  double p_lo = 0.3;
  double p_hi = 0.7;
  double bin_width = 0.05;
  Fitness fitness = Fitness::leading_ones();
  std::size_t threads = 1;
};

struct DriftReport {
  std::vector<DriftBin> bins;
  std::optional<DriftEstimate> overall;  // all bins pooled
};

/// Simulates `runs` runs and estimates the drift of p_{pos,0} over the steps
/// meeting DriftPrecondition, binned by p_{pos,0}. A run stops once
/// position `pos` has reached the upper border, or at the optimum.
inline DriftReport run_drift_experiment(const DriftSetup& s) {
  if (s.position >= s.n) throw ParameterError("position out of range");
  if (!(s.bin_width > 0.0) || !(s.p_hi > s.p_lo)) throw ParameterError("bad drift bins");

  const auto bin_count =
      static_cast<std::size_t>(std::llround(std::ceil((s.p_hi - s.p_lo) / s.bin_width - 1e-9)));
  const DriftPrecondition pre{s.n, s.K, s.position};

  struct Partial {
    std::vector<DriftAccumulator> bins;
  };
  std::vector<Partial> partial(s.runs);
  parallel_for(s.runs, thread_width(s.threads), [&](std::size_t k) {
    auto& bins = partial[k].bins;
    bins.assign(bin_count, DriftAccumulator(s.position, s.K));
    Simulation<Rng> sim(s.n, s.r, s.K, s.fitness, Rng(derive_seed(s.seed, s.n, s.r, s.K, k)));
    StepRecord rec;
    for (std::uint64_t t = 0; t < s.max_iterations; ++t) {
      if (sim.step(&rec)) break;
      if (pre(rec)) {
        const double p = rec.p0_before[s.position];
        if (p >= s.p_lo && p < s.p_hi) {
          const auto b = std::min(bin_count - 1,
                                  static_cast<std::size_t>((p - s.p_lo) / s.bin_width));
          bins[b].add(rec);
        }
      }
      if (sim.critical_position() > s.position) break;
    }
  });

  DriftReport report;
  DriftAccumulator pooled(s.position, s.K);
  for (std::size_t b = 0; b < bin_count; ++b) {
    DriftAccumulator acc(s.position, s.K);
    for (const auto& part : partial) acc.merge(part.bins[b]);
    pooled.merge(acc);

    DriftBin bin;
    bin.lo = s.p_lo + static_cast<double>(b) * s.bin_width;
    bin.hi = std::min(s.p_hi, bin.lo + s.bin_width);
    const double worst_p = std::abs(bin.lo - 0.5) > std::abs(bin.hi - 0.5) ? bin.lo : bin.hi;
    bin.bound = drift_lower_bound(worst_p, s.K);
    bin.estimate = acc.estimate();
    report.bins.push_back(bin);
  }
  report.overall = pooled.estimate();
  return report;
}

// ---------------------------------------------------------------------------
// Martingale property of neutral frequencies

/// Mean one-step change of every p_{i,j} under constant fitness.
struct MartingaleReport {
  std::uint64_t steps = 0;
  double K = 0.0;
  std::size_t n = 0;
  std::size_t r = 0;
  std::vector<double> mean_change;  // row-major n x r

  double max_abs_mean() const {
    double m = 0.0;
    for (double v : mean_change) m = std::max(m, std::abs(v));
    return m;
  }
  /// 4 (1/K) / sqrt(steps).
  double tolerance() const { return 4.0 / (K * std::sqrt(static_cast<double>(steps))); }
  bool passes() const { return max_abs_mean() <= tolerance(); }
};

inline MartingaleReport run_martingale_check(std::size_t n, std::size_t r, double K,
                                             std::uint64_t steps, std::uint64_t seed) {
  if (steps < 1) throw ParameterError("steps must be >= 1");
  Simulation<Rng> sim(n, r, K, Fitness::constant(), Rng(seed));
  std::vector<CompensatedSum> sums(n * r);
  std::vector<double> before(sim.matrix().data().begin(), sim.matrix().data().end());
  for (std::uint64_t t = 0; t < steps; ++t) {
    sim.step();
    const auto now = sim.matrix().data();
    for (std::size_t k = 0; k < now.size(); ++k) {
      sums[k].add(now[k] - before[k]);
      before[k] = now[k];
    }
  }
  MartingaleReport rep;
  rep.steps = steps;
  rep.K = K;
  rep.n = n;
  rep.r = r;
  rep.mean_change.reserve(n * r);
  for (const auto& s : sums) rep.mean_change.push_back(s.value() / static_cast<double>(steps));
  return rep;
}

}  // namespace rcga
