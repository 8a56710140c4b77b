#pragma once

// Probabilistic model of the multi-valued compact GA: an n x r matrix of
// sampling frequencies, categorical sampling from it, the +-1/K update and
// the border restriction that keeps every row a distribution inside
// [1/((r-1)n), 1-1/n].

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcga/error.hpp"
#include "rcga/rng.hpp"
#include "rcga/stats.hpp"

namespace rcga {

using Value = std::uint32_t;

/// A point of {0,...,r-1}^n.
class Individual {
 public:
  Individual() = default;
  explicit Individual(std::size_t n, Value fill = 0) : values_(n, fill) {}
  explicit Individual(std::vector<Value> values) : values_(std::move(values)) {}
  Individual(std::initializer_list<Value> values) : values_(values) {}

  std::size_t size() const noexcept { return values_.size(); }
  Value operator[](std::size_t i) const { return values_[i]; }
  Value& operator[](std::size_t i) { return values_[i]; }

  std::span<const Value> values() const noexcept { return values_; }
  std::span<Value> values() noexcept { return values_; }

  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  friend bool operator==(const Individual&, const Individual&) = default;

 private:
  std::vector<Value> values_;
};

/// Frequency borders for a given (n, r).
struct Borders {
  double lower;
  double upper;

  static Borders of(std::size_t n, std::size_t r) noexcept {
    return {1.0 / (static_cast<double>(r - 1) * static_cast<double>(n)),
            1.0 - 1.0 / static_cast<double>(n)};
  }
};

/// Largest change the restriction may apply to an entry that was neither at
/// a border nor clamped: 1/((n-1)(r-1)).
inline double correction_bound(std::size_t n, std::size_t r) noexcept {
  return 1.0 / (static_cast<double>(n - 1) * static_cast<double>(r - 1));
}

namespace detail {

inline double row_sum(std::span<const double> xs) noexcept {
  CompensatedSum sum;
  for (double x : xs) sum.add(x);
  return sum.value();
}

}  // namespace detail

/// Brings a row back inside the borders while keeping it a distribution.
///
/// Out-of-border entries are clamped to the border they violated. The
/// resulting surplus (or deficit) is spread in equal shares over the
/// remaining entries, each capped by the room it has left before hitting a
/// border; capped entries drop out and the rest is shared again. This gives
/// the smallest possible largest correction among the unclamped entries.
/// A final residual below rounding level is folded into the entry with the
/// most room so that the row sum stays within 1e-12 of one over long runs.
///
/// Returns true if the row was modified.
inline bool restrict_row(std::span<double> row, const Borders& b) {
  const std::size_t r = row.size();

  // Fast path: a plain sum is accurate to a few ulps for these row sizes.
  constexpr double kResidual = 1e-13;
  bool inside = true;
  double plain = 0.0;
  for (double v : row) {
    inside &= v >= b.lower && v <= b.upper;
    plain += v;
  }
  if (inside && std::abs(plain - 1.0) <= kResidual) return false;

  bool changed = false;
  std::array<char, 32> local;
  std::vector<char> heap;
  char* movable = local.data();
  if (r > local.size()) {
    heap.resize(r);
    movable = heap.data();
  }
  std::fill_n(movable, r, char{1});
  for (std::size_t j = 0; j < r; ++j) {
    if (row[j] < b.lower) {
      row[j] = b.lower;
      movable[j] = 0;
      changed = true;
    } else if (row[j] > b.upper) {
      row[j] = b.upper;
      movable[j] = 0;
      changed = true;
    }
  }

  double excess = detail::row_sum(row) - 1.0;

  auto room = [&](std::size_t j, bool removing) {
    return removing ? row[j] - b.lower : b.upper - row[j];
  };

  for (std::size_t pass = 0; pass < r && excess != 0.0; ++pass) {
    const bool removing = excess > 0.0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < r; ++j) {
      if (movable[j] && room(j, removing) > 0.0) ++count;
    }
    if (count == 0) break;

    const double share = std::abs(excess) / static_cast<double>(count);
    bool saturated = false;
    for (std::size_t j = 0; j < r; ++j) {
      if (!movable[j]) continue;
      const double avail = room(j, removing);
      if (avail <= 0.0) continue;
      if (avail <= share) {
        row[j] = removing ? b.lower : b.upper;
        movable[j] = 0;
        saturated = true;
      } else {
        row[j] += removing ? -share : share;
      }
    }
    changed = true;
    excess = detail::row_sum(row) - 1.0;
    if (!saturated) break;
  }

  // Rounding residual: fold into the entry with most room in that direction,
  // keeping clamped entries exactly on their border when possible.
  if (excess != 0.0) {
    const bool removing = excess > 0.0;
    std::size_t best = r;
    double best_room = 0.0;
    for (int any = 0; any < 2 && best == r; ++any) {
      for (std::size_t j = 0; j < r; ++j) {
        if (!any && !movable[j]) continue;
        const double avail = room(j, removing);
        if (avail > best_room) {
          best_room = avail;
          best = j;
        }
      }
    }
    if (best < r && best_room >= std::abs(excess)) {
      row[best] -= excess;
      changed = true;
    }
  }
  return changed;
}

inline bool restrict_row(std::span<double> row, std::size_t n) {
  return restrict_row(row, Borders::of(n, row.size()));
}

/// The n x r frequency matrix; the whole state of the algorithm.
class FrequencyMatrix {
 public:
  /// Uniform matrix, every entry 1/r.
  /// Throws ParameterError for n = 0 or r < 2, ConfigurationError for n = 1
  /// (the borders [1/(r-1), 0] are empty).
  FrequencyMatrix(std::size_t n, std::size_t r) : n_(n), r_(r) {
    if (n == 0) throw ParameterError("frequency matrix needs n >= 1");
    if (r < 2) throw ParameterError("frequency matrix needs r >= 2");
    if (n < 2) {
      throw ConfigurationError(
          "frequency borders [1/((r-1)n), 1-1/n] are empty for n = 1");
    }
    p_.assign(n * r, 1.0 / static_cast<double>(r));
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t r() const noexcept { return r_; }
  Borders borders() const noexcept { return Borders::of(n_, r_); }

  double operator()(std::size_t i, std::size_t j) const { return p_[i * r_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return p_[i * r_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(p_).subspan(i * r_, r_);
  }
  std::span<double> row(std::size_t i) {
    return std::span<double>(p_).subspan(i * r_, r_);
  }

  std::span<const double> data() const noexcept { return p_; }

  /// Replaces one row (tests and analysis set up specific states this way).
  void set_row(std::size_t i, std::span<const double> values) {
    if (values.size() != r_) throw ParameterError("row length must equal r");
    std::copy(values.begin(), values.end(), row(i).begin());
  }

  friend bool operator==(const FrequencyMatrix&, const FrequencyMatrix&) = default;

 private:
  std::size_t n_;
  std::size_t r_;
  std::vector<double> p_;
};

/// Draws one value for row i by inverse CDF; one uniform per call.
template <class Urbg>
inline Value sample_value(std::span<const double> row, Urbg& gen) {
  const double u = uniform01(gen);
  // Counts the prefix sums not exceeding u; branch-free since u is random.
  double acc = 0.0;
  Value v = 0;
  const std::size_t last = row.size() - 1;
  for (std::size_t j = 0; j < last; ++j) {
    acc += row[j];
    v += static_cast<Value>(u >= acc);
  }
  return v;
}

/// Fills `out` with a fresh sample, one draw per position, left to right.
template <class Urbg>
inline void sample_into(const FrequencyMatrix& fm, Urbg& gen, Individual& out) {
  const std::size_t n = fm.n(), r = fm.r();
  if (out.size() != n) out = Individual(n);
  const double* p = fm.data().data();
  for (std::size_t i = 0; i < n; ++i, p += r) out[i] = sample_value(std::span<const double>(p, r), gen);
}

template <class Urbg>
inline Individual sample_individual(const FrequencyMatrix& fm, Urbg& gen) {
  Individual x(fm.n());
  sample_into(fm, gen, x);
  return x;
}

/// Per-row record of one raw update: which value gained 1/K and which lost it.
struct RowDelta {
  Value increased;
  Value decreased;
};

struct UpdateDelta {
  double magnitude = 0.0;                     // 1/K
  std::vector<std::optional<RowDelta>> rows;  // nullopt: row untouched

  std::size_t touched() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(rows.begin(), rows.end(), [](const auto& d) { return d.has_value(); }));
  }
};

/// Moves 1/K of mass towards the winner in every row where winner and loser
/// differ. The border restriction is not applied here.
/// `delta` is overwritten; its storage is reused across calls.
inline void apply_update(FrequencyMatrix& fm, const Individual& winner, const Individual& loser,
                         double K, UpdateDelta& delta) {
  if (winner.size() != fm.n() || loser.size() != fm.n()) {
    throw ParameterError("winner/loser length must equal n");
  }
  if (!(K > 0.0)) throw ParameterError("K must be positive");

  delta.magnitude = 1.0 / K;
  delta.rows.assign(fm.n(), std::nullopt);
  for (std::size_t i = 0; i < fm.n(); ++i) {
    const Value w = winner[i];
    const Value l = loser[i];
    if (w == l) continue;
    if (w >= fm.r() || l >= fm.r()) throw ParameterError("individual value out of range");
    fm(i, w) += delta.magnitude;
    fm(i, l) -= delta.magnitude;
    delta.rows[i] = RowDelta{w, l};
  }
}

inline UpdateDelta apply_update(FrequencyMatrix& fm, const Individual& winner,
                                const Individual& loser, double K) {
  UpdateDelta delta;
  apply_update(fm, winner, loser, K, delta);
  return delta;
}

/// Restricts every row the update touched.
inline void restrict_touched(FrequencyMatrix& fm, const UpdateDelta& delta) {
  const Borders b = fm.borders();
  for (std::size_t i = 0; i < delta.rows.size(); ++i) {
    if (delta.rows[i]) restrict_row(fm.row(i), b);
  }
}

}  // namespace rcga
