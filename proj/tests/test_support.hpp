#pragma once

// Helpers shared by the test suites. Oracles here are written from the
// definitions, independently of the library code they check.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "rcga/model.hpp"

namespace rcga::testkit {

/// URBG that replays a fixed list of uniforms in [0,1). Each value u is
/// encoded so that uniform01() returns exactly u.
class RiggedRng {
 public:
  using result_type = std::uint64_t;
  explicit RiggedRng(std::vector<double> uniforms) : u_(std::move(uniforms)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    const double u = u_.at(next_++ % u_.size());
    return static_cast<result_type>(std::ldexp(u, 53)) << 11;
  }

  std::size_t consumed() const { return next_; }

 private:
  std::vector<double> u_;
  std::size_t next_ = 0;
};

/// A random row inside the borders for (n, r). Mixes spread-out rows with
/// sparse ones that sit exactly on the lower border in several entries.
template <class Gen>
std::vector<double> random_feasible_row(std::size_t n, std::size_t r, Gen& gen) {
  const Borders b = Borders::of(n, r);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::gamma_distribution<double> gamma(unit(gen) < 0.5 ? 0.2 : 1.0, 1.0);
  std::vector<double> w(r);
  double total = 0.0;
  for (auto& x : w) {
    x = unit(gen) < 0.25 ? 0.0 : gamma(gen);
    total += x;
  }
  if (total == 0.0) {
    w[0] = 1.0;
    total = 1.0;
  }
  const double free_mass = 1.0 - static_cast<double>(r) * b.lower;
  std::vector<double> row(r);
  for (std::size_t j = 0; j < r; ++j) row[j] = b.lower + free_mass * (w[j] / total);
  return row;
}

/// Direct evaluation of sum_{i=1}^{n} prod_{j=1}^{i} [x_{s(j)} = a_{s(j)}].
inline std::size_t brute_force_leading(const std::vector<std::uint32_t>& x,
                                       const std::vector<std::uint32_t>& a,
                                       const std::vector<std::size_t>& order) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::size_t prod = 1;
    for (std::size_t j = 0; j <= i; ++j) prod *= (x[order[j]] == a[order[j]]) ? 1 : 0;
    total += prod;
  }
  return total;
}

}  // namespace rcga::testkit
