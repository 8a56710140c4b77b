#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "rcga/model.hpp"
#include "rcga/rng.hpp"
#include "test_support.hpp"

using namespace rcga;

namespace {

double row_sum(std::span<const double> row) {
  return std::accumulate(row.begin(), row.end(), 0.0);
}

}  // namespace

TEST(FrequencyMatrix, StartsUniform) {
  FrequencyMatrix fm(3, 4);
  EXPECT_EQ(fm.n(), 3u);
  EXPECT_EQ(fm.r(), 4u);
  for (double p : fm.data()) EXPECT_EQ(p, 0.25);
}

TEST(FrequencyMatrix, LargeInstanceRowsSumToOne) {
  FrequencyMatrix fm(500, 6);
  for (std::size_t i = 0; i < fm.n(); ++i) {
    for (double p : fm.row(i)) EXPECT_EQ(p, 1.0 / 6.0);
    EXPECT_NEAR(row_sum(fm.row(i)), 1.0, 1e-12);
  }
}

TEST(FrequencyMatrix, RejectsBadParameters) {
  EXPECT_THROW(FrequencyMatrix(0, 3), ParameterError);
  EXPECT_THROW(FrequencyMatrix(5, 1), ParameterError);
  EXPECT_THROW(FrequencyMatrix(5, 0), ParameterError);
  // n = 1: borders [1/(r-1), 0] are empty.
  EXPECT_THROW(FrequencyMatrix(1, 2), ConfigurationError);
  EXPECT_NO_THROW(FrequencyMatrix(2, 2));
}

TEST(Sampling, SameSeedSameIndividual) {
  FrequencyMatrix fm(50, 5);
  Rng a(42), b(42);
  EXPECT_EQ(sample_individual(fm, a), sample_individual(fm, b));
}

TEST(Sampling, OneDrawPerPosition) {
  FrequencyMatrix fm(7, 3);
  testkit::RiggedRng gen({0.1, 0.5, 0.9});
  (void)sample_individual(fm, gen);
  EXPECT_EQ(gen.consumed(), 7u);
}

TEST(Sampling, BorderDominatedRowMostlyZero) {
  const std::size_t n = 20;
  FrequencyMatrix fm(n, 3);
  const Borders b = fm.borders();
  const std::vector<double> row{b.upper, 1.0 - b.upper - b.lower, b.lower};
  fm.set_row(0, row);
  Rng gen(7);
  const int draws = 100'000;
  int zeros = 0;
  for (int k = 0; k < draws; ++k) zeros += sample_value(fm.row(0), gen) == 0;
  const double p = b.upper;
  const double sigma = std::sqrt(p * (1 - p) / draws);
  EXPECT_GE(static_cast<double>(zeros) / draws, p - 4 * sigma);
}

TEST(Sampling, UniformRowWithinFourSigma) {
  const std::size_t r = 5;
  FrequencyMatrix fm(10, r);
  Rng gen(2024);
  const int draws = 100'000;
  std::vector<int> counts(r, 0);
  for (int k = 0; k < draws; ++k) ++counts[sample_value(fm.row(3), gen)];
  const double p = 1.0 / r;
  const double sigma = std::sqrt(p * (1 - p) / draws);
  for (int c : counts) EXPECT_NEAR(static_cast<double>(c) / draws, p, 4 * sigma);
}

TEST(Sampling, ChiSquareDoesNotRejectSkewedRow) {
  const std::vector<double> row{0.05, 0.4, 0.25, 0.2, 0.1};
  Rng gen(99);
  const int draws = 100'000;
  std::vector<int> counts(row.size(), 0);
  for (int k = 0; k < draws; ++k) ++counts[sample_value(std::span<const double>(row), gen)];
  double chi2 = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) {
    const double expected = row[j] * draws;
    chi2 += (counts[j] - expected) * (counts[j] - expected) / expected;
  }
  boost::math::chi_squared dist(static_cast<double>(row.size() - 1));
  EXPECT_LT(chi2, boost::math::quantile(boost::math::complement(dist, 1e-6)));
}

TEST(ApplyUpdate, MovesOneOverKTowardWinner) {
  FrequencyMatrix fm(2, 3);
  const double third = 1.0 / 3.0;
  const Individual w{0, 1};
  const Individual l{2, 1};
  const auto d = apply_update(fm, w, l, 10.0);
  EXPECT_DOUBLE_EQ(fm(0, 0), third + 0.1);
  EXPECT_DOUBLE_EQ(fm(0, 1), third);
  EXPECT_DOUBLE_EQ(fm(0, 2), third - 0.1);
  ASSERT_TRUE(d.rows[0]);
  EXPECT_EQ(d.rows[0]->increased, 0u);
  EXPECT_EQ(d.rows[0]->decreased, 2u);
  EXPECT_FALSE(d.rows[1]);
  EXPECT_EQ(d.magnitude, 0.1);
}

TEST(ApplyUpdate, IdenticalIndividualsAreNoOp) {
  FrequencyMatrix fm(4, 3);
  const FrequencyMatrix before = fm;
  const Individual x{0, 2, 1, 1};
  const auto d = apply_update(fm, x, x, 7.0);
  EXPECT_EQ(fm, before);
  EXPECT_EQ(d.touched(), 0u);
}

TEST(ApplyUpdate, BinaryExample) {
  FrequencyMatrix fm(2, 2);
  apply_update(fm, Individual{0, 1}, Individual{1, 1}, 4.0);
  EXPECT_DOUBLE_EQ(fm(0, 0), 0.75);
  EXPECT_DOUBLE_EQ(fm(0, 1), 0.25);
  EXPECT_DOUBLE_EQ(fm(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(fm(1, 1), 0.5);
}

TEST(ApplyUpdate, RejectsLengthMismatch) {
  FrequencyMatrix fm(3, 2);
  EXPECT_THROW(apply_update(fm, Individual{0, 1}, Individual{0, 1, 1}, 4.0), ParameterError);
  EXPECT_THROW(apply_update(fm, Individual{0, 1, 0}, Individual{0, 1, 1}, 0.0), ParameterError);
}

TEST(RestrictRow, FeasibleRowUnchanged) {
  std::vector<double> row{0.2, 0.3, 0.5};
  const auto before = row;
  EXPECT_FALSE(restrict_row(row, 10));
  EXPECT_EQ(row, before);
}

TEST(RestrictRow, BinaryRowForcedToBorders) {
  // (0.95, 0.05) + 1/10 towards value 0, n = 10: borders are [0.1, 0.9].
  std::vector<double> row{0.95 + 0.1, 0.05 - 0.1};
  restrict_row(row, 10);
  EXPECT_NEAR(row[0], 0.9, 1e-15);
  EXPECT_NEAR(row[1], 0.1, 1e-15);
}

TEST(RestrictRow, ClampsAndRedistributes) {
  // n = 10, r = 3: borders [0.05, 0.9]. Both the 0.92 and the 0.02 are out.
  std::vector<double> raw{0.92, 0.06, 0.02};
  auto row = raw;
  restrict_row(row, 10);
  const Borders b = Borders::of(10, 3);
  EXPECT_NEAR(row_sum(row), 1.0, 1e-12);
  for (double p : row) {
    EXPECT_GE(p, b.lower - 1e-15);
    EXPECT_LE(p, b.upper + 1e-15);
  }
  EXPECT_DOUBLE_EQ(row[0], 0.9);
  EXPECT_DOUBLE_EQ(row[2], 0.05);
  EXPECT_LE(std::abs(row[1] - raw[1]), correction_bound(10, 3));
}

TEST(RestrictRow, DeficitSharedEquallyBetweenInteriorEntries) {
  // n = 10, r = 4: borders [1/30, 0.9]. Entry 0 was at the lower border and
  // lost 0.05; clamping it back creates 0.05 of excess, 1/60 from each other.
  const double lower = 1.0 / 30.0;
  const double rest = 1.0 - lower - 0.45 - 0.3;
  std::vector<double> row{lower - 0.05, 0.45 + 0.05, 0.3, rest};
  const auto raw = row;
  restrict_row(row, 10);
  EXPECT_DOUBLE_EQ(row[0], lower);
  for (int j = 1; j < 4; ++j) EXPECT_NEAR(row[j], raw[j] - 0.05 / 3, 1e-15);
  EXPECT_NEAR(row_sum(row), 1.0, 1e-15);
}

// Random feasible rows hit by one +-1/K step, in the regime
// K >= (n-1)(r-1) where a single step can never need more correction than
// the bound allows.
TEST(RestrictRow, PropertiesOnRandomSteps) {
  std::mt19937_64 gen(5);
  std::uniform_int_distribution<std::size_t> pick_n(2, 50), pick_r(2, 10);
  for (int trial = 0; trial < 10'000; ++trial) {
    const std::size_t n = pick_n(gen);
    const std::size_t r = pick_r(gen);
    const double min_K = static_cast<double>((n - 1) * (r - 1));
    const double K = std::uniform_real_distribution<double>(std::max(10.0, min_K), 1e4)(gen);
    auto raw = testkit::random_feasible_row(n, r, gen);
    std::uniform_int_distribution<std::size_t> pick_j(0, r - 1);
    const std::size_t up = pick_j(gen);
    std::size_t down = pick_j(gen);
    while (down == up) down = pick_j(gen);
    raw[up] += 1.0 / K;
    raw[down] -= 1.0 / K;

    auto row = raw;
    restrict_row(row, n);
    const Borders b = Borders::of(n, r);
    ASSERT_NEAR(row_sum(row), 1.0, 1e-12);
    for (std::size_t j = 0; j < r; ++j) {
      ASSERT_GE(row[j], b.lower - 1e-15);
      ASSERT_LE(row[j], b.upper + 1e-15);
      const bool was_inside = raw[j] >= b.lower && raw[j] <= b.upper;
      if (was_inside) {
        ASSERT_LE(std::abs(row[j] - raw[j]), correction_bound(n, r) + 1e-15)
            << "n=" << n << " r=" << r << " K=" << K;
      }
    }
  }
}

TEST(ApplyUpdate, LocalityAndSumConservation) {
  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 2 + gen() % 30;
    const std::size_t r = 2 + gen() % 8;
    FrequencyMatrix fm(n, r);
    for (std::size_t i = 0; i < n; ++i) fm.set_row(i, testkit::random_feasible_row(n, r, gen));
    const FrequencyMatrix before = fm;
    const Individual w = sample_individual(fm, gen);
    const Individual l = sample_individual(fm, gen);
    const double K = 10.0 + static_cast<double>(gen() % 10'000);
    apply_update(fm, w, l, K);
    for (std::size_t i = 0; i < n; ++i) {
      int changed = 0;
      for (std::size_t j = 0; j < r; ++j) changed += fm(i, j) != before(i, j);
      ASSERT_LE(changed, 2);
      ASSERT_NEAR(row_sum(fm.row(i)), row_sum(before.row(i)), 1e-12);
    }
  }
}
