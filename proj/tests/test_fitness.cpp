#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "rcga/fitness.hpp"
#include "test_support.hpp"

using namespace rcga;

namespace {

Individual random_individual(std::size_t n, std::size_t r, std::mt19937_64& gen) {
  std::uniform_int_distribution<Value> v(0, static_cast<Value>(r - 1));
  Individual x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = v(gen);
  return x;
}

// Zero-biased strings so long prefixes actually occur.
Individual prefixy_individual(std::size_t n, std::size_t r, std::mt19937_64& gen) {
  std::bernoulli_distribution zero(0.8);
  std::uniform_int_distribution<Value> v(1, static_cast<Value>(r - 1));
  Individual x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = zero(gen) ? 0 : v(gen);
  return x;
}

}  // namespace

TEST(LeadingOnes, Examples) {
  EXPECT_EQ(r_leading_ones(Individual(17, 0)), 17u);
  EXPECT_EQ(r_leading_ones(Individual{1, 0, 0}), 0u);
  EXPECT_EQ(r_leading_ones(Individual{0, 0, 2, 0}), 2u);
}

TEST(LeadingOnesGeneral, IdentityTargetReducesToBase) {
  std::mt19937_64 gen(1);
  const std::size_t n = 12;
  std::vector<std::size_t> id(n);
  std::iota(id.begin(), id.end(), 0);
  const GeneralizedTarget t(Individual(n, 0), id);
  for (int k = 0; k < 100; ++k) {
    const auto x = prefixy_individual(n, 4, gen);
    EXPECT_EQ(r_leading_ones_general(x, t), r_leading_ones(x));
  }
}

TEST(LeadingOnesGeneral, OptimumScoresN) {
  std::mt19937_64 gen(2);
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = 1 + gen() % 20;
    const auto a = random_individual(n, 5, gen);
    std::vector<std::size_t> sigma(n);
    std::iota(sigma.begin(), sigma.end(), 0);
    std::shuffle(sigma.begin(), sigma.end(), gen);
    EXPECT_EQ(r_leading_ones_general(a, GeneralizedTarget(a, sigma)), n);
  }
}

TEST(LeadingOnesGeneral, HandEvaluatedExample) {
  // a = (2,1,0), sigma = (3,1,2) 1-based, x = (2,0,0):
  // [x3=a3]=1, [x1=a1]=1, [x2=a2]=0 -> 2.
  const GeneralizedTarget t(Individual{2, 1, 0}, {2, 0, 1});
  const Individual x{2, 0, 0};
  EXPECT_EQ(r_leading_ones_general(x, t), 2u);
  EXPECT_EQ(testkit::brute_force_leading({2, 0, 0}, {2, 1, 0}, {2, 0, 1}), 2u);
}

TEST(LeadingOnesGeneral, RejectsBadTargets) {
  EXPECT_THROW(GeneralizedTarget(Individual{0, 0}, {0, 0}), ParameterError);
  EXPECT_THROW(GeneralizedTarget(Individual{0, 0}, {0, 2}), ParameterError);
  EXPECT_THROW(GeneralizedTarget(Individual{0, 0}, {0}), ParameterError);
  const GeneralizedTarget t(Individual{0, 0}, {1, 0});
  EXPECT_THROW(r_leading_ones_general(Individual{0, 0, 0}, t), ParameterError);
}

TEST(PrefixFitness, Examples) {
  EXPECT_EQ(prefix_fitness(Individual{0, 1, 0}, 1), 1u);
  EXPECT_EQ(prefix_fitness(Individual{0, 0, 1, 0}, 3), 2u);
  EXPECT_THROW(prefix_fitness(Individual{0, 0}, 0), ParameterError);
  EXPECT_THROW(prefix_fitness(Individual{0, 0}, 3), ParameterError);
}

TEST(PrefixFitness, FullLengthEqualsLeadingOnes) {
  std::mt19937_64 gen(3);
  for (int k = 0; k < 100; ++k) {
    const auto x = prefixy_individual(15, 3, gen);
    EXPECT_EQ(prefix_fitness(x, x.size()), r_leading_ones(x));
  }
}

TEST(PrefixFitness, GrowsByAtMostOnePerPosition) {
  std::mt19937_64 gen(4);
  for (int k = 0; k < 1000; ++k) {
    const auto x = prefixy_individual(20, 4, gen);
    for (std::size_t i = 1; i < x.size(); ++i) {
      const auto a = prefix_fitness(x, i);
      const auto b = prefix_fitness(x, i + 1);
      ASSERT_LE(a, b);
      ASSERT_LE(b, a + 1);
    }
  }
}

TEST(LeadingOnes, WeakPreferenceForZero) {
  std::mt19937_64 gen(5);
  for (int k = 0; k < 10'000; ++k) {
    const std::size_t n = 1 + gen() % 20;
    auto x = prefixy_individual(n, 2 + gen() % 7, gen);
    const auto before = r_leading_ones(x);
    x[gen() % n] = 0;
    ASSERT_GE(r_leading_ones(x), before);
  }
}

TEST(Constant, EveryPositionNeutral) {
  const Fitness f = Fitness::constant();
  EXPECT_EQ(f(Individual{0, 1, 2}), 0u);
  EXPECT_EQ(f(Individual{0, 1, 2}), f(Individual{0, 0, 2}));
  EXPECT_FALSE(f.optimum(3).has_value());
  EXPECT_EQ(Fitness::leading_ones().optimum(3), 3u);
}

TEST(Fitness, DescriptorRoundTrip) {
  for (const char* d : {"leadingones", "constant", "leadingones-general(a=2,1,0,sigma=3,1,2)"}) {
    EXPECT_EQ(Fitness::parse(d).descriptor(), d);
  }
  const auto f = Fitness::parse("leadingones-general(a=2,1,0,sigma=3,1,2)");
  EXPECT_EQ(f(Individual{2, 0, 0}), 2u);
  EXPECT_EQ(f(Individual{2, 1, 0}), 3u);
}

TEST(Fitness, RejectsBadDescriptors) {
  for (const char* d : {"onemax", "leadingones-general(a=1,0)", "leadingones-general(a=1,0,sigma=1,1)",
                        "leadingones-general(a=1,0,sigma=0,1)", "leadingones-general(a=1,x,sigma=1,2)",
                        "leadingones-general(a=1,,sigma=1,2)"}) {
    EXPECT_THROW(Fitness::parse(d), ParameterError) << d;
  }
  EXPECT_THROW(Fitness::parse("leadingones-general(a=3,0,sigma=1,2)").validate(2, 3), ParameterError);
  EXPECT_THROW(Fitness::parse("leadingones-general(a=1,0,sigma=1,2)").validate(3, 3), ParameterError);
}
