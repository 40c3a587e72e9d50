#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

#include "perfect/replay_rng.hpp"
#include "perfect/stats.hpp"
#include "perfect/toy_chain.hpp"
#include "perfect/validation/oracles.hpp"

using namespace perfect;
using namespace perfect::toy;
namespace oracle = perfect::validation::oracle;

namespace {

template <class F>
std::vector<std::int64_t> histogram(int n, int runs, std::uint64_t seed, F sampler) {
  std::vector<std::int64_t> counts(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 0; i < runs; ++i) ++counts[static_cast<std::size_t>(sampler(n, derive_seed(seed, i)))];
  return counts;
}

double freq(const std::vector<std::int64_t>& c, int s) {
  double total = 0.0;
  for (auto x : c) total += static_cast<double>(x);
  return static_cast<double>(c[static_cast<std::size_t>(s)]) / total;
}

}  // namespace

TEST(ToyPhi, Cases) {
  EXPECT_EQ(toy_phi(0, -1, 4), 0);
  EXPECT_EQ(toy_phi(4, +1, 4), 4);
  EXPECT_EQ(toy_phi(2, +1, 4), 3);
  EXPECT_EQ(toy_phi(2, -1, 4), 1);
}

TEST(ToyPhi, MonotoneInX) {
  for (int n = 1; n < 8; ++n) {
    for (int u : {-1, 1}) {
      for (int x = 0; x < n; ++x) EXPECT_LE(toy_phi(x, u, n), toy_phi(x + 1, u, n));
    }
  }
}

TEST(ToyCftp, UniformOnFiveStates) {
  const auto c = histogram(4, 100'000, 1, [](int n, std::uint64_t s) { return run_toy_cftp(n, s); });
  EXPECT_GT(stats::chi_square_uniform(c).p_value, 1e-3);
}

TEST(ToyCftp, TwoStatesAreFair) {
  const auto c = histogram(1, 100'000, 2, [](int n, std::uint64_t s) { return run_toy_cftp(n, s); });
  EXPECT_NEAR(freq(c, 0), 0.5, 0.005);
}

TEST(ToyCftp, DeterministicAndValidatesN) {
  for (std::uint64_t s = 0; s < 100; ++s) EXPECT_EQ(run_toy_cftp(9, s), run_toy_cftp(9, s));
  EXPECT_THROW(run_toy_cftp(0, 1), ParameterError);
}

TEST(FreshCoins, BiasedTowardTheEnds) {
  const auto c = histogram(2, 100'000, 3, [](int n, std::uint64_t s) { return run_fresh_coins_variant(n, s); });
  EXPECT_NEAR(freq(c, 1), 0.1458, 0.01);
  EXPECT_GT(std::abs(freq(c, 1) - 1.0 / 3.0), 0.1);
  EXPECT_NEAR(freq(c, 0), freq(c, 2), 0.01);
  EXPECT_LT(stats::chi_square_uniform(c).p_value, 1e-6);
}

TEST(FreshCoins, ExactLawMatchesPrintedBinaryDigits) {
  const auto law = oracle::fresh_coins_law_n2();
  // 0.0010010101001010101010101001 in base 2.
  const std::string digits = "0010010101001010101010101001";
  double printed = 0.0;
  for (std::size_t k = 0; k < digits.size(); ++k) {
    if (digits[k] == '1') printed += std::ldexp(1.0, -static_cast<int>(k + 1));
  }
  EXPECT_NEAR(law[1], printed, std::ldexp(1.0, -28));
  EXPECT_NEAR(law[1], 0.1458, 1e-3);
  EXPECT_NEAR(law[0] + law[1] + law[2], 1.0, 1e-12);
}

TEST(FreshCoins, DynamicProgramMatchesBruteForce) {
  // Over attempts 0..4 both count the same coin sequences.
  const auto brute = oracle::fresh_coins_enumerated_n2(4);
  const auto dp = oracle::fresh_coins_law_n2(4);
  for (int s = 0; s < 3; ++s) EXPECT_NEAR(brute[s], dp[s], 1e-12);
}

TEST(ForwardDoubling, OneSixth) {
  const auto c = histogram(2, 100'000, 4, [](int n, std::uint64_t s) { return run_forward_doubling_variant(n, s); });
  EXPECT_NEAR(freq(c, 1), 1.0 / 6.0, 0.01);
  EXPECT_NEAR(freq(c, 0) + freq(c, 2), 5.0 / 6.0, 0.01);
}

TEST(ForwardDoubling, EnumerationToDepth24) {
  const auto law = oracle::forward_doubling_enumerated_n2(24);
  EXPECT_NEAR(law[1], 1.0 / 6.0, 1e-4);
  EXPECT_NEAR(law[0], 5.0 / 12.0, 1e-4);
}

TEST(ForwardCoalescenceOnly, OnlyTheEnds) {
  std::int64_t zeros = 0;
  constexpr int runs = 100'000;
  for (int i = 0; i < runs; ++i) {
    const int x = run_forward_coalescence_only(4, derive_seed(5, i));
    ASSERT_TRUE(x == 0 || x == 4);
    zeros += x == 0;
  }
  EXPECT_NEAR(static_cast<double>(zeros) / runs, 0.5, 0.01);
}

TEST(ForwardCoalescenceOnly, TwoStatesMeetAtFirstStep) {
  // With n = 1 any coin merges {0, 1}; the output is that coin's endpoint.
  for (std::uint64_t s = 0; s < 100; ++s) {
    const int u = coin(StreamPath{.master_seed = s, .step = 1, .channel = kForwardCoalesce});
    EXPECT_EQ(run_forward_coalescence_only(1, s), u > 0 ? 1 : 0);
  }
}
