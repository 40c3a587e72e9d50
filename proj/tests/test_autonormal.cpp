#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "perfect/autonormal.hpp"
#include "perfect/models.hpp"
#include "perfect/stats.hpp"
#include "perfect/validation/oracles.hpp"

using namespace perfect;
using namespace perfect::autonormal;
namespace oracle = perfect::validation::oracle;

namespace {

InteractionGraph two_site(double F) {
  InteractionGraph g(2, 0);
  g.add_edge(0, 1, F);
  return g;
}

InteractionGraph path3() {
  InteractionGraph g(3, 0);
  g.add_edge(0, 1, 1.0);
  g.add_edge(1, 2, 1.0);
  return g;
}

/// Five sites: a tree plus two extra edges, mixed spring strengths.
InteractionGraph small_graph() {
  InteractionGraph g(5, 0);
  g.add_edge(0, 1, 2.0);
  g.add_edge(0, 2, 0.5);
  g.add_edge(1, 3, 1.5);
  g.add_edge(2, 4, 3.0);
  g.add_edge(3, 4, 0.8);
  g.add_edge(1, 2, 1.1);
  return g;
}

StreamPath at(std::int64_t i, std::uint32_t channel = 0, std::uint64_t seed = 31) {
  return StreamPath{.master_seed = seed, .step = i, .channel = channel};
}

HeightConfig random_config(const InteractionGraph& g, const StreamPath& p, double scale) {
  HeightConfig x(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (i != g.root()) x[i] = scale * normal01(p.with_site(static_cast<std::int64_t>(i)));
  }
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// Graph and energy

TEST(Graph, GridLayout) {
  const auto g = InteractionGraph::grid(3, 3, 2.0, true);
  EXPECT_EQ(g.size(), 9u);
  EXPECT_EQ(g.edges().size(), 18u);
  for (std::size_t i = 0; i < 9; ++i) EXPECT_EQ(g.strength(i), 8.0);
  EXPECT_EQ(g.spring(0, 2), 2.0);
  EXPECT_EQ(g.spring(0, 6), 2.0);
  const auto open = InteractionGraph::grid(3, 2, 1.0, false);
  EXPECT_EQ(open.edges().size(), 7u);
  EXPECT_TRUE(open.connected());
}

TEST(Graph, ValidationErrors) {
  EXPECT_THROW(InteractionGraph(1, 0), ParameterError);
  EXPECT_THROW(InteractionGraph(3, 3), ParameterError);
  InteractionGraph g(3, 0);
  g.add_edge(0, 1, 1.0);
  EXPECT_THROW(g.validate(), ModelError);
  EXPECT_THROW(g.add_edge(1, 1, 1.0), ParameterError);
  EXPECT_THROW(g.add_edge(0, 5, 1.0), ParameterError);
}

TEST(Energy, WorkedValues) {
  const auto g = two_site(1.0);
  EXPECT_EQ(energy(g, std::vector<double>{0.0, 0.0}), 0.0);
  EXPECT_EQ(energy(g, std::vector<double>{0.0, 2.0}), 2.0);
}

TEST(Energy, AtLeastTreeEnergy) {
  const auto g = small_graph();
  const auto tree = bfs_spanning_tree(g);
  for (int i = 0; i < 10'000; ++i) {
    const auto x = random_config(g, at(i), 3.0);
    ASSERT_GE(energy(g, x), tree_energy(tree, x));
  }
}

// ---------------------------------------------------------------------------
// Conditionals

TEST(Conditional, WorkedValues) {
  const auto g = two_site(3.0);
  const auto c = conditional_params(g, 1, std::vector<double>{0.0, 5.0});
  EXPECT_EQ(c.mean, 0.0);
  EXPECT_DOUBLE_EQ(c.variance, 1.0 / 3.0);
  const auto p = path3();
  const auto m = conditional_params(p, 1, std::vector<double>{0.0, 9.0, 2.0});
  EXPECT_DOUBLE_EQ(m.mean, 1.0);
  EXPECT_DOUBLE_EQ(m.variance, 0.5);
  EXPECT_THROW(conditional_params(p, 0, std::vector<double>{0.0, 0.0, 0.0}), ParameterError);
}

TEST(Conditional, SingleNeighbourMean) {
  const auto g = two_site(0.4);
  EXPECT_EQ(conditional_params(g, 1, std::vector<double>{0.0, 1.0}).mean, 0.0);
  InteractionGraph h(3, 0);
  h.add_edge(0, 1, 1.0);
  h.add_edge(1, 2, 2.0);
  EXPECT_DOUBLE_EQ(conditional_params(h, 2, std::vector<double>{0.0, 1.7, 0.0}).mean, 1.7);
}

TEST(Conditional, MatchesQuadratureOfTheEnergy) {
  // Triangle graph; integrate exp(-E) over x_1 with the others fixed.
  InteractionGraph g(3, 0);
  g.add_edge(0, 1, 1.3);
  g.add_edge(1, 2, 0.6);
  g.add_edge(0, 2, 2.0);
  HeightConfig x{0.0, 0.0, 1.4};
  const auto c = conditional_params(g, 1, x);
  auto weight = [&](double v) {
    HeightConfig y = x;
    y[1] = v;
    return std::exp(-energy(g, y));
  };
  using boost::math::quadrature::gauss_kronrod;
  const double lo = c.mean - 12.0;
  const double hi = c.mean + 12.0;
  const double z = gauss_kronrod<double, 61>::integrate(weight, lo, hi, 15, 1e-14);
  const double m1 = gauss_kronrod<double, 61>::integrate([&](double v) { return v * weight(v); }, lo, hi, 15, 1e-14) / z;
  const double m2 =
      gauss_kronrod<double, 61>::integrate([&](double v) { return (v - m1) * (v - m1) * weight(v); }, lo, hi, 15, 1e-14) / z;
  EXPECT_NEAR(m1, c.mean, 1e-6);
  EXPECT_NEAR(m2, c.variance, 1e-6);
}

// ---------------------------------------------------------------------------
// Sweeps and truncated CFTP

TEST(BoundSweep, CoalescedStaysCoalesced) {
  const auto g = small_graph();
  const auto x = random_config(g, at(3), 1.0);
  Bounds b{x, x};
  for (std::int64_t t = 1; t <= 20; ++t) {
    bound_sweep(g, b, 5, {0, t});
    ASSERT_TRUE(coalesced(b));
  }
}

TEST(BoundSweep, SandwichWithPositiveSprings) {
  const auto g = small_graph();
  for (std::int64_t k = 0; k < 100'000; ++k) {
    auto lo = random_config(g, at(k, 1), 2.0);
    auto hi = lo;
    for (std::size_t i = 1; i < hi.size(); ++i) hi[i] += std::abs(normal01(at(k, 2).with_site(static_cast<std::int64_t>(i))));
    Bounds b{lo, hi};
    bound_sweep(g, b, 6, {0, k});
    for (std::size_t i = 0; i < g.size(); ++i) ASSERT_LE(b.lower[i], b.upper[i]);
  }
}

TEST(BoundSweep, SandwichWithMixedSprings) {
  InteractionGraph g(4, 0);
  g.add_edge(0, 1, 2.0);
  g.add_edge(1, 2, -0.5);
  g.add_edge(2, 3, 1.5);
  g.add_edge(0, 3, 1.0);
  g.add_edge(0, 2, 1.2);
  for (std::int64_t k = 0; k < 20'000; ++k) {
    auto lo = random_config(g, at(k, 3), 2.0);
    auto hi = lo;
    for (std::size_t i = 1; i < hi.size(); ++i) hi[i] += 3.0 * uniform01(at(k, 4).with_site(static_cast<std::int64_t>(i)));
    Bounds b{lo, hi};
    // Any configuration inside the box stays inside after a sweep.
    HeightConfig x = lo;
    for (std::size_t i = 1; i < x.size(); ++i) x[i] += (hi[i] - lo[i]) * uniform01(at(k, 5).with_site(static_cast<std::int64_t>(i)));
    gibbs_sweep(g, StreamPath{.master_seed = 7, .step = k}, &b, &x);
    for (std::size_t i = 0; i < g.size(); ++i) {
      ASSERT_LE(b.lower[i], x[i]);
      ASSERT_LE(x[i], b.upper[i]);
    }
  }
}

TEST(BoundSweep, TwoSitesCoalesceFromHugeBox) {
  const auto g = two_site(1.0);
  int within = 0;
  for (int r = 0; r < 1000; ++r) {
    Bounds b{{0.0, -1e6}, {0.0, 1e6}};
    for (std::int64_t t = 1; t <= 50; ++t) {
      bound_sweep(g, b, derive_seed(8, r), {0, t});
      if (coalesced(b)) {
        ++within;
        break;
      }
    }
  }
  EXPECT_GE(within, 990);
}

TEST(TruncatedCftp, TwoSiteVariance) {
  const auto g = two_site(1.0);
  std::vector<double> d(10'000);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto x = run_truncated_cftp(g, derive_seed(9, i));
    d[i] = x[1] - x[0];
  }
  const auto v = stats::covariance_with_se(d, d);
  EXPECT_NEAR(v.mean, 1.0, 3.0 * v.standard_error);
}

TEST(TruncatedCftp, AgreesWithExactSampler) {
  const auto g = InteractionGraph::grid(3, 3, 1.0, true);
  std::vector<double> a(5000), b(5000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = run_truncated_cftp(g, derive_seed(10, i))[4];
    b[i] = run_exact_autonormal(g, derive_seed(11, i)).config[4];
  }
  EXPECT_GT(stats::ks_two_sample(a, b).p_value, 1e-3);
}

TEST(TruncatedCftp, DeterministicAndValidated) {
  const auto g = small_graph();
  EXPECT_TRUE(bitwise_equal(run_truncated_cftp(g, 4), run_truncated_cftp(g, 4)));
  EXPECT_THROW(run_truncated_cftp(g, 4, 0.0), ParameterError);
}

// ---------------------------------------------------------------------------
// Tree proposal, energy box, Metropolis-Hastings

TEST(SpanningTree, BreadthFirstResistances) {
  const auto g = small_graph();
  const auto t = bfs_spanning_tree(g);
  EXPECT_EQ(t.rho[0], 0.0);
  EXPECT_EQ(t.order.front(), 0u);
  for (std::size_t v = 1; v < g.size(); ++v) {
    EXPECT_DOUBLE_EQ(t.rho[v], t.rho[t.parent[v]] + 1.0 / t.parent_F[v]);
    EXPECT_EQ(t.parent_F[v], g.spring(v, t.parent[v]));
  }
}

TEST(TreeProposal, TwoSiteIncrementHasVarianceTwoOverF) {
  const auto g = two_site(1.0);
  const auto t = bfs_spanning_tree(g);
  std::vector<double> d(100'000);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto p = tree_proposal(g, t, at(static_cast<std::int64_t>(i), 6));
    d[i] = p.config[1] - p.config[0];
  }
  EXPECT_GT(stats::ks_test(d, [](double x) { return oracle::normal_cdf(x, std::sqrt(2.0)); }).p_value, 1e-3);
}

TEST(TreeProposal, BookkeepingAndEnergyCeiling) {
  const auto g = small_graph();
  const auto t = bfs_spanning_tree(g);
  for (int i = 0; i < 10'000; ++i) {
    const auto p = tree_proposal(g, t, at(i, 7));
    ASSERT_EQ(p.config[0], 0.0);
    ASSERT_DOUBLE_EQ(p.energy, energy(g, p.config));
    ASSERT_DOUBLE_EQ(p.tree_energy, tree_energy(t, p.config));
    ASSERT_DOUBLE_EQ(p.e_max, 2.0 * p.energy - p.tree_energy);
    ASSERT_GE(p.e_max, p.energy);
  }
}

TEST(MinChainEnergy, WorkedValues) {
  EXPECT_DOUBLE_EQ(min_chain_energy(std::vector<double>{1.0}, 2.0), 2.0);
  EXPECT_DOUBLE_EQ(min_chain_energy(std::vector<double>{1.0, 1.0}, 2.0), 1.0);
  EXPECT_NEAR(min_chain_energy(std::vector<double>{0.5, 1.0 / 3.0}, 1.0), 0.6, 1e-12);
  EXPECT_NEAR(oracle::chain_energy_numeric({2.0, 3.0}, 1.0), 0.6, 1e-9);
  EXPECT_THROW(min_chain_energy(std::vector<double>{1.0, 0.0}, 1.0), ParameterError);
  EXPECT_THROW(min_chain_energy(std::vector<double>{-1.0}, 1.0), ParameterError);
  EXPECT_THROW(min_chain_energy(std::vector<double>{}, 1.0), ParameterError);
}

TEST(MinChainEnergy, MatchesNumericalMinimum) {
  for (int c = 0; c < 1000; ++c) {
    const int k = 1 + c % 8;
    std::vector<double> F(static_cast<std::size_t>(k)), r(F.size());
    for (int i = 0; i < k; ++i) {
      F[i] = 0.05 + 5.0 * uniform01(at(c, 9).with_site(i));
      r[i] = 1.0 / F[i];
    }
    const double x = 6.0 * normal01(at(c, 10));
    ASSERT_NEAR(min_chain_energy(r, x), oracle::chain_energy_numeric(F, x), 1e-9);
  }
}

TEST(CoordinateBox, WorkedValues) {
  InteractionGraph g(3, 0);
  g.add_edge(0, 1, 2.0);
  g.add_edge(1, 2, 1.0);
  const auto t = bfs_spanning_tree(g);
  const auto zero = coordinate_box(t, 0.0);
  for (double h : zero) EXPECT_EQ(h, 0.0);
  const auto box = coordinate_box(t, 4.0);
  EXPECT_DOUBLE_EQ(box[1], 2.0);
  EXPECT_DOUBLE_EQ(box[2], std::sqrt(2.0 * 4.0 * 1.5));
  EXPECT_EQ(box[0], 0.0);
  EXPECT_THROW(coordinate_box(t, -1.0), ParameterError);
  EXPECT_TRUE(bitwise_equal(box_bounds(t, 4.0).lower[0], 0.0));
}

TEST(CoordinateBox, ContainsLowEnergyConfigurations) {
  InteractionGraph g(5, 0);
  g.add_edge(0, 1, 1.5);
  g.add_edge(1, 2, 0.7);
  g.add_edge(1, 3, 2.2);
  g.add_edge(3, 4, 0.4);
  const auto t = bfs_spanning_tree(g);
  const double e_max = 3.0;
  const auto box = coordinate_box(t, e_max);
  int accepted = 0;
  for (int i = 0; accepted < 10'000; ++i) {
    const auto x = random_config(g, at(i, 11), 0.8);
    if (energy(g, x) > e_max) continue;
    ++accepted;
    for (std::size_t v = 0; v < g.size(); ++v) ASSERT_LE(std::abs(x[v]), box[v] + 1e-12);
  }
}

TEST(MetropolisHastings, HighEnergyStatesAlwaysMove) {
  const auto g = small_graph();
  const auto t = bfs_spanning_tree(g);
  for (int i = 0; i < 1000; ++i) {
    const auto p = tree_proposal(g, t, at(i, 12));
    auto far = random_config(g, at(i, 13), 50.0);
    if (energy(g, far) < p.e_max) continue;
    const auto out = mh_accept(g, t, far, p, at(i, 14));
    ASSERT_TRUE(bitwise_equal(out, p.config));
  }
}

TEST(MetropolisHastings, SelfProposalAccepted) {
  const auto g = small_graph();
  const auto t = bfs_spanning_tree(g);
  const auto p = tree_proposal(g, t, at(1, 15));
  EXPECT_TRUE(bitwise_equal(mh_accept(g, t, p.config, p, at(1, 16)), p.config));
  EXPECT_EQ(mh_log_ratio(p.energy, p.tree_energy, p), 0.0);
}

TEST(MetropolisHastings, PostStateEnergyBelowCeiling) {
  const auto g = small_graph();
  const auto t = bfs_spanning_tree(g);
  for (int i = 0; i < 10'000; ++i) {
    const auto p = tree_proposal(g, t, at(i, 17));
    const auto a = random_config(g, at(i, 18), 1.0 + 5.0 * uniform01(at(i, 19)));
    const auto out = mh_accept(g, t, a, p, at(i, 20));
    ASSERT_LE(energy(g, out), p.e_max * (1.0 + 1e-12) + 1e-12);
  }
}

TEST(MetropolisHastings, DetailedBalance) {
  // pi(x) ~ exp(-E), q(y) ~ exp(-E_tree(y)/2): both sides of detailed balance
  // agree, up to the shared normalizations.
  const auto g = two_site(1.7);
  const auto t = bfs_spanning_tree(g);
  for (int i = 0; i < 1000; ++i) {
    const auto A = tree_proposal(g, t, at(i, 21));
    const auto B = tree_proposal(g, t, at(i, 22));
    auto accept = [](double log_ratio) { return std::min(1.0, std::exp(log_ratio)); };
    const double forward = std::exp(-A.energy) * std::exp(-B.tree_energy / 2.0) *
                           accept(mh_log_ratio(A.energy, A.tree_energy, B));
    const double backward = std::exp(-B.energy) * std::exp(-A.tree_energy / 2.0) *
                            accept(mh_log_ratio(B.energy, B.tree_energy, A));
    ASSERT_NEAR(forward, backward, 1e-12 * std::max(1.0, forward));
  }
}

// ---------------------------------------------------------------------------
// Composite update and exact sampler

TEST(CompositeUpdate, CoalescedOutputIgnoresInput) {
  const auto g = InteractionGraph::grid(3, 3, 1.0, true);
  const auto t = bfs_spanning_tree(g);
  int checked = 0;
  for (std::int64_t k = 1; k <= 200; ++k) {
    const auto a = composite_update(g, t, 12, k, random_config(g, at(k, 23), 1.0));
    const auto b = composite_update(g, t, 12, k, random_config(g, at(k, 24), 30.0));
    ASSERT_EQ(a.coalesced, b.coalesced);
    ASSERT_EQ(a.sweeps, b.sweeps);
    if (a.coalesced) {
      ++checked;
      ASSERT_TRUE(bitwise_equal(*a.x, *b.x));
      ASSERT_TRUE(bitwise_equal(*a.x, a.bounds.lower));
    }
  }
  EXPECT_GT(checked, 50);
}

TEST(CompositeUpdate, StateStaysInsideBounds) {
  const auto g = small_graph();
  const auto t = bfs_spanning_tree(g);
  for (std::int64_t k = 1; k <= 2000; ++k) {
    const auto step = composite_update(g, t, 13, k, random_config(g, at(k, 25), 4.0));
    for (std::size_t i = 0; i < g.size(); ++i) {
      ASSERT_LE(step.bounds.lower[i], (*step.x)[i]);
      ASSERT_LE((*step.x)[i], step.bounds.upper[i]);
    }
  }
}

TEST(CompositeUpdate, CoalescesAtLeastHalfTheTime) {
  const auto g = InteractionGraph::grid(3, 3, 1.0, true);
  const auto t = bfs_spanning_tree(g);
  int hits = 0;
  for (std::int64_t k = 1; k <= 10'000; ++k) hits += composite_update(g, t, 14, k).coalesced;
  EXPECT_GE(hits, 4500);
}

TEST(CompositeUpdate, TAndBPhasesUseSeparateChannels) {
  EXPECT_NE(kProposalT, kProposalB);
  EXPECT_NE(kSweepT, kSweepB);
  EXPECT_NE(kMetropolis, kSweepB);
}

TEST(ExactSampler, TwoSiteVariance) {
  const auto g = two_site(1.0);
  std::vector<double> d(10'000);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto x = run_exact_autonormal(g, derive_seed(15, i)).config;
    d[i] = x[1] - x[0];
  }
  const auto v = stats::covariance_with_se(d, d);
  EXPECT_NEAR(v.mean, 1.0, 3.0 * v.standard_error);
}

TEST(ExactSampler, MeanMapCount) {
  const auto g = InteractionGraph::grid(3, 3, 1.0, true);
  const auto t = bfs_spanning_tree(g);
  double total = 0.0;
  for (int i = 0; i < 10'000; ++i) total += static_cast<double>(run_exact_autonormal(g, t, derive_seed(16, i)).maps_used);
  EXPECT_LE(total / 10'000, 2.1);
}

TEST(ExactSampler, RejectsNegativeSprings) {
  InteractionGraph g(3, 0);
  g.add_edge(0, 1, 1.0);
  g.add_edge(1, 2, 1.0);
  g.add_edge(0, 2, -0.2);
  EXPECT_THROW(run_exact_autonormal(g, 1), ModelError);
}

TEST(ExactSampler, Deterministic) {
  const auto g = small_graph();
  const auto a = run_exact_autonormal(g, 17);
  const auto b = run_exact_autonormal(g, 17);
  EXPECT_TRUE(bitwise_equal(a.config, b.config));
  EXPECT_EQ(a.maps_used, b.maps_used);
}

// ---------------------------------------------------------------------------
// Covariance

TEST(ExactCovariance, HandInvertedCases) {
  const auto c2 = exact_covariance(two_site(4.0));
  EXPECT_NEAR(c2(0, 0), 0.25, 1e-14);
  const auto c3 = exact_covariance(path3());
  EXPECT_NEAR(c3(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(c3(0, 1), 1.0, 1e-12);
  EXPECT_NEAR(c3(1, 1), 2.0, 1e-12);
}

TEST(ExactCovariance, SymmetricPositiveDiagonal) {
  const auto g = small_graph();
  const auto c = exact_covariance(g);
  ASSERT_EQ(c.rows(), 4);
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    EXPECT_GT(c(i, i), 0.0);
    for (Eigen::Index j = 0; j < c.cols(); ++j) EXPECT_NEAR(c(i, j), c(j, i), 1e-12);
  }
}

TEST(ExactCovariance, DisconnectedIsModelError) {
  InteractionGraph g(3, 0);
  g.add_edge(0, 1, 1.0);
  EXPECT_THROW(exact_covariance(g), ModelError);
}

TEST(GibbsSweep, PreservesSecondMoments) {
  // Draw exact Gaussian samples via the Cholesky factor, sweep once, and compare moments.
  const auto g = small_graph();
  const auto sites = non_root_sites(g);
  const Eigen::MatrixXd cov = exact_covariance(g);
  const Eigen::MatrixXd chol = cov.llt().matrixL();
  constexpr int n = 100'000;
  std::vector<std::vector<double>> after(sites.size(), std::vector<double>(n));
  for (int s = 0; s < n; ++s) {
    Eigen::VectorXd z(static_cast<Eigen::Index>(sites.size()));
    for (Eigen::Index r = 0; r < z.size(); ++r) z(r) = normal01(at(s, 26).with_site(r));
    const Eigen::VectorXd y = chol * z;
    HeightConfig x(g.size(), 0.0);
    for (std::size_t r = 0; r < sites.size(); ++r) x[sites[r]] = y(static_cast<Eigen::Index>(r));
    gibbs_sweep(g, StreamPath{.master_seed = 27, .step = s}, nullptr, &x);
    for (std::size_t r = 0; r < sites.size(); ++r) after[r][s] = x[sites[r]];
  }
  for (std::size_t a = 0; a < sites.size(); ++a) {
    const auto m = stats::mean_with_ci(after[a]);
    EXPECT_NEAR(m.mean, 0.0, 4.0 * m.standard_error);
    for (std::size_t b = a; b < sites.size(); ++b) {
      const auto c = stats::covariance_with_se(after[a], after[b]);
      EXPECT_NEAR(c.mean, cov(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)), 4.0 * c.standard_error);
    }
  }
}

// ---------------------------------------------------------------------------
// Files and rendering

TEST(ReadGraph, EdgeListAndGrid) {
  std::istringstream edges("# path\nn 3 root 1\nedge 0 1 2.0\nedge 1 2 0.5\n");
  const auto g = read_graph(edges);
  EXPECT_EQ(g.size(), 3u);
  EXPECT_EQ(g.root(), 1u);
  EXPECT_EQ(g.spring(2, 1), 0.5);
  std::istringstream grid("grid 4 3 1.5 torus\n");
  const auto h = read_graph(grid);
  EXPECT_EQ(h.size(), 12u);
  EXPECT_EQ(h.strength(5), 6.0);
}

TEST(ReadGraph, Errors) {
  std::istringstream empty("");
  EXPECT_THROW(read_graph(empty), ModelError);
  std::istringstream header("n 3\nedge 0 1 1\n");
  EXPECT_THROW(read_graph(header), ModelError);
  std::istringstream range("n 2 root 0\nedge 0 4 1\n");
  EXPECT_THROW(read_graph(range), ModelError);
  std::istringstream grid("grid 3 3 1 donut\n");
  EXPECT_THROW(read_graph(grid), ModelError);
}

TEST(Render, EndpointsAndConstantField) {
  std::ostringstream two;
  write_pgm(two, std::vector<double>{0.0, 1.0}, 2, 1);
  EXPECT_EQ(two.str(), "P2\n2 1\n255\n0 255\n");
  std::ostringstream flat;
  write_pgm(flat, std::vector<double>{3.0, 3.0, 3.0, 3.0}, 2, 2);
  EXPECT_EQ(flat.str(), "P2\n2 2\n255\n0 0\n0 0\n");
  std::ostringstream bad;
  EXPECT_THROW(write_pgm(bad, std::vector<double>{1.0, 2.0, 3.0}, 2, 2), ParameterError);
}

TEST(Render, FiftyByFiftyRoundTrip) {
  // Any 50 x 50 configuration will do; a tree proposal is cheap to draw.
  const auto g = models::load_graph("grid50");
  const auto x = tree_proposal(g, bfs_spanning_tree(g), at(0, 28)).config;
  std::ostringstream out;
  write_pgm(out, x, 50, 50);
  std::istringstream in(out.str());
  const auto img = read_pgm(in);
  EXPECT_EQ(img.width, 50u);
  EXPECT_EQ(img.height, 50u);
  EXPECT_EQ(img.max_value, 255);
  ASSERT_EQ(img.pixels.size(), 2500u);
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  EXPECT_EQ(img.pixels[static_cast<std::size_t>(lo - x.begin())], 0);
  EXPECT_EQ(img.pixels[static_cast<std::size_t>(hi - x.begin())], 255);
}
