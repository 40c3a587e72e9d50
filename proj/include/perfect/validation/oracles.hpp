#pragma once

// Reference computations that share no code with the samplers they check:
// exact dynamic programs and enumerations for the toy walk, closed-form or
// Boost-backed distribution functions, a dense quadratic solve for chain
// energies, and a plain Gibbs sampler driven by the standard library RNG.

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace perfect::validation::oracle {

// ---------------------------------------------------------------------------
// Distribution functions

inline double normal_cdf(double x, double sigma = 1.0) {
  return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0)));
}

inline double normal_quantile(double p) {
  return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), p);
}

inline double exponential_cdf(double x, double mean) { return x <= 0.0 ? 0.0 : -std::expm1(-x / mean); }

inline double gamma_cdf(double x, double shape) { return x <= 0.0 ? 0.0 : boost::math::gamma_p(shape, x); }

// ---------------------------------------------------------------------------
// Toy walk on {0, 1, 2}

namespace detail {

constexpr int kStates = 3;
using PairMatrix = std::array<std::array<double, kStates * kStates>, kStates * kStates>;

inline int clamp_step(int x, int u) { return x + u < 0 ? 0 : (x + u > 2 ? 2 : x + u); }

inline PairMatrix pair_step() {
  PairMatrix m{};
  for (int a = 0; a < kStates; ++a) {
    for (int b = 0; b < kStates; ++b) {
      for (int u : {-1, 1}) {
        m[a * kStates + b][clamp_step(a, u) * kStates + clamp_step(b, u)] += 0.5;
      }
    }
  }
  return m;
}

inline PairMatrix multiply(const PairMatrix& x, const PairMatrix& y) {
  PairMatrix z{};
  for (int i = 0; i < kStates * kStates; ++i) {
    for (int k = 0; k < kStates * kStates; ++k) {
      if (x[i][k] == 0.0) continue;
      for (int j = 0; j < kStates * kStates; ++j) z[i][j] += x[i][k] * y[k][j];
    }
  }
  return z;
}

}  // namespace detail

/// Law of the output of "restart with fresh coins at every doubling" for
/// n = 2: attempt e runs 2^e independent steps of the (bottom, top) pair from
/// (0, 2) and stops on the first attempt that coalesces. Matrix powers by
/// repeated squaring; attempts beyond `max_attempt` carry negligible mass.
inline std::array<double, 3> fresh_coins_law_n2(int max_attempt = 60) {
  detail::PairMatrix power = detail::pair_step();  // P^(2^0)
  const int start = 0 * detail::kStates + 2;
  std::array<double, 3> law{};
  double survive = 1.0;
  for (int e = 0; e <= max_attempt; ++e) {
    double coalesce = 0.0;
    for (int s = 0; s < detail::kStates; ++s) {
      const double p = power[start][s * detail::kStates + s];
      law[s] += survive * p;
      coalesce += p;
    }
    survive *= 1.0 - coalesce;
    power = detail::multiply(power, power);
  }
  return law;
}

/// Brute-force check of the same law over attempts 0..max_attempt by listing
/// every coin sequence of every attempt. Returns the law restricted to those
/// attempts (mass of later attempts is dropped).
inline std::array<double, 3> fresh_coins_enumerated_n2(int max_attempt) {
  std::array<double, 3> law{};
  double survive = 1.0;
  for (int e = 0; e <= max_attempt; ++e) {
    const std::uint64_t steps = std::uint64_t{1} << e;
    const std::uint64_t sequences = std::uint64_t{1} << steps;
    std::array<std::uint64_t, 3> hits{};
    for (std::uint64_t bits = 0; bits < sequences; ++bits) {
      int lo = 0;
      int hi = 2;
      for (std::uint64_t t = 0; t < steps; ++t) {
        const int u = (bits >> t) & 1U ? 1 : -1;
        lo = detail::clamp_step(lo, u);
        hi = detail::clamp_step(hi, u);
      }
      if (lo == hi) ++hits[static_cast<std::size_t>(lo)];
    }
    double coalesce = 0.0;
    for (int s = 0; s < 3; ++s) {
      const double p = static_cast<double>(hits[s]) / static_cast<double>(sequences);
      law[s] += survive * p;
      coalesce += p;
    }
    survive *= 1.0 - coalesce;
  }
  return law;
}

/// Law of "run forward until all starting states meet at tau, continue to the
/// next power of two >= tau" for n = 2, by exhaustive enumeration of coin
/// sequences whose coalescence time is at most `depth`.
inline std::array<double, 3> forward_doubling_enumerated_n2(int depth) {
  std::array<double, 3> law{};
  // Continue from a single state x for `remaining` steps, enumerating coins.
  auto continue_walk = [&law](auto&& self, int x, int remaining, double weight) -> void {
    if (remaining == 0) {
      law[static_cast<std::size_t>(x)] += weight;
      return;
    }
    for (int u : {-1, 1}) self(self, detail::clamp_step(x, u), remaining - 1, weight * 0.5);
  };
  auto search = [&](auto&& self, std::array<bool, 3> alive, int t, double weight) -> void {
    if (t > depth) return;
    for (int u : {-1, 1}) {
      std::array<bool, 3> next{};
      for (int s = 0; s < 3; ++s) {
        if (alive[s]) next[detail::clamp_step(s, u)] = true;
      }
      const int count = next[0] + next[1] + next[2];
      if (count == 1) {
        const int x = next[0] ? 0 : (next[1] ? 1 : 2);
        int stop = 1;
        while (stop < t) stop *= 2;
        continue_walk(continue_walk, x, stop - t, weight * 0.5);
      } else {
        self(self, next, t + 1, weight * 0.5);
      }
    }
  };
  search(search, {true, true, true}, 1, 1.0);
  return law;
}

// ---------------------------------------------------------------------------
// Chain energy

/// Minimum of sum F_i (y_i - y_{i-1})^2 / 2 over y_1..y_{k-1} with y_0 = 0 and
/// y_k = x, by solving the stationarity equations densely.
inline double chain_energy_numeric(const std::vector<double>& F, double x) {
  const auto k = static_cast<Eigen::Index>(F.size());
  auto energy_of = [&](const Eigen::VectorXd& y) {
    double e = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double a = i == 0 ? 0.0 : y(i - 1);
      const double b = i == k - 1 ? x : y(i);
      e += 0.5 * F[static_cast<std::size_t>(i)] * (b - a) * (b - a);
    }
    return e;
  };
  if (k == 1) return energy_of(Eigen::VectorXd());
  const Eigen::Index m = k - 1;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const double left = F[static_cast<std::size_t>(j)];
    const double right = F[static_cast<std::size_t>(j + 1)];
    A(j, j) = left + right;
    if (j > 0) A(j, j - 1) = -left;
    if (j + 1 < m) A(j, j + 1) = -right;
  }
  rhs(m - 1) = F[static_cast<std::size_t>(m)] * x;
  const Eigen::VectorXd y = A.fullPivLu().solve(rhs);
  return energy_of(y);
}

// ---------------------------------------------------------------------------
// Plain Gibbs for a two-site autogamma field

struct TwoSiteGamma {
  double alpha0, beta0, alpha1, beta1, beta01;
};

/// Systematic-scan Gibbs from (1, 1), keeping every `thin`-th sweep after
/// `burn_in` sweeps. Uses std::mt19937_64 and std::gamma_distribution.
inline std::array<std::vector<double>, 2> two_site_gibbs(const TwoSiteGamma& f, std::int64_t sweeps,
                                                         std::int64_t burn_in, std::int64_t thin,
                                                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> g0(f.alpha0, 1.0);
  std::gamma_distribution<double> g1(f.alpha1, 1.0);
  double x0 = 1.0;
  double x1 = 1.0;
  std::array<std::vector<double>, 2> out;
  for (std::int64_t s = 1; s <= burn_in + sweeps; ++s) {
    x0 = g0(rng) / (f.beta0 + f.beta01 * x1);
    x1 = g1(rng) / (f.beta1 + f.beta01 * x0);
    if (s > burn_in && (s - burn_in) % thin == 0) {
      out[0].push_back(x0);
      out[1].push_back(x1);
    }
  }
  return out;
}

}  // namespace perfect::validation::oracle
