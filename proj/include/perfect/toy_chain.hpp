#pragma once

// Reflecting +-1 walk on {0, ..., n}: the textbook CFTP example, plus three
// tempting shortcuts that do not sample from the uniform stationary law.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <vector>

#include "perfect/cftp.hpp"
#include "perfect/errors.hpp"
#include "perfect/replay_rng.hpp"

namespace perfect::toy {

enum Channel : std::uint32_t { kCftp = 0, kFreshCoins = 1, kForward = 2, kForwardCoalesce = 3 };

/// One step of the walk, clamped to [0, n].
constexpr int toy_phi(int x, int u, int n) {
  const int y = x + u;
  if (y < 0) return 0;
  if (y > n) return n;
  return y;
}

inline int coin(const StreamPath& path) { return uniform01(path) < 0.5 ? +1 : -1; }

/// The walk as a monotone CFTP model; only the top and bottom are tracked.
struct ToyModel {
  using State = int;
  int n = 1;

  BoundPair<int> initial_bounds() const { return {0, n}; }

  void update(BoundPair<int>& b, std::uint64_t seed, TimeIndex t) const {
    const int u = coin(StreamPath{.master_seed = seed, .epoch = t.epoch, .step = t.step,
                                  .channel = kCftp});
    b.lower = toy_phi(b.lower, u, n);
    b.upper = toy_phi(b.upper, u, n);
  }
};

inline void check_n(int n) {
  if (n < 1) throw ParameterError("toy chain: n must be at least 1");
}

/// Exact uniform sample on {0..n}.
inline CftpResult<int> run_toy_cftp_diagnosed(int n, std::uint64_t seed, CftpOptions options = {}) {
  check_n(n);
  return run_monotone_cftp(ToyModel{n}, seed, options);
}

inline int run_toy_cftp(int n, std::uint64_t seed) { return run_toy_cftp_diagnosed(n, seed).state; }

/// Broken: every doubling draws brand-new coins for all of [-T, 0).
inline int run_fresh_coins_variant(int n, std::uint64_t seed, int max_attempts = 62) {
  check_n(n);
  for (int attempt = 0; attempt <= max_attempts; ++attempt) {
    const std::int64_t start = std::int64_t{1} << attempt;
    int lo = 0;
    int hi = n;
    for (std::int64_t t = start; t >= 1; --t) {
      const int u = coin(StreamPath{.master_seed = seed, .epoch = attempt, .step = t,
                                    .channel = kFreshCoins});
      lo = toy_phi(lo, u, n);
      hi = toy_phi(hi, u, n);
    }
    if (lo == hi) return lo;
  }
  throw NonCoalescenceError("run_fresh_coins_variant: no coalescence");
}

namespace detail {

inline bool all_equal(const std::vector<int>& xs) {
  return std::adjacent_find(xs.begin(), xs.end(), std::not_equal_to<>()) == xs.end();
}

/// Forward coalescence time of all n+1 trajectories; `states` ends coalesced.
inline std::int64_t forward_until_coalesced(std::vector<int>& states, int n, std::uint64_t seed,
                                            std::uint32_t channel, std::int64_t cap) {
  for (std::int64_t s = 1; s <= cap; ++s) {
    const int u = coin(StreamPath{.master_seed = seed, .step = s, .channel = channel});
    for (auto& x : states) x = toy_phi(x, u, n);
    if (all_equal(states)) return s;
  }
  throw NonCoalescenceError("toy forward run: no coalescence");
}

inline std::vector<int> all_states(int n) {
  std::vector<int> xs(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) xs[static_cast<std::size_t>(i)] = i;
  return xs;
}

}  // namespace detail

/// Broken: run forward to coalescence at tau, keep going to the first power of
/// two >= tau, and report that state.
inline int run_forward_doubling_variant(int n, std::uint64_t seed) {
  check_n(n);
  auto states = detail::all_states(n);
  const std::int64_t tau =
      detail::forward_until_coalesced(states, n, seed, kForward, std::int64_t{1} << 40);
  const std::int64_t stop = std::int64_t{1} << std::bit_width(static_cast<std::uint64_t>(tau - 1));
  int x = states.front();
  for (std::int64_t s = tau + 1; s <= stop; ++s) {
    x = toy_phi(x, coin(StreamPath{.master_seed = seed, .step = s, .channel = kForward}), n);
  }
  return x;
}

/// Broken: report the state at the forward coalescence time. Only 0 or n
/// can ever come out.
inline int run_forward_coalescence_only(int n, std::uint64_t seed) {
  check_n(n);
  auto states = detail::all_states(n);
  detail::forward_until_coalesced(states, n, seed, kForwardCoalesce, std::int64_t{1} << 40);
  return states.front();
}

}  // namespace perfect::toy
