#pragma once

// Coupling from the past.
//
// run_monotone_cftp drives a model that tracks a lower and an upper bound
// configuration. Start times go back by powers of two; time -t always uses
// the randomness addressed by (epoch_of(t), t), so a restart from further
// back replays exactly the maps already used closer to time 0.
//
// run_composite_cftp handles the other common shape: each random map can
// decide on its own whether it is coalescent, and the sampler searches
// backwards for the most recent such map.

#include <bit>
#include <concepts>
#include <cstdint>
#include <string>
#include <type_traits>
#include <vector>

#include "perfect/errors.hpp"

namespace perfect {

template <class S>
struct BoundPair {
  S lower;
  S upper;
};

/// Address of one update: time -step, read from restart level `epoch`.
struct TimeIndex {
  std::int64_t epoch = 0;
  std::int64_t step = 1;
};

/// ceil(log2 t) for t >= 1: the first restart level that reaches back to time -t.
constexpr std::int64_t epoch_of(std::int64_t t) {
  return t <= 1 ? 0 : static_cast<std::int64_t>(std::bit_width(static_cast<std::uint64_t>(t - 1)));
}

template <class T>
bool bitwise_equal(const T& a, const T& b) {
  if constexpr (std::is_floating_point_v<T>) {
    if constexpr (sizeof(T) == 8) {
      return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
    } else {
      return std::bit_cast<std::uint32_t>(a) == std::bit_cast<std::uint32_t>(b);
    }
  } else if constexpr (std::is_integral_v<T>) {
    return a == b;
  } else {
    if (a.size() != b.size()) return false;
    auto ia = a.begin();
    auto ib = b.begin();
    for (; ia != a.end(); ++ia, ++ib) {
      if (!bitwise_equal(*ia, *ib)) return false;
    }
    return true;
  }
}

template <class S>
bool coalesced(const BoundPair<S>& b) {
  return bitwise_equal(b.lower, b.upper);
}

/// A monotone (or anti-monotone) randomizing operation on bound pairs.
/// `update` must be a pure function of (bounds, seed, time).
template <class M>
concept MonotoneCftpModel =
    requires(const M& m, BoundPair<typename M::State>& b, std::uint64_t seed, TimeIndex t) {
      typename M::State;
      { m.initial_bounds() } -> std::convertible_to<BoundPair<typename M::State>>;
      m.update(b, seed, t);
    };

struct RunDiagnostics {
  /// Smallest start time that coalesces, in updates.
  std::int64_t t_star = 0;
  /// Updates spent by the doubling search (the t_star refinement is not counted).
  std::int64_t total_updates = 0;
  std::int64_t epochs_tried = 0;
};

template <class S>
struct CftpResult {
  S state;
  RunDiagnostics diagnostics;
};

struct CftpOptions {
  int max_epochs = 40;
  /// Pin t_star exactly by bisection over (T/2, T] after success. Costs
  /// about log2(T) extra runs; off, t_star is reported as T.
  bool find_t_star = true;
};

namespace detail {

template <MonotoneCftpModel M>
BoundPair<typename M::State> run_from(const M& model, std::uint64_t seed, std::int64_t start) {
  auto bounds = model.initial_bounds();
  for (std::int64_t t = start; t >= 1; --t) model.update(bounds, seed, TimeIndex{epoch_of(t), t});
  return bounds;
}

}  // namespace detail

/// Monotone CFTP with start times 1, 2, 4, ... Returns the time-0 state, or
/// throws NonCoalescenceError after `max_epochs` doublings.
template <MonotoneCftpModel M>
CftpResult<typename M::State> run_monotone_cftp(const M& model, std::uint64_t seed,
                                                 CftpOptions options = {}) {
  RunDiagnostics diag;
  for (int e = 0; e <= options.max_epochs; ++e) {
    const std::int64_t start = std::int64_t{1} << e;
    auto bounds = detail::run_from(model, seed, start);
    diag.total_updates += start;
    diag.epochs_tried = e + 1;
    if (!coalesced(bounds)) continue;

    diag.t_star = start;
    if (options.find_t_star && start > 1) {
      std::int64_t fails = start / 2;
      std::int64_t works = start;
      while (works - fails > 1) {
        const std::int64_t mid = fails + (works - fails) / 2;
        (coalesced(detail::run_from(model, seed, mid)) ? works : fails) = mid;
      }
      diag.t_star = works;
    }
    return {std::move(bounds.lower), diag};
  }
  throw NonCoalescenceError("run_monotone_cftp: no coalescence within 2^" +
                            std::to_string(options.max_epochs) + " steps");
}

/// A random map that knows whether it is coalescent on its own.
template <class Map, class S>
concept CompositeMap = requires(const Map& m, const S& x) {
  { m.coalesced() } -> std::convertible_to<bool>;
  { m.coalesced_state() } -> std::convertible_to<S>;
  { m.apply(x) } -> std::convertible_to<S>;
};

template <class S>
struct CompositeResult {
  S state;
  /// T: index of the coalescent map, counted back from time 0.
  std::int64_t maps_used = 0;
};

/// Draws maps F_{-1}, F_{-2}, ... via `make_map(k)` until F_{-T} is coalescent,
/// then pushes its output forward through F_{-T+1}, ..., F_{-1}.
template <class S, class Maker>
  requires CompositeMap<std::invoke_result_t<Maker&, std::int64_t>, S>
CompositeResult<S> run_composite_cftp(Maker&& make_map, std::int64_t max_maps) {
  using Map = std::invoke_result_t<Maker&, std::int64_t>;
  std::vector<Map> maps;
  for (std::int64_t k = 1; k <= max_maps; ++k) {
    maps.push_back(make_map(k));
    if (!maps.back().coalesced()) continue;
    S x = maps.back().coalesced_state();
    for (std::int64_t j = k - 1; j >= 1; --j) x = maps[static_cast<std::size_t>(j - 1)].apply(x);
    return {std::move(x), k};
  }
  throw NonCoalescenceError("run_composite_cftp: no coalescent map among the first " +
                            std::to_string(max_maps));
}

}  // namespace perfect
