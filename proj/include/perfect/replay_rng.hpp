#pragma once

// Counter-based, replayable randomness.
//
// Every random number in the library is a pure function of a StreamPath.
// CFTP revisits the same time steps many times and out of order, so there is
// no generator state to save or restore: re-reading a draw means recomputing
// it from its address.

#include <cmath>
#include <cstdint>
#include <limits>

#include "perfect/errors.hpp"

namespace perfect {

/// Address of one random draw.
///
/// `epoch` is the CFTP restart level (log2 of the start time) or a map index,
/// `step` the time within it, `site` the spatial index, `draw` a per-update
/// counter and `channel` separates otherwise identical sub-streams.
struct StreamPath {
  std::uint64_t master_seed = 0;
  std::int64_t epoch = 0;
  std::int64_t step = 0;
  std::int64_t site = 0;
  std::int64_t draw = 0;
  std::uint32_t channel = 0;

  constexpr StreamPath with_epoch(std::int64_t e) const {
    StreamPath p = *this;
    p.epoch = e;
    return p;
  }
  constexpr StreamPath with_step(std::int64_t s) const {
    StreamPath p = *this;
    p.step = s;
    return p;
  }
  constexpr StreamPath with_site(std::int64_t s) const {
    StreamPath p = *this;
    p.site = s;
    return p;
  }
  constexpr StreamPath with_draw(std::int64_t d) const {
    StreamPath p = *this;
    p.draw = d;
    return p;
  }
  constexpr StreamPath with_channel(std::uint32_t c) const {
    StreamPath p = *this;
    p.channel = c;
    return p;
  }
  /// The path `k` draws further along.
  constexpr StreamPath next(std::int64_t k = 1) const { return with_draw(draw + k); }

  friend constexpr bool operator==(const StreamPath&, const StreamPath&) = default;
};

namespace detail {

// Stafford's "mix13" finalizer; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t absorb(std::uint64_t h, std::uint64_t field, std::uint64_t salt) {
  return mix64(h ^ mix64(field + salt));
}

/// 64-bit word at `path`, sub-counter `sub`. Sub-counters let one logical draw
/// (e.g. a gamma variate) consume any number of words without touching the
/// neighbouring draw indices.
constexpr std::uint64_t word(const StreamPath& path, std::uint64_t sub = 0) {
  std::uint64_t h = mix64(path.master_seed ^ 0x243f6a8885a308d3ULL);
  h = absorb(h, static_cast<std::uint64_t>(path.epoch), 0x9e3779b97f4a7c15ULL);
  h = absorb(h, static_cast<std::uint64_t>(path.step), 0x3c6ef372fe94f82aULL);
  h = absorb(h, static_cast<std::uint64_t>(path.site), 0xdaa66d2c7ddf743fULL);
  h = absorb(h, static_cast<std::uint64_t>(path.draw), 0x78dde6e5fd29f054ULL);
  h = absorb(h, path.channel, 0x1715609d7c2d6d69ULL);
  h = absorb(h, sub, 0xb54cda56bcbe0f0dULL);
  return h;
}

/// Maps a word to the midpoint grid {(k + 1/2) 2^-52}, strictly inside (0,1).
constexpr double word_to_open01(std::uint64_t w) {
  return (static_cast<double>(w >> 12) + 0.5) * 0x1.0p-52;
}

constexpr double uniform_at(const StreamPath& path, std::uint64_t sub) {
  return word_to_open01(word(path, sub));
}

}  // namespace detail

/// Raw 64-bit output at a path.
constexpr std::uint64_t random_word(const StreamPath& path) { return detail::word(path); }

/// Seed for replication `index` of a run with master seed `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return detail::word(StreamPath{.master_seed = seed, .channel = 0xffffffffu}, index);
}

/// Uniform on the open interval (0,1).
constexpr double uniform01(const StreamPath& path) { return detail::uniform_at(path, 0); }

/// Standard normal quantile, Wichura's AS 241 (PPND16); relative accuracy about 1e-16.
inline double standard_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw ParameterError("standard_normal_quantile: p outside [0,1]");
  }
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                 6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
               1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
             1.3314166789178437745e+2) * r + 3.3871328727963666080e0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                 3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
               5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
             4.2313330701600911252e+1) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
  }
  return q < 0.0 ? -value : value;
}

/// Standard normal from exactly one uniform (inverse CDF).
inline double normal01(const StreamPath& path) { return standard_normal_quantile(uniform01(path)); }

/// Exponential with the given mean: -mean * log(uniform01).
inline double exponential(const StreamPath& path, double mean) {
  if (!(mean > 0.0)) throw ParameterError("exponential: mean must be positive");
  return -mean * std::log(uniform01(path));
}

namespace detail {

// Marsaglia-Tsang squeeze for shape >= 1. Attempt k reads sub-counters
// 2k+1 (normal) and 2k+2 (uniform); sub-counter 0 is reserved for the
// shape < 1 boost below.
inline double gamma_marsaglia_tsang(const StreamPath& path, double shape) {
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (std::uint64_t attempt = 0;; ++attempt) {
    const double x = standard_normal_quantile(uniform_at(path, 2 * attempt + 1));
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = uniform_at(path, 2 * attempt + 2);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace detail

/// Unit-scale gamma variate. Occupies the single draw index `path.draw`; the
/// rejection loop runs on sub-counters beneath it, so consumption is fixed
/// from the caller's point of view and deterministic in `path`.
inline double gamma(const StreamPath& path, double shape) {
  if (!(shape > 0.0)) throw ParameterError("gamma: shape must be positive");
  if (shape >= 1.0) return detail::gamma_marsaglia_tsang(path, shape);
  // Gamma(a) = Gamma(a + 1) * U^(1/a).
  const double g = detail::gamma_marsaglia_tsang(path, shape + 1.0);
  return g * std::exp(std::log(detail::uniform_at(path, 0)) / shape);
}

}  // namespace perfect
