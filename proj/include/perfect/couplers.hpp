#pragma once

// Layered multishift and multiscale couplers.
//
// A multishift coupler is a random function f such that f(s) - s has the
// same law for every s; a multiscale coupler has f(s) / s with the same law
// for every s > 0. The layered construction slices the target density into
// horizontal rectangles, picks one with probability proportional to its
// width, and shift-couples uniformly within it. The resulting f is monotone
// and piecewise constant, so whole intervals collapse to single points.
//
// Draw order, per constructor (indices relative to `path.draw`):
//   rect_coupler         0: X
//   normal_coupler       0: X,  1: Y
//   exponential_coupler  0: X1, 1: X2
//   gamma_scale_coupler  0: G,  1: X1, 2: X2
//   unimodal_coupler     0: X (spec sampler), 1: Y
//   epf_shift            1: Y
//   epf_gamma            0: X,  1: X1
//   multidim_normal      2i, 2i+1 for coordinate i

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "perfect/errors.hpp"
#include "perfect/replay_rng.hpp"

namespace perfect {

/// Layered multishift map f(s) = floor((s + R - X) / (R - L)) (R - L) + X.
struct ShiftMap {
  double L = 0.0;
  double R = 1.0;
  double X = 0.0;

  double width() const { return R - L; }
  friend bool operator==(const ShiftMap&, const ShiftMap&) = default;
};

/// Index of the step cell containing s.
inline double shift_cell(const ShiftMap& map, double s) {
  return std::floor((s + map.R - map.X) / (map.R - map.L));
}

inline double apply_shift(const ShiftMap& map, double s) {
  return std::floor((s + map.R - map.X) / (map.R - map.L)) * (map.R - map.L) + map.X;
}

/// Layered multiscale map for the gamma family.
///
/// g(s) = anchor_value * exp(floor((log(s / anchor) + X2) / (X1 + X2)) (X1 + X2)).
/// For maps built at the origin, anchor = 1 and anchor_value = G exp(-X2), which
/// is the familiar G exp(floor((log s + X2) / (X1 + X2)) (X1 + X2) - X2).
/// Ex post facto maps pin anchor_value to the already drawn output so that
/// g(anchor) reproduces it bit for bit.
struct ScaledGammaMap {
  double G = 1.0;
  double X1 = 0.0;
  double X2 = 0.0;
  double alpha = 1.0;
  double anchor = 1.0;
  double anchor_value = 1.0;

  friend bool operator==(const ScaledGammaMap&, const ScaledGammaMap&) = default;
};

/// Cell index of s under a scaled map; s must be positive.
inline double scale_cell(const ScaledGammaMap& map, double s) {
  const double width = map.X1 + map.X2;
  const double log_ratio = map.anchor == 1.0 ? std::log(s) : std::log(s / map.anchor);
  return std::floor((log_ratio + map.X2) / width);
}

inline double apply_scale(const ScaledGammaMap& map, double s) {
  if (s < 0.0 || std::isnan(s)) throw DomainError("apply_scale: s must be nonnegative");
  if (s == 0.0) return 0.0;
  if (std::isinf(s)) return s;
  const double width = map.X1 + map.X2;
  return map.anchor_value * std::exp(scale_cell(map, s) * width);
}

/// A unimodal (unnormalized) density with its inverse branches and a sampler.
///
/// `sampler` must draw only at index `path.draw` (sub-counters are fine),
/// since the coupler reads its own uniform at `path.draw + 1`.
struct UnimodalSpec {
  std::function<double(double)> density;
  double mode = 0.0;
  std::function<double(double)> left_inverse;
  std::function<double(double)> right_inverse;
  std::function<double(const StreamPath&)> sampler;

  double peak() const { return density(mode); }
};

/// One multishift map per coordinate.
struct BoxMap {
  std::vector<ShiftMap> coords;

  double cell_volume() const {
    double v = 1.0;
    for (const auto& m : coords) v *= m.width();
    return v;
  }

  std::vector<double> apply(std::span<const double> point) const {
    if (point.size() != coords.size()) throw ParameterError("BoxMap::apply: dimension mismatch");
    std::vector<double> out(point.size());
    for (std::size_t i = 0; i < point.size(); ++i) out[i] = apply_shift(coords[i], point[i]);
    return out;
  }
};

enum class UnimodalVariant { reflected, maximal };

// ---------------------------------------------------------------------------
// Shift couplers

inline ShiftMap rect_coupler(double L, double R, const StreamPath& path) {
  if (!(L < R)) throw ParameterError("rect_coupler: need L < R");
  return ShiftMap{L, R, L + (R - L) * uniform01(path)};
}

/// Normal(0, sigma^2) layered coupler over the region with its left half
/// reflected about y = 1/2, which keeps every rectangle at least
/// 2 sigma sqrt(log 4) wide.
inline ShiftMap normal_coupler(double sigma, const StreamPath& path) {
  if (!(sigma > 0.0)) throw ParameterError("normal_coupler: sigma must be positive");
  const double x = sigma * normal01(path);
  const double z = x / sigma;
  // y_raw is the height before reflection; log Y and log(1 - Y) are formed
  // from it directly so neither branch loses digits near 1.
  const double y_raw = std::exp(-0.5 * z * z) * uniform01(path.next());
  double log_y;
  double log_one_minus_y;
  if (x < 0.0) {
    log_y = std::log1p(-y_raw);
    log_one_minus_y = std::log(y_raw);
  } else {
    log_y = std::log(y_raw);
    log_one_minus_y = std::log1p(-y_raw);
  }
  double L = -sigma * std::sqrt(-2.0 * log_one_minus_y);
  double R = sigma * std::sqrt(-2.0 * log_y);
  L = std::min(L, x);
  R = std::max(R, x);
  return ShiftMap{L, R, x};
}

/// Exponential(mean mu) coupler. sign = +1 gives f(s) - s ~ Exp(mu);
/// sign = -1 gives s - f(s) ~ Exp(mu).
inline ShiftMap exponential_coupler(double mu, const StreamPath& path, int sign = +1) {
  if (!(mu > 0.0)) throw ParameterError("exponential_coupler: mu must be positive");
  if (sign != 1 && sign != -1) throw ParameterError("exponential_coupler: sign must be +1 or -1");
  const double x1 = exponential(path, mu);
  const double x2 = exponential(path.next(), mu);
  if (sign > 0) return ShiftMap{0.0, x1 + x2, x1};
  return ShiftMap{-(x1 + x2), 0.0, -x2};
}

// ---------------------------------------------------------------------------
// Scale couplers

/// g(s) / s ~ Gamma(alpha, 1), using G e^{-T} ~ Gamma(alpha) for
/// G ~ Gamma(alpha + 1) and T ~ Exp(mean 1/alpha).
inline ScaledGammaMap gamma_scale_coupler(double alpha, const StreamPath& path) {
  if (!(alpha > 0.0)) throw ParameterError("gamma_scale_coupler: alpha must be positive");
  ScaledGammaMap m;
  m.alpha = alpha;
  m.G = gamma(path, alpha + 1.0);
  m.X1 = exponential(path.next(1), 1.0 / alpha);
  m.X2 = exponential(path.next(2), 1.0 / alpha);
  m.anchor = 1.0;
  m.anchor_value = m.G * std::exp(-m.X2);
  return m;
}

// ---------------------------------------------------------------------------
// Generic unimodal couplers

namespace detail {

// Solve density(x) = y on the monotone branch between `mode` and the
// direction `dir` (-1 left, +1 right) by bracketing then bisection.
inline double invert_branch(const std::function<double(double)>& density, double mode, double y,
                            int dir, double rel_tol) {
  const double peak = density(mode);
  if (!(y > 0.0) || y > peak || !std::isfinite(y)) {
    throw NumericError("unimodal inverse: level outside (0, peak]", y);
  }
  if (y == peak) return mode;
  double step = 1.0;
  double inner = mode;
  double outer = mode + dir * step;
  while (density(outer) >= y) {
    inner = outer;
    step *= 2.0;
    outer = mode + dir * step;
    if (!std::isfinite(outer) || step > 1e300) {
      throw NumericError("unimodal inverse: could not bracket level", y);
    }
  }
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (inner + outer);
    if (std::fabs(outer - inner) <= rel_tol * std::max(1.0, std::fabs(mid))) break;
    if (mid == inner || mid == outer) break;
    (density(mid) >= y ? inner : outer) = mid;
  }
  return 0.5 * (inner + outer);
}

}  // namespace detail

/// Builds a spec whose inverse branches are found by bisection to `rel_tol`.
/// Points where the density is zero (outside the support) are never returned
/// beyond the support edge: the branch stops where density(x) >= y fails.
inline UnimodalSpec make_unimodal_spec(std::function<double(double)> density, double mode,
                                       std::function<double(const StreamPath&)> sampler,
                                       double rel_tol = 1e-12) {
  UnimodalSpec spec;
  spec.density = density;
  spec.mode = mode;
  spec.sampler = std::move(sampler);
  spec.left_inverse = [density, mode, rel_tol](double y) {
    return detail::invert_branch(density, mode, y, -1, rel_tol);
  };
  spec.right_inverse = [density, mode, rel_tol](double y) {
    return detail::invert_branch(density, mode, y, +1, rel_tol);
  };
  return spec;
}

/// Normal(0, sigma^2) with closed-form inverses.
inline UnimodalSpec normal_spec(double sigma) {
  if (!(sigma > 0.0)) throw ParameterError("normal_spec: sigma must be positive");
  UnimodalSpec spec;
  spec.mode = 0.0;
  spec.density = [sigma](double x) {
    const double z = x / sigma;
    return std::exp(-0.5 * z * z);
  };
  spec.left_inverse = [sigma](double y) {
    if (!(y > 0.0 && y <= 1.0)) throw NumericError("normal_spec: level outside (0,1]", y);
    return -sigma * std::sqrt(-2.0 * std::log(y));
  };
  spec.right_inverse = [sigma](double y) {
    if (!(y > 0.0 && y <= 1.0)) throw NumericError("normal_spec: level outside (0,1]", y);
    return sigma * std::sqrt(-2.0 * std::log(y));
  };
  spec.sampler = [sigma](const StreamPath& p) { return sigma * normal01(p); };
  return spec;
}

/// Exponential(mean mu); the whole support lies right of the mode at 0.
inline UnimodalSpec exponential_spec(double mu) {
  if (!(mu > 0.0)) throw ParameterError("exponential_spec: mu must be positive");
  UnimodalSpec spec;
  spec.mode = 0.0;
  spec.density = [mu](double x) { return x < 0.0 ? 0.0 : std::exp(-x / mu); };
  spec.left_inverse = [](double y) {
    if (!(y > 0.0 && y <= 1.0)) throw NumericError("exponential_spec: level outside (0,1]", y);
    return 0.0;
  };
  spec.right_inverse = [mu](double y) {
    if (!(y > 0.0 && y <= 1.0)) throw NumericError("exponential_spec: level outside (0,1]", y);
    return -mu * std::log(y);
  };
  spec.sampler = [mu](const StreamPath& p) { return exponential(p, mu); };
  return spec;
}

namespace detail {

inline double checked_inverse(const std::function<double(double)>& inv, double y) {
  const double x = inv(y);
  if (!std::isfinite(x)) throw NumericError("unimodal inverse returned a non-finite value", y);
  return x;
}

// Rectangle endpoints for the reflected layering, given the sampled offset x
// and the uniform height fraction u.
inline std::pair<double, double> reflected_rectangle(const UnimodalSpec& spec, double x, double u) {
  const double peak = spec.peak();
  double y = spec.density(x) * u;
  if (x < spec.mode) y = peak - y;
  return {checked_inverse(spec.left_inverse, peak - y), checked_inverse(spec.right_inverse, y)};
}

}  // namespace detail

/// Layered coupler for any unimodal density. The reflected variant has a
/// positive minimum rectangle width when mass lies on both sides of the mode;
/// the maximal variant maximizes Pr[f(s1) = f(s2)] for every pair.
inline ShiftMap unimodal_coupler(const UnimodalSpec& spec, const StreamPath& path,
                                 UnimodalVariant variant = UnimodalVariant::reflected) {
  const double x = spec.sampler(path);
  const double u = uniform01(path.next());
  double L;
  double R;
  if (variant == UnimodalVariant::reflected) {
    std::tie(L, R) = detail::reflected_rectangle(spec, x, u);
  } else {
    const double y = spec.density(x) * u;
    L = detail::checked_inverse(spec.left_inverse, y);
    R = detail::checked_inverse(spec.right_inverse, y);
  }
  L = std::min(L, x);
  R = std::max(R, x);
  if (!(L < R)) throw NumericError("unimodal_coupler: degenerate rectangle", spec.density(x) * u);
  return ShiftMap{L, R, x};
}

// ---------------------------------------------------------------------------
// Ex post facto couplers

/// Shift map conditioned on f(s0) = X0, where X0 - s0 was drawn by someone
/// else from `spec`. Randomizing over X0 recovers unimodal_coupler's law.
inline ShiftMap epf_shift(const UnimodalSpec& spec, double s0, double X0, const StreamPath& path) {
  const double x = X0 - s0;
  if (!(spec.density(x) > 0.0)) throw DomainError("epf_shift: X0 - s0 outside the support");
  auto [L, R] = detail::reflected_rectangle(spec, x, uniform01(path.next()));
  L = std::min(L, x);
  R = std::max(R, x);
  if (!(L < R)) throw NumericError("epf_shift: degenerate rectangle", spec.density(x));
  ShiftMap map{L, R, X0};
  // The anchor must land in cell 0. Rounding in s0 + R - X0 can miss by an ulp
  // when X sits on a rectangle edge; widen that edge until it does not.
  for (int guard = 0; guard < 256; ++guard) {
    const double cell = shift_cell(map, s0);
    if (cell == 0.0) break;
    if (cell < 0.0) {
      map.R = std::nextafter(map.R, std::numeric_limits<double>::infinity());
    } else {
      map.L = std::nextafter(map.L, -std::numeric_limits<double>::infinity());
    }
  }
  return map;
}

/// Scale map conditioned on g(s0) = Gstar, where Gstar = s0 * Gamma(alpha).
/// G_{alpha+1} = Gstar/s0 + Exp(1) and X2 = log(1 + Exp(1) s0/Gstar) are
/// independent with the unconditioned laws, so the map has the law of
/// gamma_scale_coupler re-centred at s0.
inline ScaledGammaMap epf_gamma(double alpha, double s0, double Gstar, const StreamPath& path) {
  if (!(alpha > 0.0) || !(s0 > 0.0) || !(Gstar > 0.0)) {
    throw ParameterError("epf_gamma: alpha, s0 and Gstar must be positive");
  }
  const double g_alpha = Gstar / s0;
  const double x = exponential(path, 1.0);
  ScaledGammaMap m;
  m.alpha = alpha;
  m.G = g_alpha + x;
  m.X2 = std::log1p(x / g_alpha);
  m.X1 = exponential(path.next(), 1.0 / alpha);
  m.anchor = s0;
  m.anchor_value = Gstar;
  return m;
}

// ---------------------------------------------------------------------------
// Images

/// Number of distinct values f takes on [a, b].
inline std::int64_t image_count(const ShiftMap& map, double a, double b) {
  if (!(a <= b)) throw ParameterError("image_count: need a <= b");
  return static_cast<std::int64_t>(shift_cell(map, b) - shift_cell(map, a)) + 1;
}

/// The distinct values of f over [a, b], increasing.
inline std::vector<double> image_points(const ShiftMap& map, double a, double b) {
  const std::int64_t count = image_count(map, a, b);
  if (count > 100'000'000) throw ParameterError("image_points: image too large to materialize");
  const double first = shift_cell(map, a);
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t k = 0; k < count; ++k) {
    out.push_back((first + static_cast<double>(k)) * map.width() + map.X);
  }
  return out;
}

/// Number of distinct values g takes on [a, b], 0 < a <= b.
inline std::int64_t scale_image_count(const ScaledGammaMap& map, double a, double b) {
  if (!(a > 0.0) || !(a <= b)) throw ParameterError("scale_image_count: need 0 < a <= b");
  return static_cast<std::int64_t>(scale_cell(map, b) - scale_cell(map, a)) + 1;
}

// ---------------------------------------------------------------------------
// Multidimensional

/// d independent normal couplers, one per coordinate.
inline BoxMap multidim_normal_coupler(double sigma_coord, int d, const StreamPath& path) {
  if (!(sigma_coord > 0.0) || d < 1) {
    throw ParameterError("multidim_normal_coupler: need sigma_coord > 0 and d >= 1");
  }
  BoxMap box;
  box.coords.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) box.coords.push_back(normal_coupler(sigma_coord, path.next(2 * i)));
  return box;
}

// ---------------------------------------------------------------------------
// Closed-form image statistics

namespace formulas {

/// Narrowest rectangle of the reflected normal layering.
inline double normal_min_width(double sigma) { return 2.0 * sigma * std::sqrt(std::log(4.0)); }

/// Mean image size of a length-ell interval: 1 + ell * peak / normalizer.
inline double normal_mean_image(double ell, double sigma) {
  return 1.0 + ell / (std::sqrt(2.0 * std::numbers::pi) * sigma);
}

/// Deterministic ceiling on the image size of a length-ell interval.
inline double normal_max_image(double ell, double sigma) {
  return std::ceil(1.0 + ell / (2.35 * sigma));
}

inline double exponential_mean_image(double ell, double mu) { return 1.0 + ell / mu; }

/// Mean image size of [a, r a] under the gamma multiscale coupler.
inline double gamma_mean_image(double aspect_ratio, double alpha) {
  return 1.0 + alpha * std::log(aspect_ratio);
}

}  // namespace formulas

}  // namespace perfect
