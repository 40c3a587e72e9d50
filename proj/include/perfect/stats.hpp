#pragma once

// Goodness-of-fit and estimation helpers.
//
// KS p-values use the asymptotic Kolmogorov distribution with Stephens'
// finite-n correction. Adequate from n around 10^3 upward; not an exact
// small-sample test.

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "perfect/errors.hpp"

namespace perfect::stats {

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// Pr[K > lambda] for the Kolmogorov distribution.
inline double kolmogorov_survival(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-17) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

inline double ks_p_value(double D, double effective_n) {
  const double rn = std::sqrt(effective_n);
  return kolmogorov_survival((rn + 0.12 + 0.11 / rn) * D);
}

/// One-sample Kolmogorov-Smirnov test against a continuous cdf.
inline TestResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw ParameterError("ks_test: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double D = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double F = cdf(samples[i]);
    D = std::max({D, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return {D, ks_p_value(D, n), samples.size()};
}

/// Two-sample Kolmogorov-Smirnov test.
inline TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw ParameterError("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double D = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    D = std::max(D, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {D, ks_p_value(D, na * nb / (na + nb)), a.size() + b.size()};
}

/// Pearson chi-square against equal cell probabilities, k - 1 degrees of freedom.
inline TestResult chi_square_uniform(std::span<const std::int64_t> counts) {
  if (counts.size() < 2) throw ParameterError("chi_square_uniform: need at least two categories");
  std::int64_t total = 0;
  for (auto c : counts) {
    if (c < 0) throw ParameterError("chi_square_uniform: negative count");
    total += c;
  }
  if (total < 5 * static_cast<std::int64_t>(counts.size())) {
    throw ParameterError("chi_square_uniform: fewer than 5 expected per category");
  }
  const double expected = static_cast<double>(total) / static_cast<double>(counts.size());
  double stat = 0.0;
  for (auto c : counts) {
    const double d = static_cast<double>(c) - expected;
    stat += d * d / expected;
  }
  const double dof = static_cast<double>(counts.size() - 1);
  const double p = stat == 0.0 ? 1.0 : boost::math::gamma_q(dof / 2.0, stat / 2.0);
  return {stat, p, static_cast<std::size_t>(total)};
}

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Sample mean and s / sqrt(n).
inline MeanEstimate mean_with_ci(std::span<const double> samples) {
  if (samples.size() < 2) throw ParameterError("mean_with_ci: need at least two samples");
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

/// Unbiased sample covariance with a standard error from the product deviations.
inline MeanEstimate covariance_with_se(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ParameterError("covariance_with_se: length mismatch");
  if (a.size() < 3) throw ParameterError("covariance_with_se: need at least three samples");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  std::vector<double> products(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) products[i] = (a[i] - ma) * (b[i] - mb);
  const auto est = mean_with_ci(products);
  return {est.mean * n / (n - 1.0), est.standard_error * n / (n - 1.0)};
}

inline double correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw ParameterError("correlation: bad lengths");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace perfect::stats
