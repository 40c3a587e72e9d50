#pragma once

// End-to-end acceptance checks. Each check is a pure function of a base seed
// and returns a verdict with a one-line summary of what it measured. Shared by
// the acceptance test binary and `perfect-sampler validate`.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "perfect/autogamma.hpp"
#include "perfect/autonormal.hpp"
#include "perfect/cftp.hpp"
#include "perfect/couplers.hpp"
#include "perfect/models.hpp"
#include "perfect/replay_rng.hpp"
#include "perfect/stats.hpp"
#include "perfect/toy_chain.hpp"
#include "perfect/validation/oracles.hpp"

namespace perfect::validation {

/// Base seed of the shipped acceptance run.
inline constexpr std::uint64_t kDefaultSeed = 20260917;

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Accumulates named sub-checks into one verdict.
class Verdict {
 public:
  void check(bool ok, const std::string& what) {
    passed_ = passed_ && ok;
    if (!out_.str().empty()) out_ << "; ";
    out_ << (ok ? "" : "FAILED ") << what;
  }
  bool passed() const { return passed_; }
  std::string text() const { return out_.str(); }

 private:
  bool passed_ = true;
  std::ostringstream out_;
};

template <class... Args>
std::string fmt(const Args&... args) {
  std::ostringstream os;
  os << std::setprecision(6);
  (os << ... << args);
  return os.str();
}

inline StreamPath sample_path(std::uint64_t seed, std::int64_t i, std::uint32_t channel = 0) {
  return StreamPath{.master_seed = seed, .step = i, .channel = channel};
}

/// Value of a binary fraction written as "0.b1b2b3...".
inline double binary_fraction(const std::string& digits) {
  double value = 0.0;
  double place = 0.5;
  for (char c : digits.substr(2)) {
    if (c == '1') value += place;
    place /= 2.0;
  }
  return value;
}

inline double fraction_equal(const std::vector<int>& xs, int value) {
  std::int64_t hits = 0;
  for (int x : xs) hits += x == value;
  return static_cast<double>(hits) / static_cast<double>(xs.size());
}

inline autonormal::InteractionGraph two_site_graph(double F) {
  autonormal::InteractionGraph g(2, 0);
  g.add_edge(0, 1, F);
  return g;
}

}  // namespace detail

// 1 -------------------------------------------------------------------------
inline CriterionResult toy_exactness(std::uint64_t seed) {
  detail::Stopwatch clock;
  constexpr int n = 4;
  constexpr int samples = 100'000;
  std::vector<std::int64_t> counts(n + 1, 0);
  for (int i = 0; i < samples; ++i) ++counts[static_cast<std::size_t>(toy::run_toy_cftp(n, derive_seed(seed, i)))];
  const auto chi = stats::chi_square_uniform(counts);
  const double elapsed = clock.seconds();
  detail::Verdict v;
  v.check(chi.p_value > 1e-3, detail::fmt("n=4, 1e5 samples: chi2=", chi.statistic, " p=", chi.p_value));
  v.check(elapsed < 10.0, detail::fmt("runtime ", elapsed, " s < 10 s"));
  return {1, "Toy CFTP exactness", v.passed(), v.text(), elapsed};
}

// 2 -------------------------------------------------------------------------
inline CriterionResult forward_doubling_bias(std::uint64_t seed) {
  detail::Stopwatch clock;
  std::vector<int> out(100'000);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = toy::run_forward_doubling_variant(2, derive_seed(seed, i));
  const double freq = detail::fraction_equal(out, 1);
  const auto law = oracle::forward_doubling_enumerated_n2(24);
  detail::Verdict v;
  v.check(std::abs(freq - 1.0 / 6.0) <= 0.01, detail::fmt("Pr[1]=", freq, " vs 1/6 +- 0.01"));
  v.check(std::abs(law[1] - 1.0 / 6.0) <= 1e-4,
          detail::fmt("depth-24 enumeration Pr[1]=", std::setprecision(10), law[1], " vs 1/6 +- 1e-4"));
  return {2, "Forward-doubling bias", v.passed(), v.text(), clock.seconds()};
}

// 3 -------------------------------------------------------------------------
inline CriterionResult fresh_coins_bias(std::uint64_t seed) {
  detail::Stopwatch clock;
  std::vector<int> out(100'000);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = toy::run_fresh_coins_variant(2, derive_seed(seed, i));
  const double freq = detail::fraction_equal(out, 1);
  const double quoted = detail::binary_fraction("0.0010010101001010101010101001");
  const auto law = oracle::fresh_coins_law_n2();
  const auto enumerated = oracle::fresh_coins_enumerated_n2(4);
  detail::Verdict v;
  v.check(std::abs(freq - 0.1458) <= 0.01, detail::fmt("Pr[1]=", freq, " vs 0.1458 +- 0.01"));
  v.check(std::abs(law[1] - 0.1458) <= 1e-3 && std::abs(law[1] - quoted) <= std::ldexp(1.0, -28),
          detail::fmt("exact law Pr[1]=", std::setprecision(12), law[1], " (binary expansion ", quoted, ")"));
  v.check(std::abs(enumerated[1] - law[1]) <= 1e-6,
          detail::fmt("enumeration of attempts 0..4 Pr[1]=", std::setprecision(10), enumerated[1]));
  return {3, "Fresh-coins bias", v.passed(), v.text(), clock.seconds()};
}

// 4 -------------------------------------------------------------------------
inline CriterionResult work_bound(std::uint64_t seed) {
  detail::Stopwatch clock;
  constexpr int runs = 10'000;
  std::int64_t violations = 0;
  double ratio_sum = 0.0;
  for (int i = 0; i < runs; ++i) {
    const auto d = toy::run_toy_cftp_diagnosed(4, derive_seed(seed, 2 * i)).diagnostics;
    violations += d.total_updates > 4 * d.t_star;
    ratio_sum += static_cast<double>(d.total_updates) / static_cast<double>(d.t_star);
  }
  const double toy_ratio = ratio_sum / runs;
  const auto graph = autonormal::InteractionGraph::grid(2, 2, 1.0, false);
  std::int64_t an_violations = 0;
  double an_ratio_sum = 0.0;
  for (int i = 0; i < runs; ++i) {
    const auto d = autonormal::run_truncated_cftp_diagnosed(graph, derive_seed(seed, 2 * i + 1)).diagnostics;
    an_violations += d.total_updates > 4 * d.t_star;
    an_ratio_sum += static_cast<double>(d.total_updates) / static_cast<double>(d.t_star);
  }
  detail::Verdict v;
  v.check(violations == 0, detail::fmt("toy n=4: ", violations, " of 1e4 runs exceed 4 T* (mean ratio ",
                                       toy_ratio, ")"));
  v.check(an_violations == 0, detail::fmt("autonormal 2x2: ", an_violations,
                                          " of 1e4 runs exceed 4 T* (mean ratio ", an_ratio_sum / runs, ")"));
  return {4, "Work bound", v.passed(), v.text(), clock.seconds()};
}

// 5 -------------------------------------------------------------------------
inline CriterionResult normal_width(std::uint64_t seed) {
  detail::Stopwatch clock;
  constexpr double sigma = 1.3;
  double min_width = std::numeric_limits<double>::infinity();
  for (std::int64_t i = 0; i < 1'000'000; ++i) {
    min_width = std::min(min_width, normal_coupler(sigma, detail::sample_path(seed, i)).width());
  }
  const double floor = 2.0 * sigma * std::sqrt(std::log(4.0));
  detail::Verdict v;
  v.check(min_width >= floor - 1e-9,
          detail::fmt("min width/sigma=", std::setprecision(9), min_width / sigma, " >= 2 sqrt(log 4)"));
  v.check(std::abs(min_width / sigma - 2.35482) <= 1e-3, "within 1e-3 of 2.35482");
  return {5, "Normal coupler width", v.passed(), v.text(), clock.seconds()};
}

// 6 -------------------------------------------------------------------------
inline CriterionResult image_size(std::uint64_t seed) {
  detail::Stopwatch clock;
  constexpr int maps = 100'000;
  const double sigma = 0.8;
  const double ell_n = 2.5066 * sigma;
  const double mu = 1.7;
  const double ell_e = 3.0 * mu;
  const double alpha = 2.5;
  const double r = std::exp(2.0);
  const double a = 0.37;
  double normal_sum = 0.0;
  double exp_sum = 0.0;
  double gamma_sum = 0.0;
  for (int i = 0; i < maps; ++i) {
    normal_sum += static_cast<double>(
        image_count(normal_coupler(sigma, detail::sample_path(seed, i, 0)), a, a + ell_n));
    exp_sum += static_cast<double>(
        image_count(exponential_coupler(mu, detail::sample_path(seed, i, 1)), a, a + ell_e));
    gamma_sum += static_cast<double>(
        scale_image_count(gamma_scale_coupler(alpha, detail::sample_path(seed, i, 2)), a, a * r));
  }
  const double n_mean = normal_sum / maps;
  const double e_mean = exp_sum / maps;
  const double g_mean = gamma_sum / maps;
  const double n_want = formulas::normal_mean_image(ell_n, sigma);
  const double e_want = formulas::exponential_mean_image(ell_e, mu);
  const double g_want = formulas::gamma_mean_image(r, alpha);
  detail::Verdict v;
  v.check(std::abs(n_mean - 2.0) <= 0.02 * 2.0, detail::fmt("normal ", n_mean, " vs 2.0 (formula ", n_want, ")"));
  v.check(std::abs(e_mean - e_want) <= 0.02 * e_want, detail::fmt("exponential ", e_mean, " vs ", e_want));
  v.check(std::abs(g_mean - g_want) <= 0.03 * g_want, detail::fmt("gamma ", g_mean, " vs ", g_want));
  return {6, "Image-size formulas", v.passed(), v.text(), clock.seconds()};
}

// 7 -------------------------------------------------------------------------
inline CriterionResult marginals(std::uint64_t seed) {
  detail::Stopwatch clock;
  constexpr int n = 100'000;
  const double sigma = 1.5;
  const double mu = 2.0;
  const double alpha = 2.5;
  const std::vector<double> anchors{0.0, 0.37, -12.5};
  const std::vector<double> scale_anchors{1.0, 0.37, 12.5};
  const auto generic = make_unimodal_spec(
      [](double x) { return std::exp(-0.5 * x * x); }, 0.0,
      [](const StreamPath& p) { return normal01(p); });

  detail::Verdict v;
  double worst = 1.0;
  int channel = 0;
  auto shift_check = [&](const std::string& name, const std::function<ShiftMap(const StreamPath&)>& make,
                         const std::function<double(double)>& cdf, double sign) {
    for (double s : anchors) {
      ++channel;
      std::vector<double> d(n);
      for (int i = 0; i < n; ++i) {
        d[i] = sign * (apply_shift(make(detail::sample_path(seed, i, channel)), s) - s);
      }
      const auto ks = stats::ks_test(d, cdf);
      worst = std::min(worst, ks.p_value);
      if (ks.p_value <= 1e-3) v.check(false, detail::fmt(name, " at s=", s, " p=", ks.p_value));
    }
  };
  shift_check("normal", [&](const StreamPath& p) { return normal_coupler(sigma, p); },
              [&](double x) { return oracle::normal_cdf(x, sigma); }, 1.0);
  shift_check("exponential(+)", [&](const StreamPath& p) { return exponential_coupler(mu, p, +1); },
              [&](double x) { return oracle::exponential_cdf(x, mu); }, 1.0);
  shift_check("exponential(-)", [&](const StreamPath& p) { return exponential_coupler(mu, p, -1); },
              [&](double x) { return oracle::exponential_cdf(x, mu); }, -1.0);
  shift_check("unimodal reflected", [&](const StreamPath& p) { return unimodal_coupler(generic, p); },
              [](double x) { return oracle::normal_cdf(x); }, 1.0);
  shift_check("unimodal maximal",
              [&](const StreamPath& p) { return unimodal_coupler(generic, p, UnimodalVariant::maximal); },
              [](double x) { return oracle::normal_cdf(x); }, 1.0);
  for (double s : scale_anchors) {
    ++channel;
    std::vector<double> q(n);
    for (int i = 0; i < n; ++i) {
      q[i] = apply_scale(gamma_scale_coupler(alpha, detail::sample_path(seed, i, channel)), s) / s;
    }
    const auto ks = stats::ks_test(q, [&](double x) { return oracle::gamma_cdf(x, alpha); });
    worst = std::min(worst, ks.p_value);
    if (ks.p_value <= 1e-3) v.check(false, detail::fmt("gamma at s=", s, " p=", ks.p_value));
  }
  v.check(worst > 1e-3, detail::fmt(channel, " coupler/anchor pairs, n=1e5 each, smallest KS p=", worst));
  return {7, "Marginal correctness", v.passed(), v.text(), clock.seconds()};
}

// 8 -------------------------------------------------------------------------
inline CriterionResult ex_post_facto(std::uint64_t seed) {
  detail::Stopwatch clock;
  constexpr int n = 100'000;
  const double sigma = 1.2;
  const double alpha = 1.7;
  const auto spec = normal_spec(sigma);
  std::int64_t shift_misses = 0;
  std::int64_t scale_misses = 0;
  std::vector<double> epf_shift_out(n), plain_shift_out(n), epf_scale_out(n), plain_scale_out(n);
  std::vector<double> G(n), X2(n);
  for (int i = 0; i < n; ++i) {
    // Random anchor and output; the output is drawn first, as an outside caller would.
    const StreamPath base = detail::sample_path(seed, i, 0);
    const double s0 = 20.0 * (uniform01(base.with_channel(1)) - 0.5);
    const double X0 = s0 + sigma * normal01(base.with_channel(2));
    const ShiftMap m = epf_shift(spec, s0, X0, base.with_channel(3));
    shift_misses += !bitwise_equal(apply_shift(m, s0), X0);
    epf_shift_out[i] = apply_shift(m, s0 + 0.9) - (s0 + 0.9);
    plain_shift_out[i] = apply_shift(unimodal_coupler(spec, base.with_channel(4)), 0.9) - 0.9;

    const double t0 = std::exp(4.0 * (uniform01(base.with_channel(5)) - 0.5));
    const double Gstar = t0 * gamma(base.with_channel(6), alpha);
    const ScaledGammaMap g = epf_gamma(alpha, t0, Gstar, base.with_channel(7));
    scale_misses += !bitwise_equal(apply_scale(g, t0), Gstar);
    epf_scale_out[i] = apply_scale(g, 2.3 * t0) / (2.3 * t0);
    plain_scale_out[i] = apply_scale(gamma_scale_coupler(alpha, base.with_channel(8)), 2.3) / 2.3;
    G[i] = g.G;
    X2[i] = g.X2;
  }
  const auto ks_shift = stats::ks_two_sample(epf_shift_out, plain_shift_out);
  const auto ks_scale = stats::ks_two_sample(epf_scale_out, plain_scale_out);
  const double corr = stats::correlation(G, X2);
  const auto ks_G = stats::ks_test(G, [&](double x) { return oracle::gamma_cdf(x, alpha + 1.0); });
  const auto ks_X2 = stats::ks_test(X2, [&](double x) { return oracle::exponential_cdf(x, 1.0 / alpha); });
  detail::Verdict v;
  v.check(shift_misses == 0 && scale_misses == 0,
          detail::fmt("anchor misses: shift ", shift_misses, ", gamma ", scale_misses, " of 1e5"));
  v.check(ks_shift.p_value > 1e-3, detail::fmt("shift map law KS p=", ks_shift.p_value));
  v.check(ks_scale.p_value > 1e-3, detail::fmt("gamma map law KS p=", ks_scale.p_value));
  v.check(std::abs(corr) <= 0.01, detail::fmt("corr(G, X2)=", corr));
  v.check(ks_G.p_value > 1e-3 && ks_X2.p_value > 1e-3,
          detail::fmt("G ~ Gamma(alpha+1) p=", ks_G.p_value, ", X2 ~ Exp p=", ks_X2.p_value));
  return {8, "Ex post facto couplers", v.passed(), v.text(), clock.seconds()};
}

// 9 -------------------------------------------------------------------------
inline CriterionResult two_site_law(std::uint64_t seed) {
  detail::Stopwatch clock;
  constexpr double F = 2.5;
  const auto graph = detail::two_site_graph(F);
  std::vector<double> d(10'000);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto x = autonormal::run_exact_autonormal(graph, derive_seed(seed, i)).config;
    d[i] = x[1] - x[0];
  }
  const auto var = stats::covariance_with_se(d, d);
  detail::Verdict v;
  v.check(std::abs(var.mean - 1.0 / F) <= 3.0 * var.standard_error,
          detail::fmt("F=2.5: Var(x2-x1)=", var.mean, " +- ", var.standard_error, " vs 1/F=", 1.0 / F));
  return {9, "Autonormal two-site law", v.passed(), v.text(), clock.seconds()};
}

// 10 ------------------------------------------------------------------------
inline CriterionResult covariance_oracle(std::uint64_t seed) {
  detail::Stopwatch clock;
  const auto graph = autonormal::InteractionGraph::grid(3, 3, 1.0, true);
  const auto tree = autonormal::bfs_spanning_tree(graph);
  const auto sites = autonormal::non_root_sites(graph);
  const Eigen::MatrixXd exact = autonormal::exact_covariance(graph);
  constexpr int samples = 10'000;
  std::vector<std::vector<double>> columns(sites.size(), std::vector<double>(samples));
  for (int s = 0; s < samples; ++s) {
    const auto x = autonormal::run_exact_autonormal(graph, tree, derive_seed(seed, s)).config;
    for (std::size_t r = 0; r < sites.size(); ++r) columns[r][s] = x[sites[r]];
  }
  double worst_z = 0.0;
  for (std::size_t a = 0; a < sites.size(); ++a) {
    for (std::size_t b = a; b < sites.size(); ++b) {
      const auto c = stats::covariance_with_se(columns[a], columns[b]);
      worst_z = std::max(worst_z, std::abs(c.mean - exact(static_cast<Eigen::Index>(a),
                                                          static_cast<Eigen::Index>(b))) /
                                      c.standard_error);
    }
  }
  const double elapsed = clock.seconds();
  detail::Verdict v;
  v.check(worst_z <= 4.0, detail::fmt("3x3 torus, 1e4 samples, 36 entries: worst |z|=", worst_z, " <= 4"));
  v.check(elapsed < 300.0, detail::fmt("runtime ", elapsed, " s < 300 s"));
  return {10, "Autonormal covariance oracle", v.passed(), v.text(), elapsed};
}

// 11 ------------------------------------------------------------------------
inline CriterionResult composite_efficiency(std::uint64_t seed) {
  detail::Stopwatch clock;
  const auto graph = autonormal::InteractionGraph::grid(3, 3, 1.0, true);
  const auto tree = autonormal::bfs_spanning_tree(graph);
  constexpr int runs = 10'000;
  double maps = 0.0;
  for (int i = 0; i < runs; ++i) {
    maps += static_cast<double>(autonormal::run_exact_autonormal(graph, tree, derive_seed(seed, i)).maps_used);
  }
  const std::uint64_t epoch_seed = derive_seed(seed, runs);
  std::int64_t coalesced = 0;
  for (std::int64_t k = 1; k <= runs; ++k) {
    coalesced += autonormal::composite_update(graph, tree, epoch_seed, k).coalesced;
  }
  const double mean_T = maps / runs;
  const double freq = static_cast<double>(coalesced) / runs;
  detail::Verdict v;
  v.check(mean_T <= 2.1, detail::fmt("3x3 torus: mean T=", mean_T, " <= 2.1"));
  v.check(freq >= 0.45, detail::fmt("per-map coalescence ", freq, " >= 0.45"));
  return {11, "Composite-map efficiency", v.passed(), v.text(), clock.seconds()};
}

// 12 ------------------------------------------------------------------------
inline CriterionResult chain_energy(std::uint64_t seed) {
  detail::Stopwatch clock;
  double worst = 0.0;
  for (std::int64_t c = 0; c < 1000; ++c) {
    const StreamPath p = detail::sample_path(seed, c);
    const int k = 1 + static_cast<int>(8.0 * uniform01(p));
    std::vector<double> F(static_cast<std::size_t>(k));
    std::vector<double> resistances(F.size());
    for (int i = 0; i < k; ++i) {
      F[i] = std::exp(std::log(100.0) * (uniform01(p.with_site(i + 1)) - 0.5));
      resistances[i] = 1.0 / F[i];
    }
    const double x = 10.0 * (uniform01(p.with_channel(1)) - 0.5);
    worst = std::max(worst, std::abs(autonormal::min_chain_energy(resistances, x) -
                                     oracle::chain_energy_numeric(F, x)));
  }
  detail::Verdict v;
  v.check(worst <= 1e-9, detail::fmt("1e3 chains of length 1-8: max |closed - numeric|=", worst));
  return {12, "Chain-energy claim", v.passed(), v.text(), clock.seconds()};
}

// 13 ------------------------------------------------------------------------
inline CriterionResult autogamma_checks(std::uint64_t seed) {
  detail::Stopwatch clock;
  detail::Verdict v;

  autogamma::GammaField single(1);
  single.set_site(0, 3.3, 2.0);
  std::vector<double> xs(10'000);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xs[i] = 2.0 * autogamma::run_autogamma(single, derive_seed(seed, i), {.find_t_star = false}).heights[0];
  }
  const auto ks1 = stats::ks_test(xs, [](double x) { return oracle::gamma_cdf(x, 3.3); });
  v.check(ks1.p_value > 1e-3, detail::fmt("single site vs Gamma(3.3)/2: KS p=", ks1.p_value));

  const oracle::TwoSiteGamma spec{2.0, 1.0, 3.0, 1.5, 0.8};
  autogamma::GammaField pair(2);
  pair.set_site(0, spec.alpha0, spec.beta0);
  pair.set_site(1, spec.alpha1, spec.beta1);
  pair.add_pair(0, 1, spec.beta01);
  std::vector<double> a0(20'000), a1(20'000);
  for (std::size_t i = 0; i < a0.size(); ++i) {
    const auto h = autogamma::run_autogamma(pair, derive_seed(seed, 100'000 + i), {.find_t_star = false}).heights;
    a0[i] = h[0];
    a1[i] = h[1];
  }
  const auto gibbs = oracle::two_site_gibbs(spec, 10'000'000, 1000, 100, derive_seed(seed, 1u << 30));
  const auto ks0 = stats::ks_two_sample(a0, gibbs[0]);
  const auto ks01 = stats::ks_two_sample(a1, gibbs[1]);
  v.check(ks0.p_value > 1e-3 && ks01.p_value > 1e-3,
          detail::fmt("two-site vs 1e7-sweep Gibbs: KS p=", ks0.p_value, ", ", ks01.p_value));

  const auto pumps = models::pumps();
  double sweeps = 0.0;
  constexpr int pump_runs = 2000;
  for (int i = 0; i < pump_runs; ++i) {
    sweeps += static_cast<double>(autogamma::run_autogamma(pumps, derive_seed(seed, 200'000 + i)).sweeps_to_coalesce);
  }
  const double mean_sweeps = sweeps / pump_runs;
  v.check(mean_sweeps >= 2.5 && mean_sweeps <= 8.0,
          detail::fmt("pumps: mean sweeps to coalesce ", mean_sweeps, " in [2.5, 8]"));
  return {13, "Autogamma", v.passed(), v.text(), clock.seconds()};
}

// 14 ------------------------------------------------------------------------

/// Serializes every sampler's output for one seed with exact (hex) floats.
inline std::string sampler_transcript(std::uint64_t seed) {
  std::ostringstream os;
  os << std::hexfloat;
  for (int i = 0; i < 50; ++i) {
    const std::uint64_t s = derive_seed(seed, i);
    const auto toy_run = toy::run_toy_cftp_diagnosed(5, s);
    os << toy_run.state << ' ' << toy_run.diagnostics.t_star << ' ' << toy_run.diagnostics.total_updates << ' '
       << toy::run_fresh_coins_variant(2, s) << ' ' << toy::run_forward_doubling_variant(2, s) << ' '
       << toy::run_forward_coalescence_only(3, s) << '\n';
  }
  const auto graph = autonormal::InteractionGraph::grid(3, 3, 1.0, true);
  autogamma::GammaField field(3);
  field.set_site(0, 2.0, 1.0);
  field.set_site(1, 0.7, 2.0);
  field.set_site(2, 4.0, 0.5);
  field.add_pair(0, 1, 0.5);
  field.add_pair(1, 2, 1.5);
  for (int i = 0; i < 10; ++i) {
    const std::uint64_t s = derive_seed(seed, 1000 + i);
    const auto g = autogamma::run_autogamma(field, s);
    for (double h : g.heights) os << h << ' ';
    os << g.sweeps_to_coalesce << '\n';
    const auto e = autonormal::run_exact_autonormal(graph, s);
    for (double h : e.config) os << h << ' ';
    os << e.maps_used << '\n';
    for (double h : autonormal::run_truncated_cftp(graph, s)) os << h << ' ';
    os << '\n';
  }
  for (int i = 0; i < 100; ++i) {
    const StreamPath p = detail::sample_path(seed, i);
    const ShiftMap m = normal_coupler(1.0, p);
    const ScaledGammaMap g = gamma_scale_coupler(0.6, p);
    os << m.L << ' ' << m.R << ' ' << m.X << ' ' << g.G << ' ' << g.X1 << ' ' << g.X2 << '\n';
  }
  return os.str();
}

inline CriterionResult determinism(std::uint64_t seed) {
  detail::Stopwatch clock;
  const std::string first = sampler_transcript(seed);
  const std::string second = sampler_transcript(seed);
  const std::string other = sampler_transcript(seed + 1);
  detail::Verdict v;
  v.check(first == second, detail::fmt("repeat run byte-identical (", first.size(), " bytes)"));
  v.check(first != other, "different seed changes output");
  return {14, "Determinism", v.passed(), v.text(), clock.seconds()};
}

// ---------------------------------------------------------------------------

using Criterion = std::function<CriterionResult(std::uint64_t)>;

inline std::vector<Criterion> all_criteria() {
  return {toy_exactness,   forward_doubling_bias, fresh_coins_bias,   work_bound,
          normal_width,    image_size,            marginals,          ex_post_facto,
          two_site_law,    covariance_oracle,     composite_efficiency, chain_energy,
          autogamma_checks, determinism};
}

/// Runs every criterion with seed derive_seed(base_seed, id), calling
/// `report` after each one.
inline bool run_acceptance(std::uint64_t base_seed,
                           const std::function<void(const CriterionResult&)>& report) {
  bool all = true;
  const auto criteria = all_criteria();
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    CriterionResult r;
    try {
      r = criteria[k](derive_seed(base_seed, k + 1));
    } catch (const std::exception& e) {
      r = {static_cast<int>(k + 1), "criterion " + std::to_string(k + 1), false,
           std::string("threw: ") + e.what(), 0.0};
    }
    all = all && r.passed;
    report(r);
  }
  return all;
}

inline std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << "  [" << std::setw(2) << r.id << "] " << r.title << ": " << r.detail
     << " (" << std::fixed << std::setprecision(1) << r.seconds << " s)";
  return os.str();
}

}  // namespace perfect::validation
