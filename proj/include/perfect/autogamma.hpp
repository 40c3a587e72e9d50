#pragma once

// Autogamma Markov random field.
//
// Each x_i given the rest is Gamma(alpha_i) scaled down by
//   beta_i + sum_{j != i} beta_ij x_j,
// with beta_ij >= 0. Raising a neighbour lowers x_i, so the heat-bath chain is
// anti-monotone: a site's new upper bound comes from its neighbours' lower
// bounds and vice versa. The top state is +infinity, handled entirely by IEEE
// arithmetic (infinite inverse scale -> scale 0 -> apply_scale returns 0).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "perfect/cftp.hpp"
#include "perfect/couplers.hpp"
#include "perfect/errors.hpp"
#include "perfect/io.hpp"
#include "perfect/replay_rng.hpp"

namespace perfect::autogamma {

struct Coupling {
  std::size_t site;
  double beta;
};

class GammaField {
 public:
  GammaField() = default;
  explicit GammaField(std::size_t n)
      : alpha_(n, std::numeric_limits<double>::quiet_NaN()),
        beta_(n, std::numeric_limits<double>::quiet_NaN()),
        neighbors_(n) {}

  std::size_t size() const { return alpha_.size(); }
  double alpha(std::size_t i) const { return alpha_[i]; }
  double beta(std::size_t i) const { return beta_[i]; }
  const std::vector<Coupling>& neighbors(std::size_t i) const { return neighbors_[i]; }

  void set_site(std::size_t i, double alpha, double beta) {
    check_site(i);
    if (!(alpha > 0.0) || !(beta > 0.0)) throw ParameterError("GammaField: alpha and beta must be positive");
    alpha_[i] = alpha;
    beta_[i] = beta;
  }

  /// Adds beta_ij = beta_ji. Zero couplings are dropped so that 0 * inf never occurs.
  void add_pair(std::size_t i, std::size_t j, double beta_ij) {
    check_site(i);
    check_site(j);
    if (i == j) throw ParameterError("GammaField: pair on the diagonal");
    if (!(beta_ij >= 0.0) || !std::isfinite(beta_ij)) {
      throw ParameterError("GammaField: pair interaction must be finite and nonnegative");
    }
    if (beta_ij == 0.0) return;
    neighbors_[i].push_back({j, beta_ij});
    neighbors_[j].push_back({i, beta_ij});
  }

  /// beta_ij, summed over repeated pair lines.
  double pair(std::size_t i, std::size_t j) const {
    double total = 0.0;
    for (const auto& c : neighbors_[i]) {
      if (c.site == j) total += c.beta;
    }
    return total;
  }

  void validate() const {
    if (alpha_.empty()) throw ModelError("GammaField: no sites");
    for (std::size_t i = 0; i < size(); ++i) {
      if (!(alpha_[i] > 0.0) || !(beta_[i] > 0.0)) {
        throw ModelError("GammaField: site " + std::to_string(i) + " has no valid parameters");
      }
    }
  }

 private:
  void check_site(std::size_t i) const {
    if (i >= size()) throw ParameterError("GammaField: site index out of range");
  }

  std::vector<double> alpha_;
  std::vector<double> beta_;
  std::vector<std::vector<Coupling>> neighbors_;
};

using IntervalState = BoundPair<std::vector<double>>;

/// beta_i + sum_j beta_ij x_j; +inf whenever a coupled neighbour is +inf.
inline double inv_scale(const GammaField& field, std::size_t i, std::span<const double> heights) {
  double s = field.beta(i);
  for (const auto& c : field.neighbors(i)) s += c.beta * heights[c.site];
  return s;
}

/// Anti-monotone heat-bath update of site i with one shared scale map.
inline void antimonotone_site_update(const GammaField& field, std::size_t i, IntervalState& bounds,
                                     const ScaledGammaMap& map) {
  const double upper = apply_scale(map, 1.0 / inv_scale(field, i, bounds.lower));
  const double lower = apply_scale(map, 1.0 / inv_scale(field, i, bounds.upper));
  bounds.upper[i] = upper;
  bounds.lower[i] = lower;
}

/// One Gibbs sweep of a single configuration with the same maps a bound sweep would use.
inline void gibbs_site_update(const GammaField& field, std::size_t i, std::vector<double>& x,
                              const ScaledGammaMap& map) {
  x[i] = apply_scale(map, 1.0 / inv_scale(field, i, x));
}

/// The sweep (sites 0..n-1 in order) as an anti-monotone CFTP model.
struct AutogammaModel {
  using State = std::vector<double>;
  const GammaField* field = nullptr;

  IntervalState initial_bounds() const {
    const std::size_t n = field->size();
    return {std::vector<double>(n, 0.0),
            std::vector<double>(n, std::numeric_limits<double>::infinity())};
  }

  ScaledGammaMap site_map(std::uint64_t seed, TimeIndex t, std::size_t i) const {
    return gamma_scale_coupler(
        field->alpha(i),
        StreamPath{.master_seed = seed, .epoch = t.epoch, .step = t.step,
                   .site = static_cast<std::int64_t>(i)});
  }

  void update(IntervalState& b, std::uint64_t seed, TimeIndex t) const {
    for (std::size_t i = 0; i < field->size(); ++i) {
      antimonotone_site_update(*field, i, b, site_map(seed, t, i));
    }
  }
};

struct AutogammaResult {
  std::vector<double> heights;
  /// Smallest look-back, in sweeps, that coalesces.
  std::int64_t sweeps_to_coalesce = 0;
  RunDiagnostics diagnostics;
};

/// Exact sample from the field.
inline AutogammaResult run_autogamma(const GammaField& field, std::uint64_t seed,
                                     CftpOptions options = {}) {
  field.validate();
  auto result = run_monotone_cftp(AutogammaModel{&field}, seed, options);
  return {std::move(result.state), result.diagnostics.t_star, result.diagnostics};
}

/// Reads `site i alpha beta` and `pair i j beta_ij` lines (0-based sites).
inline GammaField read_field(std::istream& in) {
  const auto lines = io::tokenize(in);
  std::size_t n = 0;
  for (const auto& line : lines) {
    if (line.tokens[0] == "site" && line.tokens.size() == 4) {
      n = std::max(n, static_cast<std::size_t>(io::to_index(line, 1)) + 1);
    }
  }
  GammaField field(n);
  for (const auto& line : lines) {
    const auto& kw = line.tokens[0];
    if (kw == "site" && line.tokens.size() == 4) {
      try {
        field.set_site(static_cast<std::size_t>(io::to_index(line, 1)), io::to_double(line, 2),
                       io::to_double(line, 3));
      } catch (const ParameterError& e) {
        throw ModelError("line " + std::to_string(line.number) + ": " + e.what());
      }
    } else if (kw == "pair" && line.tokens.size() == 4) {
      try {
        field.add_pair(static_cast<std::size_t>(io::to_index(line, 1)),
                       static_cast<std::size_t>(io::to_index(line, 2)), io::to_double(line, 3));
      } catch (const ParameterError& e) {
        throw ModelError("line " + std::to_string(line.number) + ": " + e.what());
      }
    } else {
      throw ModelError("line " + std::to_string(line.number) +
                       ": expected 'site i alpha beta' or 'pair i j beta_ij'");
    }
  }
  field.validate();
  return field;
}

}  // namespace perfect::autogamma
