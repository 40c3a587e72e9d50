#pragma once

// Autonormal distribution (discrete free field).
//
// Heights x_0..x_{n-1} with one root pinned to 0 and density proportional to
// exp(-E), E = sum over edges of F_ij (x_i - x_j)^2 / 2. Site i given the rest
// is Normal(weighted neighbour mean, 1 / sum_j F_ij).
//
// Two samplers live here:
//  * run_truncated_cftp: monotone CFTP over Gibbs sweeps started from the box
//    [-B, B]^n. Exact only as B -> infinity; kept as a baseline.
//  * run_exact_autonormal: composite-map CFTP. Each map first runs an
//    independence-sampler step with a spanning-tree proposal, which confines
//    every possible state to a finite box derived from the proposal's energy,
//    then a random number C of coupled Gibbs sweeps.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "perfect/cftp.hpp"
#include "perfect/couplers.hpp"
#include "perfect/errors.hpp"
#include "perfect/io.hpp"
#include "perfect/replay_rng.hpp"

namespace perfect::autonormal {

using HeightConfig = std::vector<double>;
using Bounds = BoundPair<HeightConfig>;

struct Spring {
  std::size_t site;
  double F;
};

struct Edge {
  std::size_t i;
  std::size_t j;
  double F;
};

/// Sites joined by springs; one root site is pinned at height 0.
class InteractionGraph {
 public:
  InteractionGraph() = default;
  InteractionGraph(std::size_t n, std::size_t root) : root_(root), neighbors_(n), strength_(n, 0.0) {
    if (n < 2) throw ParameterError("InteractionGraph: need at least two sites");
    if (root >= n) throw ParameterError("InteractionGraph: root out of range");
  }

  /// W x H grid with unit index y * W + x; root is the upper-left site.
  static InteractionGraph grid(std::size_t width, std::size_t height, double F, bool torus) {
    if (width * height < 2) throw ParameterError("grid: need at least two sites");
    InteractionGraph g(width * height, 0);
    for (std::size_t y = 0; y < height; ++y) {
      for (std::size_t x = 0; x < width; ++x) {
        const std::size_t i = y * width + x;
        if (x + 1 < width) {
          g.add_edge(i, i + 1, F);
        } else if (torus && width > 2) {
          g.add_edge(i, y * width, F);
        }
        if (y + 1 < height) {
          g.add_edge(i, i + width, F);
        } else if (torus && height > 2) {
          g.add_edge(i, x, F);
        }
      }
    }
    return g;
  }

  void add_edge(std::size_t i, std::size_t j, double F) {
    if (i >= size() || j >= size()) throw ParameterError("add_edge: site out of range");
    if (i == j) throw ParameterError("add_edge: self-loop");
    if (!std::isfinite(F)) throw ParameterError("add_edge: spring constant must be finite");
    if (F == 0.0) return;
    edges_.push_back({i, j, F});
    neighbors_[i].push_back({j, F});
    neighbors_[j].push_back({i, F});
    strength_[i] += F;
    strength_[j] += F;
  }

  std::size_t size() const { return neighbors_.size(); }
  std::size_t root() const { return root_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Spring>& neighbors(std::size_t i) const { return neighbors_[i]; }
  /// sum_j F_ij
  double strength(std::size_t i) const { return strength_[i]; }

  /// F_ij, summed over parallel edges.
  double spring(std::size_t i, std::size_t j) const {
    double total = 0.0;
    for (const auto& s : neighbors_[i]) {
      if (s.site == j) total += s.F;
    }
    return total;
  }

  bool nonnegative() const {
    return std::all_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.F >= 0.0; });
  }

  bool connected() const {
    std::vector<char> seen(size(), 0);
    std::deque<std::size_t> queue{root_};
    seen[root_] = 1;
    std::size_t count = 1;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (const auto& s : neighbors_[u]) {
        if (!seen[s.site]) {
          seen[s.site] = 1;
          ++count;
          queue.push_back(s.site);
        }
      }
    }
    return count == size();
  }

  /// Every non-root site needs positive total strength to have a conditional law.
  void validate() const {
    if (!connected()) throw ModelError("InteractionGraph: graph is not connected");
    for (std::size_t i = 0; i < size(); ++i) {
      if (i != root_ && !(strength_[i] > 0.0)) {
        throw ModelError("InteractionGraph: site " + std::to_string(i) +
                         " has nonpositive total spring strength");
      }
    }
  }

 private:
  std::size_t root_ = 0;
  std::vector<std::vector<Spring>> neighbors_;
  std::vector<double> strength_;
  std::vector<Edge> edges_;
};

// ---------------------------------------------------------------------------
// Energy and conditionals

inline double energy(const InteractionGraph& graph, std::span<const double> x) {
  double e = 0.0;
  for (const auto& edge : graph.edges()) {
    const double d = x[edge.i] - x[edge.j];
    e += 0.5 * edge.F * d * d;
  }
  return e;
}

struct Conditional {
  double mean;
  double variance;
};

inline Conditional conditional_params(const InteractionGraph& graph, std::size_t i,
                                      std::span<const double> heights) {
  if (i == graph.root()) throw ParameterError("conditional_params: the root is pinned");
  const double total = graph.strength(i);
  if (!(total > 0.0)) throw ModelError("conditional_params: site has no positive total strength");
  double weighted = 0.0;
  for (const auto& s : graph.neighbors(i)) weighted += s.F * heights[s.site];
  return {weighted / total, 1.0 / total};
}

// ---------------------------------------------------------------------------
// Gibbs sweeps with the normal multishift coupler

/// Randomness channels. The T and B phases of a composite map must never share draws.
enum Channel : std::uint32_t {
  kTruncated = 0,
  kProposalT = 1,
  kProposalB = 2,
  kSweepT = 3,
  kSweepB = 4,
  kMetropolis = 5,
};

/// One sweep over all non-root sites in index order. At each site a single
/// ShiftMap (read from `base.with_site(i)`) moves every tracked configuration:
/// the bound pair via the mixed monotone/anti-monotone means, and `x` via its
/// own conditional mean. Either target may be null.
inline void gibbs_sweep(const InteractionGraph& graph, const StreamPath& base, Bounds* bounds,
                        HeightConfig* x) {
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (i == graph.root()) continue;
    const double total = graph.strength(i);
    const ShiftMap map =
        normal_coupler(1.0 / std::sqrt(total), base.with_site(static_cast<std::int64_t>(i)));
    if (bounds != nullptr) {
      double lo = 0.0;
      double hi = 0.0;
      for (const auto& s : graph.neighbors(i)) {
        if (s.F >= 0.0) {
          lo += s.F * bounds->lower[s.site];
          hi += s.F * bounds->upper[s.site];
        } else {
          lo += s.F * bounds->upper[s.site];
          hi += s.F * bounds->lower[s.site];
        }
      }
      bounds->lower[i] = apply_shift(map, lo / total);
      bounds->upper[i] = apply_shift(map, hi / total);
    }
    if (x != nullptr) {
      double m = 0.0;
      for (const auto& s : graph.neighbors(i)) m += s.F * (*x)[s.site];
      (*x)[i] = apply_shift(map, m / total);
    }
  }
}

/// Bound-pair sweep for time (epoch, step) on `channel`.
inline void bound_sweep(const InteractionGraph& graph, Bounds& bounds, std::uint64_t seed,
                        TimeIndex t, std::uint32_t channel = kTruncated) {
  gibbs_sweep(graph,
              StreamPath{.master_seed = seed, .epoch = t.epoch, .step = t.step, .channel = channel},
              &bounds, nullptr);
}

/// Gibbs sweeps from the box [-B, B] (root 0) as a monotone CFTP model.
struct TruncatedModel {
  using State = HeightConfig;
  const InteractionGraph* graph = nullptr;
  double box = 1e6;

  Bounds initial_bounds() const {
    Bounds b{HeightConfig(graph->size(), -box), HeightConfig(graph->size(), box)};
    b.lower[graph->root()] = 0.0;
    b.upper[graph->root()] = 0.0;
    return b;
  }

  void update(Bounds& b, std::uint64_t seed, TimeIndex t) const { bound_sweep(*graph, b, seed, t); }
};

/// Monotone CFTP from the truncated box; approximate, bias vanishing as B grows.
inline CftpResult<HeightConfig> run_truncated_cftp_diagnosed(const InteractionGraph& graph,
                                                             std::uint64_t seed, double bound_B = 1e6,
                                                             CftpOptions options = {}) {
  if (!(bound_B > 0.0)) throw ParameterError("run_truncated_cftp: bound must be positive");
  graph.validate();
  return run_monotone_cftp(TruncatedModel{&graph, bound_B}, seed, options);
}

inline HeightConfig run_truncated_cftp(const InteractionGraph& graph, std::uint64_t seed,
                                       double bound_B = 1e6) {
  return run_truncated_cftp_diagnosed(graph, seed, bound_B, {.find_t_star = false}).state;
}

// ---------------------------------------------------------------------------
// Spanning tree proposal and the energy box

/// Breadth-first spanning tree from the root over positive springs.
struct SpanningTree {
  std::size_t root = 0;
  std::vector<std::size_t> parent;
  /// Spring constant of the edge to the parent (0 at the root).
  std::vector<double> parent_F;
  /// Series resistance sum of 1/F along the path to the root.
  std::vector<double> rho;
  /// Vertices in BFS order, root first.
  std::vector<std::size_t> order;

  std::size_t size() const { return parent.size(); }
};

inline SpanningTree bfs_spanning_tree(const InteractionGraph& graph) {
  const std::size_t n = graph.size();
  SpanningTree tree;
  tree.root = graph.root();
  tree.parent.assign(n, n);
  tree.parent_F.assign(n, 0.0);
  tree.rho.assign(n, 0.0);
  tree.order.reserve(n);
  std::vector<char> seen(n, 0);
  seen[tree.root] = 1;
  tree.parent[tree.root] = tree.root;
  tree.order.push_back(tree.root);
  for (std::size_t head = 0; head < tree.order.size(); ++head) {
    const std::size_t u = tree.order[head];
    for (const auto& s : graph.neighbors(u)) {
      if (seen[s.site] || !(s.F > 0.0)) continue;
      // Parallel edges act as one spring of the summed constant.
      const double F = graph.spring(u, s.site);
      if (!(F > 0.0)) continue;
      seen[s.site] = 1;
      tree.parent[s.site] = u;
      tree.parent_F[s.site] = F;
      tree.rho[s.site] = tree.rho[u] + 1.0 / F;
      tree.order.push_back(s.site);
    }
  }
  if (tree.order.size() != n) throw ModelError("bfs_spanning_tree: positive springs do not span the graph");
  return tree;
}

inline double tree_energy(const SpanningTree& tree, std::span<const double> x) {
  double e = 0.0;
  for (std::size_t v = 0; v < tree.size(); ++v) {
    if (v == tree.root) continue;
    const double d = x[v] - x[tree.parent[v]];
    e += 0.5 * tree.parent_F[v] * d * d;
  }
  return e;
}

struct ProposalOutcome {
  HeightConfig config;
  double energy = 0.0;
  double tree_energy = 0.0;
  /// 2 E(B) - E_tree(B): every state at or above this energy accepts B.
  double e_max = 0.0;
};

/// Independence-sampler proposal: root-down, child = parent + Normal(0, 2/F).
/// Its density is proportional to exp(-E_tree / 2).
inline ProposalOutcome tree_proposal(const InteractionGraph& graph, const SpanningTree& tree,
                                     const StreamPath& path) {
  ProposalOutcome out;
  out.config.assign(graph.size(), 0.0);
  for (std::size_t k = 1; k < tree.order.size(); ++k) {
    const std::size_t v = tree.order[k];
    const double sd = std::sqrt(2.0 / tree.parent_F[v]);
    out.config[v] = out.config[tree.parent[v]] +
                    sd * normal01(path.with_site(static_cast<std::int64_t>(v)));
  }
  out.energy = energy(graph, out.config);
  out.tree_energy = tree_energy(tree, out.config);
  out.e_max = 2.0 * out.energy - out.tree_energy;
  return out;
}

/// Minimum energy of springs F_1..F_k in series with ends at 0 and x, given
/// the resistances 1/F_i.
inline double min_chain_energy(std::span<const double> resistances, double x) {
  if (resistances.empty()) throw ParameterError("min_chain_energy: empty chain");
  double total = 0.0;
  for (double r : resistances) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ParameterError("min_chain_energy: spring constants must be positive");
    total += r;
  }
  return 0.5 * x * x / total;
}

/// |x_v| <= sqrt(2 e_max rho_v) for every configuration with energy <= e_max.
inline std::vector<double> coordinate_box(const SpanningTree& tree, double e_max) {
  if (!(e_max >= 0.0)) throw ParameterError("coordinate_box: e_max must be nonnegative");
  std::vector<double> half(tree.size(), 0.0);
  for (std::size_t v = 0; v < tree.size(); ++v) half[v] = std::sqrt(2.0 * e_max * tree.rho[v]);
  half[tree.root] = 0.0;
  return half;
}

inline Bounds box_bounds(const SpanningTree& tree, double e_max) {
  const auto half = coordinate_box(tree, e_max);
  Bounds b{HeightConfig(half.size()), half};
  for (std::size_t v = 0; v < half.size(); ++v) b.lower[v] = -half[v];
  // Coalescence is bitwise; the pinned root must not start as -0.0.
  b.lower[tree.root] = 0.0;
  return b;
}

/// log of the Metropolis-Hastings acceptance ratio for A -> B.
inline double mh_log_ratio(double energy_A, double tree_energy_A, const ProposalOutcome& B) {
  return (energy_A - 0.5 * tree_energy_A) - (B.energy - 0.5 * B.tree_energy);
}

/// Whether the independence sampler moves A to B. States at or above e_max
/// always move, independent of rounding in the ratio.
inline bool mh_accepts(double energy_A, double tree_energy_A, const ProposalOutcome& B, double u) {
  if (energy_A >= B.e_max) return true;
  const double log_ratio = mh_log_ratio(energy_A, tree_energy_A, B);
  return log_ratio >= 0.0 || std::log(u) < log_ratio;
}

inline HeightConfig mh_accept(const InteractionGraph& graph, const SpanningTree& tree,
                              const HeightConfig& current, const ProposalOutcome& proposal,
                              const StreamPath& path) {
  const bool accept =
      mh_accepts(energy(graph, current), tree_energy(tree, current), proposal, uniform01(path));
  return accept ? proposal.config : current;
}

// ---------------------------------------------------------------------------
// Composite update

/// Sweep cap for the T phase.
inline constexpr std::int64_t kMaxCompositeSweeps = 1'000'000;

struct CompositeStep {
  Bounds bounds;
  std::optional<HeightConfig> x;
  bool coalesced = false;
  /// Gibbs sweeps the T phase needed to coalesce.
  std::int64_t sweeps = 0;
};

namespace detail {

inline StreamPath composite_path(std::uint64_t seed, std::int64_t map_index, std::uint32_t channel) {
  return StreamPath{.master_seed = seed, .epoch = map_index, .channel = channel};
}

/// T1-T3: sweeps needed for a fresh proposal's box to coalesce.
inline std::int64_t t_phase_sweeps(const InteractionGraph& graph, const SpanningTree& tree,
                                   std::uint64_t seed, std::int64_t map_index) {
  const auto proposal = tree_proposal(graph, tree, composite_path(seed, map_index, kProposalT));
  Bounds b = box_bounds(tree, proposal.e_max);
  const StreamPath sweep_base = composite_path(seed, map_index, kSweepT);
  for (std::int64_t c = 1; c <= kMaxCompositeSweeps; ++c) {
    gibbs_sweep(graph, sweep_base.with_step(c), &b, nullptr);
    if (coalesced(b)) return c;
  }
  throw NonCoalescenceError("composite_update: T phase did not coalesce within the sweep cap");
}

}  // namespace detail

/// One composite random map F_k (k = map index), applied to the box it
/// produces and optionally to a concrete state x.
///
/// T1 proposal, T2 energy box, T3 sweeps until coalescence (C of them);
/// B1 independent proposal, B2 its box, MH on x, B3 C sweeps on bounds and x
/// jointly. Coalesced iff the B-phase bounds meet.
inline CompositeStep composite_update(const InteractionGraph& graph, const SpanningTree& tree,
                                      std::uint64_t seed, std::int64_t map_index,
                                      std::optional<HeightConfig> x = std::nullopt) {
  CompositeStep step;
  step.sweeps = detail::t_phase_sweeps(graph, tree, seed, map_index);

  const auto proposal = tree_proposal(graph, tree, detail::composite_path(seed, map_index, kProposalB));
  step.bounds = box_bounds(tree, proposal.e_max);
  if (x) {
    x = mh_accept(graph, tree, *x, proposal, detail::composite_path(seed, map_index, kMetropolis));
  }
  const StreamPath sweep_base = detail::composite_path(seed, map_index, kSweepB);
  for (std::int64_t c = 1; c <= step.sweeps; ++c) {
    gibbs_sweep(graph, sweep_base.with_step(c), &step.bounds, x ? &*x : nullptr);
  }
  step.x = std::move(x);
  step.coalesced = coalesced(step.bounds);
  return step;
}

/// F_k packaged for run_composite_cftp. Coalescence is decided on
/// construction; apply() replays the same map on a concrete state.
class AutonormalMap {
 public:
  AutonormalMap(const InteractionGraph& graph, const SpanningTree& tree, std::uint64_t seed,
                std::int64_t map_index)
      : graph_(&graph), tree_(&tree), seed_(seed), index_(map_index) {
    auto step = composite_update(graph, tree, seed, map_index);
    coalesced_ = step.coalesced;
    sweeps_ = step.sweeps;
    if (coalesced_) state_ = std::move(step.bounds.lower);
  }

  bool coalesced() const { return coalesced_; }
  std::int64_t sweeps() const { return sweeps_; }
  const HeightConfig& coalesced_state() const { return state_; }

  HeightConfig apply(const HeightConfig& x) const {
    if (coalesced_) return state_;
    return *composite_update(*graph_, *tree_, seed_, index_, x).x;
  }

 private:
  const InteractionGraph* graph_;
  const SpanningTree* tree_;
  std::uint64_t seed_;
  std::int64_t index_;
  bool coalesced_ = false;
  std::int64_t sweeps_ = 0;
  HeightConfig state_;
};

struct ExactResult {
  HeightConfig config;
  /// T: how many maps back the first coalescent one was.
  std::int64_t maps_used = 0;
};

inline void require_exact_sampler_graph(const InteractionGraph& graph) {
  graph.validate();
  if (!graph.nonnegative()) {
    throw ModelError("run_exact_autonormal: the exact sampler requires nonnegative springs");
  }
}

/// Exact sample; no truncation anywhere.
inline ExactResult run_exact_autonormal(const InteractionGraph& graph, const SpanningTree& tree,
                                        std::uint64_t seed, std::int64_t max_maps = 1'000'000) {
  auto result = run_composite_cftp<HeightConfig>(
      [&](std::int64_t k) { return AutonormalMap(graph, tree, seed, k); }, max_maps);
  return {std::move(result.state), result.maps_used};
}

inline ExactResult run_exact_autonormal(const InteractionGraph& graph, std::uint64_t seed) {
  require_exact_sampler_graph(graph);
  const SpanningTree tree = bfs_spanning_tree(graph);
  return run_exact_autonormal(graph, tree, seed);
}

// ---------------------------------------------------------------------------
// Dense covariance

/// Non-root site indices in increasing order; row r of exact_covariance is sites[r].
inline std::vector<std::size_t> non_root_sites(const InteractionGraph& graph) {
  std::vector<std::size_t> sites;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (i != graph.root()) sites.push_back(i);
  }
  return sites;
}

/// Inverse of the reduced graph Laplacian (root row and column deleted).
inline Eigen::MatrixXd exact_covariance(const InteractionGraph& graph) {
  const auto sites = non_root_sites(graph);
  const auto m = static_cast<Eigen::Index>(sites.size());
  std::vector<Eigen::Index> row(graph.size(), -1);
  for (Eigen::Index r = 0; r < m; ++r) row[sites[static_cast<std::size_t>(r)]] = r;

  Eigen::MatrixXd precision = Eigen::MatrixXd::Zero(m, m);
  for (const auto& e : graph.edges()) {
    const Eigen::Index a = row[e.i];
    const Eigen::Index b = row[e.j];
    if (a >= 0) precision(a, a) += e.F;
    if (b >= 0) precision(b, b) += e.F;
    if (a >= 0 && b >= 0) {
      precision(a, b) -= e.F;
      precision(b, a) -= e.F;
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) {
    throw ModelError("exact_covariance: precision matrix is not positive definite");
  }
  return llt.solve(Eigen::MatrixXd::Identity(m, m));
}

// ---------------------------------------------------------------------------
// Graph files and rendering

/// `n <count> root <index>` then `edge i j F` lines; or a single
/// `grid W H F [torus]` line.
inline InteractionGraph read_graph(std::istream& in) {
  const auto lines = io::tokenize(in);
  if (lines.empty()) throw ModelError("graph file is empty");
  const auto& head = lines.front();
  if (head.tokens[0] == "grid") {
    if (lines.size() != 1 || head.tokens.size() < 4 || head.tokens.size() > 5 ||
        (head.tokens.size() == 5 && head.tokens[4] != "torus")) {
      throw ModelError("line " + std::to_string(head.number) + ": expected 'grid W H F [torus]'");
    }
    return InteractionGraph::grid(static_cast<std::size_t>(io::to_index(head, 1)),
                                  static_cast<std::size_t>(io::to_index(head, 2)),
                                  io::to_double(head, 3), head.tokens.size() == 5);
  }
  if (head.tokens.size() != 4 || head.tokens[0] != "n" || head.tokens[2] != "root") {
    throw ModelError("line " + std::to_string(head.number) + ": expected 'n <count> root <index>'");
  }
  InteractionGraph graph;
  try {
    graph = InteractionGraph(static_cast<std::size_t>(io::to_index(head, 1)),
                             static_cast<std::size_t>(io::to_index(head, 3)));
  } catch (const ParameterError& e) {
    throw ModelError(std::string("graph header: ") + e.what());
  }
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& line = lines[k];
    if (line.tokens.size() != 4 || line.tokens[0] != "edge") {
      throw ModelError("line " + std::to_string(line.number) + ": expected 'edge i j F'");
    }
    try {
      graph.add_edge(static_cast<std::size_t>(io::to_index(line, 1)),
                     static_cast<std::size_t>(io::to_index(line, 2)), io::to_double(line, 3));
    } catch (const ParameterError& e) {
      throw ModelError("line " + std::to_string(line.number) + ": " + e.what());
    }
  }
  return graph;
}

/// Plain PGM (P2), heights mapped affinely so min -> 0 and max -> 255.
/// A constant field renders as all zeros.
inline void write_pgm(std::ostream& out, std::span<const double> heights, std::size_t width,
                      std::size_t height) {
  if (width == 0 || height == 0 || heights.size() != width * height) {
    throw ParameterError("render_field: configuration size does not match width x height");
  }
  const auto [lo, hi] = std::minmax_element(heights.begin(), heights.end());
  const double span = *hi - *lo;
  out << "P2\n" << width << ' ' << height << "\n255\n";
  for (std::size_t y = 0; y < height; ++y) {
    for (std::size_t x = 0; x < width; ++x) {
      const double h = heights[y * width + x];
      const long level = span > 0.0 ? std::lround((h - *lo) / span * 255.0) : 0;
      out << level << (x + 1 < width ? ' ' : '\n');
    }
  }
}

inline void render_field(std::span<const double> heights, std::size_t width, std::size_t height,
                         const std::filesystem::path& out) {
  if (width == 0 || height == 0 || heights.size() != width * height) {
    throw ParameterError("render_field: configuration size does not match width x height");
  }
  io::atomic_write(out, [&](std::ostream& os) { write_pgm(os, heights, width, height); });
}

struct PgmImage {
  std::size_t width = 0;
  std::size_t height = 0;
  int max_value = 0;
  std::vector<int> pixels;
};

/// Reads a plain (P2) PGM.
inline PgmImage read_pgm(std::istream& in) {
  std::string magic;
  in >> magic;
  if (magic != "P2") throw ModelError("read_pgm: not a plain PGM");
  // Header fields may be separated by comments.
  auto next_int = [&in]() {
    for (;;) {
      in >> std::ws;
      if (in.peek() == '#') {
        std::string skip;
        std::getline(in, skip);
        continue;
      }
      long v;
      if (!(in >> v)) throw ModelError("read_pgm: truncated header");
      return v;
    }
  };
  PgmImage img;
  img.width = static_cast<std::size_t>(next_int());
  img.height = static_cast<std::size_t>(next_int());
  img.max_value = static_cast<int>(next_int());
  img.pixels.reserve(img.width * img.height);
  for (std::size_t k = 0; k < img.width * img.height; ++k) {
    int v;
    if (!(in >> v)) throw ModelError("read_pgm: truncated raster");
    if (v < 0 || v > img.max_value) throw ModelError("read_pgm: pixel out of range");
    img.pixels.push_back(v);
  }
  return img;
}

}  // namespace perfect::autonormal
