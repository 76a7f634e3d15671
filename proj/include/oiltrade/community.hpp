#pragma once

// Module detection by greedy modularity optimisation (Louvain) on the
// symmetrized network, and the module-role indicators built on a partition:
// within-module degree, outside-module degree and participation coefficient.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "oiltrade/detail/random.hpp"
#include "oiltrade/graph.hpp"
#include "oiltrade/scores.hpp"

namespace oiltrade {

struct ModulePartition {
  int year = 0;
  std::vector<std::string> economies;
  std::vector<std::size_t> assignment;  // node -> module id in [0, module_count)
  std::size_t module_count = 0;
  double modularity = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> level_modularity;  // Q after each aggregation level

  std::vector<std::vector<NodeId>> members() const {
    std::vector<std::vector<NodeId>> out(module_count);
    for (NodeId i = 0; i < assignment.size(); ++i) out[assignment[i]].push_back(i);
    return out;
  }
};

/// Newman modularity of `assignment` on the symmetrized graph. A pair linked
/// in either direction is one undirected edge of weight 1.
inline double modularity(const TradeNetwork& g, const std::vector<std::size_t>& assignment, double resolution = 1.0) {
  if (assignment.size() != g.size()) throw std::invalid_argument("modularity: assignment size mismatch");
  std::size_t modules = 0;
  for (auto a : assignment) modules = std::max(modules, a + 1);
  std::vector<double> internal(modules, 0.0), total(modules, 0.0);
  double m = 0.0;
  for (NodeId i = 0; i < g.size(); ++i) {
    const auto nb = g.undirected_neighbors(i);
    total[assignment[i]] += static_cast<double>(nb.size());
    for (NodeId j : nb) {
      if (j <= i) continue;
      m += 1.0;
      if (assignment[i] == assignment[j]) internal[assignment[i]] += 1.0;
    }
  }
  if (m == 0.0) return 0.0;
  double q = 0.0;
  for (std::size_t c = 0; c < modules; ++c) q += internal[c] / m - resolution * (total[c] / (2 * m)) * (total[c] / (2 * m));
  return q;
}

namespace detail {

// Weighted undirected graph for one Louvain level. Self-loop weight counts
// once in `loops` and twice in the node's degree.
struct LouvainGraph {
  std::vector<std::vector<std::pair<std::size_t, double>>> adj;  // no self entries
  std::vector<double> loops;
  std::vector<double> degree;
  double total_weight = 0.0;  // m

  std::size_t size() const { return adj.size(); }
};

inline LouvainGraph symmetrized(const TradeNetwork& g) {
  LouvainGraph lg;
  lg.adj.resize(g.size());
  lg.loops.assign(g.size(), 0.0);
  lg.degree.assign(g.size(), 0.0);
  for (NodeId i = 0; i < g.size(); ++i) {
    for (NodeId j : g.undirected_neighbors(i)) lg.adj[i].emplace_back(j, 1.0);
    lg.degree[i] = static_cast<double>(lg.adj[i].size());
    lg.total_weight += lg.degree[i];
  }
  lg.total_weight /= 2;
  return lg;
}

inline double level_modularity(const LouvainGraph& lg, const std::vector<std::size_t>& comm, double resolution) {
  const double m = lg.total_weight;
  if (m == 0.0) return 0.0;
  std::vector<double> internal(lg.size(), 0.0), total(lg.size(), 0.0);
  for (std::size_t i = 0; i < lg.size(); ++i) {
    total[comm[i]] += lg.degree[i];
    internal[comm[i]] += lg.loops[i];
    for (auto [j, w] : lg.adj[i])
      if (j > i && comm[j] == comm[i]) internal[comm[i]] += w;
  }
  double q = 0.0;
  for (std::size_t c = 0; c < lg.size(); ++c) q += internal[c] / m - resolution * (total[c] / (2 * m)) * (total[c] / (2 * m));
  return q;
}

// One local-moving phase. Returns true if any node changed community.
inline bool local_moving(const LouvainGraph& lg, std::vector<std::size_t>& comm, double resolution,
                         std::uint64_t sweep_seed) {
  const std::size_t n = lg.size();
  const double m2 = 2 * lg.total_weight;
  std::vector<double> tot(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) tot[comm[i]] += lg.degree[i];

  const auto order = seeded_permutation(n, sweep_seed);
  std::vector<double> link_to(n, 0.0);
  std::vector<std::size_t> touched;
  bool any_move = false;
  for (;;) {
    bool moved = false;
    for (std::size_t i : order) {
      const std::size_t own = comm[i];
      const double k = lg.degree[i];
      touched.clear();
      touched.push_back(own);
      for (auto [j, w] : lg.adj[i]) {
        const std::size_t c = comm[j];
        if (link_to[c] == 0.0 && c != own) touched.push_back(c);
        link_to[c] += w;
      }
      tot[own] -= k;
      std::size_t best = own;
      double best_gain = link_to[own] - resolution * tot[own] * k / m2;
      for (std::size_t c : touched) {
        const double gain = link_to[c] - resolution * tot[c] * k / m2;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best = c;
        }
      }
      tot[best] += k;
      for (std::size_t c : touched) link_to[c] = 0.0;
      if (best != own) {
        comm[i] = best;
        moved = true;
      }
    }
    if (!moved) break;
    any_move = true;
  }
  return any_move;
}

// Renumbers community labels densely by order of first appearance.
inline std::size_t compact(std::vector<std::size_t>& comm) {
  std::vector<std::size_t> remap(comm.size(), static_cast<std::size_t>(-1));
  std::size_t next = 0;
  for (auto& c : comm) {
    if (remap[c] == static_cast<std::size_t>(-1)) remap[c] = next++;
    c = remap[c];
  }
  return next;
}

inline LouvainGraph aggregate(const LouvainGraph& lg, const std::vector<std::size_t>& comm, std::size_t count) {
  LouvainGraph out;
  out.adj.resize(count);
  out.loops.assign(count, 0.0);
  out.degree.assign(count, 0.0);
  out.total_weight = lg.total_weight;
  std::vector<std::vector<double>> w(count, std::vector<double>(count, 0.0));
  for (std::size_t i = 0; i < lg.size(); ++i) {
    out.degree[comm[i]] += lg.degree[i];
    out.loops[comm[i]] += lg.loops[i];
    for (auto [j, wt] : lg.adj[i]) {
      if (j < i) continue;
      if (comm[i] == comm[j]) out.loops[comm[i]] += wt;
      else {
        w[comm[i]][comm[j]] += wt;
        w[comm[j]][comm[i]] += wt;
      }
    }
  }
  for (std::size_t a = 0; a < count; ++a)
    for (std::size_t b = 0; b < count; ++b)
      if (w[a][b] > 0) out.adj[a].emplace_back(b, w[a][b]);
  return out;
}

}  // namespace detail

struct LouvainOptions {
  double resolution = 1.0;
  int max_levels = 64;
};

/// Multi-level Louvain on the symmetrized network. The node sweep order of
/// level L is a permutation drawn from (seed + L), so a given seed always
/// yields the same partition. Module ids are numbered by smallest member.
inline ModulePartition detect_modules(const TradeNetwork& g, std::uint64_t seed, const LouvainOptions& opts = {}) {
  ModulePartition p;
  p.year = g.year();
  p.economies = g.nodes();
  p.seed = seed;
  p.assignment.resize(g.size());
  std::iota(p.assignment.begin(), p.assignment.end(), std::size_t{0});
  p.module_count = g.size();

  auto lg = detail::symmetrized(g);
  if (lg.total_weight == 0.0) {
    p.modularity = 0.0;
    return p;
  }

  double q = detail::level_modularity(lg, std::vector<std::size_t>(p.assignment), opts.resolution);
  for (int level = 0; level < opts.max_levels; ++level) {
    std::vector<std::size_t> comm(lg.size());
    std::iota(comm.begin(), comm.end(), std::size_t{0});
    const bool moved = detail::local_moving(lg, comm, opts.resolution, seed + static_cast<std::uint64_t>(level));
    if (!moved) break;
    const double q_new = detail::level_modularity(lg, comm, opts.resolution);
    if (q_new <= q) break;
    q = q_new;
    p.level_modularity.push_back(q);
    const std::size_t count = detail::compact(comm);
    for (auto& a : p.assignment) a = comm[a];
    lg = detail::aggregate(lg, comm, count);
  }

  p.module_count = detail::compact(p.assignment);
  p.modularity = modularity(g, p.assignment, opts.resolution);
  return p;
}

// ---------------------------------------------------------------------------
// Module-role indicators

enum class LinkCounting {
  undirected,  // a reciprocal pair is one link
  directed,    // a_ij + a_ji
};

namespace detail {

inline void check_partition(const TradeNetwork& g, const ModulePartition& p) {
  if (p.economies != g.nodes() || p.assignment.size() != g.size())
    throw std::invalid_argument("module indicators: partition does not cover the network's nodes");
  for (auto a : p.assignment)
    if (a >= p.module_count) throw std::invalid_argument("module indicators: module id out of range");
}

// links[i][s]: links of node i into module s.
inline std::vector<std::vector<double>> module_links(const TradeNetwork& g, const ModulePartition& p,
                                                     LinkCounting counting) {
  std::vector<std::vector<double>> links(g.size(), std::vector<double>(p.module_count, 0.0));
  for (NodeId i = 0; i < g.size(); ++i) {
    if (counting == LinkCounting::undirected) {
      for (NodeId j : g.undirected_neighbors(i)) links[i][p.assignment[j]] += 1.0;
    } else {
      for (NodeId j : g.out_neighbors(i)) links[i][p.assignment[j]] += 1.0;
      for (NodeId j : g.in_neighbors(i)) links[i][p.assignment[j]] += 1.0;
    }
  }
  return links;
}

// z-score of value[i] among the members of i's module, population sigma;
// zero when the module's sigma is zero.
inline std::vector<double> module_zscores(const ModulePartition& p, const std::vector<double>& value) {
  std::vector<double> z(value.size(), 0.0);
  for (const auto& members : p.members()) {
    if (members.empty()) continue;
    double mean = 0.0;
    for (NodeId i : members) mean += value[i];
    mean /= static_cast<double>(members.size());
    double var = 0.0;
    for (NodeId i : members) var += (value[i] - mean) * (value[i] - mean);
    const double sigma = std::sqrt(var / static_cast<double>(members.size()));
    if (sigma == 0.0) continue;
    for (NodeId i : members) z[i] = (value[i] - mean) / sigma;
  }
  return z;
}

}  // namespace detail

inline IndicatorScores within_module_degree(const TradeNetwork& g, const ModulePartition& p,
                                            LinkCounting counting = LinkCounting::undirected) {
  detail::check_partition(g, p);
  const auto links = detail::module_links(g, p, counting);
  std::vector<double> k_in(g.size());
  for (NodeId i = 0; i < g.size(); ++i) k_in[i] = links[i][p.assignment[i]];
  return make_scores(Indicator::within_module, g, detail::module_zscores(p, k_in));
}

inline IndicatorScores outside_module_degree(const TradeNetwork& g, const ModulePartition& p,
                                             LinkCounting counting = LinkCounting::undirected) {
  detail::check_partition(g, p);
  const auto links = detail::module_links(g, p, counting);
  std::vector<double> outside(g.size(), 0.0);
  for (NodeId i = 0; i < g.size(); ++i)
    for (std::size_t s = 0; s < p.module_count; ++s)
      if (s != p.assignment[i]) outside[i] += links[i][s];
  return make_scores(Indicator::outside_module, g, detail::module_zscores(p, outside));
}

/// 1 - sum_s (k_is / K_i)^2; 0 for nodes without links.
inline IndicatorScores participation(const TradeNetwork& g, const ModulePartition& p,
                                     LinkCounting counting = LinkCounting::undirected) {
  detail::check_partition(g, p);
  const auto links = detail::module_links(g, p, counting);
  std::vector<double> pc(g.size(), 0.0);
  for (NodeId i = 0; i < g.size(); ++i) {
    double total = 0.0;
    for (double l : links[i]) total += l;
    if (total == 0.0) continue;
    double sq = 0.0;
    for (double l : links[i]) sq += (l / total) * (l / total);
    pc[i] = 1.0 - sq;
  }
  return make_scores(Indicator::participation, g, std::move(pc));
}

}  // namespace oiltrade
