#pragma once

// Local and global influence indicators: degree, clustering, betweenness,
// closeness, PageRank and HITS.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "oiltrade/graph.hpp"
#include "oiltrade/scores.hpp"

namespace oiltrade {

struct DegreeScores {
  IndicatorScores indegree;
  IndicatorScores outdegree;
};

inline DegreeScores degree(const TradeNetwork& g) {
  std::vector<double> in(g.size()), out(g.size());
  for (NodeId i = 0; i < g.size(); ++i) {
    in[i] = static_cast<double>(g.in_degree(i));
    out[i] = static_cast<double>(g.out_degree(i));
  }
  return {make_scores(Indicator::indegree, g, std::move(in)), make_scores(Indicator::outdegree, g, std::move(out))};
}

enum class ClusteringDenominator {
  total_degree,     // K_i = K_in + K_out, a reciprocal partner counts twice
  neighbor_count,   // K_i = number of distinct neighbours
};

/// Directed edges among the distinct neighbours of i over K_i (K_i - 1).
/// Nodes with K_i <= 1 score 0. With the default total-degree denominator a
/// node whose links are all reciprocal cannot reach 1.
inline IndicatorScores clustering(const TradeNetwork& g,
                                  ClusteringDenominator denom = ClusteringDenominator::total_degree) {
  std::vector<double> c(g.size(), 0.0);
  std::vector<bool> in_hood(g.size(), false);
  for (NodeId i = 0; i < g.size(); ++i) {
    const auto hood = g.undirected_neighbors(i);
    const double k = denom == ClusteringDenominator::total_degree
                         ? static_cast<double>(g.in_degree(i) + g.out_degree(i))
                         : static_cast<double>(hood.size());
    if (k <= 1) continue;
    for (NodeId j : hood) in_hood[j] = true;
    std::size_t links = 0;
    for (NodeId j : hood)
      for (NodeId m : g.out_neighbors(j))
        if (in_hood[m]) ++links;
    for (NodeId j : hood) in_hood[j] = false;
    c[i] = static_cast<double>(links) / (k * (k - 1));
  }
  return make_scores(Indicator::clustering, g, std::move(c));
}

/// Raw shortest-path betweenness over ordered (s, t) pairs, endpoints
/// excluded, no normalization.
inline IndicatorScores betweenness(const TradeNetwork& g) {
  std::vector<double> b(g.size(), 0.0);
  for (NodeId s = 0; s < g.size(); ++s) accumulate_dependencies(g, s, single_source_paths(g, s), b);
  return make_scores(Indicator::betweenness, g, std::move(b));
}

enum class ClosenessMode {
  reach_corrected,  // (D_i / (N-1))^2 / C_i
  reciprocal,       // 1 / C_i
};

/// Out mode uses distances from i, in mode distances into i. D_i counts the
/// nodes reached, C_i sums their distances; nodes reaching nothing score 0.
inline IndicatorScores closeness(const TradeNetwork& g, Direction dir,
                                 ClosenessMode mode = ClosenessMode::reach_corrected) {
  const Indicator ind = dir == Direction::out ? Indicator::outcloseness : Indicator::incloseness;
  std::vector<double> c(g.size(), 0.0);
  if (g.size() <= 1) return make_scores(ind, g, std::move(c));
  const double others = static_cast<double>(g.size() - 1);
  for (NodeId i = 0; i < g.size(); ++i) {
    const auto sp = single_source_paths(g, i, dir);
    double reached = 0, total = 0;
    for (NodeId j : sp.order) {
      if (j == i) continue;
      reached += 1;
      total += sp.dist[j];
    }
    if (reached == 0) continue;
    c[i] = mode == ClosenessMode::reach_corrected ? (reached / others) * (reached / others) / total : 1.0 / total;
  }
  return make_scores(ind, g, std::move(c));
}

struct PageRankOptions {
  double damping = 0.85;
  int iterations = 100;
};

/// Fixed-count power iteration. Mass on nodes without out-links is spread
/// uniformly, so every iterate sums to 1.
inline IndicatorScores pagerank(const TradeNetwork& g, const PageRankOptions& opts = {}) {
  if (!(opts.damping > 0.0 && opts.damping < 1.0)) throw std::invalid_argument("pagerank: damping must lie in (0, 1)");
  if (opts.iterations < 0) throw std::invalid_argument("pagerank: negative iteration count");
  const std::size_t n = g.size();
  if (n == 0) return make_scores(Indicator::pagerank, g, {});
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> x(n, inv_n), next(n);
  for (int it = 0; it < opts.iterations; ++it) {
    double dangling = 0.0;
    for (NodeId u = 0; u < n; ++u)
      if (g.out_degree(u) == 0) dangling += x[u];
    const double base = (1.0 - opts.damping) * inv_n + opts.damping * dangling * inv_n;
    for (NodeId v = 0; v < n; ++v) {
      double flow = 0.0;
      for (NodeId u : g.in_neighbors(v)) flow += x[u] / static_cast<double>(g.out_degree(u));
      next[v] = base + opts.damping * flow;
    }
    x.swap(next);
  }
  return make_scores(Indicator::pagerank, g, std::move(x));
}

struct HitsOptions {
  int iterations = 100;
  double tolerance = 1e-8;
};

struct HitsScores {
  IndicatorScores authorities;
  IndicatorScores hubs;
  int iterations_run = 0;
  bool converged = false;
};

namespace detail {

inline void normalize(std::vector<double>& v, bool l2) {
  double norm = 0.0;
  for (double x : v) norm += l2 ? x * x : std::abs(x);
  if (l2) norm = std::sqrt(norm);
  if (norm > 0)
    for (double& x : v) x /= norm;
}

}  // namespace detail

/// Mutual-reinforcement iteration with L2 scaling between steps; both
/// vectors are rescaled to sum to 1 at the end.
inline HitsScores hits(const TradeNetwork& g, const HitsOptions& opts = {}) {
  const std::size_t n = g.size();
  HitsScores r{make_scores(Indicator::authorities, g, std::vector<double>(n, 0.0)),
               make_scores(Indicator::hubs, g, std::vector<double>(n, 0.0)), 0, false};
  if (g.edge_count() == 0) {
    r.authorities.degenerate = r.hubs.degenerate = true;
    return r;
  }
  std::vector<double> auth(n, 0.0), hub(n, 1.0), prev_auth(n, 0.0), prev_hub(n, 0.0);
  detail::normalize(hub, true);
  for (int it = 0; it < opts.iterations; ++it) {
    prev_auth = auth;
    prev_hub = hub;
    for (NodeId v = 0; v < n; ++v) {
      double s = 0.0;
      for (NodeId u : g.in_neighbors(v)) s += hub[u];
      auth[v] = s;
    }
    detail::normalize(auth, true);
    for (NodeId u = 0; u < n; ++u) {
      double s = 0.0;
      for (NodeId v : g.out_neighbors(u)) s += auth[v];
      hub[u] = s;
    }
    detail::normalize(hub, true);
    r.iterations_run = it + 1;
    double change = 0.0;
    for (NodeId i = 0; i < n; ++i)
      change = std::max({change, std::abs(auth[i] - prev_auth[i]), std::abs(hub[i] - prev_hub[i])});
    if (change < opts.tolerance) {
      r.converged = true;
      break;
    }
  }
  detail::normalize(auth, false);
  detail::normalize(hub, false);
  r.authorities.scores = std::move(auth);
  r.hubs.scores = std::move(hub);
  return r;
}

}  // namespace oiltrade
