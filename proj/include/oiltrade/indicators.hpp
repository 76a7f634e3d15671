#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "oiltrade/centrality.hpp"
#include "oiltrade/community.hpp"
#include "oiltrade/scores.hpp"

namespace oiltrade {

struct IndicatorOptions {
  PageRankOptions pagerank;
  HitsOptions hits;
  ClusteringDenominator clustering = ClusteringDenominator::total_degree;
  ClosenessMode incloseness = ClosenessMode::reach_corrected;
  LinkCounting module_links = LinkCounting::undirected;
  LouvainOptions louvain;
  std::uint64_t community_seed = 42;
};

/// Computes one indicator. Module-based indicators need a partition; one is
/// detected with `opts.community_seed` when `partition` is null.
inline IndicatorScores compute_indicator(const TradeNetwork& g, Indicator ind, const IndicatorOptions& opts = {},
                                         const ModulePartition* partition = nullptr) {
  std::optional<ModulePartition> own;
  if (is_module_based(ind) && partition == nullptr) {
    own = detect_modules(g, opts.community_seed, opts.louvain);
    partition = &*own;
  }
  switch (ind) {
    case Indicator::indegree: return degree(g).indegree;
    case Indicator::outdegree: return degree(g).outdegree;
    case Indicator::clustering: return clustering(g, opts.clustering);
    case Indicator::betweenness: return betweenness(g);
    case Indicator::outcloseness: return closeness(g, Direction::out);
    case Indicator::incloseness: return closeness(g, Direction::in, opts.incloseness);
    case Indicator::pagerank: return pagerank(g, opts.pagerank);
    case Indicator::authorities: return hits(g, opts.hits).authorities;
    case Indicator::hubs: return hits(g, opts.hits).hubs;
    case Indicator::within_module: return within_module_degree(g, *partition, opts.module_links);
    case Indicator::outside_module: return outside_module_degree(g, *partition, opts.module_links);
    case Indicator::participation: return participation(g, *partition, opts.module_links);
  }
  throw std::logic_error("compute_indicator: unhandled indicator");
}

/// Several indicators on one network, sharing a single partition and a
/// single HITS run.
inline std::vector<IndicatorScores> compute_indicators(const TradeNetwork& g, const std::vector<Indicator>& which,
                                                       const IndicatorOptions& opts = {},
                                                       const ModulePartition* partition = nullptr) {
  std::optional<ModulePartition> own;
  std::optional<HitsScores> hits_run;
  std::vector<IndicatorScores> out;
  out.reserve(which.size());
  for (auto ind : which) {
    if (is_module_based(ind) && partition == nullptr) {
      own = detect_modules(g, opts.community_seed, opts.louvain);
      partition = &*own;
    }
    if (ind == Indicator::authorities || ind == Indicator::hubs) {
      if (!hits_run) hits_run = hits(g, opts.hits);
      out.push_back(ind == Indicator::authorities ? hits_run->authorities : hits_run->hubs);
      continue;
    }
    out.push_back(compute_indicator(g, ind, opts, partition));
  }
  return out;
}

}  // namespace oiltrade
