#pragma once

// Node-removal attacks: S(q) curves of the giant component and the
// robustness R = (1/N) sum_{n=1..N} S(n/N).

#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "oiltrade/detail/random.hpp"
#include "oiltrade/graph.hpp"
#include "oiltrade/indicators.hpp"
#include "oiltrade/scores.hpp"

namespace oiltrade {

inline constexpr std::string_view kRandomStrategy = "random";

enum class AttackMode { static_ranking, adaptive };

struct AttackCurve {
  std::string strategy;
  int year = 0;
  std::size_t n = 0;            // original node count N
  std::vector<double> fraction;  // fraction[k] = S((k+1)/N), k = 0..N-1

  double q(std::size_t removed) const { return static_cast<double>(removed) / static_cast<double>(n); }
  double S(std::size_t removed) const { return fraction.at(removed - 1); }
};

struct RobustnessResult {
  std::string strategy;
  int year = 0;
  double R = 0.0;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
};

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  std::size_t unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return size_[a];
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return size_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
};

// S after removing the first n entries of `order`, for n = 1..N, by adding
// nodes back in reverse removal order.
inline std::vector<double> weak_removal_curve(const TradeNetwork& g, const std::vector<NodeId>& order) {
  const std::size_t n = g.size();
  std::vector<double> s(n, 0.0);
  DisjointSets sets(n);
  std::vector<bool> present(n, false);
  std::size_t largest = 0;
  for (std::size_t k = n; k-- > 1;) {
    const NodeId v = order[k];
    present[v] = true;
    largest = std::max<std::size_t>(largest, 1);
    for (auto nbrs : {g.out_neighbors(v), g.in_neighbors(v)})
      for (NodeId u : nbrs)
        if (present[u]) largest = std::max(largest, sets.unite(u, v));
    s[k - 1] = static_cast<double>(largest) / static_cast<double>(n);
  }
  return s;
}

inline std::vector<double> removal_curve(const TradeNetwork& g, const std::vector<NodeId>& order, Connectivity mode) {
  if (mode == Connectivity::weak) return weak_removal_curve(g, order);
  std::vector<double> s(g.size(), 0.0);
  for (std::size_t k = 1; k <= g.size(); ++k) {
    const auto c = components(g, std::span<const NodeId>(order.data(), k), mode);
    s[k - 1] = static_cast<double>(c.gcc_size) / static_cast<double>(g.size());
  }
  return s;
}

inline void check_ranking(const TradeNetwork& g, const RankingTable& ranking) {
  if (ranking.order.size() != g.size() || ranking.economies.size() != g.size())
    throw std::invalid_argument("targeted_attack: ranking does not cover the network's nodes");
  std::vector<bool> seen(g.size(), false);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const auto i = ranking.order[k];
    if (i >= g.size() || seen[i] || g.id(i) != ranking.economies[k])
      throw std::invalid_argument("targeted_attack: ranking does not match the network");
    seen[i] = true;
  }
}

}  // namespace detail

/// Removes the top-n nodes of a fixed ranking for every n = 1..N.
inline AttackCurve targeted_attack(const TradeNetwork& g, const RankingTable& ranking, std::string strategy,
                                   Connectivity mode = Connectivity::weak) {
  detail::check_ranking(g, ranking);
  return AttackCurve{std::move(strategy), g.year(), g.size(), detail::removal_curve(g, ranking.order, mode)};
}

using Ranker = std::function<RankingTable(const TradeNetwork&)>;

/// After each single removal the surviving subgraph is re-ranked and its new
/// top node removed next.
inline AttackCurve adaptive_attack(const TradeNetwork& g, const Ranker& ranker, std::string strategy,
                                   Connectivity mode = Connectivity::weak) {
  const std::size_t n = g.size();
  std::vector<bool> alive(n, true);
  std::vector<NodeId> removed;
  removed.reserve(n);
  std::vector<double> s(n, 0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<NodeId> back;  // subgraph index -> original index
    for (NodeId i = 0; i < n; ++i)
      if (alive[i]) back.push_back(i);
    const auto sub = g.induced(alive);
    const auto ranking = ranker(sub);
    detail::check_ranking(sub, ranking);
    const NodeId victim = back[ranking.order.front()];
    alive[victim] = false;
    removed.push_back(victim);
    s[k - 1] = static_cast<double>(components(g, removed, mode).gcc_size) / static_cast<double>(n);
  }
  return AttackCurve{std::move(strategy), g.year(), n, std::move(s)};
}

/// Mean S over `trials` uniformly random removal orders; trial t draws its
/// order from seed + t. Trials are summed in index order.
inline AttackCurve random_attack(const TradeNetwork& g, std::size_t trials, std::uint64_t seed,
                                 Connectivity mode = Connectivity::weak) {
  if (trials == 0) throw std::invalid_argument("random_attack: trials must be >= 1");
  const std::size_t n = g.size();
  std::vector<double> mean(n, 0.0);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto order = detail::seeded_permutation(n, seed + t);
    const auto s = detail::removal_curve(g, order, mode);
    for (std::size_t k = 0; k < n; ++k) mean[k] += s[k];
  }
  for (double& v : mean) v /= static_cast<double>(trials);
  return AttackCurve{std::string{kRandomStrategy}, g.year(), n, std::move(mean)};
}

/// R of a complete curve. An empty network has R = 0.
inline RobustnessResult robustness(const AttackCurve& curve, std::size_t trials = 1, std::uint64_t seed = 0) {
  if (curve.fraction.size() != curve.n)
    throw std::invalid_argument("robustness: curve for '" + curve.strategy + "' does not cover n = 1..N");
  double sum = 0.0;
  for (double s : curve.fraction) sum += s;
  const double r = curve.n == 0 ? 0.0 : sum / static_cast<double>(curve.n);
  return RobustnessResult{curve.strategy, curve.year, r, trials, seed};
}

struct AttackOptions {
  std::size_t trials = 100;
  std::uint64_t seed = 2017;
  AttackMode mode = AttackMode::static_ranking;
  Connectivity connectivity = Connectivity::weak;
  IndicatorOptions indicators;
};

struct StrategyResult {
  AttackCurve curve;
  RobustnessResult robustness;
};

inline bool is_strategy(std::string_view name) { return name == kRandomStrategy || parse_indicator(name).has_value(); }

/// One curve and R per strategy name (the twelve indicators or "random").
/// Names are validated before any simulation runs.
inline std::vector<StrategyResult> attack_suite(const TradeNetwork& g, const std::vector<std::string>& strategies,
                                                const AttackOptions& opts = {}) {
  for (const auto& s : strategies)
    if (!is_strategy(s)) throw std::invalid_argument("attack_suite: unknown strategy '" + s + "'");

  std::optional<ModulePartition> partition;
  std::vector<StrategyResult> out;
  out.reserve(strategies.size());
  for (const auto& s : strategies) {
    if (s == kRandomStrategy) {
      auto curve = random_attack(g, opts.trials, opts.seed, opts.connectivity);
      auto r = robustness(curve, opts.trials, opts.seed);
      out.push_back({std::move(curve), std::move(r)});
      continue;
    }
    const Indicator ind = *parse_indicator(s);
    AttackCurve curve;
    if (opts.mode == AttackMode::static_ranking) {
      if (is_module_based(ind) && !partition) partition = detect_modules(g, opts.indicators.community_seed, opts.indicators.louvain);
      const auto scores = compute_indicator(g, ind, opts.indicators, partition ? &*partition : nullptr);
      curve = targeted_attack(g, rank(scores), s, opts.connectivity);
    } else {
      const auto& iopts = opts.indicators;
      curve = adaptive_attack(
          g, [&](const TradeNetwork& sub) { return rank(compute_indicator(sub, ind, iopts)); }, s, opts.connectivity);
    }
    const std::uint64_t seed = is_module_based(ind) ? opts.indicators.community_seed : 0;
    auto r = robustness(curve, 1, seed);
    out.push_back({std::move(curve), std::move(r)});
  }
  return out;
}

}  // namespace oiltrade
