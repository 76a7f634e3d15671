#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "oiltrade/graph.hpp"

namespace oiltrade {

enum class Indicator {
  indegree,
  outdegree,
  clustering,
  betweenness,
  outcloseness,
  incloseness,
  pagerank,
  authorities,
  hubs,
  within_module,
  outside_module,
  participation,
};

inline constexpr std::array<Indicator, 12> kAllIndicators{
    Indicator::indegree,    Indicator::outdegree,     Indicator::clustering,   Indicator::betweenness,
    Indicator::outcloseness, Indicator::incloseness,  Indicator::pagerank,     Indicator::authorities,
    Indicator::hubs,        Indicator::within_module, Indicator::outside_module, Indicator::participation,
};

inline constexpr std::string_view to_string(Indicator i) {
  switch (i) {
    case Indicator::indegree: return "indegree";
    case Indicator::outdegree: return "outdegree";
    case Indicator::clustering: return "clustering";
    case Indicator::betweenness: return "betweenness";
    case Indicator::outcloseness: return "outcloseness";
    case Indicator::incloseness: return "incloseness";
    case Indicator::pagerank: return "pagerank";
    case Indicator::authorities: return "authorities";
    case Indicator::hubs: return "hubs";
    case Indicator::within_module: return "within_module";
    case Indicator::outside_module: return "outside_module";
    case Indicator::participation: return "participation";
  }
  return "?";
}

inline std::optional<Indicator> parse_indicator(std::string_view name) {
  for (auto i : kAllIndicators)
    if (to_string(i) == name) return i;
  return std::nullopt;
}

inline constexpr bool is_module_based(Indicator i) {
  return i == Indicator::within_module || i == Indicator::outside_module || i == Indicator::participation;
}

/// One indicator's score for every node of a network, in network node order.
struct IndicatorScores {
  Indicator indicator = Indicator::indegree;
  int year = 0;
  std::vector<std::string> economies;
  std::vector<double> scores;
  // Set when the indicator is undefined on this network (e.g. HITS without
  // edges); scores are then all zero.
  bool degenerate = false;

  std::size_t size() const { return scores.size(); }

  std::optional<double> score_of(std::string_view economy) const {
    auto it = std::lower_bound(economies.begin(), economies.end(), economy);
    if (it == economies.end() || *it != economy) return std::nullopt;
    return scores[static_cast<std::size_t>(it - economies.begin())];
  }
};

inline IndicatorScores make_scores(Indicator ind, const TradeNetwork& g, std::vector<double> values) {
  if (values.size() != g.size()) throw std::logic_error("make_scores: size mismatch");
  return IndicatorScores{ind, g.year(), g.nodes(), std::move(values), false};
}

/// Node indices ordered by descending score; ties broken by ascending
/// economy id.
struct RankingTable {
  std::vector<std::size_t> order;
  std::vector<std::string> economies;  // economies[k] = id at rank k+1

  std::size_t size() const { return order.size(); }
};

namespace detail {

inline double rank_key(double x) {
  if (x == 0.0 || !std::isfinite(x)) return x;
  int e = 0;
  std::frexp(x, &e);
  const double scale = std::ldexp(1.0, 40 - e);
  return std::round(x * scale) / scale;
}

}  // namespace detail

// Scores are compared on a 40-bit mantissa, so values that differ only by
// accumulated rounding rank as ties.
inline RankingTable rank(const IndicatorScores& s) {
  std::vector<double> key(s.size());
  std::transform(s.scores.begin(), s.scores.end(), key.begin(), detail::rank_key);
  RankingTable t;
  t.order.resize(s.size());
  std::iota(t.order.begin(), t.order.end(), std::size_t{0});
  std::sort(t.order.begin(), t.order.end(), [&](std::size_t a, std::size_t b) {
    if (key[a] != key[b]) return key[a] > key[b];
    return s.economies[a] < s.economies[b];
  });
  t.economies.reserve(t.order.size());
  for (auto i : t.order) t.economies.push_back(s.economies[i]);
  return t;
}

}  // namespace oiltrade
