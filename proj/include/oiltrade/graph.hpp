#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "oiltrade/detail/csv.hpp"
#include "oiltrade/trade_ingest.hpp"

namespace oiltrade {

using NodeId = std::size_t;

/// Unweighted directed simple graph of one trade year. Nodes are kept in
/// ascending identifier order; NodeId is the position in that order. The
/// network is immutable once built.
class TradeNetwork {
 public:
  TradeNetwork() = default;

  /// `nodes` must be strictly ascending; edges are (from, to) index pairs.
  /// Duplicate edges collapse; self-loops are rejected.
  TradeNetwork(int year, std::vector<std::string> nodes, std::span<const std::pair<NodeId, NodeId>> edges)
      : year_(year), nodes_(std::move(nodes)), out_(nodes_.size()), in_(nodes_.size()) {
    if (!std::is_sorted(nodes_.begin(), nodes_.end()) ||
        std::adjacent_find(nodes_.begin(), nodes_.end()) != nodes_.end())
      throw std::invalid_argument("TradeNetwork: node ids must be unique and sorted");
    for (auto [u, v] : edges) {
      if (u >= nodes_.size() || v >= nodes_.size()) throw std::invalid_argument("TradeNetwork: edge endpoint out of range");
      if (u == v) throw std::invalid_argument("TradeNetwork: self-loop on '" + nodes_[u] + "'");
      out_[u].push_back(v);
      in_[v].push_back(u);
    }
    edge_count_ = 0;
    for (auto* lists : {&out_, &in_}) {
      for (auto& l : *lists) {
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
      }
    }
    for (const auto& l : out_) edge_count_ += l.size();
  }

  int year() const { return year_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t edge_count() const { return edge_count_; }
  const std::vector<std::string>& nodes() const { return nodes_; }
  const std::string& id(NodeId i) const { return nodes_.at(i); }

  std::optional<NodeId> index_of(std::string_view id) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id);
    if (it == nodes_.end() || *it != id) return std::nullopt;
    return static_cast<NodeId>(it - nodes_.begin());
  }

  std::span<const NodeId> out_neighbors(NodeId i) const { return out_[i]; }
  std::span<const NodeId> in_neighbors(NodeId i) const { return in_[i]; }
  std::size_t out_degree(NodeId i) const { return out_[i].size(); }
  std::size_t in_degree(NodeId i) const { return in_[i].size(); }

  bool has_edge(NodeId from, NodeId to) const { return std::binary_search(out_[from].begin(), out_[from].end(), to); }

  /// Distinct neighbours with direction ignored, ascending.
  std::vector<NodeId> undirected_neighbors(NodeId i) const {
    std::vector<NodeId> out;
    std::set_union(out_[i].begin(), out_[i].end(), in_[i].begin(), in_[i].end(), std::back_inserter(out));
    return out;
  }

  std::vector<std::pair<NodeId, NodeId>> edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(edge_count_);
    for (NodeId u = 0; u < size(); ++u)
      for (NodeId v : out_[u]) out.emplace_back(u, v);
    return out;
  }

  /// Subgraph induced by the nodes with keep[i] == true; ids are preserved.
  TradeNetwork induced(const std::vector<bool>& keep) const {
    if (keep.size() != size()) throw std::invalid_argument("TradeNetwork::induced: mask size mismatch");
    std::vector<NodeId> remap(size(), kNone);
    std::vector<std::string> ids;
    for (NodeId i = 0; i < size(); ++i) {
      if (!keep[i]) continue;
      remap[i] = ids.size();
      ids.push_back(nodes_[i]);
    }
    std::vector<std::pair<NodeId, NodeId>> es;
    for (NodeId u = 0; u < size(); ++u) {
      if (remap[u] == kNone) continue;
      for (NodeId v : out_[u])
        if (remap[v] != kNone) es.emplace_back(remap[u], remap[v]);
    }
    return TradeNetwork(year_, std::move(ids), es);
  }

  static constexpr NodeId kNone = std::numeric_limits<NodeId>::max();

 private:
  int year_ = 0;
  std::vector<std::string> nodes_;
  std::vector<std::vector<NodeId>> out_;
  std::vector<std::vector<NodeId>> in_;
  std::size_t edge_count_ = 0;
};

inline TradeNetwork from_edge_set(const EdgeSet& es) {
  std::vector<std::string> ids;
  for (const auto& [from, to] : es.edges) {
    ids.push_back(from);
    ids.push_back(to);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto idx = [&](const std::string& s) { return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), s) - ids.begin()); };
  std::vector<std::pair<NodeId, NodeId>> edges;
  edges.reserve(es.edges.size());
  for (const auto& [from, to] : es.edges) edges.emplace_back(idx(from), idx(to));
  return TradeNetwork(es.year, std::move(ids), edges);
}

inline EdgeSet to_edge_set(const TradeNetwork& g) {
  EdgeSet es{g.year(), {}};
  for (auto [u, v] : g.edges()) es.edges.emplace(g.id(u), g.id(v));
  return es;
}

// ---------------------------------------------------------------------------
// Connected components

enum class Connectivity { weak, strong };

struct ComponentLabeling {
  static constexpr std::size_t kRemoved = std::numeric_limits<std::size_t>::max();

  std::vector<std::size_t> labels;  // kRemoved for removed nodes
  std::size_t component_count = 0;
  std::size_t gcc_size = 0;
};

namespace detail {

inline std::vector<bool> removal_mask(const TradeNetwork& g, std::span<const NodeId> removed) {
  std::vector<bool> gone(g.size(), false);
  for (NodeId r : removed) {
    if (r >= g.size()) throw std::invalid_argument("components: removed node " + std::to_string(r) + " is not in the network");
    gone[r] = true;
  }
  return gone;
}

inline void finish_labeling(ComponentLabeling& c) {
  std::vector<std::size_t> sizes(c.component_count, 0);
  for (auto l : c.labels)
    if (l != ComponentLabeling::kRemoved) ++sizes[l];
  c.gcc_size = sizes.empty() ? 0 : *std::max_element(sizes.begin(), sizes.end());
}

inline ComponentLabeling weak_labels(const TradeNetwork& g, const std::vector<bool>& gone) {
  ComponentLabeling c;
  c.labels.assign(g.size(), ComponentLabeling::kRemoved);
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < g.size(); ++s) {
    if (gone[s] || c.labels[s] != ComponentLabeling::kRemoved) continue;
    const auto label = c.component_count++;
    c.labels[s] = label;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId u = stack.back();
      stack.pop_back();
      for (auto nbrs : {g.out_neighbors(u), g.in_neighbors(u)}) {
        for (NodeId v : nbrs) {
          if (gone[v] || c.labels[v] != ComponentLabeling::kRemoved) continue;
          c.labels[v] = label;
          stack.push_back(v);
        }
      }
    }
  }
  finish_labeling(c);
  return c;
}

// Iterative Tarjan; labels are then renumbered by smallest member.
inline ComponentLabeling strong_labels(const TradeNetwork& g, const std::vector<bool>& gone) {
  const std::size_t n = g.size();
  constexpr std::size_t unvisited = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> index(n, unvisited), low(n, 0), comp(n, ComponentLabeling::kRemoved);
  std::vector<bool> on_stack(n, false);
  std::vector<NodeId> scc_stack;
  std::vector<std::pair<NodeId, std::size_t>> call;
  std::size_t counter = 0, comps = 0;

  for (NodeId root = 0; root < n; ++root) {
    if (gone[root] || index[root] != unvisited) continue;
    call.emplace_back(root, 0);
    while (!call.empty()) {
      auto& [u, pos] = call.back();
      if (pos == 0 && index[u] == unvisited) {
        index[u] = low[u] = counter++;
        scc_stack.push_back(u);
        on_stack[u] = true;
      }
      const auto nbrs = g.out_neighbors(u);
      bool descended = false;
      while (pos < nbrs.size()) {
        const NodeId v = nbrs[pos++];
        if (gone[v]) continue;
        if (index[v] == unvisited) {
          call.emplace_back(v, 0);
          descended = true;
          break;
        }
        if (on_stack[v]) low[u] = std::min(low[u], index[v]);
      }
      if (descended) continue;
      const NodeId done = u;
      if (low[done] == index[done]) {
        NodeId w;
        do {
          w = scc_stack.back();
          scc_stack.pop_back();
          on_stack[w] = false;
          comp[w] = comps;
        } while (w != done);
        ++comps;
      }
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
    }
  }

  ComponentLabeling c;
  c.labels.assign(n, ComponentLabeling::kRemoved);
  std::vector<std::size_t> renumber(comps, ComponentLabeling::kRemoved);
  for (NodeId i = 0; i < n; ++i) {
    if (comp[i] == ComponentLabeling::kRemoved) continue;
    if (renumber[comp[i]] == ComponentLabeling::kRemoved) renumber[comp[i]] = c.component_count++;
    c.labels[i] = renumber[comp[i]];
  }
  finish_labeling(c);
  return c;
}

}  // namespace detail

/// Components of the subgraph left after deleting `removed`. Edge direction is
/// ignored in weak mode. Component ids are numbered by their smallest member.
inline ComponentLabeling components(const TradeNetwork& g, std::span<const NodeId> removed,
                                    Connectivity mode = Connectivity::weak) {
  const auto gone = detail::removal_mask(g, removed);
  return mode == Connectivity::weak ? detail::weak_labels(g, gone) : detail::strong_labels(g, gone);
}

inline ComponentLabeling weak_components(const TradeNetwork& g, std::span<const NodeId> removed = {}) {
  return components(g, removed, Connectivity::weak);
}

// ---------------------------------------------------------------------------
// Shortest paths

enum class Direction { out, in };

inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

struct SingleSourcePaths {
  std::vector<std::uint32_t> dist;  // kUnreachable when not reachable
  std::vector<double> sigma;        // number of shortest paths from the source
  std::vector<NodeId> order;        // nodes in non-decreasing distance
};

/// BFS from `source`. Direction::in walks edges backwards, giving distances
/// and path counts *into* the source.
inline SingleSourcePaths single_source_paths(const TradeNetwork& g, NodeId source, Direction dir = Direction::out) {
  SingleSourcePaths r;
  r.dist.assign(g.size(), kUnreachable);
  r.sigma.assign(g.size(), 0.0);
  r.order.reserve(g.size());
  r.dist[source] = 0;
  r.sigma[source] = 1.0;
  r.order.push_back(source);
  for (std::size_t head = 0; head < r.order.size(); ++head) {
    const NodeId u = r.order[head];
    for (NodeId v : dir == Direction::out ? g.out_neighbors(u) : g.in_neighbors(u)) {
      if (r.dist[v] == kUnreachable) {
        r.dist[v] = r.dist[u] + 1;
        r.order.push_back(v);
      }
      if (r.dist[v] == r.dist[u] + 1) r.sigma[v] += r.sigma[u];
    }
  }
  return r;
}

/// Adds the pair dependencies of `source` onto `acc`: for every node i other
/// than the source, the sum over targets t != i of sigma_st(i) / sigma_st.
inline void accumulate_dependencies(const TradeNetwork& g, NodeId source, const SingleSourcePaths& sp,
                                    std::vector<double>& acc) {
  std::vector<double> delta(g.size(), 0.0);
  for (auto it = sp.order.rbegin(); it != sp.order.rend(); ++it) {
    const NodeId w = *it;
    for (NodeId v : g.in_neighbors(w)) {
      if (sp.dist[v] != kUnreachable && sp.dist[v] + 1 == sp.dist[w])
        delta[v] += sp.sigma[v] / sp.sigma[w] * (1.0 + delta[w]);
    }
    if (w != source) acc[w] += delta[w];
  }
}

struct ShortestPathTable {
  std::size_t n = 0;
  std::vector<std::uint32_t> dist;
  std::vector<double> paths;  // exact while counts stay below 2^53

  std::uint32_t distance(NodeId s, NodeId t) const { return dist[s * n + t]; }
  double path_count(NodeId s, NodeId t) const { return paths[s * n + t]; }
};

inline ShortestPathTable all_pairs_shortest_paths(const TradeNetwork& g) {
  ShortestPathTable t;
  t.n = g.size();
  t.dist.resize(t.n * t.n);
  t.paths.resize(t.n * t.n);
  for (NodeId s = 0; s < t.n; ++s) {
    auto sp = single_source_paths(g, s);
    std::copy(sp.dist.begin(), sp.dist.end(), t.dist.begin() + static_cast<std::ptrdiff_t>(s * t.n));
    std::copy(sp.sigma.begin(), sp.sigma.end(), t.paths.begin() + static_cast<std::ptrdiff_t>(s * t.n));
  }
  return t;
}

inline void write_adjacency_csv(std::ostream& out, const TradeNetwork& g) {
  for (const auto& id : g.nodes()) out << ',' << detail::csv_quote(id);
  out << '\n';
  for (NodeId i = 0; i < g.size(); ++i) {
    out << detail::csv_quote(g.id(i));
    for (NodeId j = 0; j < g.size(); ++j) out << ',' << (g.has_edge(i, j) ? '1' : '0');
    out << '\n';
  }
}

}  // namespace oiltrade
