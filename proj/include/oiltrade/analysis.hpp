#pragma once

// Cross-indicator rank correlation, organization-level aggregation and
// multi-year tables.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/math/distributions/students_t.hpp>
#include <nlohmann/json.hpp>

#include "oiltrade/detail/random.hpp"
#include "oiltrade/scores.hpp"
#include "oiltrade/trade_ingest.hpp"

namespace oiltrade {

class UndefinedCorrelation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Correlation {
  double rho = 0.0;
  double p = 1.0;
  std::size_t n = 0;
};

/// Average ranks (1-based); tied values share the mean of their positions.
inline std::vector<double> average_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && x[idx[j + 1]] == x[idx[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
    i = j + 1;
  }
  return r;
}

namespace detail {

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0 || sbb == 0) throw UndefinedCorrelation("spearman: zero variance in ranks");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

inline void check_pair(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("spearman: vectors differ in length");
  if (a.size() < 3) throw UndefinedCorrelation("spearman: need at least 3 observations");
}

}  // namespace detail

/// Two-sided p for rho from the t statistic with n - 2 degrees of freedom.
inline double spearman_t_pvalue(double rho, std::size_t n) {
  if (n < 3) return 1.0;
  if (std::abs(rho) >= 1.0) return 0.0;
  const double df = static_cast<double>(n - 2);
  const double t = rho * std::sqrt(df / (1.0 - rho * rho));
  const boost::math::students_t dist(df);
  return std::clamp(2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))), 0.0, 1.0);
}

/// Tie-corrected Spearman rho (Pearson correlation of average ranks).
inline Correlation spearman(const std::vector<double>& a, const std::vector<double>& b) {
  detail::check_pair(a, b);
  const double rho = detail::pearson(average_ranks(a), average_ranks(b));
  return {rho, spearman_t_pvalue(rho, a.size()), a.size()};
}

inline Correlation spearman(const IndicatorScores& a, const IndicatorScores& b) {
  if (a.economies != b.economies) throw std::invalid_argument("spearman: score sets cover different economies");
  return spearman(a.scores, b.scores);
}

/// Two-sided permutation p-value: the share of shuffles of `b` whose |rho|
/// reaches the observed one (add-one corrected).
inline double spearman_permutation_pvalue(const std::vector<double>& a, const std::vector<double>& b,
                                          std::size_t permutations = 10000, std::uint64_t seed = 1) {
  detail::check_pair(a, b);
  const auto ra = average_ranks(a);
  auto rb = average_ranks(b);
  const double observed = std::abs(detail::pearson(ra, rb));
  std::mt19937_64 rng(seed);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < permutations; ++k) {
    for (std::size_t i = rb.size(); i > 1; --i) std::swap(rb[i - 1], rb[detail::bounded(rng, i)]);
    if (std::abs(detail::pearson(ra, rb)) >= observed - 1e-12) ++hits;
  }
  return (static_cast<double>(hits) + 1.0) / (static_cast<double>(permutations) + 1.0);
}

inline std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

struct CorrelationEntry {
  Indicator a;
  Indicator b;
  Correlation value;
  bool degenerate = false;
};

struct CorrelationMatrix {
  int year = 0;
  std::vector<Indicator> indicators;
  std::vector<CorrelationEntry> entries;  // unordered pairs in input order, i < j

  std::optional<Correlation> get(Indicator a, Indicator b) const {
    if (a == b) return Correlation{1.0, 0.0, 0};
    for (const auto& e : entries)
      if ((e.a == a && e.b == b) || (e.a == b && e.b == a)) {
        if (e.degenerate) return std::nullopt;
        return e.value;
      }
    return std::nullopt;
  }
};

inline CorrelationMatrix correlation_matrix(const std::vector<IndicatorScores>& all) {
  if (all.size() < 2) throw std::invalid_argument("correlation_matrix: need at least two indicators");
  CorrelationMatrix m;
  m.year = all.front().year;
  for (const auto& s : all) m.indicators.push_back(s.indicator);
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      CorrelationEntry e{all[i].indicator, all[j].indicator, {}, false};
      try {
        e.value = spearman(all[i], all[j]);
      } catch (const UndefinedCorrelation&) {
        e.degenerate = true;
        e.value.n = all[i].size();
      }
      m.entries.push_back(e);
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Organizations

struct Membership {
  std::string id;
  std::optional<int> from;
  std::optional<int> to;

  bool valid_in(int year) const { return (!from || year >= *from) && (!to || year <= *to); }
};

struct OrganizationProfile {
  std::string name;
  std::vector<Membership> members;
};

/// Parses `[{"name": ..., "members": [{"id": ..., "from": ..., "to": ...}]}]`.
/// A member may also be given as a bare string.
inline std::vector<OrganizationProfile> parse_organizations(const nlohmann::json& j) {
  if (!j.is_array()) throw SchemaError("organizations: expected a JSON array");
  std::vector<OrganizationProfile> out;
  for (const auto& o : j) {
    if (!o.is_object() || !o.contains("name") || !o.contains("members") || !o["members"].is_array())
      throw SchemaError("organizations: each entry needs 'name' and a 'members' array");
    OrganizationProfile p{o["name"].get<std::string>(), {}};
    for (const auto& m : o["members"]) {
      Membership mem;
      if (m.is_string()) {
        mem.id = m.get<std::string>();
      } else if (m.is_object() && m.contains("id")) {
        mem.id = m["id"].get<std::string>();
        if (m.contains("from") && !m["from"].is_null()) mem.from = m["from"].get<int>();
        if (m.contains("to") && !m["to"].is_null()) mem.to = m["to"].get<int>();
      } else {
        throw SchemaError("organizations: member of '" + p.name + "' needs an 'id'");
      }
      p.members.push_back(std::move(mem));
    }
    out.push_back(std::move(p));
  }
  return out;
}

inline std::vector<OrganizationProfile> read_organizations(std::istream& in) {
  try {
    return parse_organizations(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("organizations: ") + e.what());
  }
}

struct OrgInfluence {
  std::optional<double> mean;  // nullopt when no member is in the network
  std::size_t members_present = 0;
};

/// Mean score over the members valid in `year` that appear in the scored
/// network. Member ids match under the same folding as ingestion; duplicate
/// entries count once.
inline OrgInfluence org_influence(const OrganizationProfile& org, const IndicatorScores& scores, int year) {
  std::map<std::string, std::size_t> by_key;
  for (std::size_t i = 0; i < scores.economies.size(); ++i) by_key.emplace(fold_id(scores.economies[i]), i);
  std::set<std::size_t> present;
  for (const auto& m : org.members) {
    if (!m.valid_in(year)) continue;
    auto it = by_key.find(fold_id(m.id));
    if (it != by_key.end()) present.insert(it->second);
  }
  OrgInfluence r;
  r.members_present = present.size();
  if (present.empty()) return r;
  double sum = 0.0;
  for (auto i : present) sum += scores.scores[i];
  r.mean = sum / static_cast<double>(present.size());
  return r;
}

struct EvolutionRow {
  std::string entity;
  int year = 0;
  std::optional<double> value;
};

/// Rows sorted by year. With a requested range, every year in it gets a row
/// and years without data carry no value; nothing is interpolated.
inline std::vector<EvolutionRow> evolution_table(const std::map<int, std::optional<double>>& series,
                                                 const std::string& entity,
                                                 std::optional<std::pair<int, int>> range = std::nullopt) {
  std::vector<EvolutionRow> rows;
  if (range) {
    for (int y = range->first; y <= range->second; ++y) {
      auto it = series.find(y);
      rows.push_back({entity, y, it == series.end() ? std::nullopt : it->second});
    }
    return rows;
  }
  for (const auto& [y, v] : series) rows.push_back({entity, y, v});
  return rows;
}

// ---------------------------------------------------------------------------
// Box-plot statistics

struct BoxStats {
  std::size_t count = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  double lower_whisker = 0, upper_whisker = 0;  // most extreme points within 1.5 IQR
};

/// Quartiles by linear interpolation between order statistics.
inline BoxStats box_stats(std::vector<double> v) {
  BoxStats b;
  b.count = v.size();
  if (v.empty()) return b;
  std::sort(v.begin(), v.end());
  auto quantile = [&](double p) {
    const double h = p * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
  };
  b.min = v.front();
  b.max = v.back();
  b.q1 = quantile(0.25);
  b.median = quantile(0.5);
  b.q3 = quantile(0.75);
  const double iqr = b.q3 - b.q1;
  b.lower_whisker = *std::lower_bound(v.begin(), v.end(), b.q1 - 1.5 * iqr);
  b.upper_whisker = *(std::upper_bound(v.begin(), v.end(), b.q3 + 1.5 * iqr) - 1);
  return b;
}

}  // namespace oiltrade
