#pragma once

// Trade-record ingestion: delimiter-separated records -> filtered flows ->
// yearly sets of directed exporter->importer edges.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "oiltrade/detail/csv.hpp"

namespace oiltrade {

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Flow { import, export_ };

inline std::string_view to_string(Flow f) { return f == Flow::import ? "import" : "export"; }

// Accepts the spellings found in trade-database extracts: "Import"/"Export",
// "M"/"X" and the numeric flow codes 1/2. Re-imports and re-exports are not
// plain flows and yield nullopt.
inline std::optional<Flow> parse_flow(std::string_view raw) {
  std::string s;
  for (char c : detail::trim(raw)) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (s == "import" || s == "imports" || s == "m" || s == "1") return Flow::import;
  if (s == "export" || s == "exports" || s == "x" || s == "2") return Flow::export_;
  return std::nullopt;
}

struct TradeRecord {
  int year = 0;
  std::string reporter;
  std::string partner;
  Flow flow = Flow::import;
  std::string commodity;
  double value = 0.0;

  friend bool operator==(const TradeRecord&, const TradeRecord&) = default;
};

// Comparison key for economy identifiers: surrounding whitespace trimmed,
// ASCII case folded.
inline std::string fold_id(std::string_view id) {
  std::string out;
  for (char c : detail::trim(id)) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return out;
}

// Maps every spelling of an identifier onto the first spelling seen.
class IdCanonicalizer {
 public:
  const std::string& canonical(std::string_view raw) {
    auto key = fold_id(raw);
    auto it = display_.find(key);
    if (it == display_.end()) it = display_.emplace(std::move(key), std::string{detail::trim(raw)}).first;
    return it->second;
  }

 private:
  std::unordered_map<std::string, std::string> display_;
};

// Logical field -> source column name. Defaults follow the bulk-download
// headers of the UN Comtrade database.
struct ColumnSchema {
  std::string year = "Year";
  std::string reporter = "Reporter";
  std::string partner = "Partner";
  std::string flow = "Trade Flow";
  std::string commodity = "Commodity Code";
  std::string value = "Trade Value (US$)";
  char delimiter = ',';
  std::optional<int> min_year;
  std::optional<int> max_year;
};

struct RowError {
  std::size_t line = 0;
  std::string reason;
};

struct ParseResult {
  std::vector<TradeRecord> records;
  std::vector<RowError> errors;

  std::size_t rejected() const { return errors.size(); }
};

/// Parses a header-prefixed delimiter-separated stream. Rows that violate a
/// record invariant are collected in `errors` with their 1-based line number;
/// identifiers are canonicalized to their first-seen spelling.
inline ParseResult parse_records(std::istream& in, const ColumnSchema& schema) {
  if (!in) throw IoError("trade records: input stream is not readable");

  std::vector<std::string> fields;
  if (!detail::read_csv_record(in, schema.delimiter, fields)) {
    if (in.bad()) throw IoError("trade records: read failure");
    throw SchemaError("trade records: missing header row");
  }
  if (!fields.empty() && fields[0].starts_with("\xEF\xBB\xBF")) fields[0].erase(0, 3);

  auto column = [&](const std::string& logical, const std::string& name) {
    for (std::size_t i = 0; i < fields.size(); ++i)
      if (detail::trim(fields[i]) == detail::trim(name)) return i;
    throw SchemaError("trade records: required column '" + name + "' (" + logical + ") not found in header");
  };
  const std::size_t c_year = column("year", schema.year);
  const std::size_t c_reporter = column("reporter", schema.reporter);
  const std::size_t c_partner = column("partner", schema.partner);
  const std::size_t c_flow = column("flow", schema.flow);
  const std::size_t c_commodity = column("commodity", schema.commodity);
  const std::size_t c_value = column("value", schema.value);
  const std::size_t width = std::max({c_year, c_reporter, c_partner, c_flow, c_commodity, c_value}) + 1;

  ParseResult result;
  IdCanonicalizer ids;
  std::size_t line = 1;
  while (detail::read_csv_record(in, schema.delimiter, fields)) {
    ++line;
    if (fields.size() == 1 && detail::trim(fields[0]).empty()) continue;
    auto reject = [&](std::string reason) { result.errors.push_back({line, std::move(reason)}); };

    if (fields.size() < width) {
      reject("too few fields");
      continue;
    }
    const auto year = detail::parse_long(fields[c_year]);
    if (!year) {
      reject("unparseable year");
      continue;
    }
    if ((schema.min_year && *year < *schema.min_year) || (schema.max_year && *year > *schema.max_year)) {
      reject("year outside configured range");
      continue;
    }
    const auto reporter = detail::trim(fields[c_reporter]);
    const auto partner = detail::trim(fields[c_partner]);
    if (reporter.empty() || partner.empty()) {
      reject("blank reporter or partner");
      continue;
    }
    if (fold_id(reporter) == fold_id(partner)) {
      reject("reporter equals partner");
      continue;
    }
    const auto flow = parse_flow(fields[c_flow]);
    if (!flow) {
      reject("unrecognized trade flow '" + fields[c_flow] + "'");
      continue;
    }
    const auto value = detail::parse_double(fields[c_value]);
    if (!value || !std::isfinite(*value)) {
      reject("unparseable trade value");
      continue;
    }
    if (*value < 0) {
      reject("negative trade value");
      continue;
    }
    result.records.push_back(TradeRecord{static_cast<int>(*year), ids.canonical(reporter), ids.canonical(partner),
                                         *flow, std::string{detail::trim(fields[c_commodity])}, *value});
  }
  if (in.bad()) throw IoError("trade records: read failure");
  return result;
}

namespace detail {

inline std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

}  // namespace detail

// Case-insensitive whole-word match: the pattern's words must occur as a
// contiguous run of the identifier's words. "nes" matches "Other Asia, nes"
// but not "Indonesia".
inline bool matches_exclusion(std::string_view id, std::string_view pattern) {
  const auto hay = detail::words(id);
  const auto needle = detail::words(pattern);
  if (needle.empty()) return false;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

struct FilterOptions {
  std::string commodity = "270900";
  std::set<Flow> flows{Flow::import};
  // "nes" = not elsewhere specified; "World" is the aggregate partner row.
  std::vector<std::string> exclusions{"nes", "World"};
};

inline std::vector<TradeRecord> filter_records(const std::vector<TradeRecord>& records, const FilterOptions& opts) {
  const std::string commodity{detail::trim(opts.commodity)};
  std::vector<TradeRecord> out;
  for (const auto& r : records) {
    if (r.commodity != commodity || !opts.flows.contains(r.flow)) continue;
    const bool excluded = std::any_of(opts.exclusions.begin(), opts.exclusions.end(), [&](const std::string& p) {
      return matches_exclusion(r.reporter, p) || matches_exclusion(r.partner, p);
    });
    if (!excluded) out.push_back(r);
  }
  return out;
}

struct EdgeSet {
  int year = 0;
  // (exporter, importer)
  std::set<std::pair<std::string, std::string>> edges;

  friend bool operator==(const EdgeSet&, const EdgeSet&) = default;
};

/// Orients every record as exporter -> importer: an import report (reporter r,
/// partner p) is the edge p->r, an export report is r->p. Records with zero
/// value create no edge. Spelling variants of one identifier collapse onto the
/// lexicographically smallest spelling, so the result does not depend on
/// record order.
inline std::map<int, EdgeSet> build_edge_sets(const std::vector<TradeRecord>& records) {
  std::map<std::string, std::string> display;
  for (const auto& r : records) {
    for (const auto* id : {&r.reporter, &r.partner}) {
      const std::string spelled{detail::trim(*id)};
      auto [it, inserted] = display.emplace(fold_id(spelled), spelled);
      if (!inserted && spelled < it->second) it->second = spelled;
    }
  }
  std::map<int, EdgeSet> out;
  for (const auto& r : records) {
    if (!(r.value > 0)) continue;
    const auto& rep = display.at(fold_id(r.reporter));
    const auto& par = display.at(fold_id(r.partner));
    if (rep == par) continue;
    auto& es = out[r.year];
    es.year = r.year;
    if (r.flow == Flow::import) es.edges.emplace(par, rep);
    else es.edges.emplace(rep, par);
  }
  return out;
}

inline void write_edge_list(std::ostream& out, const EdgeSet& es) {
  for (const auto& [from, to] : es.edges) out << detail::csv_quote(from) << ',' << detail::csv_quote(to) << '\n';
}

inline EdgeSet read_edge_list(std::istream& in, int year) {
  if (!in) throw IoError("edge list: input stream is not readable");
  EdgeSet es{year, {}};
  std::vector<std::string> fields;
  std::size_t line = 0;
  while (detail::read_csv_record(in, ',', fields)) {
    ++line;
    if (fields.size() == 1 && detail::trim(fields[0]).empty()) continue;
    if (fields.size() != 2) throw DataError("edge list line " + std::to_string(line) + ": expected exporter,importer");
    std::string from{detail::trim(fields[0])};
    std::string to{detail::trim(fields[1])};
    if (from.empty() || to.empty()) throw DataError("edge list line " + std::to_string(line) + ": blank endpoint");
    if (from == to) throw DataError("edge list line " + std::to_string(line) + ": self-loop");
    es.edges.emplace(std::move(from), std::move(to));
  }
  return es;
}

}  // namespace oiltrade
