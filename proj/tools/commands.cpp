#include "commands.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "oiltrade/oiltrade.hpp"

namespace oiltrade::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { csv, json };

// ---------------------------------------------------------------- utilities

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    auto t = std::string(detail::trim(cur));
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

// "2003,2008,2010-2017"; empty or "all" means no restriction.
std::optional<std::set<int>> parse_years(const std::string& text) {
  if (text.empty() || text == "all") return std::nullopt;
  std::set<int> years;
  for (const auto& tok : split(text, ',')) {
    const auto dash = tok.find('-', 1);
    const auto lo = detail::parse_long(tok.substr(0, dash));
    const auto hi = dash == std::string::npos ? lo : detail::parse_long(tok.substr(dash + 1));
    if (!lo || !hi || *lo > *hi) throw UsageError("bad --years entry '" + tok + "'");
    for (long y = *lo; y <= *hi; ++y) years.insert(static_cast<int>(y));
  }
  if (years.empty()) throw UsageError("--years selects nothing");
  return years;
}

std::vector<Indicator> parse_indicators(const std::string& text) {
  if (text.empty() || text == "all") return {kAllIndicators.begin(), kAllIndicators.end()};
  std::vector<Indicator> out;
  for (const auto& tok : split(text, ',')) {
    const auto ind = parse_indicator(tok);
    if (!ind) throw UsageError("unknown indicator '" + tok + "'");
    if (std::find(out.begin(), out.end(), *ind) == out.end()) out.push_back(*ind);
  }
  return out;
}

std::vector<std::string> parse_strategies(const std::string& text) {
  std::vector<std::string> out;
  if (text.empty() || text == "all") {
    out.emplace_back(kRandomStrategy);
    for (auto i : kAllIndicators) out.emplace_back(to_string(i));
    return out;
  }
  for (const auto& tok : split(text, ',')) {
    if (!is_strategy(tok)) throw UsageError("unknown strategy '" + tok + "'");
    if (std::find(out.begin(), out.end(), tok) == out.end()) out.push_back(tok);
  }
  return out;
}

std::string sha256_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Runs fn(i) for i in [0, n) on a few threads; results keep index order so
// output never depends on scheduling.
template <class T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& fn) {
  std::vector<std::optional<T>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(n, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        slots[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ------------------------------------------------------------------ tables

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<ojson>> rows;
};

std::string cell(const ojson& v) {
  if (v.is_null()) return "NA";
  if (v.is_string()) return detail::csv_quote(v.get<std::string>());
  if (v.is_number_float()) return detail::format_double(v.get<double>());
  return v.dump();
}

void write_file(const fs::path& p, const std::string& body) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << body;
  if (!out) throw IoError("cannot write " + p.string());
}

void write_table(const fs::path& dir, const std::string& stem, const Table& t, Format f) {
  std::ostringstream csv;
  for (std::size_t c = 0; c < t.columns.size(); ++c) csv << (c ? "," : "") << t.columns[c];
  csv << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) csv << (c ? "," : "") << cell(row[c]);
    csv << '\n';
  }
  write_file(dir / (stem + ".csv"), csv.str());
  if (f == Format::json) {
    ojson arr = ojson::array();
    for (const auto& row : t.rows) {
      ojson obj = ojson::object();
      for (std::size_t c = 0; c < row.size(); ++c) obj[t.columns[c]] = row[c];
      arr.push_back(std::move(obj));
    }
    write_file(dir / (stem + ".json"), arr.dump(2) + "\n");
  }
}

ojson opt_number(const std::optional<double>& v) { return v ? ojson(*v) : ojson(nullptr); }

// ---------------------------------------------------------------- manifest

class Manifest {
 public:
  explicit Manifest(const std::vector<std::string>& args) : started_(utc_now()) {
    j_["tool"] = "oiltrade";
    j_["version"] = kVersion;
    j_["command"] = args;
    j_["config"] = nullptr;
    j_["seeds"] = ojson::object();
    j_["inputs"] = ojson::array();
  }

  void config(const fs::path& p) { j_["config"] = {{"path", p.string()}, {"sha256", sha256_file(p)}}; }
  void seed(const std::string& name, std::uint64_t v) { j_["seeds"][name] = v; }
  void input(const fs::path& p) { j_["inputs"].push_back({{"path", p.string()}, {"sha256", sha256_file(p)}}); }

  void write(const fs::path& dir) {
    j_["timestamps"] = {{"started", started_}, {"finished", utc_now()}};
    write_file(dir / "manifest.json", j_.dump(2) + "\n");
  }

 private:
  ojson j_;
  std::string started_;
};

// ------------------------------------------------------------------ config

nlohmann::json load_config(const std::string& path, Manifest& m) {
  if (path.empty()) return nlohmann::json::object();
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  m.config(path);
  return j;
}

template <class T>
T config_value(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw UsageError(std::string("config: bad value for '") + key + "'");
  }
}

struct BuildConfig {
  ColumnSchema schema;
  FilterOptions filter;
  std::optional<std::set<int>> years;
};

BuildConfig build_config(const nlohmann::json& j) {
  static const std::set<std::string> known{"columns", "delimiter", "commodity", "flows", "exclusions",
                                           "years", "indicators", "organizations"};
  if (!j.is_object()) throw UsageError("config: expected a JSON object");
  for (const auto& [k, _] : j.items())
    if (!known.contains(k)) throw UsageError("config: unknown key '" + k + "'");

  BuildConfig c;
  if (j.contains("columns")) {
    const auto& cols = j.at("columns");
    if (!cols.is_object()) throw UsageError("config: 'columns' must be an object");
    std::map<std::string, std::string*> slots{{"year", &c.schema.year},     {"reporter", &c.schema.reporter},
                                              {"partner", &c.schema.partner}, {"flow", &c.schema.flow},
                                              {"commodity", &c.schema.commodity}, {"value", &c.schema.value}};
    for (const auto& [k, v] : cols.items()) {
      if (!slots.contains(k) || !v.is_string()) throw UsageError("config: bad column mapping '" + k + "'");
      *slots[k] = v.get<std::string>();
    }
  }
  const auto delim = config_value<std::string>(j, "delimiter", ",");
  if (delim == "\\t" || delim == "\t") {
    c.schema.delimiter = '\t';
  } else if (delim.size() == 1) {
    c.schema.delimiter = delim[0];
  } else {
    throw UsageError("config: delimiter must be one character");
  }
  c.filter.commodity = config_value<std::string>(j, "commodity", c.filter.commodity);
  if (j.contains("flows")) {
    c.filter.flows.clear();
    for (const auto& f : config_value<std::vector<std::string>>(j, "flows", {})) {
      const auto flow = parse_flow(f);
      if (!flow) throw UsageError("config: unknown flow '" + f + "'");
      c.filter.flows.insert(*flow);
    }
  }
  c.filter.exclusions = config_value(j, "exclusions", c.filter.exclusions);
  if (j.contains("years")) c.years = parse_years(config_value<std::string>(j, "years", ""));
  return c;
}

IndicatorOptions indicator_config(const nlohmann::json& root, std::uint64_t community_seed) {
  IndicatorOptions o;
  o.community_seed = community_seed;
  if (!root.is_object() || !root.contains("indicators")) return o;
  const auto& j = root.at("indicators");
  o.pagerank.damping = config_value(j, "damping", o.pagerank.damping);
  o.pagerank.iterations = config_value(j, "pagerank_iterations", o.pagerank.iterations);
  o.hits.iterations = config_value(j, "hits_iterations", o.hits.iterations);
  o.hits.tolerance = config_value(j, "hits_tolerance", o.hits.tolerance);
  o.louvain.resolution = config_value(j, "resolution", o.louvain.resolution);
  const auto pick = [&](const char* key, const std::string& a, const std::string& b) {
    const auto v = config_value<std::string>(j, key, a);
    if (v != a && v != b) throw UsageError(std::string("config: '") + key + "' must be " + a + " or " + b);
    return v == a;
  };
  o.clustering = pick("clustering_denominator", "total_degree", "neighbor_count") ? ClusteringDenominator::total_degree
                                                                                   : ClusteringDenominator::neighbor_count;
  o.incloseness = pick("incloseness", "reach_corrected", "reciprocal") ? ClosenessMode::reach_corrected
                                                                        : ClosenessMode::reciprocal;
  o.module_links = pick("module_links", "undirected", "directed") ? LinkCounting::undirected : LinkCounting::directed;
  if (!(o.pagerank.damping > 0 && o.pagerank.damping < 1)) throw UsageError("config: damping must lie in (0, 1)");
  return o;
}

std::vector<OrganizationProfile> organizations_config(const nlohmann::json& root) {
  const nlohmann::json* list = &root;
  if (root.is_object()) {
    if (!root.contains("organizations")) throw UsageError("config: no 'organizations' list");
    list = &root.at("organizations");
  }
  try {
    return parse_organizations(*list);
  } catch (const SchemaError& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
}

// ---------------------------------------------------------------- networks

struct YearNetwork {
  int year;
  TradeNetwork g;
};

std::string edges_name(int year) { return "edges_" + std::to_string(year) + ".csv"; }

std::vector<YearNetwork> load_networks(const fs::path& dir, const std::optional<std::set<int>>& years, Manifest& m) {
  if (!fs::is_directory(dir)) throw DataError("network directory " + dir.string() + " does not exist");
  std::map<int, fs::path> found;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (!name.starts_with("edges_") || !name.ends_with(".csv")) continue;
    const auto y = detail::parse_long(name.substr(6, name.size() - 10));
    if (y) found[static_cast<int>(*y)] = entry.path();
  }
  if (years)
    for (int y : *years)
      if (!found.contains(y)) throw DataError("no network for year " + std::to_string(y) + " in " + dir.string());
  std::vector<YearNetwork> out;
  for (const auto& [y, path] : found) {
    if (years && !years->contains(y)) continue;
    std::ifstream in(path, std::ios::binary);
    try {
      out.push_back({y, from_edge_set(read_edge_list(in, y))});
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what());
    }
    m.input(path);
  }
  if (out.empty()) throw DataError("no edge lists (edges_<year>.csv) in " + dir.string());
  return out;
}

// ---------------------------------------------------------------- commands

struct Common {
  std::string input, out, config, years, format = "csv";
  Format fmt() const { return format == "json" ? Format::json : Format::csv; }
};

void cmd_build(const Common& c, Manifest& m, std::ostream& err) {
  const auto cfg = build_config(load_config(c.config, m));
  auto years = parse_years(c.years);
  if (!years) years = cfg.years;

  std::ifstream in(c.input, std::ios::binary);
  if (!in) throw IoError("cannot read " + c.input);
  const auto parsed = parse_records(in, cfg.schema);
  m.input(c.input);
  if (parsed.rejected() > 0) {
    err << "warning: " << parsed.rejected() << " malformed row(s) skipped\n";
    for (std::size_t i = 0; i < std::min<std::size_t>(5, parsed.errors.size()); ++i)
      err << "  line " << parsed.errors[i].line << ": " << parsed.errors[i].reason << '\n';
  }

  std::set<int> seen;
  for (const auto& r : parsed.records) seen.insert(r.year);
  if (years) seen = *years;
  auto sets = build_edge_sets(filter_records(parsed.records, cfg.filter));

  Table summary{{"year", "N", "edges"}, {}};
  for (int y : seen) {
    EdgeSet es = sets.contains(y) ? sets.at(y) : EdgeSet{y, {}};
    std::ostringstream body;
    write_edge_list(body, es);
    write_file(fs::path(c.out) / edges_name(y), body.str());
    const auto g = from_edge_set(es);
    if (g.size() == 0) err << "warning: year " << y << " has an empty network\n";
    summary.rows.push_back({y, g.size(), g.edge_count()});
  }
  if (seen.empty()) err << "warning: no records survived parsing\n";
  write_table(c.out, "network_summary", summary, c.fmt());
}

struct RankArgs {
  std::string indicators;
  std::uint64_t seed = 42;
  std::size_t top_k = 10;
};

void cmd_rank(const Common& c, const RankArgs& a, Manifest& m, std::ostream& err) {
  const auto inds = parse_indicators(a.indicators);
  const auto opts = indicator_config(load_config(c.config, m), a.seed);
  m.seed("community", a.seed);
  const auto nets = load_networks(c.input, parse_years(c.years), m);

  const auto results = parallel_map<std::vector<IndicatorScores>>(
      nets.size(), [&](std::size_t i) { return compute_indicators(nets[i].g, inds, opts); });

  Table top{{"year", "indicator", "rank", "economy", "score"}, {}};
  for (std::size_t k = 0; k < inds.size(); ++k) {
    const std::string name{to_string(inds[k])};
    Table t{{"year", "indicator", "economy", "score", "rank"}, {}};
    for (std::size_t i = 0; i < nets.size(); ++i) {
      const auto& s = results[i][k];
      if (s.degenerate) err << "warning: " << name << " is degenerate for " << nets[i].year << '\n';
      const auto r = rank(s);
      for (std::size_t pos = 0; pos < r.size(); ++pos) {
        const auto node = r.order[pos];
        t.rows.push_back({nets[i].year, name, s.economies[node], s.scores[node], pos + 1});
        if (pos < a.top_k) top.rows.push_back({nets[i].year, name, pos + 1, s.economies[node], s.scores[node]});
      }
    }
    write_table(c.out, "scores_" + name, t, c.fmt());
  }
  write_table(c.out, "top" + std::to_string(a.top_k), top, c.fmt());
}

struct AttackArgs {
  std::string strategies, mode = "static", connectivity = "weak";
  std::size_t trials = 100;
  std::uint64_t seed = 2017, community_seed = 42;
};

void cmd_attack(const Common& c, const AttackArgs& a, Manifest& m, std::ostream&) {
  const auto strategies = parse_strategies(a.strategies);
  if (a.trials == 0) throw UsageError("--trials must be positive");
  AttackOptions opts;
  opts.trials = a.trials;
  opts.seed = a.seed;
  opts.mode = a.mode == "adaptive" ? AttackMode::adaptive : AttackMode::static_ranking;
  opts.connectivity = a.connectivity == "strong" ? Connectivity::strong : Connectivity::weak;
  opts.indicators = indicator_config(load_config(c.config, m), a.community_seed);
  m.seed("random_attack", a.seed);
  m.seed("community", a.community_seed);
  const auto nets = load_networks(c.input, parse_years(c.years), m);

  const auto results = parallel_map<std::vector<StrategyResult>>(
      nets.size(), [&](std::size_t i) { return attack_suite(nets[i].g, strategies, opts); });

  Table rob{{"year", "strategy", "R", "trials", "seed"}, {}};
  Table matrix{{"year"}, {}};
  matrix.columns.insert(matrix.columns.end(), strategies.begin(), strategies.end());
  std::map<std::string, std::vector<double>> per_strategy;
  for (std::size_t i = 0; i < nets.size(); ++i) {
    const int year = nets[i].year;
    const auto& g = nets[i].g;
    const double n = static_cast<double>(g.size());
    const double s0 = g.size() == 0 ? 0.0 : static_cast<double>(weak_components(g).gcc_size) / n;
    std::vector<ojson> mrow{year};
    for (const auto& r : results[i]) {
      Table curve{{"year", "strategy", "n", "q", "S"}, {}};
      curve.rows.push_back({year, r.curve.strategy, 0, 0.0, s0});
      for (std::size_t k = 1; k <= r.curve.n; ++k)
        curve.rows.push_back({year, r.curve.strategy, k, static_cast<double>(k) / n, r.curve.S(k)});
      write_table(c.out, "curve_" + std::to_string(year) + "_" + r.curve.strategy, curve, c.fmt());
      rob.rows.push_back({year, r.robustness.strategy, r.robustness.R, r.robustness.trials, r.robustness.seed});
      mrow.emplace_back(r.robustness.R);
      per_strategy[r.robustness.strategy].push_back(r.robustness.R);
    }
    matrix.rows.push_back(std::move(mrow));
  }
  Table box{{"strategy", "count", "min", "q1", "median", "q3", "max", "lower_whisker", "upper_whisker"}, {}};
  for (const auto& s : strategies) {
    const auto b = box_stats(per_strategy[s]);
    box.rows.push_back({s, b.count, b.min, b.q1, b.median, b.q3, b.max, b.lower_whisker, b.upper_whisker});
  }
  write_table(c.out, "robustness", rob, c.fmt());
  write_table(c.out, "robustness_matrix", matrix, c.fmt());
  write_table(c.out, "robustness_box", box, c.fmt());
}

void cmd_correlate(const Common& c, const RankArgs& a, Manifest& m, std::ostream& err) {
  const auto inds = parse_indicators(a.indicators);
  if (inds.size() < 2) throw UsageError("correlate needs at least two indicators");
  const auto opts = indicator_config(load_config(c.config, m), a.seed);
  m.seed("community", a.seed);
  const auto nets = load_networks(c.input, parse_years(c.years), m);

  const auto matrices = parallel_map<CorrelationMatrix>(
      nets.size(), [&](std::size_t i) { return correlation_matrix(compute_indicators(nets[i].g, inds, opts)); });

  Table t{{"year", "indicator_a", "indicator_b", "rho", "p", "stars"}, {}};
  for (std::size_t i = 0; i < nets.size(); ++i) {
    std::size_t undefined = 0;
    for (const auto& e : matrices[i].entries) {
      const std::string a_name{to_string(e.a)}, b_name{to_string(e.b)};
      if (e.degenerate) {
        ++undefined;
        t.rows.push_back({nets[i].year, a_name, b_name, nullptr, nullptr, ""});
      } else {
        t.rows.push_back({nets[i].year, a_name, b_name, e.value.rho, e.value.p, significance_stars(e.value.p)});
      }
    }
    if (undefined > 0) err << "warning: " << undefined << " undefined correlation(s) in " << nets[i].year << '\n';
  }
  write_table(c.out, "correlations", t, c.fmt());
}

void cmd_orgs(const Common& c, const RankArgs& a, Manifest& m, std::ostream&) {
  const auto inds = parse_indicators(a.indicators);
  if (c.config.empty()) throw UsageError("orgs needs --config (or " + std::string(kConfigEnv) + ") with organizations");
  const auto root = load_config(c.config, m);
  const auto orgs = organizations_config(root);
  const auto opts = indicator_config(root, a.seed);
  m.seed("community", a.seed);
  const auto nets = load_networks(c.input, parse_years(c.years), m);

  const auto scores = parallel_map<std::vector<IndicatorScores>>(
      nets.size(), [&](std::size_t i) { return compute_indicators(nets[i].g, inds, opts); });

  Table t{{"organization", "indicator", "year", "mean_score", "members_present"}, {}};
  for (const auto& org : orgs)
    for (std::size_t k = 0; k < inds.size(); ++k)
      for (std::size_t i = 0; i < nets.size(); ++i) {
        const auto r = org_influence(org, scores[i][k], nets[i].year);
        t.rows.push_back({org.name, std::string(to_string(inds[k])), nets[i].year, opt_number(r.mean),
                          r.members_present});
      }
  write_table(c.out, "organizations", t, c.fmt());
}

void cmd_communities(const Common& c, const RankArgs& a, Manifest& m, std::ostream&) {
  const auto opts = indicator_config(load_config(c.config, m), a.seed);
  m.seed("community", a.seed);
  const auto nets = load_networks(c.input, parse_years(c.years), m);

  const auto parts = parallel_map<ModulePartition>(
      nets.size(), [&](std::size_t i) { return detect_modules(nets[i].g, a.seed, opts.louvain); });

  Table assign{{"year", "economy", "module_id"}, {}};
  Table meta{{"year", "N_M", "Q", "seed"}, {}};
  for (const auto& p : parts) {
    for (std::size_t i = 0; i < p.economies.size(); ++i) assign.rows.push_back({p.year, p.economies[i], p.assignment[i]});
    meta.rows.push_back({p.year, p.module_count, p.modularity, p.seed});
  }
  write_table(c.out, "partitions", assign, c.fmt());
  write_table(c.out, "communities", meta, c.fmt());
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Oil trade network influence and robustness analysis", "oiltrade"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Common common;
  RankArgs rank_args;
  AttackArgs attack_args;

  const auto add_common = [&](CLI::App* sub, bool needs_config) {
    sub->add_option("--out", common.out, "Output directory")->required();
    auto* cfg = sub->add_option("--config", common.config, "JSON config file")->envname(kConfigEnv);
    if (needs_config) cfg->description("JSON config with an organizations list");
    sub->add_option("--years", common.years, "Years, e.g. 2003,2008,2010-2017 (default: all)");
    sub->add_option("--format", common.format, "csv, or json to add JSON mirrors")
        ->check(CLI::IsMember({"csv", "json"}));
  };
  const auto add_networks = [&](CLI::App* sub) {
    sub->add_option("--input", common.input, "Directory of edges_<year>.csv files")->required();
  };
  const auto add_indicators = [&](CLI::App* sub) {
    sub->add_option("--indicators", rank_args.indicators, "Comma-separated indicators or 'all'");
    sub->add_option("--seed", rank_args.seed, "Community detection seed")->capture_default_str();
  };

  auto* build = app.add_subcommand("build", "Build yearly networks from trade records");
  build->add_option("--input", common.input, "Trade records CSV")->required();
  add_common(build, false);

  auto* rank_cmd = app.add_subcommand("rank", "Score and rank economies");
  add_networks(rank_cmd);
  add_common(rank_cmd, false);
  add_indicators(rank_cmd);
  rank_cmd->add_option("--top-k", rank_args.top_k, "Rows per indicator and year in the top view")
      ->capture_default_str();

  auto* attack = app.add_subcommand("attack", "Simulate node attacks");
  add_networks(attack);
  add_common(attack, false);
  attack->add_option("--strategies", attack_args.strategies, "Indicators and/or 'random', or 'all'");
  attack->add_option("--trials", attack_args.trials, "Random attack trials")->capture_default_str();
  attack->add_option("--seed", attack_args.seed, "Random attack seed")->capture_default_str();
  attack->add_option("--community-seed", attack_args.community_seed, "Community detection seed")
      ->capture_default_str();
  attack->add_option("--mode", attack_args.mode, "static or adaptive")
      ->check(CLI::IsMember({"static", "adaptive"}))
      ->capture_default_str();
  attack->add_option("--connectivity", attack_args.connectivity, "Giant component: weak or strong")
      ->check(CLI::IsMember({"weak", "strong"}))
      ->capture_default_str();

  auto* correlate = app.add_subcommand("correlate", "Spearman correlations between indicators");
  add_networks(correlate);
  add_common(correlate, false);
  add_indicators(correlate);

  auto* orgs = app.add_subcommand("orgs", "Mean influence of organizations");
  add_networks(orgs);
  add_common(orgs, true);
  add_indicators(orgs);

  auto* communities = app.add_subcommand("communities", "Module partitions");
  add_networks(communities);
  add_common(communities, false);
  communities->add_option("--seed", rank_args.seed, "Community detection seed")->capture_default_str();

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    Manifest manifest(args);
    if (*build) cmd_build(common, manifest, err);
    if (*rank_cmd) cmd_rank(common, rank_args, manifest, err);
    if (*attack) cmd_attack(common, attack_args, manifest, err);
    if (*correlate) cmd_correlate(common, rank_args, manifest, err);
    if (*orgs) cmd_orgs(common, rank_args, manifest, err);
    if (*communities) cmd_communities(common, rank_args, manifest, err);
    manifest.write(common.out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kOk;
}

}  // namespace oiltrade::cli
