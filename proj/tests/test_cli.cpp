#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "oiltrade/oiltrade.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using oiltrade::cli::run;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / "oiltrade_cli_tests" / info->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv(oiltrade::cli::kConfigEnv);
  }
  void TearDown() override { unsetenv(oiltrade::cli::kConfigEnv); }

  fs::path path(const std::string& name) const { return dir_ / name; }

  std::string write(const std::string& name, const std::string& body) const {
    fs::create_directories(path(name).parent_path());
    std::ofstream(path(name), std::ios::binary) << body;
    return path(name).string();
  }

  int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "oiltrade");
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }

  std::ostringstream out_, err_;
  fs::path dir_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::vector<std::string> out;
  std::ifstream in(p);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::size_t rows(const fs::path& p) { return lines(p).size() - 1; }

std::size_t count_files(const fs::path& dir, const std::string& prefix) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().filename().string().starts_with(prefix)) ++n;
  return n;
}

const char* kHeader = "Year,Reporter,Partner,Trade Flow,Commodity Code,Trade Value (US$)\n";

// Import records whose edges reproduce d, one block per year.
std::string records(const std::vector<std::pair<int, oracle::Digraph>>& years) {
  std::string s = kHeader;
  for (const auto& [year, d] : years)
    for (std::size_t u = 0; u < d.n; ++u)
      for (std::size_t v = 0; v < d.n; ++v)
        if (d.a[u][v]) s += std::to_string(year) + "," + oracle::node_id(v) + "," + oracle::node_id(u) + ",Import,270900,10\n";
  return s;
}

oracle::Digraph random_graph(std::uint64_t seed, std::size_t n, double p) {
  std::mt19937_64 rng(seed);
  return oracle::random_digraph(rng, n, p);
}

// Compares every output file in two directories except the manifest.
void expect_identical_dirs(const fs::path& a, const fs::path& b) {
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    const auto name = e.path().filename();
    if (name == "manifest.json") continue;
    ASSERT_TRUE(fs::exists(b / name)) << name;
    EXPECT_EQ(slurp(e.path()), slurp(b / name)) << name;
    ++compared;
  }
  EXPECT_GT(compared, 0u);
}

}  // namespace

TEST_F(Cli, BuildTwoYears) {
  const auto in = write("recs.csv", records({{2003, random_graph(1, 12, 0.2)}, {2004, random_graph(2, 12, 0.2)}}));
  ASSERT_EQ(cli({"build", "--input", in, "--out", path("nets").string()}), 0) << err_.str();
  EXPECT_EQ(count_files(path("nets"), "edges_"), 2u);
  EXPECT_EQ(rows(path("nets/network_summary.csv")), 2u);
  EXPECT_TRUE(fs::exists(path("nets/manifest.json")));
}

TEST_F(Cli, BuildWithOnlyExcludedPartners) {
  const auto in = write("recs.csv", std::string(kHeader) + "2017,France,World,Import,270900,5\n" +
                                        "2017,Spain,Other Asia nes,Import,270900,5\n");
  ASSERT_EQ(cli({"build", "--input", in, "--out", path("nets").string()}), 0);
  EXPECT_NE(err_.str().find("empty network"), std::string::npos);
  EXPECT_EQ(slurp(path("nets/edges_2017.csv")), "");
  EXPECT_EQ(lines(path("nets/network_summary.csv"))[1], "2017,0,0");
}

TEST_F(Cli, BuildMissingColumnFails) {
  const auto in = write("recs.csv", "Year,Reporter,Partner,Trade Flow,Commodity Code\n2017,A,B,Import,270900\n");
  EXPECT_NE(cli({"build", "--input", in, "--out", path("nets").string()}), 0);
  EXPECT_NE(err_.str().find("Trade Value"), std::string::npos);
}

TEST_F(Cli, BuildConfigMapsColumnsAndFlows) {
  const auto in = write("recs.tsv", "yr\trep\tpar\tflow\tcode\tusd\n2017\tA\tB\tExport\t270900\t3\n"
                                    "2017\tC\tB\tImport\t270900\t3\n");
  const auto cfg = write("cfg.json", R"({"columns": {"year": "yr", "reporter": "rep", "partner": "par",
                                                    "flow": "flow", "commodity": "code", "value": "usd"},
                                        "delimiter": "\t", "flows": ["export"]})");
  ASSERT_EQ(cli({"build", "--input", in, "--config", cfg, "--out", path("nets").string()}), 0) << err_.str();
  EXPECT_EQ(slurp(path("nets/edges_2017.csv")), "A,B\n");
  const auto manifest = nlohmann::json::parse(slurp(path("nets/manifest.json")));
  EXPECT_EQ(manifest["config"]["sha256"].get<std::string>().size(), 64u);
  EXPECT_EQ(manifest["inputs"].size(), 1u);
}

TEST_F(Cli, BadConfigIsAUsageError) {
  const auto in = write("recs.csv", records({{2017, random_graph(1, 5, 0.3)}}));
  const auto cfg = write("cfg.json", R"({"colums": {}})");
  EXPECT_EQ(cli({"build", "--input", in, "--config", cfg, "--out", path("nets").string()}), 1);
  const auto broken = write("broken.json", "{");
  EXPECT_EQ(cli({"build", "--input", in, "--config", broken, "--out", path("nets").string()}), 1);
}

TEST_F(Cli, RankAllIndicatorsAndTopTen) {
  const auto in = write("recs.csv", records({{2017, random_graph(3, 30, 0.1)}}));
  ASSERT_EQ(cli({"build", "--input", in, "--out", path("nets").string()}), 0);
  ASSERT_EQ(cli({"rank", "--input", path("nets").string(), "--out", path("rank").string()}), 0) << err_.str();
  EXPECT_EQ(count_files(path("rank"), "scores_"), 12u);
  EXPECT_EQ(rows(path("rank/top10.csv")), 120u);
  EXPECT_EQ(rows(path("rank/scores_pagerank.csv")), 30u);
  EXPECT_EQ(lines(path("rank/scores_pagerank.csv"))[0], "year,indicator,economy,score,rank");
}

TEST_F(Cli, RankEmptyNetworkSucceeds) {
  write("nets/edges_2017.csv", "");
  ASSERT_EQ(cli({"rank", "--input", path("nets").string(), "--out", path("rank").string()}), 0) << err_.str();
  EXPECT_EQ(rows(path("rank/scores_indegree.csv")), 0u);
  EXPECT_EQ(rows(path("rank/top10.csv")), 0u);
}

TEST_F(Cli, UnknownNamesAndMissingInputs) {
  write("nets/edges_2017.csv", "A,B\n");
  const auto nets = path("nets").string();
  EXPECT_EQ(cli({"rank", "--input", nets, "--out", path("o").string(), "--indicators", "eigenvector"}), 1);
  EXPECT_FALSE(fs::exists(path("o")));
  EXPECT_EQ(cli({"attack", "--input", nets, "--out", path("o").string(), "--strategies", "indegree,x"}), 1);
  EXPECT_EQ(cli({"attack", "--input", nets, "--out", path("o").string(), "--mode", "sometimes"}), 1);
  EXPECT_EQ(cli({"rank", "--input", path("none").string(), "--out", path("o").string()}), 2);
  EXPECT_EQ(cli({"rank", "--input", nets, "--out", path("o").string(), "--years", "2003"}), 2);
  EXPECT_EQ(cli({"rank", "--input", nets}), 1);
  EXPECT_EQ(cli({}), 1);
  EXPECT_EQ(cli({"--help"}), 0);
}

TEST_F(Cli, AttackCardinality) {
  const auto in = write("recs.csv", records({{2003, random_graph(4, 15, 0.15)}, {2008, random_graph(5, 15, 0.15)}}));
  ASSERT_EQ(cli({"build", "--input", in, "--out", path("nets").string()}), 0);
  ASSERT_EQ(cli({"attack", "--input", path("nets").string(), "--out", path("att").string(), "--years", "2003",
                 "--strategies", "indegree,random", "--trials", "20"}),
            0)
      << err_.str();
  EXPECT_EQ(count_files(path("att"), "curve_"), 2u);
  EXPECT_EQ(rows(path("att/robustness.csv")), 2u);
  EXPECT_EQ(lines(path("att/robustness_matrix.csv"))[0], "year,indegree,random");
  EXPECT_EQ(rows(path("att/robustness_box.csv")), 2u);
  EXPECT_EQ(rows(path("att/curve_2003_indegree.csv")), 16u);
}

TEST_F(Cli, AttackAndCommunitiesAreByteIdentical) {
  const auto in = write("recs.csv", records({{2017, random_graph(6, 40, 0.06)}}));
  ASSERT_EQ(cli({"build", "--input", in, "--out", path("nets").string()}), 0);
  for (const char* run_dir : {"a", "b"}) {
    ASSERT_EQ(cli({"attack", "--input", path("nets").string(), "--out", path(std::string(run_dir) + "/att").string(),
                   "--trials", "15", "--seed", "9"}),
              0);
    ASSERT_EQ(cli({"communities", "--input", path("nets").string(), "--out",
                   path(std::string(run_dir) + "/com").string(), "--seed", "5"}),
              0);
  }
  expect_identical_dirs(path("a/att"), path("b/att"));
  expect_identical_dirs(path("a/com"), path("b/com"));
  const auto manifest = nlohmann::json::parse(slurp(path("a/att/manifest.json")));
  EXPECT_EQ(manifest["seeds"]["random_attack"], 9);
  EXPECT_TRUE(manifest["timestamps"].contains("started"));
}

TEST_F(Cli, AdaptiveModeMatchesRecomputationOracle) {
  oracle::Digraph d(5);
  for (auto [u, v] : std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}, {2, 0}, {3, 0}, {4, 3}, {1, 4}})
    d.add(u, v);
  ASSERT_EQ(cli({"build", "--input", write("recs.csv", records({{2017, d}})), "--out", path("nets").string()}), 0);
  ASSERT_EQ(cli({"attack", "--input", path("nets").string(), "--out", path("att").string(), "--strategies",
                 "indegree", "--mode", "adaptive"}),
            0);
  const auto expected = oracle::adaptive_attack(d, oracle::in_degree);
  const auto got = lines(path("att/curve_2017_indegree.csv"));
  ASSERT_EQ(got.size(), 7u);
  for (std::size_t k = 1; k <= 5; ++k) {
    const auto last = got[k + 1].substr(got[k + 1].rfind(',') + 1);
    EXPECT_NEAR(std::stod(last), expected[k - 1], 1e-12) << "n=" << k;
  }
}

TEST_F(Cli, CorrelateTwelveIndicators) {
  const auto in = write("recs.csv", records({{2017, random_graph(7, 40, 0.08)}}));
  ASSERT_EQ(cli({"build", "--input", in, "--out", path("nets").string()}), 0);
  ASSERT_EQ(cli({"correlate", "--input", path("nets").string(), "--out", path("cor").string()}), 0) << err_.str();
  EXPECT_EQ(rows(path("cor/correlations.csv")), 66u);
  EXPECT_EQ(lines(path("cor/correlations.csv"))[0], "year,indicator_a,indicator_b,rho,p,stars");
}

TEST_F(Cli, OrgsCardinalityAndConfigFromEnvironment) {
  std::vector<std::pair<int, oracle::Digraph>> years;
  for (int y = 2015; y <= 2017; ++y) years.emplace_back(y, random_graph(static_cast<std::uint64_t>(y), 20, 0.1));
  ASSERT_EQ(cli({"build", "--input", write("recs.csv", records(years)), "--out", path("nets").string()}), 0);
  nlohmann::json orgs = nlohmann::json::array();
  for (int k = 0; k < 5; ++k)
    orgs.push_back({{"name", "org" + std::to_string(k)},
                    {"members", {oracle::node_id(k), oracle::node_id(k + 3), {{"id", oracle::node_id(k + 6)}}}}});
  const auto cfg = write("orgs.json", orgs.dump());
  ASSERT_EQ(cli({"orgs", "--input", path("nets").string(), "--out", path("orgs").string(), "--config", cfg}), 0)
      << err_.str();
  EXPECT_EQ(rows(path("orgs/organizations.csv")), 5u * 12u * 3u);

  setenv(oiltrade::cli::kConfigEnv, cfg.c_str(), 1);
  ASSERT_EQ(cli({"orgs", "--input", path("nets").string(), "--out", path("orgs_env").string()}), 0) << err_.str();
  EXPECT_EQ(slurp(path("orgs/organizations.csv")), slurp(path("orgs_env/organizations.csv")));
  // An explicit flag wins over the environment.
  setenv(oiltrade::cli::kConfigEnv, path("missing.json").c_str(), 1);
  EXPECT_EQ(cli({"orgs", "--input", path("nets").string(), "--out", path("orgs_flag").string(), "--config", cfg}), 0);
  EXPECT_EQ(cli({"orgs", "--input", path("nets").string(), "--out", path("orgs_bad").string()}), 1);
}

TEST_F(Cli, JsonMirrors) {
  ASSERT_EQ(cli({"build", "--input", write("recs.csv", records({{2017, random_graph(8, 10, 0.2)}})), "--out",
                 path("nets").string()}),
            0);
  ASSERT_EQ(cli({"communities", "--input", path("nets").string(), "--out", path("com").string(), "--format", "json"}),
            0);
  const auto meta = nlohmann::json::parse(slurp(path("com/communities.json")));
  ASSERT_EQ(meta.size(), 1u);
  EXPECT_EQ(meta[0]["year"], 2017);
  EXPECT_EQ(meta[0]["seed"], 42);
  EXPECT_EQ(nlohmann::json::parse(slurp(path("com/partitions.json"))).size(), rows(path("com/partitions.csv")));
}

TEST_F(Cli, EveryOutputDirectoryHasOneManifest) {
  ASSERT_EQ(cli({"build", "--input", write("recs.csv", records({{2017, random_graph(9, 10, 0.2)}})), "--out",
                 path("nets").string()}),
            0);
  ASSERT_EQ(cli({"attack", "--input", path("nets").string(), "--out", path("att").string(), "--trials", "3"}), 0);
  for (const auto& e : fs::recursive_directory_iterator(dir_))
    if (e.is_directory()) {
      EXPECT_EQ(count_files(e.path(), "manifest.json"), 1u) << e.path();
    }
}
