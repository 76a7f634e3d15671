#include <gtest/gtest.h>

#include <random>

#include "oiltrade/attack.hpp"
#include "oracles.hpp"

using namespace oiltrade;

namespace {

oracle::Digraph reciprocal_star(std::size_t leaves) {
  oracle::Digraph d(leaves + 1);
  for (std::size_t l = 1; l <= leaves; ++l) {
    d.add(0, l);
    d.add(l, 0);
  }
  return d;
}

RankingTable ranking_of(const TradeNetwork& g, const std::vector<std::string>& ids) {
  RankingTable t;
  for (const auto& id : ids) {
    t.order.push_back(*g.index_of(id));
    t.economies.push_back(id);
  }
  return t;
}

void expect_curve(const AttackCurve& c, const std::vector<double>& s) {
  ASSERT_EQ(c.fraction.size(), s.size());
  for (std::size_t k = 0; k < s.size(); ++k) EXPECT_NEAR(c.fraction[k], s[k], 1e-12) << "n=" << k + 1;
}

}  // namespace

TEST(TargetedAttack, StarByDegree) {
  const auto g = oracle::to_network(reciprocal_star(4));
  const auto curve = targeted_attack(g, rank(compute_indicator(g, Indicator::outdegree)), "outdegree");
  expect_curve(curve, {0.2, 0.2, 0.2, 0.2, 0.0});
  EXPECT_NEAR(robustness(curve).R, 0.16, 1e-15);
}

TEST(TargetedAttack, CompleteDigraph) {
  const auto g = oracle::to_network(oracle::complete(4));
  const auto curve = targeted_attack(g, rank(compute_indicator(g, Indicator::pagerank)), "pagerank");
  expect_curve(curve, {0.75, 0.5, 0.25, 0.0});
  EXPECT_NEAR(robustness(curve).R, 0.375, 1e-15);
}

TEST(TargetedAttack, ReciprocalChain) {
  const TradeNetwork g(0, {"A", "B", "C"}, std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {1, 0}, {1, 2}, {2, 1}});
  const auto curve = targeted_attack(g, ranking_of(g, {"B", "A", "C"}), "custom");
  expect_curve(curve, {1.0 / 3, 1.0 / 3, 0.0});
}

TEST(TargetedAttack, RankingMismatchThrows) {
  const auto g = oracle::to_network(oracle::complete(3));
  const auto other = oracle::to_network(oracle::complete(4));
  EXPECT_THROW(targeted_attack(g, rank(compute_indicator(other, Indicator::indegree)), "x"), std::invalid_argument);
  auto bad = rank(compute_indicator(g, Indicator::indegree));
  bad.order[0] = bad.order[1];
  EXPECT_THROW(targeted_attack(g, bad, "x"), std::invalid_argument);
}

TEST(TargetedAttack, StrongConnectivityMode) {
  // one-way chain: no two nodes are mutually reachable
  const TradeNetwork g(0, {"A", "B", "C"}, std::vector<std::pair<NodeId, NodeId>>{{0, 1}, {1, 2}});
  const auto curve = targeted_attack(g, ranking_of(g, {"A", "B", "C"}), "x", Connectivity::strong);
  expect_curve(curve, {1.0 / 3, 1.0 / 3, 0.0});
}

TEST(RandomAttack, CompleteDigraphIsOrderFree) {
  const auto g = oracle::to_network(oracle::complete(4));
  for (std::size_t trials : {1u, 7u, 50u}) expect_curve(random_attack(g, trials, 3), {0.75, 0.5, 0.25, 0.0});
}

TEST(RandomAttack, SingleEdge) {
  const auto g = oracle::to_network([] {
    oracle::Digraph d(2);
    d.add(0, 1);
    return d;
  }());
  expect_curve(random_attack(g, 1, 0), {0.5, 0.0});
}

TEST(RandomAttack, StarFirstRemovalAverage) {
  // exhaustive over the five equally likely first removals:
  // centre -> S = 1/5, a leaf -> S = 4/5
  double exhaustive = 0.0;
  const auto d = reciprocal_star(4);
  for (std::size_t first = 0; first < 5; ++first) {
    std::vector<bool> alive(5, true);
    alive[first] = false;
    exhaustive += static_cast<double>(oracle::gcc(d, alive)) / 5.0;
  }
  exhaustive /= 5.0;
  EXPECT_NEAR(exhaustive, 0.68, 1e-15);
  const auto curve = random_attack(oracle::to_network(d), 20000, 11);
  EXPECT_NEAR(curve.S(1), exhaustive, 0.01);
}

TEST(RandomAttack, ZeroTrialsRejectedAndSeedReproducible) {
  const auto g = oracle::to_network(reciprocal_star(6));
  EXPECT_THROW(random_attack(g, 0, 1), std::invalid_argument);
  EXPECT_EQ(random_attack(g, 25, 8).fraction, random_attack(g, 25, 8).fraction);
}

TEST(Robustness, IncompleteCurveRejected) {
  AttackCurve c{"x", 0, 4, {0.5, 0.25}};
  EXPECT_THROW(robustness(c), std::invalid_argument);
}

TEST(Robustness, IsolatedNodes) {
  // N isolated nodes: S(n) = 1/N while anything survives
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto g = oracle::to_network(oracle::Digraph(n));
    const auto r = robustness(targeted_attack(g, rank(compute_indicator(g, Indicator::indegree)), "indegree")).R;
    EXPECT_NEAR(r, static_cast<double>(n - 1) / static_cast<double>(n * n), 1e-15);
    EXPECT_LE(r, static_cast<double>(n - 1) / (2.0 * static_cast<double>(n)) + 1e-15);
  }
}

TEST(AttackSuite, CardinalityAndErrors) {
  const auto g = oracle::to_network(reciprocal_star(5));
  AttackOptions opts;
  opts.trials = 10;
  const auto res = attack_suite(g, {"indegree", "random"}, opts);
  ASSERT_EQ(res.size(), 2u);
  EXPECT_EQ(res[1].robustness.trials, 10u);
  EXPECT_TRUE(attack_suite(g, {}, opts).empty());
  EXPECT_THROW(attack_suite(g, {"indegree", "eigenvector"}, opts), std::invalid_argument);
  const auto again = attack_suite(g, {"indegree", "random"}, opts);
  EXPECT_EQ(again[1].curve.fraction, res[1].curve.fraction);
}

TEST(AttackSuite, AllStrategiesOnEmptyNetwork) {
  std::vector<std::string> all{"random"};
  for (auto i : kAllIndicators) all.emplace_back(to_string(i));
  const auto res = attack_suite(TradeNetwork{}, all);
  ASSERT_EQ(res.size(), 13u);
  for (const auto& r : res) EXPECT_EQ(r.robustness.R, 0.0);
}

TEST(Oracle, StaticAndAdaptiveCurvesOnSmallDigraphs) {
  std::mt19937_64 rng(606);
  for (int round = 0; round < 200; ++round) {
    const auto d = oracle::random_digraph(rng, 1 + rng() % 6, 0.1 + 0.1 * static_cast<double>(rng() % 5));
    const auto g = oracle::to_network(d);
    const std::vector<bool> all(d.n, true);

    const auto static_ref = oracle::static_attack(d, oracle::order_by(oracle::betweenness(d), all));
    expect_curve(targeted_attack(g, rank(compute_indicator(g, Indicator::betweenness)), "betweenness"), static_ref);

    const auto adaptive_ref = oracle::adaptive_attack(d, oracle::in_degree);
    const auto adaptive =
        adaptive_attack(g, [](const TradeNetwork& s) { return rank(degree(s).indegree); }, "indegree");
    expect_curve(adaptive, adaptive_ref);
  }
}

TEST(Invariants, CurvesBoundedAndTerminal) {
  std::mt19937_64 rng(31);
  std::vector<std::string> all{"random"};
  for (auto i : kAllIndicators) all.emplace_back(to_string(i));
  for (int round = 0; round < 15; ++round) {
    const auto g = oracle::to_network(oracle::random_digraph(rng, 1 + rng() % 30, 0.1));
    AttackOptions opts;
    opts.trials = 5;
    for (const auto& r : attack_suite(g, all, opts)) {
      const auto n = static_cast<double>(g.size());
      for (std::size_t k = 1; k <= g.size(); ++k) EXPECT_LE(r.curve.S(k), (n - static_cast<double>(k)) / n + 1e-12);
      EXPECT_EQ(r.curve.S(g.size()), 0.0);
      EXPECT_GE(r.robustness.R, 0.0);
      EXPECT_LE(r.robustness.R, (n - 1) / (2 * n) + 1e-12);
    }
  }
}
