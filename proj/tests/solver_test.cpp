#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace cflow {
namespace {

using testing::NormInf;

Graph Path3() { return Graph(3, {{0, 1, 1.0}, {1, 2, 2.0}}); }

SolverConfig WithAlpha(double alpha) {
  SolverConfig cfg;
  cfg.alpha = alpha;
  return cfg;
}

void ExpectConserves(const Graph& g, std::span<const double> b, std::span<const double> f) {
  const auto div = divergence(g, f);
  for (Vertex v = 0; v < g.n(); ++v) {
    EXPECT_NEAR(div[v], b[v], 1e-9 * std::max(1.0, NormInf(b)));
  }
}

TEST(AlmostRouteTest, ZeroDemand) {
  const Graph g = testing::RandomGraph(8, 1);
  const DegreeApproximator r(g, 2.0);
  const auto res = almost_route(g, r, std::vector<double>(g.n(), 0.0), 0.1);
  EXPECT_EQ(res.iterations, 0);
  EXPECT_EQ(res.scalings, 0);
  for (double x : res.flow) EXPECT_EQ(x, 0.0);
}

TEST(AlmostRouteTest, SingleEdge) {
  const Graph g(2, {{0, 1, 1.0}});
  const std::vector<double> b = {-1.0, 1.0};
  const DegreeApproximator degree(g, 1.0);
  const TreeApproximator tree(g);
  for (const CongestionApproximator* r : {static_cast<const CongestionApproximator*>(&degree),
                                          static_cast<const CongestionApproximator*>(&tree)}) {
    const auto res = almost_route(g, *r, b, 0.5);
    EXPECT_LE(res.objective, 1.5);
    EXPECT_GE(res.objective, 1.0 - 1e-12);
    EXPECT_DOUBLE_EQ(threshold_cut(g, b, res.potentials).ratio, 1.0);
  }
}

TEST(AlmostRouteTest, RejectsBadInput) {
  const Graph g = Path3();
  const DegreeApproximator r(g, 1.0);
  EXPECT_THROW(almost_route(g, r, std::vector<double>{-1, 0, 2}, 0.1), std::invalid_argument);
  EXPECT_THROW(almost_route(g, r, std::vector<double>{-1, 0, 1}, 0.6), std::invalid_argument);
  EXPECT_THROW(almost_route(g, r, std::vector<double>{-1, 0, 1}, 0.0), std::invalid_argument);
  EXPECT_THROW(almost_route(g, r, std::vector<double>{-1, 1}, 0.1), std::invalid_argument);
  EXPECT_THROW(almost_route(g, r, std::vector<double>{-1, 0, 1}, 0.1, WithAlpha(0.5)),
               std::invalid_argument);
}

TEST(AlmostRouteTest, BudgetExceededIsReported) {
  const Graph g = testing::RandomGraph(20, 2);
  const DegreeApproximator r(g, 1.0);
  std::mt19937_64 rng(2);
  SolverConfig cfg;
  cfg.alpha = 4.0;
  cfg.max_iter_coeff = 1e-6;
  try {
    almost_route(g, r, random_demands(g.n(), rng), 0.1, cfg);
    FAIL() << "expected IterationBudgetExceeded";
  } catch (const IterationBudgetExceeded& e) {
    EXPECT_EQ(e.iterations(), e.budget());
  }
}

// Termination guarantees with a certified alpha.
TEST(AlmostRouteTest, CertificateSlackAndDescent) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = testing::RandomGraph(5 + trial * 2, 30 + trial);
    const auto r = make_degree_approximator(g);
    for (double eps : {0.5, 0.2}) {
      const auto b = random_demands(g.n(), rng);
      const auto res = almost_route(g, r, b, eps);
      EXPECT_LE(res.objective, (1 + eps) * res.certificate * (1 + 1e-12));
      EXPECT_LE(res.residual_norm, eps * res.demand_norm + 1e-9);
      EXPECT_EQ(res.descent_violations, 0);
      EXPECT_LE(res.scalings, res.scaling_bound);
      EXPECT_LE(res.iterations, res.iteration_budget);
      EXPECT_LT(res.final_delta, eps / 4);
      const auto resid = residual_demands(g, b, res.flow);
      for (Vertex v = 0; v < g.n(); ++v) EXPECT_NEAR(res.residual[v], resid[v], 1e-12);
      // The scale target makes the softmax slack at most eps/4 of phi.
      EXPECT_GE(res.scale_target * eps / 4,
                std::log(2.0 * g.m()) + std::log(2.0 * r.rows()) - 1e-12);
    }
  }
}

TEST(ThresholdCutTest, PathExample) {
  const Cut c = threshold_cut(Path3(), std::vector<double>{-1, 0, 1},
                              std::vector<double>{2, 1, 0});
  EXPECT_DOUBLE_EQ(c.ratio, 1.0);
  EXPECT_EQ(c.side, (std::vector<Vertex>{0}));
}

TEST(ThresholdCutTest, TwoLevelsGiveTheUniqueCut) {
  const Graph g = testing::RandomGraph(9, 4);
  std::mt19937_64 rng(4);
  const auto b = random_demands(g.n(), rng);
  std::vector<double> v(g.n(), 0.0);
  v[2] = v[5] = v[7] = 1.0;
  const Cut c = threshold_cut(g, b, v);
  EXPECT_EQ(c.side, (std::vector<Vertex>{2, 5, 7}));
}

TEST(ThresholdCutTest, AllEqualThrows) {
  EXPECT_THROW(threshold_cut(Path3(), std::vector<double>{-1, 0, 1}, std::vector<double>(3, 4.0)),
               std::invalid_argument);
}

TEST(ThresholdCutTest, BeatsDualValueAndMatchesPrefixScan) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Graph g = testing::RandomGraph(3 + trial % 20, 50 + trial);
    const auto b = random_demands(g.n(), rng);
    auto v = testing::Gaussian(g.n(), rng);
    if (trial % 4 == 0) {
      for (double& x : v) x = std::round(x);  // force ties
    }
    bool distinct = false;
    for (double x : v) distinct |= x != v[0];
    if (!distinct) continue;
    const Cut c = threshold_cut(g, b, v);
    EXPECT_GE(c.ratio, std::abs(dual_ratio(g, b, v)) - 1e-9);
    // Brute force over the true threshold sets {u : v_u >= level}.
    double best = 0.0;
    for (double level : v) {
      std::vector<Vertex> side;
      for (Vertex u = 0; u < g.n(); ++u) {
        if (v[u] >= level) side.push_back(u);
      }
      if (static_cast<int>(side.size()) == g.n()) continue;
      best = std::max(best, cut_quantities(g, b, side).ratio);
    }
    EXPECT_NEAR(c.ratio, best, 1e-12 * best);
  }
}

TEST(RouteTest, PathExample) {
  const Graph g = Path3();
  const std::vector<double> b = {-1, 0, 1};
  for (const auto& r : testing::AllApproximators(g, 0)) {
    const auto sol = route(g, *r, b, 0.1, WithAlpha(degree_alpha_bound(g) * 2));
    EXPECT_LE(sol.primal, 1.1);
    EXPECT_DOUBLE_EQ(sol.dual, 1.0);
    EXPECT_LE(sol.primal, 1.1 * sol.dual);
    ExpectConserves(g, b, sol.flow);
  }
}

TEST(RouteTest, BarbellBridgeIsTheMinCut) {
  const Graph g = barbell_graph(6, 1.0, CapacityModel::kUniform, 1);
  std::vector<double> b(g.n(), 0.0);
  b[0] = -1.0;
  b[g.n() - 1] = 1.0;
  const auto r = make_degree_approximator(g);
  const auto sol = route(g, r, b, 0.1);
  EXPECT_DOUBLE_EQ(sol.dual, 1.0);
  EXPECT_LE(sol.primal, 1.1);
  EXPECT_NEAR(exact_opt_congestion(g, b).opt_value, 1.0, 1e-9);
  ExpectConserves(g, b, sol.flow);
}

TEST(RouteTest, RandomSmallGraphsAgainstBruteForce) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 40; ++trial) {
    const Graph g = testing::RandomGraph(3 + trial % 10, 70 + trial);
    const auto r = make_degree_approximator(g);
    const double eps = trial % 2 ? 0.1 : 0.5;
    const auto b = random_demands(g.n(), rng);
    const auto sol = route(g, r, b, eps);
    const double opt = brute_opt_cut(g, b).ratio;
    ExpectConserves(g, b, sol.flow);
    EXPECT_LE(sol.primal, (1 + eps) * sol.dual * (1 + 1e-12));
    EXPECT_LE(sol.dual, opt * (1 + 1e-9));
    EXPECT_GE(sol.primal, opt * (1 - 1e-9));
    EXPECT_EQ(sol.rounds.size(), static_cast<std::size_t>(1 + default_outer_rounds(g.m())));
    EXPECT_TRUE(certify(g, b, sol).ok());
  }
}

TEST(RouteTest, HierarchyWithMeasuredAlpha) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const Graph g = testing::RandomGraph(12, 90 + trial);
    HierarchyApproximator r(build_hierarchy(g, 3, trial), 1.0);
    r.set_alpha(measure_alpha(r, g, 100, trial).alpha);
    const auto b = random_demands(g.n(), rng);
    const auto sol = route(g, r, b, 0.1);
    EXPECT_LE(sol.gap, 1.1);
    const double opt = brute_opt_cut(g, b).ratio;
    EXPECT_LE(sol.dual, opt * (1 + 1e-9));
    EXPECT_GE(sol.primal, opt * (1 - 1e-9));
  }
}

TEST(RouteTest, Deterministic) {
  const Graph g = testing::RandomGraph(30, 8);
  std::mt19937_64 rng(8);
  const auto b = random_demands(g.n(), rng);
  const auto r = make_degree_approximator(g);
  const auto a = route(g, r, b, 0.2);
  const auto c = route(g, r, b, 0.2);
  EXPECT_EQ(a.flow, c.flow);
  EXPECT_EQ(a.cut.side, c.cut.side);
}

TEST(RouteTest, RejectsZeroDemand) {
  const DegreeApproximator r(Path3(), 1.0);
  EXPECT_THROW(route(Path3(), r, std::vector<double>(3, 0.0), 0.1), std::invalid_argument);
}

TEST(StMaxFlowTest, SingleEdge) {
  const Graph g(2, {{0, 1, 5.0}});
  const DegreeApproximator r(g, 1.0);
  const auto res = st_max_flow(g, r, 0, 1, 0.1);
  EXPECT_LE(res.value, 5.0 * (1 + 1e-12));
  EXPECT_GE(res.value, 5.0 / 1.1);
  EXPECT_LE(max_congestion(g, res.flow), 1.0 + 1e-12);
}

TEST(StMaxFlowTest, TwoParallelPaths) {
  const Graph g(4, {{0, 1, 1.0}, {1, 3, 1.0}, {0, 2, 1.0}, {2, 3, 1.0}});
  const auto r = make_degree_approximator(g);
  const auto res = st_max_flow(g, r, 0, 3, 0.1);
  EXPECT_GE(res.value, 2.0 / 1.1);
  EXPECT_LE(res.value, 2.0 * (1 + 1e-12));
  EXPECT_THROW(st_max_flow(g, r, 1, 1, 0.1), std::invalid_argument);
}

TEST(StMaxFlowTest, BundledDimacsAgainstOracle) {
  const GraphFile file = load_graph(std::string(CFLOW_TEST_DATA) + "/two_paths.dimacs");
  const Graph& g = file.graph;
  const auto r = make_degree_approximator(g);
  const auto res = st_max_flow(g, r, *file.source, *file.sink, 0.1);
  const double exact = exact_max_flow(g, *file.source, *file.sink).value;
  EXPECT_GE(res.value, exact / 1.1);
  EXPECT_LE(res.value, exact * (1 + 1e-9));
  EXPECT_LE(max_congestion(g, res.flow), 1.0 + 1e-12);
  EXPECT_NEAR(res.cut.capacity, exact, 1e-9 * exact);
}

TEST(CertifyTest, OracleOptimumPasses) {
  std::mt19937_64 rng(9);
  const Graph g = testing::RandomGraph(10, 9);
  const auto b = random_demands(g.n(), rng);
  const auto oracle = exact_opt_congestion(g, b);
  const auto rep = certify(g, b, oracle.witness_flow, oracle.witness_cut.side, 0.0,
                           oracle.witness_cut.ratio, 1e-6);
  EXPECT_TRUE(rep.ok());
  EXPECT_NEAR(rep.gap, 1.0, 1e-8);
}

TEST(CertifyTest, CorruptedFlowFails) {
  std::mt19937_64 rng(10);
  const Graph g = testing::RandomGraph(10, 10);
  const auto b = random_demands(g.n(), rng);
  const auto sol = route(g, make_degree_approximator(g), b, 0.2);
  ASSERT_TRUE(certify(g, b, sol).ok());
  auto bad = sol.flow;
  bad[3] += 0.01;
  const auto rep = certify(g, b, bad, sol.cut.side, 0.0, 0.0, 0.2);
  EXPECT_FALSE(rep.ok());
  EXPECT_FALSE(rep.checks[0].passed);
  EXPECT_EQ(rep.checks[0].name, "conservation");
  auto wrong_primal = certify(g, b, sol.flow, sol.cut.side, sol.primal * 0.5, sol.dual, 0.2);
  EXPECT_FALSE(wrong_primal.ok());
  const auto no_cut = certify(g, b, sol.flow, std::vector<Vertex>{}, 0.0, 0.0, 0.2);
  EXPECT_FALSE(no_cut.ok());
}

}  // namespace
}  // namespace cflow
