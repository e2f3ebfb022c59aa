#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

namespace cflow {
namespace {

Graph Path3() { return Graph(3, {{0, 1, 1.0}, {1, 2, 2.0}}); }

TEST(RootedForestTest, RejectsCycles) {
  const Link triangle[] = {{0, 1}, {1, 2}, {2, 0}};
  EXPECT_THROW(RootedForest(3, triangle), std::invalid_argument);
  const Link loop[] = {{1, 1}};
  EXPECT_THROW(RootedForest(2, loop), std::invalid_argument);
  const Link parallel[] = {{0, 1}, {1, 0}};
  EXPECT_THROW(RootedForest(2, parallel), std::invalid_argument);
}

TEST(RootedForestTest, RootsAndOrder) {
  const Link links[] = {{0, 1}, {2, 3}, {3, 4}};
  const Vertex roots[] = {4};
  const RootedForest f(5, links, roots);
  ASSERT_EQ(f.roots().size(), 2u);
  EXPECT_EQ(f.roots()[0], 4);
  EXPECT_EQ(f.roots()[1], 0);
  EXPECT_EQ(f.parent(2), 3);
  EXPECT_FALSE(f.link_points_down(3));  // link 3 -> 4 points up from 3
  EXPECT_EQ(f.subtree(3), (std::vector<Vertex>{2, 3}));
  std::vector<int> seen(5, -1);
  for (std::size_t i = 0; i < f.order().size(); ++i) seen[f.order()[i]] = static_cast<int>(i);
  for (Vertex v = 0; v < 5; ++v) {
    if (!f.is_root(v)) {
      EXPECT_LT(seen[f.parent(v)], seen[v]);
    }
  }
}

TEST(LcaIndexTest, MatchesNaiveWalk) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = random_tree(60, CapacityModel::kUnit, trial);
    std::vector<EdgeId> all(g.m());
    for (EdgeId e = 0; e < g.m(); ++e) all[e] = e;
    const RootedForest f = forest_of(g, all);
    const LcaIndex lca(f);
    for (int q = 0; q < 200; ++q) {
      Vertex a = static_cast<Vertex>(rng() % g.n()), c = static_cast<Vertex>(rng() % g.n());
      Vertex x = a, y = c;
      while (x != y) {
        if (f.depth(x) >= f.depth(y)) {
          x = f.parent(x);
        } else {
          y = f.parent(y);
        }
      }
      EXPECT_EQ(lca(a, c), x);
    }
  }
  const Link links[] = {{0, 1}};
  const RootedForest two(3, links);
  EXPECT_EQ(LcaIndex(two)(1, 2), -1);
}

TEST(TreeFlowTest, Path) {
  const auto f = route_on_tree(Path3(), std::vector<EdgeId>{0, 1}, std::vector<double>{-1, 0, 1});
  EXPECT_EQ(f, (std::vector<double>{1.0, 1.0}));
}

TEST(TreeFlowTest, Star) {
  // Center 0 sends one unit to each of leaves 1 and 2; leaf 3 idle.
  Graph g(4, {{0, 1, 1.0}, {2, 0, 1.0}, {0, 3, 1.0}});
  const auto f = route_on_tree(g, std::vector<EdgeId>{0, 1, 2}, std::vector<double>{-2, 1, 1, 0});
  EXPECT_EQ(f, (std::vector<double>{1.0, -1.0, 0.0}));
}

TEST(TreeFlowTest, RoundTrip) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const Graph g = random_tree(2 + trial * 3, CapacityModel::kUniform, trial);
    std::vector<EdgeId> all(g.m());
    for (EdgeId e = 0; e < g.m(); ++e) all[e] = e;
    const auto b = random_demands(g.n(), rng);
    const auto div = divergence(g, route_on_tree(g, all, b));
    for (Vertex v = 0; v < g.n(); ++v) EXPECT_NEAR(div[v], b[v], 1e-12);
  }
}

TEST(TreeFlowTest, UnbalancedComponentThrows) {
  const Link links[] = {{0, 1}, {2, 3}};
  const RootedForest f(4, links);
  EXPECT_THROW(tree_flow(f, std::vector<double>{-1, 0, 1, 0}), std::invalid_argument);
  const auto ok = tree_flow(f, std::vector<double>{-1, 1, 2, -2});
  EXPECT_EQ(ok, (std::vector<double>{1.0, -2.0}));
}

TEST(TreePotentialTest, Path) {
  const Link links[] = {{0, 1}, {1, 2}};
  const RootedForest f(3, links);
  EXPECT_EQ(tree_potential(f, std::vector<double>{1, 1}), (std::vector<double>{0, 1, 2}));
  EXPECT_EQ(tree_potential(f, std::vector<double>{0, 0}), (std::vector<double>{0, 0, 0}));
}

// Sum of oriented prices along the tree path from j to i equals v_i - v_j.
TEST(TreePotentialTest, PathSumIdentity) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = random_tree(40, CapacityModel::kUnit, 10 + trial);
    std::vector<Link> links;
    for (const Edge& e : g.edges()) links.push_back({e.tail, e.head});
    const RootedForest f(g.n(), links);
    const auto q = testing::Gaussian(links.size(), rng);
    const auto v = tree_potential(f, q);
    for (int pair = 0; pair < 100; ++pair) {
      Vertex i = static_cast<Vertex>(rng() % g.n()), j = static_cast<Vertex>(rng() % g.n());
      // Walk both ends up to their meeting point, adding the price of each
      // link in the direction of travel j -> i.
      double sum = 0.0;
      Vertex a = i, c = j;
      while (a != c) {
        if (f.depth(a) >= f.depth(c)) {
          const Link& l = links[f.parent_link(a)];
          sum += l.head == a ? q[f.parent_link(a)] : -q[f.parent_link(a)];
          a = f.parent(a);
        } else {
          const Link& l = links[f.parent_link(c)];
          sum += l.tail == c ? q[f.parent_link(c)] : -q[f.parent_link(c)];
          c = f.parent(c);
        }
      }
      EXPECT_NEAR(sum, v[i] - v[j], 1e-12 * std::max(1.0, std::abs(sum)));
    }
  }
}

TEST(TreeApproximatorTest, PathGraph) {
  const TreeApproximator r(Path3());
  ASSERT_EQ(r.rows(), 2);
  EXPECT_EQ(r.row_cut_capacity(0), 1.0);
  EXPECT_EQ(r.row_cut_capacity(1), 2.0);
  const auto rb = r.apply(std::vector<double>{-1, 0, 1});
  EXPECT_DOUBLE_EQ(std::abs(rb[0]), 1.0);
  EXPECT_DOUBLE_EQ(std::abs(rb[1]), 0.5);
  EXPECT_EQ(r.alpha_claimed(), 2.0);
  for (double x : r.apply(std::vector<double>(3, 0.0))) EXPECT_EQ(x, 0.0);
}

TEST(TreeApproximatorTest, TriangleCutCapacities) {
  Graph g(3, {{0, 1, 3.0}, {1, 2, 2.0}, {0, 2, 1.0}});
  const TreeApproximator r(g);
  EXPECT_EQ(std::vector<EdgeId>(r.tree_edges().begin(), r.tree_edges().end()),
            (std::vector<EdgeId>{0, 1}));
  for (int row = 0; row < r.rows(); ++row) {
    // The cap-3 edge separates {1, 2} from {0}: 3 + 1 = 4.
    if (r.row_vertex(row) == 1) {
      EXPECT_DOUBLE_EQ(r.row_cut_capacity(row), 4.0);
    } else if (r.row_vertex(row) == 2) {
      EXPECT_DOUBLE_EQ(r.row_cut_capacity(row), 3.0);
    }
  }
}

TEST(TreeApproximatorTest, CutCapacitiesMatchNaive) {
  for (int trial = 0; trial < 30; ++trial) {
    const Graph g = testing::RandomGraph(5 + trial, 20 + trial, CapacityModel::kExponential);
    const TreeApproximator r(g, static_cast<Vertex>(trial % g.n()));
    for (int row = 0; row < r.rows(); ++row) {
      const auto side = r.row_side(row);
      EXPECT_NEAR(r.row_cut_capacity(row), testing::NaiveCutCapacity(g, side),
                  1e-9 * g.total_capacity());
    }
  }
}

TEST(TreeApproximatorTest, RowsAreCutCongestions) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = testing::RandomGraph(12, 40 + trial);
    const TreeApproximator r(g);
    const auto b = random_demands(g.n(), rng);
    const auto rb = r.apply(b);
    for (int row = 0; row < r.rows(); ++row) {
      const auto side = r.row_side(row);
      const double expect =
          testing::NaiveSideDemand(b, side) / testing::NaiveCutCapacity(g, side);
      EXPECT_NEAR(rb[row], expect, 1e-12 * std::max(1.0, std::abs(expect)));
    }
  }
}

TEST(TreeApproximatorTest, OnTreeGraphAlphaIsOne) {
  for (int trial = 0; trial < 5; ++trial) {
    const Graph g = random_tree(10, CapacityModel::kUniform, trial);
    const TreeApproximator r(g);
    EXPECT_DOUBLE_EQ(r.alpha_bound(), 1.0);
    const auto est = measure_alpha(r, g, 40, trial);
    EXPECT_NEAR(est.alpha, 1.0, 1e-9);
    EXPECT_LE(est.lower_violation, 1e-9);
  }
}

TEST(TreeApproximatorTest, MeasuredAlphaWithinBounds) {
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = testing::RandomGraph(10, 60 + trial);
    const TreeApproximator r(g);
    const auto est = measure_alpha(r, g, 60, trial);
    EXPECT_LE(est.alpha, r.alpha_bound() * (1 + 1e-9));
    EXPECT_LE(r.alpha_bound(), g.m());
    EXPECT_LE(est.alpha, g.m());
  }
}

TEST(TreeApproximatorTest, RejectsNonSpanningTree) {
  Graph g(3, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
  EXPECT_THROW(TreeApproximator(g, std::vector<EdgeId>{0}, 0), std::invalid_argument);
}

}  // namespace
}  // namespace cflow
