#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "cflow/approximator.hpp"
#include "cflow/graph.hpp"
#include "cflow/graph_ops.hpp"

namespace cflow {

// An oriented link between two vertices of a forest.
struct Link {
  Vertex tail;
  Vertex head;
};

// A forest over vertices 0..n-1, rooted per component. Supports the two
// leaf-elimination passes everything else is built from: subtree sums
// (bottom-up) and prefix accumulation along root paths (top-down).
class RootedForest {
 public:
  RootedForest() = default;

  // Each component is rooted at the first listed root it contains, else at
  // its smallest vertex. Throws if the links contain a cycle.
  RootedForest(int n, std::span<const Link> links,
               std::span<const Vertex> roots = {})
      : parent_(n, -1), parent_link_(n, -1), down_(n, 0), depth_(n, 0),
        component_(n, -1) {
    std::vector<std::vector<int>> adj(n);
    for (std::size_t i = 0; i < links.size(); ++i) {
      const Link& l = links[i];
      if (l.tail < 0 || l.tail >= n || l.head < 0 || l.head >= n || l.tail == l.head) {
        throw std::invalid_argument("invalid forest link " + std::to_string(i));
      }
      adj[l.tail].push_back(static_cast<int>(i));
      adj[l.head].push_back(static_cast<int>(i));
    }
    order_.reserve(n);
    auto grow = [&](Vertex r) {
      const int comp = static_cast<int>(roots_.size());
      roots_.push_back(r);
      component_[r] = comp;
      std::size_t head = order_.size();
      order_.push_back(r);
      while (head < order_.size()) {
        Vertex v = order_[head++];
        for (int li : adj[v]) {
          if (li == parent_link_[v]) continue;
          const Link& l = links[li];
          Vertex w = l.tail == v ? l.head : l.tail;
          if (component_[w] != -1) throw std::invalid_argument("forest links contain a cycle");
          component_[w] = comp;
          parent_[w] = v;
          parent_link_[w] = li;
          down_[w] = l.tail == v;
          depth_[w] = depth_[v] + 1;
          order_.push_back(w);
        }
      }
    };
    for (Vertex r : roots) {
      if (r < 0 || r >= n) throw std::invalid_argument("forest root out of range");
      if (component_[r] == -1) grow(r);
    }
    for (Vertex v = 0; v < n; ++v) {
      if (component_[v] == -1) grow(v);
    }
    if (links.size() + roots_.size() != static_cast<std::size_t>(n)) {
      throw std::invalid_argument("forest links contain a cycle");
    }
  }

  int n() const noexcept { return static_cast<int>(parent_.size()); }
  Vertex parent(Vertex v) const { return parent_[v]; }
  // Index of the link joining v to its parent, -1 at roots.
  int parent_link(Vertex v) const { return parent_link_[v]; }
  // True when v's parent link is oriented parent -> v.
  bool link_points_down(Vertex v) const { return down_[v] != 0; }
  int depth(Vertex v) const { return depth_[v]; }
  int component(Vertex v) const { return component_[v]; }
  bool is_root(Vertex v) const { return parent_[v] == -1; }
  // Vertices with every parent before its children; components in root order.
  std::span<const Vertex> order() const noexcept { return order_; }
  std::span<const Vertex> roots() const noexcept { return roots_; }

  // out[v] = sum of values over the subtree of v.
  void subtree_sums_into(std::span<const double> values, std::span<double> out) const {
    std::copy(values.begin(), values.end(), out.begin());
    for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
      if (parent_[*it] != -1) out[parent_[*it]] += out[*it];
    }
  }
  std::vector<double> subtree_sums(std::span<const double> values) const {
    std::vector<double> out(n());
    subtree_sums_into(values, out);
    return out;
  }

  // out[v] = out[parent(v)] + increments[v]; roots keep their incoming out value.
  void accumulate_down(std::span<const double> increments, std::span<double> out) const {
    for (Vertex v : order_) {
      if (parent_[v] != -1) out[v] = out[parent_[v]] + increments[v];
    }
  }

  // Vertex set of the subtree rooted at v.
  std::vector<Vertex> subtree(Vertex v) const {
    std::vector<char> in(n(), 0);
    in[v] = 1;
    std::vector<Vertex> out = {v};
    for (Vertex w : order_) {
      if (parent_[w] != -1 && in[parent_[w]] && !in[w]) {
        in[w] = 1;
        out.push_back(w);
      }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  std::vector<Vertex> parent_;
  std::vector<int> parent_link_;
  std::vector<char> down_;
  std::vector<int> depth_;
  std::vector<int> component_;
  std::vector<Vertex> order_;
  std::vector<Vertex> roots_;
};

// Binary-lifting lowest-common-ancestor queries over a RootedForest.
class LcaIndex {
 public:
  explicit LcaIndex(const RootedForest& forest) : forest_(forest) {
    const int n = forest.n();
    int levels = 1;
    while ((1 << levels) < n) ++levels;
    up_.assign(levels, std::vector<Vertex>(n));
    for (Vertex v = 0; v < n; ++v) up_[0][v] = forest.is_root(v) ? v : forest.parent(v);
    for (int k = 1; k < levels; ++k) {
      for (Vertex v = 0; v < n; ++v) up_[k][v] = up_[k - 1][up_[k - 1][v]];
    }
  }

  // -1 when u and w lie in different components.
  Vertex operator()(Vertex u, Vertex w) const {
    if (forest_.component(u) != forest_.component(w)) return -1;
    if (forest_.depth(u) < forest_.depth(w)) std::swap(u, w);
    int diff = forest_.depth(u) - forest_.depth(w);
    for (std::size_t k = 0; diff; ++k, diff >>= 1) {
      if (diff & 1) u = up_[k][u];
    }
    if (u == w) return u;
    for (std::size_t k = up_.size(); k-- > 0;) {
      if (up_[k][u] != up_[k][w]) {
        u = up_[k][u];
        w = up_[k][w];
      }
    }
    return forest_.parent(u);
  }

 private:
  const RootedForest& forest_;
  std::vector<std::vector<Vertex>> up_;
};

// Flow on each link (in link orientation) of the unique forest routing of b.
// Each component of the forest must be balanced.
inline std::vector<double> tree_flow(const RootedForest& forest,
                                     std::span<const double> b) {
  detail::CheckSize(b.size(), forest.n(), "tree_flow");
  auto sums = forest.subtree_sums(b);
  double scale = 0.0;
  for (double x : b) scale += std::abs(x);
  for (Vertex r : forest.roots()) {
    if (std::abs(sums[r]) > 1e-9 * scale + 1e-300) {
      throw std::invalid_argument("demand is unbalanced on a forest component");
    }
  }
  std::vector<double> flow(forest.n() - forest.roots().size());
  for (Vertex v : forest.order()) {
    if (forest.is_root(v)) continue;
    // sums[v] must enter the subtree of v through its parent link.
    flow[forest.parent_link(v)] = forest.link_points_down(v) ? sums[v] : -sums[v];
  }
  return flow;
}

// Potentials, zero at each root, such that v[head] - v[tail] = prices[link].
inline Potentials tree_potential(const RootedForest& forest,
                                 std::span<const double> prices) {
  detail::CheckSize(prices.size(), forest.n() - forest.roots().size(), "tree_potential");
  std::vector<double> inc(forest.n(), 0.0);
  for (Vertex v = 0; v < forest.n(); ++v) {
    if (forest.is_root(v)) continue;
    double q = prices[forest.parent_link(v)];
    inc[v] = forest.link_points_down(v) ? q : -q;
  }
  Potentials out(forest.n(), 0.0);
  forest.accumulate_down(inc, out);
  return out;
}

inline RootedForest forest_of(const Graph& g, std::span<const EdgeId> tree_edges,
                              std::span<const Vertex> roots = {}) {
  std::vector<Link> links;
  links.reserve(tree_edges.size());
  for (EdgeId e : tree_edges) links.push_back({g.edge(e).tail, g.edge(e).head});
  return RootedForest(g.n(), links, roots);
}

// Routes b along a spanning tree of g given by edge ids; returns a length-m flow.
inline Flow route_on_tree(const Graph& g, std::span<const EdgeId> tree_edges,
                          std::span<const double> b) {
  auto forest = forest_of(g, tree_edges);
  auto on_links = tree_flow(forest, b);
  Flow f(g.m(), 0.0);
  for (std::size_t i = 0; i < tree_edges.size(); ++i) f[tree_edges[i]] = on_links[i];
  return f;
}

// Capacity in g of the cut (subtree(v), rest) for every non-root v of a forest
// over g's vertices. Roots get 0.
inline std::vector<double> subtree_cut_capacities(const RootedForest& forest,
                                                  const Graph& g) {
  std::vector<double> volume(g.n());
  std::vector<double> internal(g.n(), 0.0);
  for (Vertex v = 0; v < g.n(); ++v) volume[v] = g.degree(v);
  LcaIndex lca(forest);
  for (const Edge& ed : g.edges()) {
    Vertex a = lca(ed.tail, ed.head);
    if (a != -1) internal[a] += ed.capacity;
  }
  auto vol = forest.subtree_sums(volume);
  auto inside = forest.subtree_sums(internal);
  std::vector<double> cut(g.n(), 0.0);
  for (Vertex v = 0; v < g.n(); ++v) {
    if (!forest.is_root(v)) cut[v] = vol[v] - 2.0 * inside[v];
  }
  return cut;
}

// Single spanning tree approximator: one row per tree edge e with value
// b_S / c_S, where S is the side of T - e away from the root and c_S is the
// capacity of that cut in G.
class TreeApproximator : public CongestionApproximator {
 public:
  explicit TreeApproximator(const Graph& g, Vertex root = 0)
      : TreeApproximator(g, maximal_spanning_tree(g), root) {}

  TreeApproximator(const Graph& g, std::vector<EdgeId> tree_edges, Vertex root)
      : m_(g.m()), tree_edges_(std::move(tree_edges)) {
    if (static_cast<int>(tree_edges_.size()) != g.n() - 1) {
      throw std::invalid_argument("tree must have n - 1 edges");
    }
    const Vertex roots[] = {root};
    forest_ = forest_of(g, tree_edges_, roots);
    if (forest_.roots().size() != 1) throw std::invalid_argument("tree is not spanning");
    auto cuts = subtree_cut_capacities(forest_, g);
    inv_cut_.assign(g.n(), 0.0);
    cut_.assign(g.n(), 0.0);
    for (Vertex v : forest_.order().subspan(1)) {
      row_vertex_.push_back(v);
      cut_[v] = cuts[v];
      inv_cut_[v] = 1.0 / cuts[v];
      const double cap = g.capacity(tree_edges_[forest_.parent_link(v)]);
      alpha_bound_ = std::max(alpha_bound_, cuts[v] / cap);
    }
  }

  int vertices() const override { return forest_.n(); }
  int rows() const override { return static_cast<int>(row_vertex_.size()); }
  double alpha_claimed() const override { return std::max(1.0, static_cast<double>(m_)); }
  std::string name() const override { return "tree"; }

  // max_e c_S / c_e: routing in a maximum-weight tree congests edge e by at
  // most this factor times its row value, so opt(b) <= alpha_bound ||Rb||.
  double alpha_bound() const noexcept { return alpha_bound_; }

  void apply_into(std::span<const double> b, std::span<double> out) const override {
    std::vector<double> sums(forest_.n());
    forest_.subtree_sums_into(b, sums);
    for (std::size_t k = 0; k < row_vertex_.size(); ++k) {
      out[k] = sums[row_vertex_[k]] * inv_cut_[row_vertex_[k]];
    }
  }

  void apply_adjoint_into(std::span<const double> p, std::span<double> out) const override {
    std::vector<double> prices(forest_.n(), 0.0);
    for (std::size_t k = 0; k < row_vertex_.size(); ++k) {
      prices[row_vertex_[k]] = p[k] * inv_cut_[row_vertex_[k]];
    }
    std::fill(out.begin(), out.end(), 0.0);
    forest_.accumulate_down(prices, out);
  }

  const RootedForest& forest() const noexcept { return forest_; }
  std::span<const EdgeId> tree_edges() const noexcept { return tree_edges_; }
  Vertex row_vertex(int row) const { return row_vertex_[row]; }
  double row_cut_capacity(int row) const { return cut_[row_vertex_[row]]; }
  std::vector<Vertex> row_side(int row) const { return forest_.subtree(row_vertex_[row]); }

 private:
  int m_ = 0;
  std::vector<EdgeId> tree_edges_;
  RootedForest forest_;
  std::vector<Vertex> row_vertex_;
  std::vector<double> cut_;
  std::vector<double> inv_cut_;
  double alpha_bound_ = 1.0;
};

}  // namespace cflow
