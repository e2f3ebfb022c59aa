#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "cflow/graph.hpp"

namespace cflow {

namespace detail {

inline void CheckSize(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw std::invalid_argument(std::string(what) + ": expected length " +
                                std::to_string(want) + ", got " +
                                std::to_string(got));
  }
}

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int Find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool Unite(int a, int b) {
    a = Find(a);
    b = Find(b);
    if (a == b) return false;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
    return true;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> rank_;
};

}  // namespace detail

// out = B f: net inflow at each vertex.
inline void divergence_into(const Graph& g, std::span<const double> f,
                            std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const auto edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    out[edges[e].head] += f[e];
    out[edges[e].tail] -= f[e];
  }
}

inline Demands divergence(const Graph& g, std::span<const double> f) {
  detail::CheckSize(f.size(), g.m(), "divergence");
  Demands out(g.n());
  divergence_into(g, f, out);
  return out;
}

// out = B^T v: potential difference head minus tail on each edge.
inline void adjoint_divergence_into(const Graph& g, std::span<const double> v,
                                    std::span<double> out) {
  const auto edges = g.edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    out[e] = v[edges[e].head] - v[edges[e].tail];
  }
}

inline EdgeVector adjoint_divergence(const Graph& g, std::span<const double> v) {
  detail::CheckSize(v.size(), g.n(), "adjoint_divergence");
  EdgeVector out(g.m());
  adjoint_divergence_into(g, v, out);
  return out;
}

// b - B f, re-centered to sum to zero. B f sums to zero only up to rounding,
// which would otherwise leave a tiny residual visibly unbalanced.
inline Demands residual_demands(const Graph& g, std::span<const double> b,
                                std::span<const double> f) {
  detail::CheckSize(b.size(), g.n(), "residual demands");
  Demands r = divergence(g, f);
  double mean = 0.0;
  for (Vertex v = 0; v < g.n(); ++v) {
    r[v] = b[v] - r[v];
    mean += r[v];
  }
  mean /= g.n();
  for (double& x : r) x -= mean;
  return r;
}

// max_e |f_e| / c_e.
inline double max_congestion(const Graph& g, std::span<const double> f) {
  detail::CheckSize(f.size(), g.m(), "max_congestion");
  double worst = 0.0;
  for (EdgeId e = 0; e < g.m(); ++e) {
    worst = std::max(worst, std::abs(f[e]) / g.capacity(e));
  }
  return worst;
}

// A vertex subset S with its demand b_S and cut capacity c_S.
// ratio is |b_S| / c_S (the cut bound is symmetric under complement).
struct Cut {
  std::vector<Vertex> side;
  double demand = 0.0;
  double capacity = 0.0;
  double ratio = 0.0;
};

// Membership flags for a vertex list; throws on empty/full/out-of-range sets.
inline std::vector<char> SideMask(int n, std::span<const Vertex> side) {
  std::vector<char> in(n, 0);
  int count = 0;
  for (Vertex v : side) {
    if (v < 0 || v >= n) throw std::invalid_argument("cut vertex out of range");
    if (!in[v]) ++count;
    in[v] = 1;
  }
  if (count == 0 || count == n) {
    throw std::invalid_argument("cut side must be a nonempty proper subset");
  }
  return in;
}

inline double cut_capacity(const Graph& g, std::span<const char> in) {
  double c = 0.0;
  for (const Edge& ed : g.edges()) {
    if (in[ed.tail] != in[ed.head]) c += ed.capacity;
  }
  return c;
}

inline Cut cut_quantities(const Graph& g, std::span<const double> b,
                          std::span<const Vertex> side) {
  detail::CheckSize(b.size(), g.n(), "cut_quantities");
  auto in = SideMask(g.n(), side);
  Cut cut;
  for (Vertex v = 0; v < g.n(); ++v) {
    if (in[v]) {
      cut.side.push_back(v);
      cut.demand += b[v];
    }
  }
  cut.capacity = cut_capacity(g, in);
  cut.ratio = std::abs(cut.demand) / cut.capacity;
  return cut;
}

// Maximum-weight spanning tree by Kruskal; ties broken by lower edge id.
// weights defaults to the capacities.
inline std::vector<EdgeId> maximum_spanning_tree(const Graph& g,
                                                 std::span<const double> weights) {
  detail::CheckSize(weights.size(), g.m(), "maximum_spanning_tree");
  std::vector<EdgeId> order(g.m());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](EdgeId a, EdgeId b) { return weights[a] > weights[b]; });
  detail::DisjointSets sets(g.n());
  std::vector<EdgeId> tree;
  tree.reserve(g.n() - 1);
  for (EdgeId e : order) {
    if (sets.Unite(g.edge(e).tail, g.edge(e).head)) tree.push_back(e);
  }
  if (static_cast<int>(tree.size()) != g.n() - 1) {
    throw InputError("graph is disconnected");
  }
  std::sort(tree.begin(), tree.end());
  return tree;
}

inline std::vector<EdgeId> maximal_spanning_tree(const Graph& g) {
  std::vector<double> caps(g.m());
  for (EdgeId e = 0; e < g.m(); ++e) caps[e] = g.capacity(e);
  return maximum_spanning_tree(g, caps);
}

}  // namespace cflow
