#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cflow/graph.hpp"
#include "cflow/graph_ops.hpp"

// Deterministic instance generators. The same arguments and seed always give
// the same graph (for a given standard library).
namespace cflow {

enum class CapacityModel { kUnit, kUniform, kExponential };

namespace detail {

// kUniform: U(1, 10). kExponential: exp(U(0, ln 1000)), spanning three decades.
inline double DrawCapacity(CapacityModel model, std::mt19937_64& rng) {
  switch (model) {
    case CapacityModel::kUnit:
      return 1.0;
    case CapacityModel::kUniform:
      return std::uniform_real_distribution<double>(1.0, 10.0)(rng);
    case CapacityModel::kExponential:
      return std::exp(std::uniform_real_distribution<double>(0.0, std::log(1000.0))(rng));
  }
  return 1.0;
}

inline void RequireVertices(int n, int min, const char* what) {
  if (n < min) {
    throw InputError(std::string(what) + " needs at least " + std::to_string(min) + " vertices");
  }
}

inline bool Connected(int n, const std::vector<Edge>& edges) {
  DisjointSets sets(n);
  int components = n;
  for (const Edge& e : edges) components -= sets.Unite(e.tail, e.head);
  return components == 1;
}

}  // namespace detail

inline Graph path_graph(int n, CapacityModel caps = CapacityModel::kUnit, std::uint64_t seed = 0) {
  detail::RequireVertices(n, 2, "path");
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, detail::DrawCapacity(caps, rng)});
  return Graph(n, std::move(edges));
}

inline Graph cycle_graph(int n, CapacityModel caps = CapacityModel::kUnit, std::uint64_t seed = 0) {
  detail::RequireVertices(n, 3, "cycle");
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back({i, (i + 1) % n, detail::DrawCapacity(caps, rng)});
  return Graph(n, std::move(edges));
}

// k x k grid, vertex (r, c) = r * k + c; n = k^2, m = 2k(k - 1).
inline Graph grid_graph(int k, CapacityModel caps = CapacityModel::kUnit, std::uint64_t seed = 0) {
  if (k < 2) throw InputError("grid side must be at least 2");
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      const int v = r * k + c;
      if (c + 1 < k) edges.push_back({v, v + 1, detail::DrawCapacity(caps, rng)});
      if (r + 1 < k) edges.push_back({v, v + k, detail::DrawCapacity(caps, rng)});
    }
  }
  return Graph(k * k, std::move(edges));
}

// G(n, p), redrawn until connected.
inline Graph gnp_graph(int n, double p, CapacityModel caps = CapacityModel::kUniform,
                       std::uint64_t seed = 0) {
  detail::RequireVertices(n, 2, "gnp");
  if (!(p > 0.0 && p <= 1.0)) throw InputError("gnp edge probability must lie in (0, 1]");
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<Edge> edges;
    for (int u = 0; u < n; ++u) {
      for (int v = u + 1; v < n; ++v) {
        if (coin(rng)) edges.push_back({u, v, detail::DrawCapacity(caps, rng)});
      }
    }
    if (detail::Connected(n, edges)) return Graph(n, std::move(edges));
  }
  throw InputError("gnp: no connected sample after 1000 attempts; raise p");
}

// Two k-cliques joined by one edge between vertex k-1 and vertex k.
inline Graph barbell_graph(int k, double bridge = 1.0, CapacityModel caps = CapacityModel::kUnit,
                           std::uint64_t seed = 0) {
  if (k < 2) throw InputError("barbell cliques need at least 2 vertices");
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  for (int side = 0; side < 2; ++side) {
    const int base = side * k;
    for (int u = 0; u < k; ++u) {
      for (int v = u + 1; v < k; ++v) {
        edges.push_back({base + u, base + v, detail::DrawCapacity(caps, rng)});
      }
    }
  }
  edges.push_back({k - 1, k, bridge});
  return Graph(2 * k, std::move(edges));
}

// Uniform random labelled tree via random attachment.
inline Graph random_tree(int n, CapacityModel caps = CapacityModel::kUniform,
                         std::uint64_t seed = 0) {
  detail::RequireVertices(n, 2, "tree");
  std::mt19937_64 rng(seed);
  std::vector<Edge> edges;
  for (int v = 1; v < n; ++v) {
    const int u = std::uniform_int_distribution<int>(0, v - 1)(rng);
    edges.push_back({u, v, detail::DrawCapacity(caps, rng)});
  }
  return Graph(n, std::move(edges));
}

// Balanced demands: Gaussian entries shifted to sum zero.
inline Demands random_demands(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Demands b(n);
  double mean = 0.0;
  for (double& x : b) {
    x = normal(rng);
    mean += x;
  }
  mean /= n;
  for (double& x : b) x -= mean;
  return b;
}

// k random sources paired with k random sinks, unit amounts (k <= n/2).
inline Demands random_sparse_demands(int n, int k, std::mt19937_64& rng) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  Demands b(n, 0.0);
  k = std::max(1, std::min(k, n / 2));
  for (int i = 0; i < k; ++i) {
    b[perm[2 * i]] -= 1.0;
    b[perm[2 * i + 1]] += 1.0;
  }
  return b;
}

}  // namespace cflow
