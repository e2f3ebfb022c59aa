#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <vector>

#include "cflow/graph.hpp"
#include "cflow/graph_ops.hpp"
#include "cflow/tree.hpp"

// Exact baselines used as ground truth: max flow, opt(b) and brute-force cuts.
namespace cflow {

namespace detail {

// Dinic's algorithm over real capacities. Residual capacities below `eps`
// are treated as saturated.
class FlowNetwork {
 public:
  explicit FlowNetwork(int n) : adj_(n), level_(n), next_(n) {}

  // Adds arc u->v (capacity cap) paired with v->u (capacity rev_cap).
  // Returns the id of the u->v arc.
  int AddEdge(int u, int v, double cap, double rev_cap) {
    const int id = static_cast<int>(to_.size());
    to_.push_back(v);
    residual_.push_back(cap);
    original_.push_back(cap);
    to_.push_back(u);
    residual_.push_back(rev_cap);
    original_.push_back(rev_cap);
    adj_[u].push_back(id);
    adj_[v].push_back(id + 1);
    max_cap_ = std::max({max_cap_, cap, rev_cap});
    return id;
  }

  double MaxFlow(int s, int t) {
    eps_ = 1e-13 * max_cap_;
    double total = 0.0;
    while (Levels(s, t)) {
      std::fill(next_.begin(), next_.end(), 0);
      while (true) {
        const double pushed = Push(s, t, std::numeric_limits<double>::infinity());
        if (pushed <= 0.0) break;
        total += pushed;
      }
    }
    return total;
  }

  // Net flow along arc id in its own direction.
  double Flow(int id) const { return original_[id] - residual_[id]; }

  // Vertices reachable from s through arcs with residual capacity.
  std::vector<char> Reachable(int s) const {
    std::vector<char> seen(adj_.size(), 0);
    std::vector<int> stack = {s};
    seen[s] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int a : adj_[v]) {
        if (residual_[a] > eps_ && !seen[to_[a]]) {
          seen[to_[a]] = 1;
          stack.push_back(to_[a]);
        }
      }
    }
    return seen;
  }

 private:
  bool Levels(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> queue;
    level_[s] = 0;
    queue.push(s);
    while (!queue.empty()) {
      int v = queue.front();
      queue.pop();
      for (int a : adj_[v]) {
        if (residual_[a] > eps_ && level_[to_[a]] < 0) {
          level_[to_[a]] = level_[v] + 1;
          queue.push(to_[a]);
        }
      }
    }
    return level_[t] >= 0;
  }

  double Push(int v, int t, double limit) {
    if (v == t) return limit;
    for (int& i = next_[v]; i < static_cast<int>(adj_[v].size()); ++i) {
      const int a = adj_[v][i];
      const int w = to_[a];
      if (residual_[a] <= eps_ || level_[w] != level_[v] + 1) continue;
      const double got = Push(w, t, std::min(limit, residual_[a]));
      if (got > 0.0) {
        residual_[a] -= got;
        residual_[a ^ 1] += got;
        return got;
      }
    }
    return 0.0;
  }

  std::vector<std::vector<int>> adj_;
  std::vector<int> to_;
  std::vector<double> residual_;
  std::vector<double> original_;
  std::vector<int> level_;
  std::vector<int> next_;
  double max_cap_ = 0.0;
  double eps_ = 0.0;
};

}  // namespace detail

struct MaxFlowResult {
  double value = 0.0;
  Flow flow;                       // net flow per edge, tail -> head positive
  std::vector<Vertex> source_side; // minimum cut found by residual reachability
};

// Exact s-t max flow with each undirected edge usable up to c_e either way.
inline MaxFlowResult exact_max_flow(const Graph& g, Vertex s, Vertex t) {
  if (s < 0 || s >= g.n() || t < 0 || t >= g.n() || s == t) {
    throw std::invalid_argument("exact_max_flow: bad terminals");
  }
  detail::FlowNetwork net(g.n());
  std::vector<int> arc(g.m());
  for (EdgeId e = 0; e < g.m(); ++e) {
    arc[e] = net.AddEdge(g.edge(e).tail, g.edge(e).head, g.capacity(e), g.capacity(e));
  }
  MaxFlowResult result;
  result.value = net.MaxFlow(s, t);
  result.flow.resize(g.m());
  for (EdgeId e = 0; e < g.m(); ++e) result.flow[e] = net.Flow(arc[e]);
  auto seen = net.Reachable(s);
  for (Vertex v = 0; v < g.n(); ++v) {
    if (seen[v]) result.source_side.push_back(v);
  }
  return result;
}

enum class OracleMethod { kBinarySearch, kBruteCuts };

struct OracleResult {
  double opt_value = 0.0;
  Flow witness_flow;
  Cut witness_cut;
  OracleMethod method = OracleMethod::kBinarySearch;
};

namespace detail {

inline void CheckBalanced(std::span<const double> b, const char* who) {
  double sum = 0.0, norm = 0.0;
  for (double x : b) {
    sum += x;
    norm += std::abs(x);
  }
  if (std::abs(sum) > 1e-9 * norm) {
    throw std::invalid_argument(std::string(who) + ": demand vector is not balanced");
  }
}

}  // namespace detail

// Exhaustive max over proper S of |b_S| / c_S. n <= 20.
inline Cut brute_opt_cut(const Graph& g, std::span<const double> b) {
  const int n = g.n();
  if (n > 20) throw std::invalid_argument("brute_opt_cut: graph too large");
  if (n < 2) throw std::invalid_argument("brute_opt_cut: needs two vertices");
  detail::CheckSize(b.size(), n, "brute_opt_cut");
  std::uint32_t best_mask = 1;
  double best = -1.0;
  // The top vertex stays outside S; complements give the same ratio.
  const std::uint32_t limit = 1u << (n - 1);
  for (std::uint32_t mask = 1; mask < limit; ++mask) {
    double demand = 0.0;
    for (int v = 0; v < n - 1; ++v) {
      if (mask >> v & 1u) demand += b[v];
    }
    double cap = 0.0;
    for (const Edge& ed : g.edges()) {
      const bool a = ed.tail < n - 1 && (mask >> ed.tail & 1u);
      const bool c = ed.head < n - 1 && (mask >> ed.head & 1u);
      if (a != c) cap += ed.capacity;
    }
    const double ratio = std::abs(demand) / cap;
    if (ratio > best) {
      best = ratio;
      best_mask = mask;
    }
  }
  std::vector<Vertex> side;
  for (int v = 0; v < n - 1; ++v) {
    if (best_mask >> v & 1u) side.push_back(v);
  }
  return cut_quantities(g, b, side);
}

// opt(b) = min congestion routing b. Bisection on the congestion level,
// where level lambda is feasible iff a super-source/super-sink max flow with
// edge capacities lambda * c_e saturates the demand. Every infeasible probe
// yields a cut whose ratio exceeds lambda; the lower end jumps to it and the
// next probe sits just above it, so the search usually lands on the optimal
// cut after a few flows. Returns the best cut ratio found, within relative
// tol of the best feasible level.
inline OracleResult exact_opt_congestion(const Graph& g, std::span<const double> b,
                                         double tol = 1e-9) {
  detail::CheckSize(b.size(), g.n(), "exact_opt_congestion");
  detail::CheckBalanced(b, "exact_opt_congestion");
  OracleResult result;
  result.method = OracleMethod::kBinarySearch;
  const auto tree = maximal_spanning_tree(g);
  result.witness_flow = route_on_tree(g, tree, b);
  double hi = max_congestion(g, result.witness_flow);

  double positive = 0.0;
  Vertex best_single = 0;
  for (Vertex v = 0; v < g.n(); ++v) {
    if (b[v] > 0) positive += b[v];
    if (std::abs(b[v]) / g.degree(v) > std::abs(b[best_single]) / g.degree(best_single)) {
      best_single = v;
    }
  }
  if (g.n() < 2) {
    result.witness_cut = Cut{};
    return result;
  }
  const Vertex single[] = {best_single};
  result.witness_cut = cut_quantities(g, b, single);
  double lo = result.witness_cut.ratio;
  if (positive == 0.0) {
    result.opt_value = 0.0;
    return result;
  }

  const int source = g.n(), sink = g.n() + 1;
  double last_probe_base = -1.0;
  for (int iter = 0; iter < 200 && hi > lo * (1.0 + tol); ++iter) {
    double level;
    if (lo != last_probe_base) {
      last_probe_base = lo;
      level = std::min(lo * (1.0 + tol / 2.0), 0.5 * (lo + hi));
    } else {
      level = 0.5 * (lo + hi);
    }
    detail::FlowNetwork net(g.n() + 2);
    std::vector<int> arc(g.m());
    for (EdgeId e = 0; e < g.m(); ++e) {
      const double c = level * g.capacity(e);
      arc[e] = net.AddEdge(g.edge(e).tail, g.edge(e).head, c, c);
    }
    for (Vertex v = 0; v < g.n(); ++v) {
      if (b[v] < 0) net.AddEdge(source, v, -b[v], 0.0);
      if (b[v] > 0) net.AddEdge(v, sink, b[v], 0.0);
    }
    const double value = net.MaxFlow(source, sink);
    if (value >= positive * (1.0 - 1e-11)) {
      hi = level;
      Flow f(g.m());
      for (EdgeId e = 0; e < g.m(); ++e) f[e] = net.Flow(arc[e]);
      // Close the tiny shortfall left by the floating-point flow exactly.
      auto fix = route_on_tree(g, tree, residual_demands(g, b, f));
      for (EdgeId e = 0; e < g.m(); ++e) f[e] += fix[e];
      result.witness_flow = std::move(f);
      continue;
    }
    const auto seen = net.Reachable(source);
    std::vector<Vertex> side;
    for (Vertex v = 0; v < g.n(); ++v) {
      if (seen[v]) side.push_back(v);
    }
    if (side.empty() || static_cast<int>(side.size()) == g.n()) {
      lo = std::max(lo, level);
      continue;
    }
    Cut cut = cut_quantities(g, b, side);
    if (cut.ratio > lo) {
      lo = cut.ratio;
      result.witness_cut = std::move(cut);
    } else {
      // Rounding hid the violated cut; the level itself is still below opt.
      lo = std::max(lo, level);
    }
  }
  result.opt_value = lo;
  return result;
}

}  // namespace cflow
