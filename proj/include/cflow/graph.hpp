#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or semantically invalid input (bad file, disconnected graph, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

using Vertex = int;
using EdgeId = int;

// Per-vertex and per-edge real vectors. Demands are net excess desired at
// each vertex (sinks positive); flows are signed, positive along tail->head.
using Demands = std::vector<double>;
using Flow = std::vector<double>;
using Potentials = std::vector<double>;
using EdgeVector = std::vector<double>;

struct Edge {
  Vertex tail;
  Vertex head;
  double capacity;
};

// Undirected capacitated graph with a fixed orientation per edge.
// Construction validates: endpoints in range, no self-loops, finite positive
// capacities, connectivity. Parallel edges are kept.
class Graph {
 public:
  Graph() = default;

  Graph(int n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n_ < 1) throw InputError("graph must have at least one vertex");
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const Edge& ed = edges_[e];
      if (ed.tail < 0 || ed.tail >= n_ || ed.head < 0 || ed.head >= n_) {
        throw InputError("edge " + std::to_string(e) + " has an endpoint out of range");
      }
      if (ed.tail == ed.head) {
        throw InputError("self-loop at vertex " + std::to_string(ed.tail + 1));
      }
      if (!(ed.capacity > 0.0) || !std::isfinite(ed.capacity)) {
        throw InputError("edge " + std::to_string(e) + " has nonpositive capacity");
      }
    }
    BuildAdjacency();
    if (!IsConnected()) throw InputError("graph is disconnected");
  }

  int n() const noexcept { return n_; }
  int m() const noexcept { return static_cast<int>(edges_.size()); }

  const Edge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  double capacity(EdgeId e) const { return edges_[e].capacity; }

  // Edge ids incident to v, in increasing id order.
  std::span<const EdgeId> incident(Vertex v) const {
    return {incident_.data() + offsets_[v], incident_.data() + offsets_[v + 1]};
  }

  Vertex other(EdgeId e, Vertex v) const {
    return edges_[e].tail == v ? edges_[e].head : edges_[e].tail;
  }

  // Weighted degree: total capacity of edges incident to v.
  double degree(Vertex v) const { return degree_[v]; }
  double total_capacity() const noexcept { return total_capacity_; }

 private:
  void BuildAdjacency() {
    offsets_.assign(n_ + 1, 0);
    degree_.assign(n_, 0.0);
    total_capacity_ = 0.0;
    for (const Edge& ed : edges_) {
      ++offsets_[ed.tail + 1];
      ++offsets_[ed.head + 1];
      degree_[ed.tail] += ed.capacity;
      degree_[ed.head] += ed.capacity;
      total_capacity_ += ed.capacity;
    }
    std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
    incident_.assign(offsets_[n_], 0);
    std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
    for (EdgeId e = 0; e < m(); ++e) {
      incident_[fill[edges_[e].tail]++] = e;
      incident_[fill[edges_[e].head]++] = e;
    }
  }

  bool IsConnected() const {
    std::vector<char> seen(n_, 0);
    std::vector<Vertex> stack = {0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      Vertex v = stack.back();
      stack.pop_back();
      for (EdgeId e : incident(v)) {
        Vertex w = other(e, v);
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == n_;
  }

  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<int> offsets_;
  std::vector<EdgeId> incident_;
  std::vector<double> degree_;
  double total_capacity_ = 0.0;
};

}  // namespace cflow
