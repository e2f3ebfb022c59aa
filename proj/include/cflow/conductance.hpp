#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "cflow/graph.hpp"

namespace cflow {

// min over proper S of c_S / min(vol S, vol V\S), by enumeration. n <= 24.
inline double exact_conductance(const Graph& g) {
  const int n = g.n();
  if (n > 24) throw std::invalid_argument("exact_conductance: graph too large");
  if (n < 2) throw std::invalid_argument("exact_conductance: needs two vertices");
  const double total = 2.0 * g.total_capacity();
  double best = std::numeric_limits<double>::infinity();
  // The top vertex stays outside S; complements give the same value.
  const std::uint32_t limit = 1u << (n - 1);
  for (std::uint32_t mask = 1; mask < limit; ++mask) {
    double vol = 0.0;
    for (int v = 0; v < n - 1; ++v) {
      if (mask >> v & 1u) vol += g.degree(v);
    }
    double cut = 0.0;
    for (const Edge& ed : g.edges()) {
      const bool a = ed.tail < n - 1 && (mask >> ed.tail & 1u);
      const bool b = ed.head < n - 1 && (mask >> ed.head & 1u);
      if (a != b) cut += ed.capacity;
    }
    best = std::min(best, cut / std::min(vol, total - vol));
  }
  return best;
}

// Second-smallest eigenvalue of the normalized Laplacian I - D^-1/2 A D^-1/2.
inline double normalized_laplacian_gap(const Graph& g) {
  const int n = g.n();
  if (n < 2) throw std::invalid_argument("normalized_laplacian_gap: needs two vertices");
  Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(n, n);
  for (const Edge& ed : g.edges()) {
    const double w = ed.capacity / std::sqrt(g.degree(ed.tail) * g.degree(ed.head));
    lap(ed.tail, ed.head) -= w;
    lap(ed.head, ed.tail) -= w;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error("eigenvalue solver failed");
  return solver.eigenvalues()(1);
}

// Cheeger: conductance >= gap / 2. Shrunk slightly to absorb eigensolver error.
inline double conductance_lower_bound(const Graph& g) {
  return std::max(0.0, normalized_laplacian_gap(g) / 2.0 * (1.0 - 1e-9) - 1e-12);
}

}  // namespace cflow
