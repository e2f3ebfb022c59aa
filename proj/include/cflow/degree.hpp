#pragma once

#include <span>
#include <string>
#include <vector>

#include "cflow/approximator.hpp"
#include "cflow/conductance.hpp"
#include "cflow/graph.hpp"

namespace cflow {

// Diagonal approximator R = diag(1 / deg(i)). For a graph of conductance phi
// it is a 1/phi congestion-approximator.
class DegreeApproximator : public CongestionApproximator {
 public:
  DegreeApproximator(const Graph& g, double alpha) : alpha_(alpha), inv_degree_(g.n()) {
    if (!(alpha >= 1.0)) throw std::invalid_argument("alpha must be >= 1");
    for (Vertex v = 0; v < g.n(); ++v) inv_degree_[v] = 1.0 / g.degree(v);
  }

  int vertices() const override { return static_cast<int>(inv_degree_.size()); }
  int rows() const override { return vertices(); }
  double alpha_claimed() const override { return alpha_; }
  std::string name() const override { return "degree"; }

  void apply_into(std::span<const double> b, std::span<double> out) const override {
    for (std::size_t i = 0; i < inv_degree_.size(); ++i) out[i] = b[i] * inv_degree_[i];
  }
  void apply_adjoint_into(std::span<const double> p, std::span<double> out) const override {
    apply_into(p, out);
  }

 private:
  double alpha_;
  std::vector<double> inv_degree_;
};

// 1/phi with phi computed exactly for n <= 16, otherwise from the Cheeger
// lower bound on phi (so the value is always a valid upper bound on alpha).
inline double degree_alpha_bound(const Graph& g) {
  if (g.n() < 2) return 1.0;
  const double phi = g.n() <= 16 ? exact_conductance(g) : conductance_lower_bound(g);
  if (!(phi > 0.0)) throw Error("could not bound the conductance away from zero");
  return std::max(1.0, 1.0 / phi);
}

inline DegreeApproximator make_degree_approximator(const Graph& g) {
  return DegreeApproximator(g, degree_alpha_bound(g));
}

}  // namespace cflow
