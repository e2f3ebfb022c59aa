#pragma once

#include <span>
#include <vector>

#include "cflow/approximator.hpp"
#include "cflow/graph.hpp"
#include "cflow/graph_ops.hpp"
#include "cflow/softmax.hpp"

namespace cflow {

// Pieces of phi(f) = lmax(C^-1 f) + lmax(2 alpha R (b - B f)).
struct PotentialParts {
  std::vector<double> x1;  // C^-1 f
  std::vector<double> x2;  // 2 alpha R (b - B f)
  std::vector<double> p1;  // grad lmax(x1)
  std::vector<double> p2;  // grad lmax(x2)
  double lmax1 = 0.0;
  double lmax2 = 0.0;
  double phi = 0.0;
};

// Evaluates phi and its gradient with reusable buffers. `scale` multiplies
// both f and b, which lets the solver rescale without touching its vectors.
class PotentialEvaluator {
 public:
  PotentialEvaluator(const Graph& g, const CongestionApproximator& r, double alpha)
      : g_(g), r_(r), alpha_(alpha), residual_(g.n()), potentials_(g.n()),
        differences_(g.m()) {
    if (r.vertices() != g.n()) throw std::invalid_argument("approximator size mismatch");
  }

  // One application of R.
  void evaluate(std::span<const double> b, std::span<const double> f, double scale,
                PotentialParts& parts) {
    detail::CheckSize(b.size(), g_.n(), "potential demands");
    detail::CheckSize(f.size(), g_.m(), "potential flow");
    parts.x1.resize(g_.m());
    parts.p1.resize(g_.m());
    parts.x2.resize(r_.rows());
    parts.p2.resize(r_.rows());
    for (EdgeId e = 0; e < g_.m(); ++e) parts.x1[e] = scale * f[e] / g_.capacity(e);
    divergence_into(g_, f, residual_);
    for (Vertex v = 0; v < g_.n(); ++v) residual_[v] = scale * (b[v] - residual_[v]);
    r_.apply_into(residual_, parts.x2);
    for (double& x : parts.x2) x *= 2.0 * alpha_;
    parts.lmax1 = lmax_with_gradient(parts.x1, parts.p1);
    parts.lmax2 = lmax_with_gradient(parts.x2, parts.p2);
    parts.phi = parts.lmax1 + parts.lmax2;
  }

  // grad phi = C^-1 p1 - 2 alpha B^T R^T p2. One application of R^T.
  // Also leaves v = R^T p2 in potentials().
  void gradient(const PotentialParts& parts, std::span<double> grad) {
    r_.apply_adjoint_into(parts.p2, potentials_);
    adjoint_divergence_into(g_, potentials_, differences_);
    for (EdgeId e = 0; e < g_.m(); ++e) {
      grad[e] = parts.p1[e] / g_.capacity(e) - 2.0 * alpha_ * differences_[e];
    }
  }

  std::span<const double> potentials() const noexcept { return potentials_; }

 private:
  const Graph& g_;
  const CongestionApproximator& r_;
  double alpha_;
  std::vector<double> residual_;
  std::vector<double> potentials_;
  std::vector<double> differences_;
};

inline PotentialParts potential(const Graph& g, const CongestionApproximator& r,
                                double alpha, std::span<const double> b,
                                std::span<const double> f) {
  PotentialEvaluator eval(g, r, alpha);
  PotentialParts parts;
  eval.evaluate(b, f, 1.0, parts);
  return parts;
}

inline EdgeVector potential_gradient(const PotentialParts& parts, const Graph& g,
                                     const CongestionApproximator& r, double alpha) {
  PotentialEvaluator eval(g, r, alpha);
  EdgeVector grad(g.m());
  eval.gradient(parts, grad);
  return grad;
}

}  // namespace cflow
