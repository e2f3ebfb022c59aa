#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace cflow {

// Symmetric softmax lmax(x) = log sum_i (e^{x_i} + e^{-x_i}) and its gradient,
// evaluated in one pass with the exponentials shifted by M = max_i |x_i|.
// Returns lmax(x); writes the gradient into grad when grad is nonempty.
inline double lmax_with_gradient(std::span<const double> x, std::span<double> grad) {
  if (x.empty()) throw std::invalid_argument("lmax of an empty vector");
  double top = 0.0;
  for (double xi : x) top = std::max(top, std::abs(xi));
  double z = 0.0;
  const bool want_grad = !grad.empty();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::abs(x[i]);
    const double big = std::exp(a - top);
    // e^{-2a} - 1, so e^{a-M} - e^{-a-M} = -big * t keeps precision for small a.
    const double t = std::expm1(-2.0 * a);
    z += big * (2.0 + t);
    if (want_grad) grad[i] = x[i] < 0 ? big * t : -big * t;
  }
  if (want_grad) {
    const double inv = 1.0 / z;
    for (double& gi : grad) gi *= inv;
  }
  return top + std::log(z);
}

inline double lmax(std::span<const double> x) { return lmax_with_gradient(x, {}); }

inline std::vector<double> grad_lmax(std::span<const double> x) {
  std::vector<double> grad(x.size());
  lmax_with_gradient(x, grad);
  return grad;
}

}  // namespace cflow
