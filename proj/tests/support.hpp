#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <vector>

#include "cflow/cflow.hpp"

namespace cflow::testing {

inline double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double NormInf(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

inline double Norm1(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += std::abs(v);
  return s;
}

inline std::vector<double> Gaussian(std::size_t len, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<double> x(len);
  for (double& v : x) v = normal(rng);
  return x;
}

// Connected G(n, p) with a density that keeps small graphs interesting.
inline Graph RandomGraph(int n, std::uint64_t seed,
                         CapacityModel caps = CapacityModel::kUniform) {
  if (n == 2) return Graph(2, {{0, 1, 1.0 + seed % 5}});
  const double p = std::min(1.0, 2.5 * std::log(static_cast<double>(n)) / n + 0.05);
  return gnp_graph(n, p, caps, seed);
}

// Naive capacity of the cut (S, V \ S).
inline double NaiveCutCapacity(const Graph& g, std::span<const Vertex> side) {
  std::vector<char> in(g.n(), 0);
  for (Vertex v : side) in[v] = 1;
  double cap = 0.0;
  for (const Edge& e : g.edges()) {
    if (in[e.tail] != in[e.head]) cap += e.capacity;
  }
  return cap;
}

inline double NaiveSideDemand(std::span<const double> b, std::span<const Vertex> side) {
  double s = 0.0;
  for (Vertex v : side) s += b[v];
  return s;
}

// lmax(x) - log(2d) in long double, independent of the library code. Below
// unit scale it uses log1p(sum 2 sinh^2(x/2) / d), which has no cancellation.
inline long double ReferenceLmaxExcess(std::span<const double> x, bool small_scale) {
  const long double d = static_cast<long double>(x.size());
  if (small_scale) {
    long double s = 0.0L;
    for (double v : x) {
      const long double h = std::sinh(static_cast<long double>(v) / 2.0L);
      s += 2.0L * h * h;
    }
    return std::log1p(s / d);
  }
  long double top = 0.0L;
  for (double v : x) top = std::max(top, std::abs(static_cast<long double>(v)));
  long double s = 0.0L;
  for (double v : x) {
    s += std::exp(static_cast<long double>(v) - top) + std::exp(-static_cast<long double>(v) - top);
  }
  return top + std::log(s) - std::log(2.0L * d);
}

// Central difference of lmax at x along u.
inline double FiniteDifference(std::span<const double> x, std::span<const double> u, double h) {
  double top = 0.0;
  for (double v : x) top = std::max(top, std::abs(v));
  const bool small = top < 1.0;
  std::vector<double> plus(x.begin(), x.end()), minus(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    plus[i] += h * u[i];
    minus[i] -= h * u[i];
  }
  // Use the perturbation actually representable in double.
  long double span = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (u[i] != 0.0) {
      span = (static_cast<long double>(plus[i]) - minus[i]) / u[i];
      break;
    }
  }
  return static_cast<double>(
      (ReferenceLmaxExcess(plus, small) - ReferenceLmaxExcess(minus, small)) / span);
}

// Central difference of lmax at x along coordinate i. The two sums differ in
// one term, 2cosh(x_i + h) - 2cosh(x_i - h) = 4 sinh(x_i) sinh(h), so the
// difference is log1p of that change over the lower sum, free of cancellation.
inline double CoordinateDifference(std::span<const double> x, std::size_t i, double h) {
  const double up = x[i] + h, down = x[i] - h;
  long double top = std::abs(static_cast<long double>(up));
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double v = j == i ? down : x[j];
    top = std::max(top, std::abs(static_cast<long double>(v)));
  }
  long double lower = 0.0L;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const long double v = j == i ? down : x[j];
    lower += std::exp(v - top) + std::exp(-v - top);
  }
  const long double mid = (static_cast<long double>(up) + down) / 2.0L;
  const long double half = (static_cast<long double>(up) - down) / 2.0L;
  const long double change = 4.0L * std::sinh(mid) * std::exp(-top) * std::sinh(half);
  return static_cast<double>(std::log1p(change / lower) / (2.0L * half));
}

// A random vector for the softmax property checks: dimension log-uniform in
// [1, max_dim], scale log-uniform in [1e-6, 1e3], mixed entry shapes.
inline std::vector<double> SoftmaxSample(std::mt19937_64& rng, int max_dim) {
  std::uniform_real_distribution<double> unit;
  const int d = static_cast<int>(std::exp(unit(rng) * std::log(static_cast<double>(max_dim))));
  const double scale = std::pow(10.0, -6.0 + 9.0 * unit(rng));
  std::vector<double> x(std::max(1, std::min(d, max_dim)));
  const int shape = static_cast<int>(rng() % 3);
  std::normal_distribution<double> normal;
  for (double& v : x) {
    if (shape == 0) {
      v = scale * normal(rng);
    } else if (shape == 1) {
      v = scale * (2.0 * unit(rng) - 1.0);
    } else {
      // Near-ties at the top: a few entries close to +-scale.
      v = scale * (rng() % 4 == 0 ? (rng() & 1 ? 1.0 : -1.0) * (1.0 - 1e-3 * unit(rng))
                                  : 0.1 * normal(rng));
    }
  }
  return x;
}

struct SoftmaxFactErrors {
  double grad_l1 = 0.0;         // ||grad lmax(x)||_1 - 1 (must be <= 0)
  double inner_slack = 0.0;     // grad.x - (lmax(x) - log 2d) (must be >= 0)
  double lipschitz_slack = 0.0; // ||x - y||_inf - ||grad(x) - grad(y)||_1 (>= 0)
  double fd_rel = 0.0;          // worst relative finite-difference error
};

// Checks the three softmax facts at x (with a partner point y) plus finite
// differences along a random direction and a random significant coordinate.
inline SoftmaxFactErrors CheckSoftmaxFacts(std::span<const double> x, std::mt19937_64& rng) {
  SoftmaxFactErrors out;
  const std::size_t d = x.size();
  std::vector<double> g(d);
  const double value = lmax_with_gradient(x, g);
  out.grad_l1 = Norm1(g) - 1.0;
  out.inner_slack = Dot(g, x) - (value - std::log(2.0 * d));

  std::uniform_real_distribution<double> unit;
  double top = NormInf(x);
  // Partner: either far (independent) or a tiny perturbation.
  std::vector<double> y(x.begin(), x.end());
  const double radius = rng() % 2 ? std::max(top, 1e-6) : std::max(top, 1e-6) * 1e-7;
  for (double& v : y) v += radius * (2.0 * unit(rng) - 1.0);
  const auto gy = grad_lmax(y);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    lhs += std::abs(g[i] - gy[i]);
    rhs = std::max(rhs, std::abs(x[i] - y[i]));
  }
  out.lipschitz_slack = rhs - lhs;

  const double h = 1e-4 * std::min(std::max(top, 1e-300), 1.0);
  std::vector<double> u(d);
  for (double& v : u) v = 2.0 * unit(rng) - 1.0;
  double exact = 0.0, mass = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    exact += g[i] * u[i];
    mass += std::abs(g[i] * u[i]);
  }
  if (mass > 0.0) {
    out.fd_rel = std::abs(FiniteDifference(x, u, h) - exact) / mass;
  }
  // A coordinate whose partial is not lost below long double resolution.
  const double gmax = NormInf(g);
  std::vector<std::size_t> significant;
  for (std::size_t i = 0; i < d; ++i) {
    if (std::abs(g[i]) >= 1e-6 * gmax && gmax > 0.0) significant.push_back(i);
  }
  if (!significant.empty()) {
    const std::size_t i = significant[rng() % significant.size()];
    out.fd_rel = std::max(out.fd_rel, std::abs(CoordinateDifference(x, i, h) - g[i]) / std::abs(g[i]));
  }
  return out;
}

// One approximator of each kind (hierarchy alpha left at 1).
inline std::vector<std::unique_ptr<CongestionApproximator>> AllApproximators(
    const Graph& g, std::uint64_t seed, int branching = 0) {
  std::vector<std::unique_ptr<CongestionApproximator>> out;
  out.push_back(std::make_unique<DegreeApproximator>(g, 1.0));
  out.push_back(std::make_unique<TreeApproximator>(g));
  const int t = branching > 0 ? branching : default_branching(g.n());
  out.push_back(std::make_unique<HierarchyApproximator>(build_hierarchy(g, t, seed), 1.0));
  return out;
}

}  // namespace cflow::testing
