#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cflow/approximator.hpp"
#include "cflow/generators.hpp"
#include "cflow/graph.hpp"
#include "cflow/oracle.hpp"

namespace cflow {

struct AlphaEstimate {
  double alpha = 1.0;            // max over samples of opt(b) / ||Rb||_inf
  double lower_violation = 0.0;  // max over samples of ||Rb||_inf - opt(b)
  int samples = 0;
};

namespace detail {

inline double ExactOpt(const Graph& g, std::span<const double> b) {
  return g.n() <= 12 ? brute_opt_cut(g, b).ratio : exact_opt_congestion(g, b).opt_value;
}

inline void Record(AlphaEstimate& est, double opt, double rb) {
  ++est.samples;
  est.lower_violation = std::max(est.lower_violation, rb - opt);
  if (rb > 0.0) est.alpha = std::max(est.alpha, opt / rb);
}

inline double NormInfOf(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace detail

// Empirical alpha of R on g: `trials` random balanced demands (half dense
// Gaussian, half sparse unit pairs) plus every s-t pair up to `pair_limit`.
// Needs an oracle-sized graph.
inline AlphaEstimate measure_alpha(const CongestionApproximator& r, const Graph& g, int trials,
                                   std::uint64_t seed, int pair_limit = 1000) {
  AlphaEstimate est;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < trials; ++i) {
    const Demands b = i % 2 == 0 ? random_demands(g.n(), rng)
                                 : random_sparse_demands(g.n(), 1 + i % 3, rng);
    detail::Record(est, detail::ExactOpt(g, b), detail::NormInfOf(r.apply(b)));
  }
  int pairs = 0;
  for (Vertex s = 0; s < g.n() && pairs < pair_limit; ++s) {
    for (Vertex t = s + 1; t < g.n() && pairs < pair_limit; ++t, ++pairs) {
      Demands b(g.n(), 0.0);
      b[s] = -1.0;
      b[t] = 1.0;
      const double opt = 1.0 / exact_max_flow(g, s, t).value;
      detail::Record(est, opt, detail::NormInfOf(r.apply(b)));
    }
  }
  return est;
}

}  // namespace cflow
