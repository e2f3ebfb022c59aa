// Minimal library usage: route a random demand on a random graph and check
// the answer against the exact oracle.

#include <cstdio>
#include <random>

#include "cflow/cflow.hpp"

int main() {
  const cflow::Graph g = cflow::gnp_graph(60, 0.1, cflow::CapacityModel::kUniform, 7);
  std::mt19937_64 rng(7);
  const cflow::Demands b = cflow::random_demands(g.n(), rng);

  const auto r = cflow::make_degree_approximator(g);
  const double eps = 0.1;
  const cflow::FlowSolution sol = cflow::route(g, r, b, eps);
  const auto exact = cflow::exact_opt_congestion(g, b);
  const auto check = cflow::certify(g, b, sol);

  std::printf("n %d m %d alpha %.3f\n", g.n(), g.m(), r.alpha_claimed());
  std::printf("primal %.6f dual %.6f gap %.4f (opt %.6f)\n", sol.primal, sol.dual, sol.gap,
              exact.opt_value);
  std::printf("iterations %ld, certificate %s\n", sol.total_iterations(),
              check.ok() ? "ok" : "FAILED");
  return check.ok() ? 0 : 1;
}
