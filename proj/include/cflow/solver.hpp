#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cflow/approximator.hpp"
#include "cflow/graph.hpp"
#include "cflow/graph_ops.hpp"
#include "cflow/potential.hpp"
#include "cflow/tree.hpp"

namespace cflow {

class IterationBudgetExceeded : public Error {
 public:
  IterationBudgetExceeded(long iterations, long budget)
      : Error("descent did not terminate within " + std::to_string(budget) +
              " iterations (alpha too small or numerical trouble)"),
        iterations_(iterations), budget_(budget) {}
  long iterations() const noexcept { return iterations_; }
  long budget() const noexcept { return budget_; }

 private:
  long iterations_;
  long budget_;
};

// Only steepest descent is implemented; the field keeps room for an
// accelerated variant.
enum class DescentMethod { kSteepest };

struct SolverConfig {
  double epsilon = 0.1;
  // Overrides the approximator's alpha_claimed() when set.
  std::optional<double> alpha;
  // Target for phi after scaling: coeff / eps * log n.
  double scale_target_coeff = 16.0;
  double scale_up = 17.0 / 16.0;
  // Stop once ||C grad phi||_1 < coeff * eps.
  double termination_coeff = 0.25;
  // Budget: coeff * alpha^2 eps^-3 ln n (2 + ln alpha) descent steps.
  double max_iter_coeff = 64.0;
  // Residual rounds after the first; 0 means ceil(log2(2m)).
  int outer_rounds = 0;
  // Accuracy used for the residual rounds.
  double residual_epsilon = 0.5;
  DescentMethod method = DescentMethod::kSteepest;
};

struct AlmostRouteResult {
  Flow flow;
  Potentials potentials;       // v = R^T grad lmax(x2) at termination
  Demands residual;            // b - B f
  double congestion = 0.0;     // ||C^-1 f||_inf
  double residual_norm = 0.0;  // ||R (b - B f)||_inf
  double demand_norm = 0.0;    // ||R b||_inf
  double objective = 0.0;      // congestion + 2 alpha residual_norm
  double certificate = 0.0;    // b^T v / ||C B^T v||_1
  double alpha = 1.0;
  double epsilon = 0.5;
  double scale_target = 0.0;
  double final_delta = 0.0;
  long iterations = 0;
  long iteration_budget = 0;
  int scalings = 0;
  int scaling_bound = 0;
  // Steps whose phi decrease fell short of delta^2 / (2 + 8 alpha^2).
  long descent_violations = 0;
  // min over steps of (actual decrease - guaranteed decrease), relative to phi.
  double worst_descent_slack = std::numeric_limits<double>::infinity();
};

namespace detail {

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

inline void RequireBalanced(std::span<const double> b) {
  double sum = 0.0;
  for (double x : b) sum += x;
  if (std::abs(sum) > 1e-9 * Norm1(b)) {
    throw std::invalid_argument("demand vector is not balanced");
  }
}

inline double Sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace detail

inline long iteration_budget(double coeff, double alpha, double eps, int n) {
  const double logn = std::log(std::max(2, n));
  const double bound =
      coeff * alpha * alpha / (eps * eps * eps) * logn * (2.0 + std::log(alpha));
  return static_cast<long>(std::min(bound, 4e18));
}

// b^T v / ||C B^T v||_1, the dual value of potentials v.
inline double dual_ratio(const Graph& g, std::span<const double> b,
                         std::span<const double> v) {
  double num = 0.0;
  for (Vertex i = 0; i < g.n(); ++i) num += b[i] * v[i];
  double den = 0.0;
  for (const Edge& ed : g.edges()) den += ed.capacity * std::abs(v[ed.head] - v[ed.tail]);
  return num / den;
}

// Gradient descent on phi from f = 0. Returns a flow f, its residual, and
// potentials v with objective <= (1 + eps) b^T v / ||C B^T v||_1.
inline AlmostRouteResult almost_route(const Graph& g, const CongestionApproximator& r,
                                      std::span<const double> b, double eps,
                                      const SolverConfig& cfg = {}) {
  detail::CheckSize(b.size(), g.n(), "almost_route");
  if (!(eps > 0.0 && eps <= 0.5)) throw std::invalid_argument("epsilon must lie in (0, 1/2]");
  detail::RequireBalanced(b);
  const double alpha = cfg.alpha.value_or(r.alpha_claimed());
  if (!(alpha >= 1.0)) throw std::invalid_argument("alpha must be >= 1");

  AlmostRouteResult out;
  out.alpha = alpha;
  out.epsilon = eps;
  out.flow.assign(g.m(), 0.0);
  out.potentials.assign(g.n(), 0.0);
  out.residual.assign(b.begin(), b.end());
  out.iteration_budget = iteration_budget(cfg.max_iter_coeff, alpha, eps, g.n());
  out.scaling_bound = static_cast<int>(
      4.0 * (std::ceil(std::log(2.0 * alpha) / std::log(cfg.scale_up)) + 1.0));
  if (detail::NormInf(b) == 0.0) return out;

  out.demand_norm = detail::NormInf(r.apply(b));
  if (out.demand_norm == 0.0) throw Error("approximator maps a nonzero demand to zero");

  // log(2m) + log(2 rows) must stay below eps/4 of phi for the certificate.
  const double slack_terms = std::log(2.0 * g.m()) + std::log(2.0 * r.rows());
  const double target = std::max(cfg.scale_target_coeff / eps * std::log(std::max(2, g.n())),
                                 4.0 / eps * slack_terms);
  out.scale_target = target;
  double scale = target / (2.0 * alpha * out.demand_norm);

  PotentialEvaluator eval(g, r, alpha);
  PotentialParts parts;
  EdgeVector grad(g.m());
  Flow& f = out.flow;
  const double step_denominator = 1.0 + 4.0 * alpha * alpha;
  double prev_phi = 0.0, required_drop = 0.0;
  bool stepped = false;
  while (true) {
    eval.evaluate(b, f, scale, parts);
    if (stepped) {
      const double drop = prev_phi - parts.phi;
      const double slack = (drop - required_drop) / std::max(1.0, prev_phi);
      out.worst_descent_slack = std::min(out.worst_descent_slack, slack);
      if (slack < -1e-12) ++out.descent_violations;
    }
    while (parts.phi < target) {
      scale *= cfg.scale_up;
      ++out.scalings;
      eval.evaluate(b, f, scale, parts);
    }
    eval.gradient(parts, grad);
    double delta = 0.0;
    for (EdgeId e = 0; e < g.m(); ++e) delta += g.capacity(e) * std::abs(grad[e]);
    out.final_delta = delta;
    if (delta < cfg.termination_coeff * eps) break;
    if (out.iterations >= out.iteration_budget) {
      throw IterationBudgetExceeded(out.iterations, out.iteration_budget);
    }
    // sgn(0) = 0: edges with zero partial derivative stay put.
    const double step = delta / step_denominator / scale;
    for (EdgeId e = 0; e < g.m(); ++e) f[e] -= step * detail::Sign(grad[e]) * g.capacity(e);
    prev_phi = parts.phi;
    required_drop = delta * delta / (2.0 + 8.0 * alpha * alpha);
    stepped = true;
    ++out.iterations;
  }

  const auto v = eval.potentials();
  out.potentials.assign(v.begin(), v.end());
  out.residual = residual_demands(g, b, f);
  out.congestion = max_congestion(g, f);
  out.residual_norm = detail::NormInf(r.apply(out.residual));
  out.objective = out.congestion + 2.0 * alpha * out.residual_norm;
  out.certificate = dual_ratio(g, b, out.potentials);
  return out;
}

// Best threshold cut of potentials v: vertices sorted by v descending, every
// prefix ending where v strictly drops is scanned, maximizing |b_S| / c_S.
inline Cut threshold_cut(const Graph& g, std::span<const double> b,
                         std::span<const double> v) {
  detail::CheckSize(b.size(), g.n(), "threshold_cut demands");
  detail::CheckSize(v.size(), g.n(), "threshold_cut potentials");
  std::vector<Vertex> order(g.n());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex c) { return v[a] > v[c]; });
  std::vector<char> in(g.n(), 0);
  double demand = 0.0, cap = 0.0, best = -1.0;
  int best_len = 0;
  for (int k = 0; k + 1 < g.n(); ++k) {
    const Vertex u = order[k];
    in[u] = 1;
    demand += b[u];
    for (EdgeId e : g.incident(u)) cap += in[g.other(e, u)] ? -g.capacity(e) : g.capacity(e);
    if (v[order[k + 1]] == v[u]) continue;
    // Incremental cut capacity can drift; the winner is recomputed exactly below.
    const double ratio = std::abs(demand) / std::max(cap, 1e-300);
    if (ratio > best) {
      best = ratio;
      best_len = k + 1;
    }
  }
  if (best_len == 0) throw std::invalid_argument("threshold_cut: potentials are all equal");
  std::vector<Vertex> side(order.begin(), order.begin() + best_len);
  std::sort(side.begin(), side.end());
  return cut_quantities(g, b, side);
}

struct RoundStats {
  double epsilon = 0.0;
  long iterations = 0;
  long iteration_budget = 0;
  int scalings = 0;
  int scaling_bound = 0;
  double objective = 0.0;
  double certificate = 0.0;
  double residual_norm = 0.0;
  double demand_norm = 0.0;
  long descent_violations = 0;
  double worst_descent_slack = std::numeric_limits<double>::infinity();
  bool skipped = false;
};

inline RoundStats round_stats(const AlmostRouteResult& r) {
  RoundStats s;
  s.epsilon = r.epsilon;
  s.iterations = r.iterations;
  s.iteration_budget = r.iteration_budget;
  s.scalings = r.scalings;
  s.scaling_bound = r.scaling_bound;
  s.objective = r.objective;
  s.certificate = r.certificate;
  s.residual_norm = r.residual_norm;
  s.demand_norm = r.demand_norm;
  s.descent_violations = r.descent_violations;
  s.worst_descent_slack = r.worst_descent_slack;
  return s;
}

struct FlowSolution {
  Flow flow;
  Cut cut;
  double primal = 0.0;  // max congestion of flow
  double dual = 0.0;    // cut ratio |b_S| / c_S
  double gap = 0.0;     // primal / dual
  double alpha = 1.0;
  double epsilon = 0.0;
  double tree_fix_congestion = 0.0;
  std::vector<RoundStats> rounds;

  long total_iterations() const {
    long n = 0;
    for (const auto& r : rounds) n += r.iterations;
    return n;
  }
};

inline int default_outer_rounds(int m) {
  return static_cast<int>(std::ceil(std::log2(2.0 * std::max(1, m))));
}

// (1 + eps)-approximate minimum congestion routing of b with a cut certificate:
// one descent at eps, residual rounds at residual_epsilon, and a final
// maximal-spanning-tree routing of whatever residual remains.
inline FlowSolution route(const Graph& g, const CongestionApproximator& r,
                          std::span<const double> b, double eps, SolverConfig cfg = {}) {
  detail::CheckSize(b.size(), g.n(), "route");
  detail::RequireBalanced(b);
  const double scale = detail::NormInf(b);
  if (scale == 0.0) throw std::invalid_argument("route: demand vector is zero");
  cfg.epsilon = eps;
  FlowSolution sol;
  sol.epsilon = eps;
  sol.alpha = cfg.alpha.value_or(r.alpha_claimed());
  sol.flow.assign(g.m(), 0.0);

  auto first = almost_route(g, r, b, eps, cfg);
  sol.rounds.push_back(round_stats(first));
  for (EdgeId e = 0; e < g.m(); ++e) sol.flow[e] += first.flow[e];
  sol.cut = threshold_cut(g, b, first.potentials);

  const int rounds = cfg.outer_rounds > 0 ? cfg.outer_rounds : default_outer_rounds(g.m());
  Demands residual(g.n());
  auto refresh_residual = [&] { residual = residual_demands(g, b, sol.flow); };
  for (int i = 1; i <= rounds; ++i) {
    refresh_residual();
    // Below this the residual is rounding noise; the tree step absorbs it.
    if (detail::NormInf(residual) <= 1e-13 * scale) {
      RoundStats skipped;
      skipped.epsilon = cfg.residual_epsilon;
      skipped.skipped = true;
      sol.rounds.push_back(skipped);
      continue;
    }
    auto next = almost_route(g, r, residual, cfg.residual_epsilon, cfg);
    sol.rounds.push_back(round_stats(next));
    for (EdgeId e = 0; e < g.m(); ++e) sol.flow[e] += next.flow[e];
  }
  refresh_residual();
  const auto fix = route_on_tree(g, maximal_spanning_tree(g), residual);
  sol.tree_fix_congestion = max_congestion(g, fix);
  for (EdgeId e = 0; e < g.m(); ++e) sol.flow[e] += fix[e];

  sol.primal = max_congestion(g, sol.flow);
  sol.dual = sol.cut.ratio;
  sol.gap = sol.primal / sol.dual;
  return sol;
}

struct StFlowResult {
  double value = 0.0;  // 1 / primal congestion of the unit demand
  Flow flow;           // feasible: |f_e| <= c_e
  Cut cut;
  FlowSolution solution;  // for the unit s-t demand
};

inline Demands unit_demand(int n, Vertex s, Vertex t) {
  if (s < 0 || s >= n || t < 0 || t >= n || s == t) {
    throw std::invalid_argument("source and sink must be distinct vertices");
  }
  Demands b(n, 0.0);
  b[s] = -1.0;
  b[t] = 1.0;
  return b;
}

inline StFlowResult st_max_flow(const Graph& g, const CongestionApproximator& r, Vertex s,
                                Vertex t, double eps, SolverConfig cfg = {}) {
  const auto b = unit_demand(g.n(), s, t);
  StFlowResult out;
  out.solution = route(g, r, b, eps, cfg);
  out.value = 1.0 / out.solution.primal;
  out.flow = out.solution.flow;
  for (double& x : out.flow) x *= out.value;
  out.cut = out.solution.cut;
  return out;
}

struct CertificateCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double limit = 0.0;
};

struct CertificateReport {
  std::vector<CertificateCheck> checks;
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
};

// Recomputes everything from the graph, demands, flow and cut side.
// Reported primal/dual are compared when positive; eps <= 0 skips the gap bound.
inline CertificateReport certify(const Graph& g, std::span<const double> b,
                                 std::span<const double> flow,
                                 std::span<const Vertex> cut_side, double reported_primal,
                                 double reported_dual, double eps) {
  CertificateReport rep;
  auto add = [&](std::string name, bool passed, double value, double limit) {
    rep.checks.push_back({std::move(name), passed, value, limit});
  };
  if (flow.size() != static_cast<std::size_t>(g.m()) ||
      b.size() != static_cast<std::size_t>(g.n())) {
    add("dimensions", false, 0.0, 0.0);
    return rep;
  }
  const auto div = divergence(g, flow);
  double err = 0.0;
  for (Vertex v = 0; v < g.n(); ++v) err = std::max(err, std::abs(div[v] - b[v]));
  const double cons_limit = 1e-9 * std::max(1.0, detail::NormInf(b));
  add("conservation", err <= cons_limit, err, cons_limit);

  rep.primal = max_congestion(g, flow);
  if (reported_primal > 0.0) {
    const double rel = std::abs(rep.primal - reported_primal) / rep.primal;
    add("primal_matches", rel <= 1e-9, rel, 1e-9);
  }
  try {
    const Cut cut = cut_quantities(g, b, cut_side);
    rep.dual = cut.ratio;
    add("cut_valid", true, cut.capacity, 0.0);
  } catch (const std::invalid_argument&) {
    add("cut_valid", false, 0.0, 0.0);
    return rep;
  }
  if (reported_dual > 0.0) {
    const double rel = std::abs(rep.dual - reported_dual) / std::max(rep.dual, 1e-300);
    add("dual_matches", rel <= 1e-9, rel, 1e-9);
  }
  rep.gap = rep.primal / rep.dual;
  add("weak_duality", rep.gap >= 1.0 - 1e-9, rep.gap, 1.0 - 1e-9);
  if (eps > 0.0) add("gap_within_eps", rep.gap <= 1.0 + eps + 1e-12, rep.gap, 1.0 + eps);
  return rep;
}

inline CertificateReport certify(const Graph& g, std::span<const double> b,
                                 const FlowSolution& sol) {
  return certify(g, b, sol.flow, sol.cut.side, sol.primal, sol.dual, sol.epsilon);
}

}  // namespace cflow
