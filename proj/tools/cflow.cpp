// cflow command-line front end: solve, certify, gen, bench.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cflow/cflow.hpp"

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr int kExitOk = 0;
constexpr int kExitGap = 1;
constexpr int kExitIo = 2;
constexpr int kExitBudget = 3;

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

cflow::GraphFormat ParseFormat(const std::string& s) {
  if (s == "dimacs") return cflow::GraphFormat::kDimacs;
  if (s == "edges") return cflow::GraphFormat::kEdgeList;
  return cflow::GraphFormat::kAuto;
}

cflow::CapacityModel ParseCaps(const std::string& s) {
  if (s == "unit") return cflow::CapacityModel::kUnit;
  if (s == "exp") return cflow::CapacityModel::kExponential;
  return cflow::CapacityModel::kUniform;
}

void WriteText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw cflow::FileError("cannot write " + path);
  out << text;
  if (!out) throw cflow::FileError("write failed: " + path);
}

json ReadJson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cflow::FileError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw cflow::InputError(path + ": " + e.what());
  }
}

std::vector<int> OneIndexed(const std::vector<cflow::Vertex>& side) {
  std::vector<int> out(side.begin(), side.end());
  for (int& v : out) ++v;
  return out;
}

// Options shared by solve and bench.
struct ApproxOptions {
  std::string approx = "hierarchy";
  std::optional<double> alpha;
  int branching = 0;  // 0: ceil(sqrt n)
  std::uint64_t seed = 0;
  int alpha_trials = 16;
  int alpha_pairs = 16;
  double alpha_margin = 1.25;
  std::string save_hierarchy;
  std::string load_hierarchy;
};

struct BuiltApproximator {
  std::unique_ptr<cflow::CongestionApproximator> r;
  double alpha_claimed = 0.0;
  std::optional<double> alpha_measured;
  std::string alpha_source;
  double build_seconds = 0.0;
  double alpha_seconds = 0.0;
  int rows = 0;
  int depth = 0;
};

// The degree bound needs a dense eigensolve above 16 vertices.
constexpr int kDegreeEigenLimit = 1500;

BuiltApproximator Build(const cflow::Graph& g, const ApproxOptions& opt) {
  BuiltApproximator out;
  auto t0 = Clock::now();
  if (opt.approx == "degree") {
    double alpha = 0.0;
    if (opt.alpha) {
      alpha = *opt.alpha;
      out.alpha_source = "override";
    } else {
      if (g.n() > kDegreeEigenLimit) {
        throw cflow::InputError("degree approximator on more than " +
                                std::to_string(kDegreeEigenLimit) +
                                " vertices needs --alpha");
      }
      alpha = cflow::degree_alpha_bound(g);
      out.alpha_source = g.n() <= 16 ? "exact conductance" : "cheeger bound";
    }
    out.r = std::make_unique<cflow::DegreeApproximator>(g, alpha);
    out.alpha_claimed = alpha;
    out.build_seconds = Seconds(t0);
  } else if (opt.approx == "tree") {
    auto tree = std::make_unique<cflow::TreeApproximator>(g);
    out.build_seconds = Seconds(t0);
    // alpha_bound is a proven bound and never exceeds m.
    out.alpha_claimed = opt.alpha ? *opt.alpha : tree->alpha_bound();
    out.alpha_source = opt.alpha ? "override" : "tree bound";
    out.r = std::move(tree);
  } else if (opt.approx == "hierarchy") {
    cflow::ForestHierarchy h;
    if (!opt.load_hierarchy.empty()) {
      std::ifstream in(opt.load_hierarchy);
      if (!in) throw cflow::FileError("cannot open " + opt.load_hierarchy);
      h = cflow::ForestHierarchy::read(in);
      if (h.n() != g.n()) throw cflow::InputError("hierarchy does not match graph size");
    } else {
      const int t = opt.branching > 0 ? opt.branching : cflow::default_branching(g.n());
      h = cflow::build_hierarchy(g, t, opt.seed);
    }
    if (!opt.save_hierarchy.empty()) {
      std::ofstream hout(opt.save_hierarchy);
      if (!hout) throw cflow::FileError("cannot write " + opt.save_hierarchy);
      h.write(hout);
    }
    out.depth = h.depth();
    auto r = std::make_unique<cflow::HierarchyApproximator>(std::move(h), 1.0);
    out.build_seconds = Seconds(t0);
    if (!opt.alpha) {
      auto t1 = Clock::now();
      const auto est = cflow::measure_alpha(*r, g, opt.alpha_trials, opt.seed, opt.alpha_pairs);
      out.alpha_seconds = Seconds(t1);
      out.alpha_measured = est.alpha;
      r->set_alpha(std::max(1.0, est.alpha * opt.alpha_margin));
      out.alpha_source = "measured";
    } else {
      r->set_alpha(*opt.alpha);
      out.alpha_source = "override";
    }
    out.alpha_claimed = r->alpha_claimed();
    out.r = std::move(r);
  } else {
    throw cflow::InputError("unknown approximator " + opt.approx);
  }
  out.rows = out.r->rows();
  return out;
}

struct Instance {
  cflow::Graph graph;
  std::string graph_path;
  cflow::Demands b;
  std::optional<cflow::Vertex> s, t;  // zero-based when set
  std::string demands_path;
};

Instance LoadInstance(const std::string& graph_path, const std::string& format,
                      const std::string& demands_path, std::optional<int> s1,
                      std::optional<int> t1) {
  auto file = cflow::load_graph(graph_path, ParseFormat(format));
  Instance inst{std::move(file.graph), graph_path, {}, {}, {}, demands_path};
  if (!demands_path.empty()) {
    inst.b = cflow::load_demands(demands_path, inst.graph.n());
    return inst;
  }
  if (s1) inst.s = *s1 - 1;
  else inst.s = file.source;
  if (t1) inst.t = *t1 - 1;
  else inst.t = file.sink;
  if (!inst.s || !inst.t) {
    throw cflow::InputError("need --demands or a source and sink (--s/--t or DIMACS n lines)");
  }
  auto in_range = [&](cflow::Vertex v) { return v >= 0 && v < inst.graph.n(); };
  if (!in_range(*inst.s) || !in_range(*inst.t) || *inst.s == *inst.t) {
    throw cflow::InputError("source and sink must be distinct vertices in 1.." +
                            std::to_string(inst.graph.n()));
  }
  inst.b = cflow::unit_demand(inst.graph.n(), *inst.s, *inst.t);
  return inst;
}

json InstanceJson(const Instance& inst) {
  json j = {{"graph", inst.graph_path}, {"n", inst.graph.n()}, {"m", inst.graph.m()}};
  if (!inst.demands_path.empty()) j["demands"] = inst.demands_path;
  if (inst.s) j["source"] = *inst.s + 1;
  if (inst.t) j["sink"] = *inst.t + 1;
  return j;
}

json RoundsJson(const cflow::FlowSolution& sol) {
  json rounds = json::array();
  for (const auto& r : sol.rounds) {
    rounds.push_back({{"epsilon", r.epsilon},
                      {"skipped", r.skipped},
                      {"iterations", r.iterations},
                      {"iteration_budget", r.iteration_budget},
                      {"scalings", r.scalings},
                      {"descent_violations", r.descent_violations}});
  }
  return rounds;
}

// ---------------------------------------------------------------- solve

struct SolveOptions {
  std::string graph, format = "auto", demands, out, report, method = "descent";
  std::optional<int> s, t;
  double eps = 0.1;
  ApproxOptions approx;
};

int CmdSolve(const SolveOptions& o) {
  const auto start = Clock::now();
  const Instance inst = LoadInstance(o.graph, o.format, o.demands, o.s, o.t);
  const double load_seconds = Seconds(start);
  const cflow::Graph& g = inst.graph;

  json config = {{"eps", o.eps}, {"method", o.method}, {"seed", o.approx.seed}};
  json report = {{"schema", 1}, {"instance", InstanceJson(inst)}};
  json solution = {{"schema", 1}, {"instance", InstanceJson(inst)}};
  json timings = {{"load", load_seconds}};

  cflow::Flow flow;
  cflow::Cut cut;
  double primal = 0.0, dual = 0.0, gap = 0.0;
  if (o.method == "exact") {
    auto t0 = Clock::now();
    const auto res = cflow::exact_opt_congestion(g, inst.b);
    timings["solve"] = Seconds(t0);
    flow = res.witness_flow;
    cut = res.witness_cut;
    primal = cflow::max_congestion(g, flow);
    dual = cut.ratio;
    gap = primal / dual;
  } else if (o.method == "descent") {
    auto built = Build(g, o.approx);
    config["approx"] = o.approx.approx;
    config["alpha"] = built.alpha_claimed;
    config["alpha_source"] = built.alpha_source;
    if (o.approx.approx == "hierarchy") {
      config["branching"] = o.approx.branching > 0 ? o.approx.branching
                                                   : cflow::default_branching(g.n());
    }
    timings["build"] = built.build_seconds;
    timings["alpha"] = built.alpha_seconds;
    json alpha = {{"claimed", built.alpha_claimed}, {"source", built.alpha_source}};
    if (built.alpha_measured) alpha["measured"] = *built.alpha_measured;
    report["approximator"] = {{"name", o.approx.approx},
                              {"rows", built.rows},
                              {"depth", built.depth},
                              {"alpha", alpha}};
    auto t0 = Clock::now();
    cflow::SolverConfig cfg;
    cfg.alpha = built.alpha_claimed;
    const auto sol = cflow::route(g, *built.r, inst.b, o.eps, cfg);
    timings["solve"] = Seconds(t0);
    flow = sol.flow;
    cut = sol.cut;
    primal = sol.primal;
    dual = sol.dual;
    gap = sol.gap;
    solution["rounds"] = RoundsJson(sol);
    solution["total_iterations"] = sol.total_iterations();
    report["rounds"] = solution["rounds"];
    report["total_iterations"] = sol.total_iterations();
    report["tree_fix_congestion"] = sol.tree_fix_congestion;
  } else {
    throw cflow::InputError("unknown method " + o.method);
  }

  solution["config"] = config;
  solution["flow"] = flow;
  solution["cut"] = OneIndexed(cut.side);
  solution["primal"] = primal;
  solution["dual"] = dual;
  solution["gap"] = gap;
  if (inst.s) {
    // Unit demand: the max flow is 1 / primal and flow / primal is feasible.
    solution["max_flow_value"] = 1.0 / primal;
    solution["min_cut_capacity"] = cut.capacity;
  }
  report["config"] = config;
  report["primal"] = primal;
  report["dual"] = dual;
  report["gap"] = gap;
  timings["total"] = Seconds(start);
  report["timings"] = timings;

  WriteText(o.out, solution.dump(1) + "\n");
  if (!o.report.empty()) WriteText(o.report, report.dump(1) + "\n");
  const bool ok = gap <= 1.0 + o.eps;
  std::fprintf(stderr, "primal %.10g dual %.10g gap %.10g%s\n", primal, dual, gap,
               ok ? "" : " (exceeds 1+eps)");
  return ok ? kExitOk : kExitGap;
}

// ---------------------------------------------------------------- certify

struct CertifyOptions {
  std::string graph, format = "auto", demands, solution, out;
  std::optional<double> eps;
};

int CmdCertify(const CertifyOptions& o) {
  const json sol = ReadJson(o.solution);
  std::optional<int> s, t;
  std::string demands = o.demands;
  try {
    const json& inst = sol.at("instance");
    if (demands.empty() && inst.contains("source")) {
      s = inst.at("source").get<int>();
      t = inst.at("sink").get<int>();
    }
    if (demands.empty() && !s && inst.contains("demands")) {
      demands = inst.at("demands").get<std::string>();
    }
  } catch (const json::exception& e) {
    throw cflow::InputError(o.solution + ": " + e.what());
  }
  const Instance inst = LoadInstance(o.graph, o.format, demands, s, t);
  std::vector<double> flow;
  std::vector<cflow::Vertex> side;
  double primal = 0.0, dual = 0.0, eps = 0.0;
  try {
    flow = sol.at("flow").get<std::vector<double>>();
    for (int v : sol.at("cut").get<std::vector<int>>()) side.push_back(v - 1);
    primal = sol.at("primal").get<double>();
    dual = sol.at("dual").get<double>();
    eps = o.eps ? *o.eps : sol.at("config").at("eps").get<double>();
  } catch (const json::exception& e) {
    throw cflow::InputError(o.solution + ": " + e.what());
  }
  for (cflow::Vertex v : side) {
    if (v < 0 || v >= inst.graph.n()) throw cflow::InputError("cut vertex out of range");
  }
  const auto rep = cflow::certify(inst.graph, inst.b, flow, side, primal, dual, eps);
  json checks = json::array();
  for (const auto& c : rep.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value},
                      {"limit", c.limit}});
  }
  json out = {{"schema", 1}, {"pass", rep.ok()},   {"primal", rep.primal},
              {"dual", rep.dual}, {"gap", rep.gap}, {"checks", checks}};
  WriteText(o.out, out.dump(1) + "\n");
  std::fprintf(stderr, "%s\n", rep.ok() ? "certificate: pass" : "certificate: FAIL");
  return rep.ok() ? kExitOk : kExitGap;
}

// ---------------------------------------------------------------- gen

struct GenOptions {
  std::string kind, caps = "unit", format = "edges", out, demands_out;
  int n = 10;
  double p = 0.3;
  double bridge = 1.0;
  std::uint64_t seed = 0;
};

int CmdGen(const GenOptions& o) {
  cflow::Graph g;
  const auto caps = ParseCaps(o.caps);
  if (o.kind == "path") g = cflow::path_graph(o.n, caps, o.seed);
  else if (o.kind == "cycle") g = cflow::cycle_graph(o.n, caps, o.seed);
  else if (o.kind == "grid") g = cflow::grid_graph(o.n, caps, o.seed);
  else if (o.kind == "gnp") g = cflow::gnp_graph(o.n, o.p, caps, o.seed);
  else if (o.kind == "barbell") g = cflow::barbell_graph(o.n, o.bridge, caps, o.seed);
  else if (o.kind == "tree") g = cflow::random_tree(o.n, caps, o.seed);
  else throw cflow::InputError("unknown generator " + o.kind);

  std::ostringstream text;
  if (o.format == "dimacs") {
    cflow::write_dimacs(text, g, 0, g.n() - 1);
  } else {
    cflow::write_edge_list(text, g);
  }
  WriteText(o.out, text.str());
  if (!o.demands_out.empty()) {
    std::mt19937_64 rng(o.seed ^ 0x9e3779b97f4a7c15ULL);
    std::ostringstream d;
    cflow::write_demands(d, cflow::random_demands(g.n(), rng));
    WriteText(o.demands_out, d.str());
  }
  std::fprintf(stderr, "%s: n %d m %d\n", o.kind.c_str(), g.n(), g.m());
  return kExitOk;
}

// ---------------------------------------------------------------- bench

struct BenchOptions {
  std::string graph, format = "auto", demands, out, table = "json";
  std::optional<int> s, t;
  std::vector<double> eps = {0.5, 0.2, 0.1, 0.05};
  std::vector<std::string> approximators = {"degree", "tree", "hierarchy"};
  ApproxOptions approx;
};

int CmdBench(const BenchOptions& o) {
  const Instance inst = LoadInstance(o.graph, o.format, o.demands, o.s, o.t);
  json rows = json::array();
  for (const std::string& name : o.approximators) {
    ApproxOptions a = o.approx;
    a.approx = name;
    const auto built = Build(inst.graph, a);
    for (double eps : o.eps) {
      json row = {{"approx", name}, {"eps", eps}, {"alpha", built.alpha_claimed},
                  {"rows", built.rows}, {"build_seconds", built.build_seconds}};
      cflow::SolverConfig cfg;
      cfg.alpha = built.alpha_claimed;
      const auto t0 = Clock::now();
      try {
        const auto sol = cflow::route(inst.graph, *built.r, inst.b, eps, cfg);
        row["status"] = "ok";
        row["iterations"] = sol.total_iterations();
        row["first_round_iterations"] = sol.rounds.front().iterations;
        row["gap"] = sol.gap;
        row["primal"] = sol.primal;
        row["dual"] = sol.dual;
      } catch (const cflow::IterationBudgetExceeded& e) {
        row["status"] = "budget";
        row["iterations"] = e.iterations();
      }
      row["seconds"] = Seconds(t0);
      rows.push_back(row);
    }
  }
  std::ostringstream text;
  if (o.table == "csv") {
    text << "approx,eps,alpha,rows,status,iterations,first_round_iterations,gap,seconds\n";
    for (const auto& r : rows) {
      auto num = [&](const char* key) {
        return r.contains(key) ? r[key].dump() : std::string();
      };
      text << r["approx"].get<std::string>() << ',' << num("eps") << ',' << num("alpha") << ','
           << num("rows") << ',' << r["status"].get<std::string>() << ',' << num("iterations")
           << ',' << num("first_round_iterations") << ',' << num("gap") << ','
           << num("seconds") << '\n';
    }
  } else {
    text << json{{"schema", 1}, {"instance", InstanceJson(inst)}, {"rows", rows}}.dump(1)
         << '\n';
  }
  WriteText(o.out, text.str());
  return kExitOk;
}

void AddApproxOptions(CLI::App* app, ApproxOptions& a, bool with_choice) {
  if (with_choice) {
    app->add_option("--approx", a.approx, "Congestion approximator")
        ->check(CLI::IsMember({"degree", "tree", "hierarchy"}));
  }
  app->add_option("--alpha", a.alpha, "Override the approximator's alpha")
      ->check(CLI::Range(1.0, 1e300));
  app->add_option("--branching", a.branching, "Hierarchy branching t (default ceil(sqrt n))")
      ->check(CLI::PositiveNumber);
  app->add_option("--seed", a.seed, "Seed for hierarchy construction and alpha sampling");
  app->add_option("--alpha-trials", a.alpha_trials, "Random demands used to measure alpha");
  app->add_option("--alpha-pairs", a.alpha_pairs, "s-t pairs used to measure alpha");
  app->add_option("--alpha-margin", a.alpha_margin, "Factor applied to measured alpha")
      ->check(CLI::Range(1.0, 1e6));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate minimum-congestion flows with cut certificates"};
  app.require_subcommand(1);

  SolveOptions solve;
  auto* s = app.add_subcommand("solve", "Route demands or an s-t unit demand");
  s->add_option("--graph", solve.graph, "Graph file (DIMACS or edge list)")->required();
  s->add_option("--format", solve.format)->check(CLI::IsMember({"auto", "dimacs", "edges"}));
  s->add_option("--demands", solve.demands, "Demand file: lines 'vertex value'");
  s->add_option("--s,--source", solve.s, "Source vertex (1-indexed)");
  s->add_option("--t,--sink", solve.t, "Sink vertex (1-indexed)");
  s->add_option("--eps", solve.eps, "Accuracy in (0, 0.5]")->check(CLI::Range(1e-6, 0.5));
  s->add_option("--method", solve.method)->check(CLI::IsMember({"descent", "exact"}));
  s->add_option("--out", solve.out, "Solution JSON (default stdout)");
  s->add_option("--report", solve.report, "Run report JSON");
  s->add_option("--save-hierarchy", solve.approx.save_hierarchy);
  s->add_option("--load-hierarchy", solve.approx.load_hierarchy);
  AddApproxOptions(s, solve.approx, true);

  CertifyOptions cert;
  auto* c = app.add_subcommand("certify", "Re-validate a solution file");
  c->add_option("--graph", cert.graph)->required();
  c->add_option("--format", cert.format)->check(CLI::IsMember({"auto", "dimacs", "edges"}));
  c->add_option("--solution", cert.solution)->required();
  c->add_option("--demands", cert.demands, "Demand file (default: from the solution)");
  c->add_option("--eps", cert.eps, "Gap bound (default: from the solution)");
  c->add_option("--out", cert.out);

  GenOptions gen;
  auto* gcmd = app.add_subcommand("gen", "Generate a graph");
  gcmd->add_option("kind", gen.kind)
      ->required()
      ->check(CLI::IsMember({"path", "cycle", "grid", "gnp", "barbell", "tree"}));
  gcmd->add_option("n", gen.n, "Vertices (grid: side length; barbell: clique size)")
      ->check(CLI::PositiveNumber);
  gcmd->add_option("--p", gen.p, "Edge probability for gnp")->check(CLI::Range(0.0, 1.0));
  gcmd->add_option("--bridge", gen.bridge, "Barbell bridge capacity");
  gcmd->add_option("--caps", gen.caps)->check(CLI::IsMember({"unit", "uniform", "exp"}));
  gcmd->add_option("--seed", gen.seed);
  gcmd->add_option("--format", gen.format)->check(CLI::IsMember({"edges", "dimacs"}));
  gcmd->add_option("--out", gen.out);
  gcmd->add_option("--demands-out", gen.demands_out, "Also write random balanced demands");

  BenchOptions bench;
  auto* b = app.add_subcommand("bench", "Sweep eps and approximators on one instance");
  b->add_option("--graph", bench.graph)->required();
  b->add_option("--format", bench.format)->check(CLI::IsMember({"auto", "dimacs", "edges"}));
  b->add_option("--demands", bench.demands);
  b->add_option("--s,--source", bench.s);
  b->add_option("--t,--sink", bench.t);
  b->add_option("--eps", bench.eps, "Accuracies to sweep");
  b->add_option("--approx", bench.approximators, "Approximators to sweep")
      ->check(CLI::IsMember({"degree", "tree", "hierarchy"}));
  b->add_option("--table", bench.table)->check(CLI::IsMember({"json", "csv"}));
  b->add_option("--out", bench.out);
  AddApproxOptions(b, bench.approx, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (s->parsed()) return CmdSolve(solve);
    if (c->parsed()) return CmdCertify(cert);
    if (gcmd->parsed()) return CmdGen(gen);
    if (b->parsed()) return CmdBench(bench);
  } catch (const cflow::IterationBudgetExceeded& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitBudget;
  } catch (const cflow::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  }
  return kExitOk;
}
