#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "cflow/approximator.hpp"
#include "cflow/graph.hpp"
#include "cflow/graph_ops.hpp"
#include "cflow/tree.hpp"

namespace cflow {

// One (lambda, forest, child) entry of a hierarchy node. The forest spans the
// node's vertices and has one component per core vertex; the child node is
// built over the cores (core j of the forest is vertex j of the child).
struct HierarchyEntry {
  double lambda = 1.0;
  std::vector<Vertex> cores;
  std::vector<Link> links;
  // Original-graph edge standing in for each link (used to expand samples).
  std::vector<EdgeId> link_edge;
  // Per vertex: capacity in the original graph of the cut its subtree induces.
  std::vector<double> cut;
  int child = -1;
  int row_offset = 0;

  // Derived from links and cores.
  RootedForest forest;
  std::vector<Vertex> row_vertex;
  std::vector<double> inv_cut;

  int rows() const { return static_cast<int>(row_vertex.size()); }

  void Finalize(int n) {
    forest = RootedForest(n, links, cores);
    if (forest.roots().size() != cores.size()) {
      throw std::invalid_argument("hierarchy forest has a component without a core");
    }
    row_vertex.clear();
    inv_cut.assign(n, 0.0);
    for (Vertex v : forest.order()) {
      if (forest.is_root(v)) continue;
      row_vertex.push_back(v);
      inv_cut[v] = 1.0 / cut[v];
    }
  }
};

struct HierarchyNode {
  int n = 1;
  std::vector<HierarchyEntry> entries;
};

// The recursive (lambda_i, F_i, child_i) structure. Rows of R are the forest
// edges of all entries, ordered depth-first: a node's entry i contributes its
// own rows, then the rows of its child subtree, then entry i+1 follows.
class ForestHierarchy {
 public:
  ForestHierarchy() = default;

  int n() const noexcept { return n_; }
  int branching() const noexcept { return t_; }
  std::uint64_t seed() const noexcept { return seed_; }
  int rows() const noexcept { return rows_; }
  std::span<const HierarchyNode> nodes() const noexcept { return nodes_; }
  int depth() const { return nodes_.empty() ? 0 : NodeDepth(0); }

  // out = R b.
  void apply_into(std::span<const double> b, std::span<double> out) const {
    detail::CheckSize(b.size(), n_, "hierarchy apply");
    detail::CheckSize(out.size(), rows_, "hierarchy apply output");
    if (!nodes_.empty()) ApplyNode(0, b, out);
  }

  // out = R^T p.
  void adjoint_into(std::span<const double> p, std::span<double> out) const {
    detail::CheckSize(p.size(), rows_, "hierarchy adjoint");
    detail::CheckSize(out.size(), n_, "hierarchy adjoint output");
    if (nodes_.empty()) {
      std::fill(out.begin(), out.end(), 0.0);
      return;
    }
    AdjointNode(0, p, out);
  }

  // Original vertex set S of every row (row value is b_S / c_S).
  std::vector<std::vector<Vertex>> row_sides() const {
    std::vector<std::vector<Vertex>> sides(rows_);
    if (nodes_.empty()) return sides;
    std::vector<std::vector<Vertex>> groups(n_);
    for (Vertex v = 0; v < n_; ++v) groups[v] = {v};
    CollectSides(0, groups, sides);
    for (auto& s : sides) std::sort(s.begin(), s.end());
    return sides;
  }

  // Original-graph capacity annotated on every row.
  std::vector<double> row_capacities() const {
    std::vector<double> caps(rows_);
    for (const auto& node : nodes_) {
      for (const auto& entry : node.entries) {
        for (int k = 0; k < entry.rows(); ++k) {
          caps[entry.row_offset + k] = entry.cut[entry.row_vertex[k]];
        }
      }
    }
    return caps;
  }

  // Picks entry i with probability lambda_i at every level and returns the
  // union of the chosen forests, expanded to original edges.
  std::vector<EdgeId> sample_tree(std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::vector<EdgeId> edges;
    int node = nodes_.empty() ? -1 : 0;
    while (node != -1) {
      const auto& entries = nodes_[node].entries;
      std::vector<double> weights;
      for (const auto& e : entries) weights.push_back(e.lambda);
      std::discrete_distribution<int> pick(weights.begin(), weights.end());
      const auto& entry = entries[pick(rng)];
      edges.insert(edges.end(), entry.link_edge.begin(), entry.link_edge.end());
      node = entry.child;
    }
    std::sort(edges.begin(), edges.end());
    return edges;
  }

  // Bound from E(n) <= nt + tE(n/t).
  static double row_count_bound(int n, int t) {
    if (n <= 1) return 0.0;
    const double levels = t <= 1 ? 1.0 : std::ceil(std::log(n) / std::log(t));
    return 2.0 * t * n * std::max(1.0, levels) + n;
  }

  void write(std::ostream& out) const {
    out << "cflow-hierarchy 1\n";
    out << "vertices " << n_ << " branching " << t_ << " seed " << seed_ << " rows "
        << rows_ << " nodes " << nodes_.size() << "\n";
    char buf[64];
    for (const auto& node : nodes_) {
      out << "node " << node.n << " " << node.entries.size() << "\n";
      for (const auto& e : node.entries) {
        std::snprintf(buf, sizeof buf, "%.17g", e.lambda);
        out << "entry " << buf << " " << e.child << " " << e.row_offset << " "
            << e.cores.size() << " " << e.links.size() << "\n";
        out << "cores";
        for (Vertex c : e.cores) out << " " << c;
        out << "\n";
        for (std::size_t i = 0; i < e.links.size(); ++i) {
          const Link& l = e.links[i];
          const Vertex below = e.forest.parent(l.head) == l.tail ? l.head : l.tail;
          std::snprintf(buf, sizeof buf, "%.17g", e.cut[below]);
          out << "link " << l.tail << " " << l.head << " " << e.link_edge[i] << " "
              << buf << "\n";
        }
      }
    }
  }

  static ForestHierarchy read(std::istream& in) {
    auto fail = [](const std::string& why) -> InputError {
      return InputError("hierarchy file: " + why);
    };
    auto expect = [&](const char* word) {
      std::string tok;
      if (!(in >> tok) || tok != word) throw fail(std::string("expected '") + word + "'");
    };
    expect("cflow-hierarchy");
    int version = 0;
    if (!(in >> version) || version != 1) throw fail("unsupported version");
    ForestHierarchy h;
    std::size_t node_count = 0;
    expect("vertices");
    in >> h.n_;
    expect("branching");
    in >> h.t_;
    expect("seed");
    in >> h.seed_;
    expect("rows");
    in >> h.rows_;
    expect("nodes");
    in >> node_count;
    if (!in || h.n_ < 1) throw fail("bad header");
    h.nodes_.resize(node_count);
    for (auto& node : h.nodes_) {
      std::size_t entries = 0;
      expect("node");
      in >> node.n >> entries;
      if (!in || node.n < 1) throw fail("bad node");
      node.entries.resize(entries);
      for (auto& e : node.entries) {
        std::size_t cores = 0, links = 0;
        expect("entry");
        in >> e.lambda >> e.child >> e.row_offset >> cores >> links;
        if (!in || e.child >= static_cast<int>(node_count)) throw fail("bad entry");
        expect("cores");
        e.cores.resize(cores);
        for (auto& c : e.cores) {
          in >> c;
          if (!in || c < 0 || c >= node.n) throw fail("bad core");
        }
        e.links.resize(links);
        e.link_edge.resize(links);
        std::vector<double> link_cut(links);
        for (std::size_t i = 0; i < links; ++i) {
          expect("link");
          in >> e.links[i].tail >> e.links[i].head >> e.link_edge[i] >> link_cut[i];
          if (!in) throw fail("bad link");
        }
        try {
          e.forest = RootedForest(node.n, e.links, e.cores);
        } catch (const std::invalid_argument& ex) {
          throw fail(ex.what());
        }
        e.cut.assign(node.n, 0.0);
        for (std::size_t i = 0; i < links; ++i) {
          const Link& l = e.links[i];
          const Vertex below = e.forest.parent(l.head) == l.tail ? l.head : l.tail;
          if (!(link_cut[i] > 0.0)) throw fail("nonpositive cut capacity");
          e.cut[below] = link_cut[i];
        }
        e.Finalize(node.n);
      }
    }
    int expected_rows = 0;
    for (std::size_t i = 0; i < h.nodes_.size(); ++i) {
      for (const auto& e : h.nodes_[i].entries) {
        expected_rows += e.rows();
        if (e.child != -1 && (e.child <= static_cast<int>(i) ||
                              h.nodes_[e.child].n != static_cast<int>(e.cores.size()))) {
          throw fail("bad child reference");
        }
      }
    }
    if (expected_rows != h.rows_) throw fail("row count mismatch");
    std::vector<int> stored;
    for (const auto& node : h.nodes_) {
      for (const auto& e : node.entries) stored.push_back(e.row_offset);
    }
    h.AssignRows();
    std::size_t k = 0;
    for (const auto& node : h.nodes_) {
      for (const auto& e : node.entries) {
        if (e.row_offset != stored[k++]) throw fail("row ordering mismatch");
      }
    }
    if (!h.nodes_.empty() && h.nodes_[0].n != h.n_) throw fail("root node size mismatch");
    return h;
  }

  // A single spanning tree as a one-entry hierarchy rooted at root.
  static ForestHierarchy from_spanning_tree(const Graph& g, std::span<const EdgeId> tree,
                                            Vertex root) {
    ForestHierarchy h;
    h.n_ = g.n();
    h.t_ = 1;
    if (g.n() == 1) return h;
    HierarchyEntry e;
    e.cores = {root};
    for (EdgeId id : tree) {
      e.links.push_back({g.edge(id).tail, g.edge(id).head});
      e.link_edge.push_back(id);
    }
    e.forest = RootedForest(g.n(), e.links, e.cores);
    if (e.forest.roots().size() != 1) throw std::invalid_argument("tree is not spanning");
    e.cut = subtree_cut_capacities(e.forest, g);
    e.Finalize(g.n());
    h.nodes_.push_back({g.n(), {std::move(e)}});
    h.AssignRows();
    return h;
  }

  // See build_hierarchy().
  static ForestHierarchy build(const Graph& g, int t, std::uint64_t seed) {
    if (t < 1) throw std::invalid_argument("branching t must be >= 1");
    ForestHierarchy h;
    h.n_ = g.n();
    h.t_ = t;
    h.seed_ = seed;
    std::vector<EdgeId> rep(g.m());
    std::iota(rep.begin(), rep.end(), 0);
    std::mt19937_64 rng(seed);
    h.BuildNode(g, rep, rng);
    h.AssignRows();
    return h;
  }

 private:
  int NodeDepth(int node) const {
    int best = 0;
    for (const auto& e : nodes_[node].entries) {
      if (e.child != -1) best = std::max(best, NodeDepth(e.child));
    }
    return best + 1;
  }

  void ApplyNode(int node, std::span<const double> b, std::span<double> out) const {
    const auto& nd = nodes_[node];
    std::vector<double> sums(nd.n);
    std::vector<double> core_demand;
    for (const auto& e : nd.entries) {
      e.forest.subtree_sums_into(b, sums);
      for (int k = 0; k < e.rows(); ++k) {
        const Vertex v = e.row_vertex[k];
        out[e.row_offset + k] = sums[v] * e.inv_cut[v];
      }
      if (e.child != -1) {
        // Flow on the star edge into core j equals the demand of its component.
        core_demand.resize(e.cores.size());
        for (std::size_t j = 0; j < e.cores.size(); ++j) core_demand[j] = sums[e.cores[j]];
        ApplyNode(e.child, core_demand, out);
      }
    }
  }

  void AdjointNode(int node, std::span<const double> p, std::span<double> out) const {
    const auto& nd = nodes_[node];
    std::fill(out.begin(), out.end(), 0.0);
    std::vector<double> pot(nd.n);
    std::vector<double> prices(nd.n);
    std::vector<double> core_pot;
    for (const auto& e : nd.entries) {
      std::fill(pot.begin(), pot.end(), 0.0);
      if (e.child != -1) {
        core_pot.assign(e.cores.size(), 0.0);
        AdjointNode(e.child, p, core_pot);
        for (std::size_t j = 0; j < e.cores.size(); ++j) pot[e.cores[j]] = core_pot[j];
      }
      for (int k = 0; k < e.rows(); ++k) {
        const Vertex v = e.row_vertex[k];
        prices[v] = p[e.row_offset + k] * e.inv_cut[v];
      }
      e.forest.accumulate_down(prices, pot);
      for (int v = 0; v < nd.n; ++v) out[v] += pot[v];
    }
  }

  void CollectSides(int node, const std::vector<std::vector<Vertex>>& groups,
                    std::vector<std::vector<Vertex>>& sides) const {
    const auto& nd = nodes_[node];
    for (const auto& e : nd.entries) {
      for (int k = 0; k < e.rows(); ++k) {
        for (Vertex v : e.forest.subtree(e.row_vertex[k])) {
          auto& side = sides[e.row_offset + k];
          side.insert(side.end(), groups[v].begin(), groups[v].end());
        }
      }
      if (e.child != -1) {
        std::vector<std::vector<Vertex>> merged(e.cores.size());
        for (Vertex v = 0; v < nd.n; ++v) {
          auto& dst = merged[e.forest.component(v)];
          dst.insert(dst.end(), groups[v].begin(), groups[v].end());
        }
        CollectSides(e.child, merged, sides);
      }
    }
  }

  void AssignRows() {
    rows_ = 0;
    if (!nodes_.empty()) AssignRowsFrom(0);
  }

  void AssignRowsFrom(int node) {
    for (auto& e : nodes_[node].entries) {
      e.row_offset = rows_;
      rows_ += e.rows();
      if (e.child != -1) AssignRowsFrom(e.child);
    }
  }

  static std::vector<Vertex> PickCores(const Graph& g, int count) {
    std::vector<Vertex> order(g.n());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](Vertex a, Vertex b) { return g.degree(a) > g.degree(b); });
    order.resize(count);
    return order;
  }

  // Splits a spanning tree into one component per core: every vertex joins
  // the core nearest in the tree under lengths 1/capacity, so cuts land on
  // low-capacity tree edges.
  static std::vector<int> NearestCore(const Graph& g, std::span<const EdgeId> tree,
                                      std::span<const Vertex> cores) {
    std::vector<std::vector<EdgeId>> adj(g.n());
    for (EdgeId e : tree) {
      adj[g.edge(e).tail].push_back(e);
      adj[g.edge(e).head].push_back(e);
    }
    std::vector<double> dist(g.n(), std::numeric_limits<double>::infinity());
    std::vector<int> label(g.n(), -1);
    using Item = std::tuple<double, int, Vertex>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    for (std::size_t j = 0; j < cores.size(); ++j) {
      dist[cores[j]] = 0.0;
      label[cores[j]] = static_cast<int>(j);
      queue.emplace(0.0, static_cast<int>(j), cores[j]);
    }
    std::vector<char> done(g.n(), 0);
    while (!queue.empty()) {
      auto [d, lab, v] = queue.top();
      queue.pop();
      if (done[v]) continue;
      done[v] = 1;
      for (EdgeId e : adj[v]) {
        const Vertex w = g.other(e, v);
        const double nd = d + 1.0 / g.capacity(e);
        if (!done[w] && (nd < dist[w] || (nd == dist[w] && lab < label[w]))) {
          dist[w] = nd;
          label[w] = lab;
          queue.emplace(nd, lab, w);
        }
      }
    }
    return label;
  }

  // Builds the node for level graph g (whose edge e stands for original edge
  // rep[e]); returns its index, or -1 for a single vertex.
  int BuildNode(const Graph& g, const std::vector<EdgeId>& rep, std::mt19937_64& rng) {
    if (g.n() == 1) return -1;
    const int index = static_cast<int>(nodes_.size());
    nodes_.push_back({g.n(), {}});
    const int core_count = t_ == 1 ? 1 : (g.n() + t_ - 1) / t_;
    const auto cores = PickCores(g, core_count);
    std::uniform_real_distribution<double> jitter(-1.0, 1.0);
    std::vector<double> weights(g.m());
    for (int i = 0; i < t_; ++i) {
      for (EdgeId e = 0; e < g.m(); ++e) {
        const double noise = i == 0 ? 0.0 : jitter(rng);
        weights[e] = g.capacity(e) * std::exp(noise);
      }
      const auto tree = maximum_spanning_tree(g, weights);
      const auto label = NearestCore(g, tree, cores);

      HierarchyEntry entry;
      entry.lambda = 1.0 / t_;
      entry.cores = cores;
      for (EdgeId e : tree) {
        const Edge& ed = g.edge(e);
        if (label[ed.tail] != label[ed.head]) continue;
        entry.links.push_back({ed.tail, ed.head});
        entry.link_edge.push_back(rep[e]);
      }
      entry.forest = RootedForest(g.n(), entry.links, entry.cores);
      entry.cut = subtree_cut_capacities(entry.forest, g);
      entry.Finalize(g.n());

      if (core_count > 1) {
        // Contract each component onto its core, merging parallel edges.
        std::unordered_map<std::int64_t, int> merged;
        std::vector<Edge> child_edges;
        std::vector<EdgeId> child_rep;
        std::vector<double> rep_cap;
        for (EdgeId e = 0; e < g.m(); ++e) {
          int a = label[g.edge(e).tail];
          int b = label[g.edge(e).head];
          if (a == b) continue;
          if (a > b) std::swap(a, b);
          const std::int64_t key = static_cast<std::int64_t>(a) * core_count + b;
          auto [it, fresh] = merged.try_emplace(key, static_cast<int>(child_edges.size()));
          if (fresh) {
            child_edges.push_back({a, b, 0.0});
            child_rep.push_back(rep[e]);
            rep_cap.push_back(g.capacity(e));
          } else if (g.capacity(e) > rep_cap[it->second]) {
            child_rep[it->second] = rep[e];
            rep_cap[it->second] = g.capacity(e);
          }
          child_edges[it->second].capacity += g.capacity(e);
        }
        Graph child(core_count, std::move(child_edges));
        entry.child = BuildNode(child, child_rep, rng);
      }
      nodes_[index].entries.push_back(std::move(entry));
    }
    return index;
  }

  int n_ = 0;
  int t_ = 1;
  std::uint64_t seed_ = 0;
  int rows_ = 0;
  std::vector<HierarchyNode> nodes_;
};

// Heuristic hierarchy: at each level, t perturbed maximum-weight spanning
// trees are cut into forests around the ceil(n/t) highest-degree vertices,
// each forest is contracted onto its cores, and the contracted graph is
// processed recursively. Forest edges carry original-graph cut capacities, so
// every row is an exact cut congestion b_S / c_S. Deterministic under seed.
inline ForestHierarchy build_hierarchy(const Graph& g, int t, std::uint64_t seed) {
  return ForestHierarchy::build(g, t, seed);
}

inline int default_branching(int n) {
  return std::max(2, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))));
}

class HierarchyApproximator : public CongestionApproximator {
 public:
  HierarchyApproximator(ForestHierarchy hierarchy, double alpha)
      : hierarchy_(std::move(hierarchy)), alpha_(alpha) {
    if (!(alpha >= 1.0)) throw std::invalid_argument("alpha must be >= 1");
  }

  int vertices() const override { return hierarchy_.n(); }
  int rows() const override { return hierarchy_.rows(); }
  double alpha_claimed() const override { return alpha_; }
  std::string name() const override { return "hierarchy"; }

  void apply_into(std::span<const double> b, std::span<double> out) const override {
    hierarchy_.apply_into(b, out);
  }
  void apply_adjoint_into(std::span<const double> p, std::span<double> out) const override {
    hierarchy_.adjoint_into(p, out);
  }

  const ForestHierarchy& hierarchy() const noexcept { return hierarchy_; }
  void set_alpha(double alpha) {
    if (!(alpha >= 1.0)) throw std::invalid_argument("alpha must be >= 1");
    alpha_ = alpha;
  }

 private:
  ForestHierarchy hierarchy_;
  double alpha_;
};

}  // namespace cflow
