#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "cflow/graph.hpp"

// Text formats. Vertices are 1-indexed on disk and 0-indexed in memory.
namespace cflow {

class FileError : public Error {
 public:
  using Error::Error;
};

enum class GraphFormat { kAuto, kDimacs, kEdgeList };

struct GraphFile {
  Graph graph;
  std::optional<Vertex> source;  // from DIMACS "n id s"
  std::optional<Vertex> sink;    // from DIMACS "n id t"
};

namespace detail {

inline std::string Trimmed(const std::string& line) {
  const auto first = line.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = line.find_last_not_of(" \t\r");
  return line.substr(first, last - first + 1);
}

[[noreturn]] inline void Malformed(const std::string& where, int line, const std::string& what) {
  throw InputError(where + ":" + std::to_string(line) + ": " + what);
}

inline Vertex ParseVertex(long id, long n, const std::string& where, int line) {
  if (id < 1 || (n > 0 && id > n)) Malformed(where, line, "vertex id out of range");
  return static_cast<Vertex>(id - 1);
}

inline std::ifstream OpenOrThrow(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open " + path);
  return in;
}

}  // namespace detail

// DIMACS max-flow: "c" comments, "p max n m", "n id s|t", "a u v cap".
// Arcs become undirected edges oriented u -> v.
inline GraphFile read_dimacs(std::istream& in, const std::string& where = "<dimacs>") {
  long n = -1, m = -1;
  std::vector<Edge> edges;
  std::optional<Vertex> s, t;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = detail::Trimmed(raw);
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ls(line);
    char tag = 0;
    ls >> tag;
    if (tag == 'p') {
      std::string kind;
      if (n >= 0) detail::Malformed(where, lineno, "duplicate problem line");
      if (!(ls >> kind >> n >> m) || kind != "max" || n < 1 || m < 0) {
        detail::Malformed(where, lineno, "expected 'p max <n> <m>'");
      }
    } else if (tag == 'n') {
      long id;
      char which = 0;
      if (n < 0) detail::Malformed(where, lineno, "node line before problem line");
      if (!(ls >> id >> which)) detail::Malformed(where, lineno, "expected 'n <id> s|t'");
      const Vertex v = detail::ParseVertex(id, n, where, lineno);
      if (which == 's') {
        s = v;
      } else if (which == 't') {
        t = v;
      } else {
        detail::Malformed(where, lineno, "node designator must be s or t");
      }
    } else if (tag == 'a') {
      long u, v;
      double cap;
      if (n < 0) detail::Malformed(where, lineno, "arc line before problem line");
      if (!(ls >> u >> v >> cap)) detail::Malformed(where, lineno, "expected 'a <u> <v> <cap>'");
      edges.push_back({detail::ParseVertex(u, n, where, lineno),
                       detail::ParseVertex(v, n, where, lineno), cap});
    } else {
      detail::Malformed(where, lineno, std::string("unknown line type '") + tag + "'");
    }
  }
  if (n < 0) throw InputError(where + ": missing problem line");
  if (static_cast<long>(edges.size()) != m) {
    throw InputError(where + ": problem line promises " + std::to_string(m) + " arcs, found " +
                     std::to_string(edges.size()));
  }
  return GraphFile{Graph(static_cast<int>(n), std::move(edges)), s, t};
}

// Edge list: "u v cap" per line, '#' comments, n = largest id seen.
inline GraphFile read_edge_list(std::istream& in, const std::string& where = "<edges>") {
  std::vector<Edge> edges;
  long n = 0;
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = detail::Trimmed(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    std::istringstream ls(line);
    long u, v;
    double cap;
    std::string extra;
    if (!(ls >> u >> v >> cap) || (ls >> extra)) {
      detail::Malformed(where, lineno, "expected '<u> <v> <cap>'");
    }
    edges.push_back({detail::ParseVertex(u, 0, where, lineno),
                     detail::ParseVertex(v, 0, where, lineno), cap});
    n = std::max({n, u, v});
  }
  if (n == 0) throw InputError(where + ": no edges");
  return GraphFile{Graph(static_cast<int>(n), std::move(edges)), {}, {}};
}

inline GraphFormat detect_format(std::istream& in) {
  std::string raw;
  while (std::getline(in, raw)) {
    const std::string line = detail::Trimmed(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == 'c' || line[0] == 'p') return GraphFormat::kDimacs;
    return GraphFormat::kEdgeList;
  }
  return GraphFormat::kEdgeList;
}

inline GraphFile load_graph(const std::string& path, GraphFormat format = GraphFormat::kAuto) {
  if (format == GraphFormat::kAuto) {
    auto probe = detail::OpenOrThrow(path);
    format = detect_format(probe);
  }
  auto in = detail::OpenOrThrow(path);
  return format == GraphFormat::kDimacs ? read_dimacs(in, path) : read_edge_list(in, path);
}

// "vertex value" lines; unlisted vertices get 0; repeated vertices add up.
inline Demands read_demands(std::istream& in, int n, const std::string& where = "<demands>") {
  Demands b(n, 0.0);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = detail::Trimmed(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    std::istringstream ls(line);
    long id;
    double value;
    std::string extra;
    if (!(ls >> id >> value) || (ls >> extra) || !std::isfinite(value)) {
      detail::Malformed(where, lineno, "expected '<vertex> <value>'");
    }
    b[detail::ParseVertex(id, n, where, lineno)] += value;
  }
  double sum = 0.0, norm = 0.0;
  for (double x : b) {
    sum += x;
    norm += std::abs(x);
  }
  if (std::abs(sum) > 1e-9 * norm) throw InputError(where + ": demands do not sum to zero");
  return b;
}

inline Demands load_demands(const std::string& path, int n) {
  auto in = detail::OpenOrThrow(path);
  return read_demands(in, n, path);
}

namespace detail {

inline std::string Number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace detail

inline void write_edge_list(std::ostream& out, const Graph& g) {
  for (const Edge& e : g.edges()) {
    out << e.tail + 1 << ' ' << e.head + 1 << ' ' << detail::Number(e.capacity) << '\n';
  }
}

inline void write_dimacs(std::ostream& out, const Graph& g, std::optional<Vertex> s = {},
                         std::optional<Vertex> t = {}) {
  out << "p max " << g.n() << ' ' << g.m() << '\n';
  if (s) out << "n " << *s + 1 << " s\n";
  if (t) out << "n " << *t + 1 << " t\n";
  for (const Edge& e : g.edges()) {
    out << "a " << e.tail + 1 << ' ' << e.head + 1 << ' ' << detail::Number(e.capacity) << '\n';
  }
}

inline void write_demands(std::ostream& out, std::span<const double> b) {
  for (std::size_t v = 0; v < b.size(); ++v) {
    if (b[v] != 0.0) out << v + 1 << ' ' << detail::Number(b[v]) << '\n';
  }
}

}  // namespace cflow
