#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "protoalg/alphabet.hpp"
#include "protoalg/diagnostics.hpp"

namespace protoalg {

struct RawVertex {
  std::string id;
  std::string label;
};

struct RawEdge {
  std::string from;
  std::string to;
  int label = -1;  // -1 = unlabeled, otherwise 0/1
};

struct RawGraph {
  std::vector<RawVertex> vertices;
  std::vector<RawEdge> edges;
  std::string root;
  std::optional<bool> declared_main;
  bool nondet_allowed = false;
};

struct Edge {
  int to = -1;
  int label = -1;  // -1 = unlabeled

  friend bool operator<(const Edge& a, const Edge& b) {
    return a.to != b.to ? a.to < b.to : a.label < b.label;
  }
};

// One rooted labeled digraph encoding a single thread of control.  Vertices
// carry symbols of the alphabet; predicate out-edges carry 0/1.
struct ComponentGraph {
  std::vector<std::string> vertex_ids;  // declared order
  std::unordered_map<std::string, int> vertex_index;
  std::vector<std::string> label;       // per vertex
  std::vector<SymbolKind> label_kind;   // per vertex
  std::vector<std::vector<Edge>> out;   // sorted
  std::vector<int> indegree;
  int root = 0;
  bool is_main = false;        // root labeled ini
  bool nondet_allowed = false;

  int vertex_count() const { return static_cast<int>(vertex_ids.size()); }

  int index_of(const std::string& id) const {
    auto it = vertex_index.find(id);
    return it == vertex_index.end() ? -1 : it->second;
  }

  int outdegree(int v) const { return static_cast<int>(out[static_cast<std::size_t>(v)].size()); }

  const Edge* edge_with_label(int v, int lab) const {
    for (const Edge& e : out[static_cast<std::size_t>(v)])
      if (e.label == lab) return &e;
    return nullptr;
  }

  // No function vertex branches.
  bool deterministic() const {
    for (int v = 0; v < vertex_count(); ++v) {
      if (label_kind[static_cast<std::size_t>(v)] == SymbolKind::Predicate) continue;
      if (label[static_cast<std::size_t>(v)] == kFin) continue;
      if (outdegree(v) > 1) return false;
    }
    return true;
  }
};

namespace detail {

// A cycle of predicate-labeled vertices, if one exists.  The structural
// conditions already forbid ini/fin inside cycles (roots have indegree 0,
// fin vertices outdegree 0), so a cycle avoids function vertices exactly
// when it stays within the predicate-labeled subgraph.
inline std::optional<std::vector<int>> predicate_cycle(const ComponentGraph& g) {
  const int n = g.vertex_count();
  std::vector<int> color(static_cast<std::size_t>(n), 0);  // 0 white, 1 on path, 2 done
  std::vector<int> path_pos(static_cast<std::size_t>(n), -1);
  std::vector<int> path;
  std::vector<std::pair<int, std::size_t>> frames;  // (vertex, next out-edge)

  auto enter = [&](int v) {
    color[static_cast<std::size_t>(v)] = 1;
    path_pos[static_cast<std::size_t>(v)] = static_cast<int>(path.size());
    path.push_back(v);
    frames.emplace_back(v, 0);
  };

  for (int start = 0; start < n; ++start) {
    if (g.label_kind[static_cast<std::size_t>(start)] != SymbolKind::Predicate) continue;
    if (color[static_cast<std::size_t>(start)] != 0) continue;
    enter(start);
    while (!frames.empty()) {
      int v = frames.back().first;
      const auto& edges = g.out[static_cast<std::size_t>(v)];
      bool descended = false;
      while (frames.back().second < edges.size()) {
        int w = edges[frames.back().second++].to;
        if (g.label_kind[static_cast<std::size_t>(w)] != SymbolKind::Predicate) continue;
        if (color[static_cast<std::size_t>(w)] == 1) {
          std::vector<int> cyc(path.begin() + path_pos[static_cast<std::size_t>(w)], path.end());
          cyc.push_back(w);
          return cyc;
        }
        if (color[static_cast<std::size_t>(w)] == 0) {
          enter(w);
          descended = true;
          break;
        }
      }
      if (!descended) {
        color[static_cast<std::size_t>(v)] = 2;
        path.pop_back();
        frames.pop_back();
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

// Validates every structural clause of a component graph and reports each
// violation with its witness.  Identity-level problems (unknown ids, bad
// labels) suppress the structural pass, which could not interpret them.
inline Validated<ComponentGraph> validate_component_graph(const RawGraph& raw, const Alphabet& alphabet,
                                                          bool nondet_allowed,
                                                          const std::string& where_prefix = "component") {
  Validated<ComponentGraph> result;
  auto err = [&](std::string code, std::string where, std::string msg) {
    result.diags.push_back(make_error(std::move(code), where_prefix + "/" + where, std::move(msg)));
  };

  ComponentGraph g;
  g.nondet_allowed = nondet_allowed;

  if (raw.vertices.empty()) {
    err("EmptyGraph", "vertices", "a component graph needs at least one vertex");
    return result;
  }

  bool identity_ok = true;
  for (const auto& v : raw.vertices) {
    if (v.id.empty()) {
      err("DuplicateId", "vertices", "vertex ids must be non-empty");
      identity_ok = false;
      continue;
    }
    if (!g.vertex_index.emplace(v.id, static_cast<int>(g.vertex_ids.size())).second) {
      err("DuplicateId", "vertices/" + v.id, "vertex id declared twice");
      identity_ok = false;
      continue;
    }
    g.vertex_ids.push_back(v.id);
    g.label.push_back(v.label);
    if (!alphabet.contains(v.label)) {
      err("UnknownVertexLabel", "vertices/" + v.id, "label '" + v.label + "' is not a symbol of the alphabet");
      identity_ok = false;
      g.label_kind.push_back(SymbolKind::Processing);
    } else {
      g.label_kind.push_back(alphabet.kind_of(v.label));
    }
  }

  const int n = static_cast<int>(g.vertex_ids.size());
  g.out.assign(static_cast<std::size_t>(n), {});
  g.indegree.assign(static_cast<std::size_t>(n), 0);

  std::set<std::pair<int, int>> seen_edges;
  for (const auto& e : raw.edges) {
    int a = g.index_of(e.from), b = g.index_of(e.to);
    std::string ename = e.from + "->" + e.to;
    if (a < 0 || b < 0) {
      err("UnknownVertex", "edges/" + ename, "edge endpoint is not a declared vertex");
      identity_ok = false;
      continue;
    }
    if (!seen_edges.emplace(a, b).second) {
      err("DuplicateEdge", "edges/" + ename, "edge declared twice");
      identity_ok = false;
      continue;
    }
    if (e.label != -1 && e.label != 0 && e.label != 1) {
      err("InvalidEdgeLabel", "edges/" + ename, "edge labels must be 0 or 1");
      identity_ok = false;
      continue;
    }
    g.out[static_cast<std::size_t>(a)].push_back(Edge{b, e.label});
    g.indegree[static_cast<std::size_t>(b)] += 1;
  }

  g.root = g.index_of(raw.root);
  if (g.root < 0) {
    err("UnknownVertex", "root", "root '" + raw.root + "' is not a declared vertex");
    identity_ok = false;
  }

  if (!identity_ok) return result;

  for (auto& edges : g.out) std::sort(edges.begin(), edges.end());

  // Structural clauses.
  for (int v = 0; v < n; ++v) {
    bool zero_in = g.indegree[static_cast<std::size_t>(v)] == 0;
    if (v == g.root && !zero_in)
      err("RootIndegree", "vertices/" + g.vertex_ids[static_cast<std::size_t>(v)],
          "the root must have indegree 0");
    if (v != g.root && zero_in)
      err("RootIndegree", "vertices/" + g.vertex_ids[static_cast<std::size_t>(v)],
          "only the root may have indegree 0");
  }

  for (int v = 0; v < n; ++v) {
    const std::string& vid = g.vertex_ids[static_cast<std::size_t>(v)];
    const std::string& lab = g.label[static_cast<std::size_t>(v)];
    const auto& edges = g.out[static_cast<std::size_t>(v)];
    const int outdeg = static_cast<int>(edges.size());

    if (lab == kIni && v != g.root) {
      err("IniNotAtRoot", "vertices/" + vid, "only the root may be labeled ini");
      continue;
    }
    if (lab == kFin) {
      if (outdeg != 0) err("FinHasOutEdges", "vertices/" + vid, "fin vertices must have outdegree 0");
      continue;
    }
    if (g.label_kind[static_cast<std::size_t>(v)] == SymbolKind::Predicate) {
      if (outdeg != 2) {
        err("PredicateOutdegree", "vertices/" + vid, "predicate vertices must have outdegree exactly 2");
        continue;
      }
      if (edges[0].label == -1 || edges[1].label == -1) {
        err("PredicateEdgeUnlabeled", "vertices/" + vid, "both predicate out-edges must be labeled");
        continue;
      }
      if (edges[0].label == edges[1].label)
        err("PredicateEdgeLabelsEqual", "vertices/" + vid, "predicate out-edges must carry distinct labels");
      continue;
    }
    // ini or a function symbol: outdegree 1 (exactly), or >= 1 when the
    // non-deterministic rule is in force; out-edges unlabeled either way.
    if (nondet_allowed ? (outdeg < 1) : (outdeg != 1)) {
      err("FunctionOutdegree", "vertices/" + vid,
          nondet_allowed ? "function vertices must have outdegree >= 1"
                         : "function vertices must have outdegree exactly 1");
    }
    for (const auto& e : edges)
      if (e.label != -1)
        err("FunctionEdgeLabeled", "edges/" + vid + "->" + g.vertex_ids[static_cast<std::size_t>(e.to)],
            "out-edges of function vertices must be unlabeled");
  }

  g.is_main = g.label[static_cast<std::size_t>(g.root)] == kIni;
  bool has_fin = false;
  for (int v = 0; v < n; ++v) has_fin = has_fin || g.label[static_cast<std::size_t>(v)] == kFin;
  if (g.is_main != has_fin)
    err("MainIffFin", "root",
        g.is_main ? "root is labeled ini but no vertex is labeled fin"
                  : "a vertex is labeled fin but the root is not labeled ini");

  if (auto cyc = detail::predicate_cycle(g)) {
    std::string path;
    for (int v : *cyc) {
      if (!path.empty()) path += "->";
      path += g.vertex_ids[static_cast<std::size_t>(v)];
    }
    err("CycleWithoutFunctionVertex", "cycle/" + path,
        "every cycle must contain a vertex labeled with a plain processing, setting or getting symbol");
  }

  if (raw.declared_main.has_value() && *raw.declared_main != g.is_main)
    err("MainFlagMismatch", "main",
        g.is_main ? "component is a main component graph but declared main=false"
                  : "component is not a main component graph but declared main=true");

  if (result.error_count() == 0) result.value = std::move(g);
  return result;
}

}  // namespace protoalg
