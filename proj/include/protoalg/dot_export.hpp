#pragma once

#include <string>

#include "protoalg/semantics.hpp"

namespace protoalg {

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace detail

// Component graphs as a DOT digraph: one cluster per component, vertices
// labeled "id:symbol", the root drawn bold, predicate out-edges labeled.
inline std::string export_dot(const ProtoAlgorithm& a) {
  std::string out = "digraph model {\n  rankdir=LR;\n";
  for (int c = 0; c < a.component_count(); ++c) {
    const auto& g = a.components[static_cast<std::size_t>(c)];
    out += "  subgraph cluster_c" + std::to_string(c + 1) + " {\n";
    out += "    label=\"component " + std::to_string(c + 1) + (g.is_main ? " (main)" : "") + "\";\n";
    for (int v = 0; v < g.vertex_count(); ++v) {
      out += "    \"c" + std::to_string(c + 1) + "_" + detail::dot_escape(g.vertex_ids[static_cast<std::size_t>(v)]) +
             "\" [label=\"" + detail::dot_escape(g.vertex_ids[static_cast<std::size_t>(v)]) + ":" +
             detail::dot_escape(g.label[static_cast<std::size_t>(v)]) + "\"";
      if (v == g.root) out += ", style=bold";
      out += "];\n";
    }
    out += "  }\n";
  }
  for (int c = 0; c < a.component_count(); ++c) {
    const auto& g = a.components[static_cast<std::size_t>(c)];
    for (int v = 0; v < g.vertex_count(); ++v)
      for (const Edge& e : g.out[static_cast<std::size_t>(v)]) {
        out += "  \"c" + std::to_string(c + 1) + "_" + detail::dot_escape(g.vertex_ids[static_cast<std::size_t>(v)]) +
               "\" -> \"c" + std::to_string(c + 1) + "_" +
               detail::dot_escape(g.vertex_ids[static_cast<std::size_t>(e.to)]) + "\"";
        if (e.label != -1) out += " [label=\"" + std::to_string(e.label) + "\"]";
        out += ";\n";
      }
  }
  out += "}\n";
  return out;
}

// State graphs: states labeled canonically, kinds shaped distinctly,
// stuck states flagged red.
inline std::string export_dot(const ProtoAlgorithm& a, const StateGraph& g) {
  std::string out = "digraph states {\n  rankdir=LR;\n";
  std::vector<char> is_stuck(static_cast<std::size_t>(g.size()), 0);
  for (int s : g.stuck) is_stuck[static_cast<std::size_t>(s)] = 1;
  for (int i = 0; i < g.size(); ++i) {
    const State& s = g.states[static_cast<std::size_t>(i)];
    const char* shape = s.kind() == State::Kind::Initial  ? "diamond"
                        : s.kind() == State::Kind::Final ? "doublecircle"
                                                          : "ellipse";
    out += "  s" + std::to_string(i) + " [label=\"" + detail::dot_escape(state_to_string(a, s)) +
           "\", shape=" + shape;
    if (is_stuck[static_cast<std::size_t>(i)]) out += ", color=red";
    out += "];\n";
  }
  for (int i = 0; i < g.size(); ++i)
    for (int t : g.succ[static_cast<std::size_t>(i)])
      out += "  s" + std::to_string(i) + " -> s" + std::to_string(t) + ";\n";
  out += "}\n";
  return out;
}

}  // namespace protoalg
