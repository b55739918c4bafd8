#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "protoalg/proto_algorithm.hpp"

namespace protoalg {

using json = nlohmann::json;

// The parsed document, structured but not yet validated.
struct RawModel {
  RawAlphabet alphabet;
  RawDomains domains;
  RawInterpretation interp;
  std::vector<RawGraph> components;
  json provenance;  // null when absent
};

namespace detail {

inline bool token_from(const json& j, std::string& out) {
  if (j.is_string()) {
    out = j.get<std::string>();
    return true;
  }
  if (j.is_number_integer()) {
    out = std::to_string(j.get<long long>());
    return true;
  }
  return false;
}

}  // namespace detail

// Parses the JSON-compatible model document.  Every diagnostic carries the
// document path of the offending element.
inline Validated<RawModel> parse_model(const std::string& text) {
  Validated<RawModel> result;
  auto err = [&](std::string code, std::string where, std::string msg) {
    result.diags.push_back(make_error(std::move(code), std::move(where), std::move(msg)));
  };

  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    err("SyntaxError", "byte " + std::to_string(e.byte), e.what());
    return result;
  }
  if (!doc.is_object()) {
    err("SyntaxError", "/", "the model document must be a JSON object");
    return result;
  }

  RawModel model;
  for (const auto& [key, value] : doc.items()) {
    if (key != "alphabet" && key != "domains" && key != "interpretation" && key != "components" &&
        key != "provenance")
      err("UnknownField", "/" + key, "unknown top-level field");
  }
  for (const char* req : {"alphabet", "domains", "interpretation", "components"})
    if (!doc.contains(req)) err("MissingField", std::string("/") + req, "required block is missing");
  if (result.error_count() > 0) return result;

  auto token_list = [&](const json& j, const std::string& where, std::vector<std::string>& out) {
    if (!j.is_array()) {
      err("SyntaxError", where, "expected an array of tokens");
      return;
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
      std::string tok;
      if (!detail::token_from(j[i], tok))
        err("SyntaxError", where + "/" + std::to_string(i), "tokens are strings or integer literals");
      else
        out.push_back(tok);
    }
  };

  {
    const json& a = doc["alphabet"];
    if (!a.is_object()) {
      err("SyntaxError", "/alphabet", "expected an object");
    } else {
      for (const auto& [key, value] : a.items())
        if (key != "processing" && key != "setting" && key != "getting" && key != "predicate")
          err("UnknownField", "/alphabet/" + key, "unknown field");
      if (a.contains("processing")) token_list(a["processing"], "/alphabet/processing", model.alphabet.processing);
      if (a.contains("setting")) token_list(a["setting"], "/alphabet/setting", model.alphabet.setting);
      if (a.contains("getting")) token_list(a["getting"], "/alphabet/getting", model.alphabet.getting);
      if (a.contains("predicate")) token_list(a["predicate"], "/alphabet/predicate", model.alphabet.predicate);
    }
  }

  {
    const json& d = doc["domains"];
    if (!d.is_object()) {
      err("SyntaxError", "/domains", "expected an object");
    } else {
      for (const auto& [key, value] : d.items())
        if (key != "main" && key != "input" && key != "output")
          err("UnknownField", "/domains/" + key, "unknown field");
      for (const char* req : {"main", "input", "output"})
        if (!d.contains(req)) err("MissingField", std::string("/domains/") + req, "domain list is missing");
      if (d.contains("main")) token_list(d["main"], "/domains/main", model.domains.main);
      if (d.contains("input")) token_list(d["input"], "/domains/input", model.domains.input);
      if (d.contains("output")) token_list(d["output"], "/domains/output", model.domains.output);
    }
  }

  {
    const json& in = doc["interpretation"];
    if (!in.is_object()) {
      err("SyntaxError", "/interpretation", "expected an object");
    } else {
      for (const auto& [key, value] : in.items())
        if (key != "bottom_policy" && key != "tables")
          err("UnknownField", "/interpretation/" + key, "unknown field");
      if (in.contains("bottom_policy")) {
        if (!in["bottom_policy"].is_string())
          err("SyntaxError", "/interpretation/bottom_policy", "expected a string");
        else
          model.interp.bottom_policy = in["bottom_policy"].get<std::string>();
      }
      if (!in.contains("tables") || !in["tables"].is_object()) {
        err("MissingField", "/interpretation/tables", "expected an object of tables");
      } else {
        for (const auto& [sym, tab] : in["tables"].items()) {
          const std::string where = "/interpretation/tables/" + sym;
          if (!tab.is_object()) {
            err("SyntaxError", where, "a table is an object of rows");
            continue;
          }
          RawTable raw_table;
          bool saw_scalar = false, saw_object = false;
          for (const auto& [arg, res] : tab.items()) {
            if (res.is_object()) {
              saw_object = true;
              for (const auto& [arg2, res2] : res.items()) {
                std::string tok;
                if (!detail::token_from(res2, tok))
                  err("SyntaxError", where + "/" + arg + "/" + arg2, "row values are tokens");
                else
                  raw_table.binary_rows.emplace_back(arg, arg2, tok);
              }
            } else {
              saw_scalar = true;
              std::string tok;
              if (!detail::token_from(res, tok))
                err("SyntaxError", where + "/" + arg, "row values are tokens");
              else
                raw_table.unary_rows.emplace_back(arg, tok);
            }
          }
          if (saw_scalar && saw_object)
            err("SyntaxError", where, "a table mixes unary and binary rows");
          raw_table.binary = saw_object;
          model.interp.tables.emplace(sym, std::move(raw_table));
        }
      }
    }
  }

  {
    const json& cs = doc["components"];
    if (!cs.is_array()) {
      err("SyntaxError", "/components", "expected an array of components");
    } else {
      for (std::size_t c = 0; c < cs.size(); ++c) {
        const std::string where = "/components/" + std::to_string(c);
        const json& comp = cs[c];
        RawGraph g;
        if (!comp.is_object()) {
          err("SyntaxError", where, "expected an object");
          continue;
        }
        for (const auto& [key, value] : comp.items())
          if (key != "vertices" && key != "edges" && key != "root" && key != "main" && key != "nondet")
            err("UnknownField", where + "/" + key, "unknown field");
        if (comp.contains("main")) {
          if (!comp["main"].is_boolean())
            err("SyntaxError", where + "/main", "expected a boolean");
          else
            g.declared_main = comp["main"].get<bool>();
        }
        if (comp.contains("nondet")) {
          if (!comp["nondet"].is_boolean())
            err("SyntaxError", where + "/nondet", "expected a boolean");
          else
            g.nondet_allowed = comp["nondet"].get<bool>();
        }
        if (!comp.contains("root") || !detail::token_from(comp["root"], g.root))
          err("MissingField", where + "/root", "a root vertex id is required");
        if (!comp.contains("vertices") || !comp["vertices"].is_array()) {
          err("MissingField", where + "/vertices", "expected an array of vertices");
        } else {
          const json& vs = comp["vertices"];
          for (std::size_t i = 0; i < vs.size(); ++i) {
            const std::string vw = where + "/vertices/" + std::to_string(i);
            RawVertex v;
            if (!vs[i].is_object() || !vs[i].contains("id") || !vs[i].contains("label") ||
                !detail::token_from(vs[i]["id"], v.id) || !detail::token_from(vs[i]["label"], v.label)) {
              err("SyntaxError", vw, "a vertex is an object with 'id' and 'label'");
              continue;
            }
            for (const auto& [key, value] : vs[i].items())
              if (key != "id" && key != "label") err("UnknownField", vw + "/" + key, "unknown field");
            g.vertices.push_back(std::move(v));
          }
        }
        if (comp.contains("edges")) {
          if (!comp["edges"].is_array()) {
            err("SyntaxError", where + "/edges", "expected an array of edges");
          } else {
            const json& es = comp["edges"];
            for (std::size_t i = 0; i < es.size(); ++i) {
              const std::string ew = where + "/edges/" + std::to_string(i);
              RawEdge e;
              if (!es[i].is_object() || !es[i].contains("from") || !es[i].contains("to") ||
                  !detail::token_from(es[i]["from"], e.from) || !detail::token_from(es[i]["to"], e.to)) {
                err("SyntaxError", ew, "an edge is an object with 'from' and 'to'");
                continue;
              }
              for (const auto& [key, value] : es[i].items())
                if (key != "from" && key != "to" && key != "label")
                  err("UnknownField", ew + "/" + key, "unknown field");
              if (es[i].contains("label")) {
                if (!es[i]["label"].is_number_integer()) {
                  err("SyntaxError", ew + "/label", "edge labels are the integers 0 and 1");
                  continue;
                }
                long long lab = es[i]["label"].get<long long>();
                if (lab != 0 && lab != 1) {
                  err("InvalidEdgeLabel", ew + "/label", "edge labels are the integers 0 and 1");
                  continue;
                }
                e.label = static_cast<int>(lab);
              }
              g.edges.push_back(std::move(e));
            }
          }
        }
        model.components.push_back(std::move(g));
      }
    }
  }

  if (doc.contains("provenance")) model.provenance = doc["provenance"];

  if (result.error_count() == 0) result.value = std::move(model);
  return result;
}

struct LoadOptions {
  ValidationLevel level = ValidationLevel::Strict;
  std::optional<BottomPolicy> policy_override;
};

inline Validated<ProtoAlgorithm> validate_raw_model(const RawModel& raw, const LoadOptions& opts = {}) {
  Validated<ProtoAlgorithm> result;

  auto alpha = validate_alphabet(raw.alphabet);
  for (auto& d : alpha.diags) result.diags.push_back(d);
  if (!alpha.ok()) return result;

  std::vector<ComponentGraph> graphs;
  bool graphs_ok = true;
  for (std::size_t i = 0; i < raw.components.size(); ++i) {
    auto g = validate_component_graph(raw.components[i], *alpha, raw.components[i].nondet_allowed,
                                      "components/" + std::to_string(i));
    for (auto& d : g.diags) result.diags.push_back(d);
    if (g.ok())
      graphs.push_back(*g);
    else
      graphs_ok = false;
  }

  RawInterpretation interp = raw.interp;
  if (opts.policy_override)
    interp.bottom_policy = bottom_policy_name(*opts.policy_override);
  auto in = validate_interpretation(raw.domains, interp, *alpha, opts.level);
  for (auto& d : in.diags) result.diags.push_back(d);

  if (!graphs_ok || !in.ok() || result.error_count() > 0) return result;

  auto model = validate_proto_algorithm(*alpha, std::move(graphs), *in, opts.level);
  for (auto& d : model.diags) result.diags.push_back(d);
  if (result.error_count() == 0) result.value = std::move(*model.value);
  return result;
}

inline Validated<ProtoAlgorithm> load_model_text(const std::string& text, const LoadOptions& opts = {},
                                                 RawModel* raw_out = nullptr) {
  auto raw = parse_model(text);
  if (!raw.ok()) {
    Validated<ProtoAlgorithm> result;
    result.diags = std::move(raw.diags);
    return result;
  }
  if (raw_out) *raw_out = *raw;
  auto validated = validate_raw_model(*raw, opts);
  return validated;
}

inline std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Validated<ProtoAlgorithm> load_model_file(const std::string& path, const LoadOptions& opts = {},
                                                 RawModel* raw_out = nullptr) {
  auto text = read_file(path);
  if (!text) {
    Validated<ProtoAlgorithm> result;
    result.diags.push_back(make_error("FileError", path, "cannot read file"));
    return result;
  }
  return load_model_text(*text, opts, raw_out);
}

// Canonical serialization: object keys sorted, list-valued blocks in
// declared order, values rendered as strings (predicate results and edge
// labels as integers).  parse(serialize(m)) == m byte-for-byte again.
inline std::string serialize_model(const ProtoAlgorithm& a, const json& provenance = json()) {
  json doc;
  doc["alphabet"] = {{"processing", a.alphabet.processing},
                     {"setting", a.alphabet.setting},
                     {"getting", a.alphabet.getting},
                     {"predicate", a.alphabet.predicate}};
  doc["domains"] = {{"main", a.interp.main_domain.tokens},
                    {"input", a.interp.input_domain.tokens},
                    {"output", a.interp.output_domain.tokens}};

  json tables(json::value_t::object);
  auto unary_json = [&](const Interpretation::Unary& t, const Domain& arg, const Domain& res) {
    json rows(json::value_t::object);
    for (ValueId v = kBot; v < arg.size(); ++v) {
      ValueId r = t.row[static_cast<std::size_t>(v + 1)];
      if (r == kNone) continue;
      rows[arg.token_of(v)] = res.token_of(r);
    }
    return rows;
  };
  for (const auto& f : a.alphabet.processing) {
    if (f == kIni)
      tables[f] = unary_json(a.interp.unary.at(f), a.interp.input_domain, a.interp.main_domain);
    else if (f == kFin)
      tables[f] = unary_json(a.interp.unary.at(f), a.interp.main_domain, a.interp.output_domain);
    else
      tables[f] = unary_json(a.interp.unary.at(f), a.interp.main_domain, a.interp.main_domain);
  }
  for (const auto& p : a.alphabet.predicate) {
    json rows(json::value_t::object);
    const auto& t = a.interp.pred.at(p);
    for (ValueId v = kBot; v < a.interp.main_domain.size(); ++v) {
      ValueId r = t.row[static_cast<std::size_t>(v + 1)];
      if (r == kNone) continue;
      rows[a.interp.main_domain.token_of(v)] = static_cast<int>(r);
    }
    tables[p] = rows;
  }
  auto binary_json = [&](const Interpretation::Binary& t) {
    json rows(json::value_t::object);
    const Domain& D = a.interp.main_domain;
    for (ValueId x = kBot; x < D.size(); ++x) {
      json inner(json::value_t::object);
      for (ValueId y = kBot; y < D.size(); ++y) {
        ValueId r = t.at(x, y);
        if (r == kNone) continue;
        inner[D.token_of(y)] = D.token_of(r);
      }
      if (!inner.empty()) rows[D.token_of(x)] = inner;
    }
    return rows;
  };
  for (const auto& s : a.alphabet.setting) tables[s] = binary_json(a.interp.binary.at(s));
  for (const auto& s : a.alphabet.getting) tables[s] = binary_json(a.interp.binary.at(s));
  doc["interpretation"] = {{"bottom_policy", bottom_policy_name(a.interp.policy)}, {"tables", tables}};

  json comps(json::value_t::array);
  for (const auto& g : a.components) {
    json vs(json::value_t::array);
    for (int v = 0; v < g.vertex_count(); ++v)
      vs.push_back({{"id", g.vertex_ids[static_cast<std::size_t>(v)]},
                    {"label", g.label[static_cast<std::size_t>(v)]}});
    json es(json::value_t::array);
    for (int v = 0; v < g.vertex_count(); ++v)
      for (const Edge& e : g.out[static_cast<std::size_t>(v)]) {
        json edge = {{"from", g.vertex_ids[static_cast<std::size_t>(v)]},
                     {"to", g.vertex_ids[static_cast<std::size_t>(e.to)]}};
        if (e.label != -1) edge["label"] = e.label;
        es.push_back(edge);
      }
    json comp = {{"vertices", vs},
                 {"edges", es},
                 {"root", g.vertex_ids[static_cast<std::size_t>(g.root)]},
                 {"main", g.is_main},
                 {"nondet", g.nondet_allowed}};
    comps.push_back(comp);
  }
  doc["components"] = comps;
  if (!provenance.is_null()) doc["provenance"] = provenance;

  return doc.dump(2) + "\n";
}

inline std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Digest of the canonical serialization without provenance.
inline std::string model_digest(const ProtoAlgorithm& a) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(serialize_model(a))));
  return buf;
}

// Write-temp-then-rename so partially written files never appear.
inline bool atomic_write_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out << content;
    if (!out.good()) return false;
  }
  return std::rename(tmp.c_str(), path.c_str()) == 0;
}

}  // namespace protoalg
