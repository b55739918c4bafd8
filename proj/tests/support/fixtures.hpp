#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "protoalg/generator.hpp"
#include "protoalg/isomorphism.hpp"
#include "protoalg/model_io.hpp"

namespace protoalg::test {

inline RawModel f1_raw() { return countdown_raw(3); }
inline RawModel f2_raw() { return handoff_raw(3); }
inline ProtoAlgorithm f1() { return gen_countdown(3); }
inline ProtoAlgorithm f2() { return gen_handoff(3); }

// The countdown loop body duplicated once; same tables, same language.
inline RawModel unrolled_countdown_raw(int n) {
  RawModel m = countdown_raw(n);
  RawGraph g;
  g.vertices = {{"r", kIni}, {"u1", "z"}, {"u2", "dec"}, {"u3", "z"}, {"u4", "dec"}, {"uf", kFin}};
  g.edges = {{"r", "u1", -1}, {"u1", "u2", 0}, {"u1", "uf", 1}, {"u2", "u3", -1},
             {"u3", "u4", 0},  {"u3", "uf", 1}, {"u4", "u1", -1}};
  g.root = "r";
  g.declared_main = true;
  m.components.clear();
  m.components.push_back(std::move(g));
  return m;
}

// Inserts a second copy of a predicate vertex along its 1-edge.  The copy
// re-tests the unchanged private value, so the branch outcome is identical
// and only an extra inspection step is added.
inline RawModel double_predicate(RawModel m, std::size_t component, const std::string& pv) {
  RawGraph& g = m.components.at(component);
  std::string copy_id = pv + "x";
  std::string label;
  for (const auto& v : g.vertices)
    if (v.id == pv) label = v.label;
  if (label.empty()) throw std::invalid_argument("no such vertex: " + pv);

  std::string t0, t1;
  for (auto& e : g.edges) {
    if (e.from != pv) continue;
    if (e.label == 0) t0 = e.to;
    if (e.label == 1) t1 = e.to;
  }
  if (t0.empty() || t1.empty()) throw std::invalid_argument(pv + " is not a predicate vertex");

  for (auto& e : g.edges)
    if (e.from == pv && e.label == 1) e.to = copy_id;
  g.vertices.push_back({copy_id, label});
  g.edges.push_back({copy_id, t1, 1});
  g.edges.push_back({copy_id, t0, 0});
  return m;
}

// A consistent renaming of everything the isomorphism clauses range over:
// component order, vertex ids, symbol names (ini/fin stay fixed), the three
// value domains independently, and optionally the {0,1} edge labels (with
// predicate tables complemented to match).  The forward bijections are
// reported through `witness_out` when asked for.
inline RawModel rename_model(const RawModel& m, std::uint64_t seed, bool swap_edge_labels,
                             IsomorphismWitness* witness_out = nullptr) {
  std::mt19937_64 rng(seed);
  auto shuffled = [&](std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    return idx;
  };

  auto make_map = [&](const std::vector<std::string>& tokens, const std::string& prefix) {
    std::map<std::string, std::string> out;
    auto idx = shuffled(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i)
      out[tokens[i]] = prefix + std::to_string(idx[i]);
    out[kBotToken] = kBotToken;
    return out;
  };

  std::map<std::string, std::string> dmap = make_map(m.domains.main, "q");
  std::map<std::string, std::string> imap = make_map(m.domains.input, "j");
  std::map<std::string, std::string> omap = make_map(m.domains.output, "w");

  std::map<std::string, std::string> smap;
  smap[kIni] = kIni;
  smap[kFin] = kFin;
  {
    std::vector<std::string> renamable;
    for (const auto& s : m.alphabet.processing)
      if (s != kIni && s != kFin) renamable.push_back(s);
    for (const auto& s : m.alphabet.setting) renamable.push_back(s);
    for (const auto& s : m.alphabet.getting) renamable.push_back(s);
    for (const auto& s : m.alphabet.predicate) renamable.push_back(s);
    auto idx = shuffled(renamable.size());
    for (std::size_t i = 0; i < renamable.size(); ++i)
      smap[renamable[i]] = "g" + std::to_string(idx[i]);
  }

  RawModel out;
  auto map_list = [](const std::vector<std::string>& xs, const std::map<std::string, std::string>& mm) {
    std::vector<std::string> ys;
    for (const auto& x : xs) ys.push_back(mm.at(x));
    return ys;
  };
  out.alphabet.processing = map_list(m.alphabet.processing, smap);
  out.alphabet.setting = map_list(m.alphabet.setting, smap);
  out.alphabet.getting = map_list(m.alphabet.getting, smap);
  out.alphabet.predicate = map_list(m.alphabet.predicate, smap);
  // permute the declared domain orders as well
  out.domains.main = map_list(m.domains.main, dmap);
  std::sort(out.domains.main.begin(), out.domains.main.end());
  out.domains.input = map_list(m.domains.input, imap);
  std::sort(out.domains.input.begin(), out.domains.input.end());
  out.domains.output = map_list(m.domains.output, omap);
  std::sort(out.domains.output.begin(), out.domains.output.end());

  auto kind_of = [&](const std::string& s) -> SymbolKind {
    for (const auto& x : m.alphabet.setting)
      if (x == s) return SymbolKind::Setting;
    for (const auto& x : m.alphabet.getting)
      if (x == s) return SymbolKind::Getting;
    for (const auto& x : m.alphabet.predicate)
      if (x == s) return SymbolKind::Predicate;
    return SymbolKind::Processing;
  };

  out.interp.bottom_policy = m.interp.bottom_policy;
  for (const auto& [sym, table] : m.interp.tables) {
    RawTable nt;
    nt.binary = table.binary;
    SymbolKind kind = kind_of(sym);
    const std::map<std::string, std::string>& arg_map =
        (sym == kIni) ? imap : dmap;  // unary argument domain
    for (const auto& [arg, res] : table.unary_rows) {
      std::string nres;
      if (kind == SymbolKind::Predicate)
        nres = (swap_edge_labels && res != kBotToken) ? (res == "0" ? "1" : "0") : res;
      else if (sym == kFin)
        nres = omap.at(res);
      else
        nres = dmap.at(res);
      nt.unary_rows.emplace_back(arg_map.at(arg), nres);
    }
    for (const auto& [a1, a2, res] : table.binary_rows)
      nt.binary_rows.emplace_back(dmap.at(a1), dmap.at(a2), dmap.at(res));
    out.interp.tables.emplace(smap.at(sym), std::move(nt));
  }

  auto comp_order = shuffled(m.components.size());
  out.components.resize(m.components.size());
  std::vector<std::map<std::string, std::string>> vmaps(m.components.size());
  for (std::size_t i = 0; i < m.components.size(); ++i) {
    const RawGraph& g = m.components[i];
    RawGraph ng;
    std::map<std::string, std::string>& vmap = vmaps[i];
    auto idx = shuffled(g.vertices.size());
    for (std::size_t v = 0; v < g.vertices.size(); ++v)
      vmap[g.vertices[v].id] = "y" + std::to_string(idx[v]);
    for (const auto& v : g.vertices) ng.vertices.push_back({vmap.at(v.id), smap.at(v.label)});
    for (const auto& e : g.edges) {
      int lab = e.label;
      if (swap_edge_labels && lab != -1) lab = 1 - lab;
      ng.edges.push_back({vmap.at(e.from), vmap.at(e.to), lab});
    }
    ng.root = vmap.at(g.root);
    ng.declared_main = g.declared_main;
    ng.nondet_allowed = g.nondet_allowed;
    out.components[comp_order[i]] = std::move(ng);
  }

  if (witness_out) {
    IsomorphismWitness w;
    for (std::size_t i = 0; i < m.components.size(); ++i)
      w.component_perm.push_back(static_cast<int>(comp_order[i]));
    w.symbol_map = smap;
    w.symbol_map.erase(kBotToken);
    w.vertex_maps = vmaps;
    w.data_map = dmap;
    w.data_map.erase(kBotToken);
    w.input_map = imap;
    w.input_map.erase(kBotToken);
    w.output_map = omap;
    w.output_map.erase(kBotToken);
    w.edge_label_swap = swap_edge_labels;
    *witness_out = std::move(w);
  }
  return out;
}

// ---- random model generation (deterministic in the seed) ----

struct RandomModelParams {
  int components = 1;
  bool classical = true;  // no setting/getting symbols
  bool nondet = false;    // allow branching function vertices
  int domain_size = 3;
  int input_size = 2;
  int output_size = 2;
  int min_vertices = 3;
  int max_vertices = 5;
  int plain_symbols = 2;
  int predicate_symbols = 1;
  int channel_pairs = 1;  // setter/getter pairs when !classical
};

inline RawModel random_model_raw(std::uint64_t seed, const RandomModelParams& p) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };

  RawModel m;
  m.alphabet.processing = {kIni, kFin};
  std::vector<std::string> plain, setters, getters, preds;
  for (int i = 0; i < p.plain_symbols; ++i) plain.push_back("f" + std::to_string(i));
  for (int i = 0; i < p.predicate_symbols; ++i) preds.push_back("p" + std::to_string(i));
  if (!p.classical)
    for (int i = 0; i < p.channel_pairs; ++i) {
      setters.push_back("wr" + std::to_string(i));
      getters.push_back("rd" + std::to_string(i));
    }
  m.alphabet.processing.insert(m.alphabet.processing.end(), plain.begin(), plain.end());
  m.alphabet.setting = setters;
  m.alphabet.getting = getters;
  m.alphabet.predicate = preds;

  // tables over the full domain first; the domain is then restricted to the
  // closure so the minimality condition holds by construction
  std::vector<std::string> D, Di, Do;
  for (int i = 0; i < p.domain_size; ++i) D.push_back("d" + std::to_string(i));
  for (int i = 0; i < p.input_size; ++i) Di.push_back("i" + std::to_string(i));
  for (int i = 0; i < p.output_size; ++i) Do.push_back("o" + std::to_string(i));

  std::map<std::string, std::vector<int>> unary;  // plain tables, D index -> D index
  std::vector<int> ini_rows, fin_rows;
  for (int i = 0; i < p.input_size; ++i) ini_rows.push_back(pick(0, p.domain_size - 1));
  for (int i = 0; i < p.domain_size; ++i) fin_rows.push_back(pick(0, p.output_size - 1));
  for (const auto& f : plain) {
    std::vector<int> rows;
    for (int i = 0; i < p.domain_size; ++i) rows.push_back(pick(0, p.domain_size - 1));
    unary.emplace(f, std::move(rows));
  }
  std::map<std::string, std::vector<int>> predt;
  for (const auto& q : preds) {
    std::vector<int> rows;
    for (int i = 0; i < p.domain_size; ++i) rows.push_back(pick(0, 1));
    predt.emplace(q, std::move(rows));
  }
  // lawful setter/getter pairs: writer k applies a bijection to its private
  // operand, reader k inverts it on the shared operand
  std::vector<std::vector<int>> sigma;
  for (int k = 0; k < static_cast<int>(setters.size()); ++k) {
    std::vector<int> perm(static_cast<std::size_t>(p.domain_size));
    for (int i = 0; i < p.domain_size; ++i) perm[static_cast<std::size_t>(i)] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    sigma.push_back(perm);
  }

  // closure restriction
  std::vector<char> in_closure(static_cast<std::size_t>(p.domain_size), 0);
  {
    std::vector<int> work;
    auto add = [&](int v) {
      if (!in_closure[static_cast<std::size_t>(v)]) {
        in_closure[static_cast<std::size_t>(v)] = 1;
        work.push_back(v);
      }
    };
    for (int r : ini_rows) add(r);
    while (!work.empty()) {
      int d = work.back();
      work.pop_back();
      for (const auto& [f, rows] : unary) add(rows[static_cast<std::size_t>(d)]);
      for (const auto& s : sigma) {
        add(s[static_cast<std::size_t>(d)]);
        for (std::size_t x = 0; x < s.size(); ++x)
          if (s[x] == d) add(static_cast<int>(x));  // reader image
      }
    }
  }

  m.domains.input = Di;
  m.domains.output = Do;
  for (int i = 0; i < p.domain_size; ++i)
    if (in_closure[static_cast<std::size_t>(i)]) m.domains.main.push_back(D[static_cast<std::size_t>(i)]);

  const bool lifted = !p.classical;
  m.interp.bottom_policy = lifted ? "lifted" : "strict";
  auto dtok = [&](int i) { return D[static_cast<std::size_t>(i)]; };
  {
    RawTable t;
    for (int i = 0; i < p.input_size; ++i) t.unary_rows.emplace_back(Di[static_cast<std::size_t>(i)], dtok(ini_rows[static_cast<std::size_t>(i)]));
    m.interp.tables.emplace(kIni, std::move(t));
  }
  {
    RawTable t;
    for (int i = 0; i < p.domain_size; ++i)
      if (in_closure[static_cast<std::size_t>(i)])
        t.unary_rows.emplace_back(dtok(i), Do[static_cast<std::size_t>(fin_rows[static_cast<std::size_t>(i)])]);
    if (lifted) t.unary_rows.emplace_back(kBotToken, Do[0]);
    m.interp.tables.emplace(kFin, std::move(t));
  }
  for (const auto& [f, rows] : unary) {
    RawTable t;
    for (int i = 0; i < p.domain_size; ++i)
      if (in_closure[static_cast<std::size_t>(i)]) t.unary_rows.emplace_back(dtok(i), dtok(rows[static_cast<std::size_t>(i)]));
    if (lifted) t.unary_rows.emplace_back(kBotToken, kBotToken);
    m.interp.tables.emplace(f, std::move(t));
  }
  for (const auto& [q, rows] : predt) {
    RawTable t;
    for (int i = 0; i < p.domain_size; ++i)
      if (in_closure[static_cast<std::size_t>(i)])
        t.unary_rows.emplace_back(dtok(i), rows[static_cast<std::size_t>(i)] ? "1" : "0");
    if (lifted) t.unary_rows.emplace_back(kBotToken, "0");
    m.interp.tables.emplace(q, std::move(t));
  }
  for (int k = 0; k < static_cast<int>(setters.size()); ++k) {
    RawTable wt, rt;
    wt.binary = rt.binary = true;
    std::vector<std::string> all;
    for (int i = 0; i < p.domain_size; ++i)
      if (in_closure[static_cast<std::size_t>(i)]) all.push_back(dtok(i));
    if (lifted) all.push_back(kBotToken);
    auto apply = [&](const std::vector<int>& perm, const std::string& x) -> std::string {
      if (x == kBotToken) return kBotToken;
      for (int i = 0; i < p.domain_size; ++i)
        if (dtok(i) == x) return dtok(perm[static_cast<std::size_t>(i)]);
      return x;
    };
    auto invert = [&](const std::vector<int>& perm, const std::string& x) -> std::string {
      if (x == kBotToken) return kBotToken;
      for (int i = 0; i < p.domain_size; ++i)
        if (dtok(perm[static_cast<std::size_t>(i)]) == x) return dtok(i);
      return x;
    };
    for (const auto& a : all)
      for (const auto& b : all) {
        wt.binary_rows.emplace_back(a, b, apply(sigma[static_cast<std::size_t>(k)], a));
        rt.binary_rows.emplace_back(a, b, invert(sigma[static_cast<std::size_t>(k)], b));
      }
    m.interp.tables.emplace(setters[static_cast<std::size_t>(k)], std::move(wt));
    m.interp.tables.emplace(getters[static_cast<std::size_t>(k)], std::move(rt));
  }

  // component graphs: a backbone chain guarantees indegrees and (for the
  // main component) a reachable fin; predicate out-edges only go forward or
  // to function vertices, so no cycle is predicate-only
  std::vector<std::string> functionish = plain;
  functionish.insert(functionish.end(), setters.begin(), setters.end());
  functionish.insert(functionish.end(), getters.begin(), getters.end());

  for (int c = 0; c < p.components; ++c) {
    const bool is_main = c == 0;
    RawGraph g;
    int k = pick(p.min_vertices, p.max_vertices);
    auto vid = [&](int v) { return "c" + std::to_string(c) + "v" + std::to_string(v); };
    std::vector<std::string> labels(static_cast<std::size_t>(k));
    labels[0] = is_main ? kIni : functionish[static_cast<std::size_t>(pick(0, static_cast<int>(functionish.size()) - 1))];
    for (int v = 1; v < k - 1; ++v) {
      bool use_pred = !preds.empty() && pick(0, 2) == 0;
      labels[static_cast<std::size_t>(v)] =
          use_pred ? preds[static_cast<std::size_t>(pick(0, static_cast<int>(preds.size()) - 1))]
                   : functionish[static_cast<std::size_t>(pick(0, static_cast<int>(functionish.size()) - 1))];
    }
    labels[static_cast<std::size_t>(k - 1)] =
        is_main ? kFin : functionish[static_cast<std::size_t>(pick(0, static_cast<int>(functionish.size()) - 1))];

    g.root = vid(0);
    g.declared_main = is_main;
    g.nondet_allowed = p.nondet;

    auto is_pred = [&](int v) {
      for (const auto& q : preds)
        if (labels[static_cast<std::size_t>(v)] == q) return true;
      return false;
    };
    auto is_fin = [&](int v) { return labels[static_cast<std::size_t>(v)] == kFin; };
    auto function_targets = [&]() {
      std::vector<int> ts;
      for (int v = 1; v < k; ++v)
        if (!is_pred(v)) ts.push_back(v);  // includes fin (outdegree 0 breaks cycles too)
      return ts;
    };

    for (int v = 0; v < k; ++v) {
      if (is_fin(v)) continue;
      int chain_next = v + 1 < k ? v + 1 : -1;
      if (is_pred(v)) {
        // backbone edge plus an alternative; both must go forward or to a
        // non-predicate vertex.  Without an alternative target the vertex
        // is demoted to a function label.
        int next = chain_next;
        int b = pick(0, 1);
        std::vector<int> alts;
        for (int t : function_targets())
          if (t != next) alts.push_back(t);
        for (int t = v + 1; t < k; ++t)
          if (is_pred(t) && t != next) alts.push_back(t);
        if (next >= 0 && !alts.empty()) {
          int alt = alts[static_cast<std::size_t>(pick(0, static_cast<int>(alts.size()) - 1))];
          g.edges.push_back({vid(v), vid(next), b});
          g.edges.push_back({vid(v), vid(alt), 1 - b});
          continue;
        }
        labels[static_cast<std::size_t>(v)] =
            functionish[static_cast<std::size_t>(pick(0, static_cast<int>(functionish.size()) - 1))];
      }
      {
        int next = chain_next;
        if (next < 0) {  // last vertex of a non-main component loops back
          std::vector<int> ts;
          for (int t = 1; t < k; ++t) ts.push_back(t);
          next = ts[static_cast<std::size_t>(pick(0, static_cast<int>(ts.size()) - 1))];
        }
        g.edges.push_back({vid(v), vid(next), -1});
        if (p.nondet && pick(0, 2) == 0) {
          std::vector<int> ts;
          for (int t = 1; t < k; ++t)
            if (t != next) ts.push_back(t);
          if (!ts.empty())
            g.edges.push_back({vid(v), vid(ts[static_cast<std::size_t>(pick(0, static_cast<int>(ts.size()) - 1))]), -1});
        }
      }
    }
    for (int v = 0; v < k; ++v) g.vertices.push_back({vid(v), labels[static_cast<std::size_t>(v)]});
    m.components.push_back(std::move(g));
  }
  return m;
}

// Validates a random raw model, retrying with derived seeds when a sampled
// graph violates a structural clause (rare).
inline ProtoAlgorithm random_model(std::uint64_t seed, const RandomModelParams& p) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    RawModel raw = random_model_raw(seed * 997 + static_cast<std::uint64_t>(attempt), p);
    auto v = validate_raw_model(raw, LoadOptions{ValidationLevel::Strict, std::nullopt});
    if (v.ok()) return *v;
  }
  throw std::logic_error("random model generation failed for seed " + std::to_string(seed));
}

inline ProtoAlgorithm raw_to_model(const RawModel& raw,
                                   ValidationLevel level = ValidationLevel::Strict) {
  auto v = validate_raw_model(raw, LoadOptions{level, std::nullopt});
  if (!v.ok()) {
    std::string why = v.diags.empty() ? "?" : v.diags.front().code + " at " + v.diags.front().where;
    throw std::logic_error("fixture failed validation: " + why);
  }
  return *v;
}

}  // namespace protoalg::test
