#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "protoalg/equivalence.hpp"
#include "protoalg/semantics.hpp"

namespace protoalg {

// Sequentialization: compiles an n-component model into a single-component
// model over a classical alphabet whose non-determinism replays the
// scheduling choices.  Product vertices pair a control tuple with the
// scheduled component; the main domain of the output consists of the
// reachable (private-tuple, shared) packs.  The result carries a certified
// algorithmic-equivalence witness: the state bijection underlying the
// construction, validated as a simulation in both directions.
//
// Models with reachable stuck states (possible under the strict bottom
// policy) have no stuck counterpart in the output, whose tables are total;
// certification fails honestly on such models.
struct SequentializationResult {
  ProtoAlgorithm output;
  std::vector<std::pair<std::string, std::string>> vertex_map;  // product tuple -> output vertex id
  std::vector<std::tuple<std::string, int, std::string>> symbol_map;  // (symbol, 1-based comp) -> name
  EquivalenceReport certificate;  // witness: the constructed bijection
  std::size_t product_vertices = 0;
  std::vector<Diagnostic> output_diags;  // lenient-validation findings
};

class certification_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// Deterministic unique-name allocation; collisions (only possible when
// source names already contain the separator patterns) get '_' suffixes.
class NameAllocator {
 public:
  std::string claim(std::string candidate) {
    while (!taken_.insert(candidate).second) candidate += "_";
    return candidate;
  }

 private:
  std::set<std::string> taken_;
};

}  // namespace detail

inline SequentializationResult sequentialize(const ProtoAlgorithm& a, const ResourceCaps& caps = {}) {
  SequentializationResult res;
  const int n = a.component_count();
  const int j = a.main_index;

  // Output alphabet: indexed copies of the plain processing, setting and
  // getting symbols plus the shared ini/fin; indexed copies of predicates.
  RawAlphabet sigma;
  detail::NameAllocator sym_names;
  sigma.processing.push_back(sym_names.claim(kIni));
  sigma.processing.push_back(sym_names.claim(kFin));
  std::map<std::pair<std::string, int>, std::string> indexed;
  auto claim_indexed = [&](const std::string& f, int i, std::vector<std::string>& into) {
    std::string name = sym_names.claim(f + "@" + std::to_string(i + 1));
    indexed.emplace(std::make_pair(f, i), name);
    into.push_back(name);
    res.symbol_map.emplace_back(f, i + 1, name);
  };
  for (const auto& f : a.alphabet.plain_processing())
    for (int i = 0; i < n; ++i) claim_indexed(f, i, sigma.processing);
  for (const auto& f : a.alphabet.setting)
    for (int i = 0; i < n; ++i) claim_indexed(f, i, sigma.processing);
  for (const auto& f : a.alphabet.getting)
    for (int i = 0; i < n; ++i) claim_indexed(f, i, sigma.processing);
  for (const auto& p : a.alphabet.predicate)
    for (int i = 0; i < n; ++i) claim_indexed(p, i, sigma.predicate);

  // Product graph restricted to the part reachable from ((r_1..r_n), j).
  using ProductVertex = std::pair<std::vector<int>, int>;
  std::map<ProductVertex, int> pindex;
  std::vector<ProductVertex> porder;
  std::vector<std::string> pid;
  detail::NameAllocator vertex_names;

  auto pdesc = [&](const ProductVertex& pv) {
    std::string s = "(";
    for (int k = 0; k < n; ++k) {
      if (k) s += ",";
      s += a.components[static_cast<std::size_t>(k)]
               .vertex_ids[static_cast<std::size_t>(pv.first[static_cast<std::size_t>(k)])];
    }
    s += ")@" + std::to_string(pv.second + 1);
    return s;
  };

  auto intern_vertex = [&](const ProductVertex& pv) {
    auto [it, inserted] = pindex.emplace(pv, static_cast<int>(porder.size()));
    if (inserted) {
      porder.push_back(pv);
      pid.push_back(vertex_names.claim(pdesc(pv)));
      if (porder.size() > caps.state_cap)
        throw resource_bound_error("product graph exceeds the cap of " +
                                   std::to_string(caps.state_cap) + " vertices");
    }
    return it->second;
  };

  ProductVertex root;
  for (int k = 0; k < n; ++k) root.first.push_back(a.components[static_cast<std::size_t>(k)].root);
  root.second = j;
  intern_vertex(root);

  RawGraph graph;
  graph.nondet_allowed = true;
  graph.declared_main = true;
  for (std::size_t at = 0; at < porder.size(); ++at) {
    const ProductVertex pv = porder[at];
    const int i = pv.second;
    const auto& g = a.components[static_cast<std::size_t>(i)];
    const int v = pv.first[static_cast<std::size_t>(i)];
    const std::string& lab = g.label[static_cast<std::size_t>(v)];
    const SymbolKind kind = g.label_kind[static_cast<std::size_t>(v)];

    std::string plabel;
    if (lab == kIni || lab == kFin)
      plabel = lab;
    else
      plabel = indexed.at(std::make_pair(lab, i));
    graph.vertices.push_back(RawVertex{pid[at], plabel});

    if (lab == kFin) continue;
    for (const Edge& e : g.out[static_cast<std::size_t>(v)]) {
      ProductVertex next = pv;
      next.first[static_cast<std::size_t>(i)] = e.to;
      if (kind == SymbolKind::Predicate) {
        next.second = i;  // predicate steps retain the scheduled component
        int t = intern_vertex(next);
        graph.edges.push_back(RawEdge{pid[at], pid[static_cast<std::size_t>(t)], e.label});
      } else {
        for (int i2 = 0; i2 < n; ++i2) {
          next.second = i2;
          int t = intern_vertex(next);
          graph.edges.push_back(RawEdge{pid[at], pid[static_cast<std::size_t>(t)], -1});
        }
      }
    }
  }
  graph.root = pid[0];
  res.product_vertices = porder.size();
  for (std::size_t k = 0; k < porder.size(); ++k) res.vertex_map.emplace_back(pdesc(porder[k]), pid[k]);

  // The output main domain: (private tuple, shared) packs of the reachable
  // internal states.
  StateGraph ga = build_state_graph(a, Variant::Algorithmic, all_inputs(a), caps.state_cap);
  using Pack = std::vector<ValueId>;
  std::set<Pack> pack_set;
  for (int s = 0; s < ga.size(); ++s) {
    if (!ga.from_initial[static_cast<std::size_t>(s)]) continue;
    const State& st = ga.states[static_cast<std::size_t>(s)];
    if (st.kind() != State::Kind::Internal) continue;
    Pack pk = st.priv;
    pk.push_back(st.shared);
    pack_set.insert(std::move(pk));
  }
  std::vector<Pack> packs(pack_set.begin(), pack_set.end());
  std::map<Pack, int> pack_index;
  detail::NameAllocator value_names;
  RawDomains domains;
  for (std::size_t k = 0; k < packs.size(); ++k) {
    pack_index.emplace(packs[k], static_cast<int>(k));
    std::string tok = "(";
    for (std::size_t m = 0; m < packs[k].size(); ++m) {
      if (m) tok += ",";
      tok += a.interp.main_domain.token_of(packs[k][m]);
    }
    tok += ")";
    domains.main.push_back(value_names.claim(tok));
  }
  domains.input = a.interp.input_domain.tokens;
  domains.output = a.interp.output_domain.tokens;

  // Tables: the natural projection formulas wherever they are derivable and
  // land inside the pack domain; inert identity rows elsewhere (those rows
  // are never exercised from a reachable state of the output).
  RawInterpretation interp;
  interp.bottom_policy = "lifted";
  const std::string first_output = domains.output.front();

  auto pack_token = [&](const Pack& pk) -> std::optional<std::string> {
    auto it = pack_index.find(pk);
    if (it == pack_index.end()) return std::nullopt;
    return domains.main[static_cast<std::size_t>(it->second)];
  };

  {
    RawTable t;
    for (ValueId d_i = 0; d_i < a.interp.input_domain.size(); ++d_i) {
      Pack pk(static_cast<std::size_t>(n) + 1, kBot);
      pk[static_cast<std::size_t>(j)] = a.interp.apply_ini(d_i);
      auto tok = pack_token(pk);
      if (!tok)
        throw certification_error("ini image pack is not reachable; construction is inconsistent");
      t.unary_rows.emplace_back(a.interp.input_domain.token_of(d_i), *tok);
    }
    interp.tables.emplace(kIni, std::move(t));
  }
  {
    RawTable t;
    for (std::size_t k = 0; k < packs.size(); ++k) {
      ValueId d = packs[k][static_cast<std::size_t>(j)];
      ValueId d_o = a.interp.apply_fin(d);
      t.unary_rows.emplace_back(domains.main[k],
                                d_o == kNone ? first_output : a.interp.output_domain.token_of(d_o));
    }
    t.unary_rows.emplace_back(kBotToken, first_output);
    interp.tables.emplace(kFin, std::move(t));
  }
  for (const auto& [key, name] : indexed) {
    const auto& [f, i] = key;
    RawTable t;
    const SymbolKind kind = a.alphabet.kind_of(f);
    for (std::size_t k = 0; k < packs.size(); ++k) {
      const Pack& pk = packs[k];
      if (kind == SymbolKind::Predicate) {
        ValueId b = a.interp.apply_predicate(f, pk[static_cast<std::size_t>(i)]);
        t.unary_rows.emplace_back(domains.main[k], b == kNone ? "0" : (b == 1 ? "1" : "0"));
        continue;
      }
      ValueId d = kNone;
      Pack next = pk;
      if (kind == SymbolKind::Processing) {
        d = a.interp.apply_processing(f, pk[static_cast<std::size_t>(i)]);
        if (d != kNone) next[static_cast<std::size_t>(i)] = d;
      } else {
        d = a.interp.apply_binary(f, pk[static_cast<std::size_t>(i)], pk[static_cast<std::size_t>(n)]);
        if (d != kNone) {
          if (kind == SymbolKind::Setting)
            next[static_cast<std::size_t>(n)] = d;
          else
            next[static_cast<std::size_t>(i)] = d;
        }
      }
      std::optional<std::string> tok = d == kNone ? std::nullopt : pack_token(next);
      t.unary_rows.emplace_back(domains.main[k], tok ? *tok : domains.main[k]);
    }
    t.unary_rows.emplace_back(kBotToken, kind == SymbolKind::Predicate ? "0" : kBotToken);
    interp.tables.emplace(name, std::move(t));
  }

  // Assemble and validate the output at the lenient level.
  auto valid_alpha = validate_alphabet(sigma);
  if (!valid_alpha.ok()) throw certification_error("constructed alphabet failed validation");
  auto valid_graph = validate_component_graph(graph, *valid_alpha, /*nondet_allowed=*/true, "components/0");
  if (!valid_graph.ok()) {
    std::string why = valid_graph.diags.empty() ? "" : valid_graph.diags.front().message;
    throw certification_error("constructed component graph failed validation: " + why);
  }
  auto valid_interp = validate_interpretation(domains, interp, *valid_alpha, ValidationLevel::Lenient);
  if (!valid_interp.ok()) {
    std::string why = valid_interp.diags.empty() ? "" : valid_interp.diags.front().message;
    throw certification_error("constructed interpretation failed validation: " + why);
  }
  auto valid_model = validate_proto_algorithm(*valid_alpha, {*valid_graph}, *valid_interp,
                                              ValidationLevel::Lenient);
  if (!valid_model.ok()) throw certification_error("constructed model failed validation");
  res.output = *valid_model;
  for (const auto& d : valid_graph.diags) res.output_diags.push_back(d);
  for (const auto& d : valid_interp.diags) res.output_diags.push_back(d);

  // Certificate: the state bijection of the construction, checked as a
  // simulation both ways, corroborated by the fixed-point equivalence check.
  SimulationWitness beta;
  beta.variant = Variant::Algorithmic;
  beta.left = ga;
  beta.right = build_state_graph(res.output, Variant::Algorithmic, all_inputs(res.output), caps.state_cap);

  bool mapped_ok = true;
  for (int s = 0; s < ga.size() && mapped_ok; ++s) {
    const State& st = ga.states[static_cast<std::size_t>(s)];
    State img;
    switch (st.kind()) {
      case State::Kind::Initial:
        img = make_initial(res.output, st.input);
        break;
      case State::Kind::Final:
        img = make_final(res.output, st.output);
        break;
      case State::Kind::Internal: {
        if (!ga.from_initial[static_cast<std::size_t>(s)]) continue;  // only reachable states map
        Pack pk = st.priv;
        pk.push_back(st.shared);
        auto pit = pack_index.find(pk);
        ProductVertex pv{st.ctrl, st.sched};
        auto vit = pindex.find(pv);
        if (pit == pack_index.end() || vit == pindex.end()) {
          mapped_ok = false;
          continue;
        }
        img.ctrl = {vit->second};
        img.priv = {static_cast<ValueId>(pit->second)};
        img.shared = kBot;
        img.sched = 0;
        break;
      }
    }
    int t = beta.right.index_of(img);
    if (t < 0) {
      mapped_ok = false;
      break;
    }
    beta.pairs.emplace_back(s, t);
  }
  std::sort(beta.pairs.begin(), beta.pairs.end());

  res.certificate.variant = Variant::Algorithmic;
  bool beta_ok = mapped_ok && verify_simulation(beta).empty() &&
                 verify_simulation(inverse_witness(beta)).empty();
  EquivalenceReport fixed_point = check_equivalence(a, res.output, Variant::Algorithmic, caps);
  res.certificate.verdict = beta_ok && fixed_point.verdict;
  if (!res.certificate.verdict)
    res.certificate.failure = !mapped_ok ? "construction bijection has unmapped states"
                              : !beta_ok ? "construction bijection fails the simulation conditions"
                                         : fixed_point.failure;
  extract_gammas(beta, res.certificate.gamma_i, res.certificate.gamma_o,
                 a.interp.input_domain.size(), res.output.interp.output_domain.size());
  res.certificate.witness = std::move(beta);
  return res;
}

struct Theorem3Report {
  bool holds = false;
  bool certificate_true = false;
  bool computed_functions_match = false;
  SequentializationResult result;
};

// Sequentializes and cross-checks: the certificate must hold and the two
// computed functions must agree entrywise under the identity translations.
inline Theorem3Report check_theorem3(const ProtoAlgorithm& a, const ResourceCaps& caps = {}) {
  Theorem3Report rep;
  rep.result = sequentialize(a, caps);
  rep.certificate_true = rep.result.certificate.verdict;

  ComputedFunction fa = computed_function(a, caps.state_cap);
  ComputedFunction fb = computed_function(rep.result.output, caps.state_cap);
  rep.computed_functions_match = fa.entries.size() == fb.entries.size();
  for (std::size_t i = 0; rep.computed_functions_match && i < fa.entries.size(); ++i) {
    const auto& ea = fa.entries[i];
    const auto& eb = fb.entries[i];
    if (ea.defined != eb.defined) rep.computed_functions_match = false;
    if (ea.defined && ea.outputs != eb.outputs) rep.computed_functions_match = false;
  }
  rep.holds = rep.certificate_true && rep.computed_functions_match;
  return rep;
}

}  // namespace protoalg
