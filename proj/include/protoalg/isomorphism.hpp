#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "protoalg/diagnostics.hpp"
#include "protoalg/proto_algorithm.hpp"

namespace protoalg {

// Structure-preserving bijections on components, vertices, symbols, data
// and edge labels, commuting with the interpretations.  When the bottom
// policy is lifted the _bot table rows must commute as well; this keeps
// isomorphic models step-for-step interchangeable under every policy.
struct IsomorphismWitness {
  std::vector<int> component_perm;                              // left comp -> right comp
  std::map<std::string, std::string> symbol_map;                // kind-preserving, fixes ini/fin
  std::vector<std::map<std::string, std::string>> vertex_maps;  // per left component
  std::map<std::string, std::string> data_map;                  // main domain
  std::map<std::string, std::string> input_map;
  std::map<std::string, std::string> output_map;
  bool edge_label_swap = false;  // the {0,1} bijection
};

namespace detail {

class IsoSearch {
 public:
  IsoSearch(const ProtoAlgorithm& a, const ProtoAlgorithm& b, std::size_t budget)
      : A(a), B(b), budget_(budget) {}

  std::optional<IsomorphismWitness> run() {
    if (!shape_feasible()) return std::nullopt;
    for (bool swap : {false, true}) {
      swap_ = swap;
      comp_perm_.assign(A.components.size(), -1);
      comp_used_.assign(B.components.size(), 0);
      vmaps_.assign(A.components.size(), {});
      sym_fwd_.clear();
      sym_rev_.clear();
      bind_symbol(kIni, kIni);
      bind_symbol(kFin, kFin);
      comp_order_.clear();
      for (int i = 0; i < static_cast<int>(A.components.size()); ++i) comp_order_.push_back(i);
      std::stable_sort(comp_order_.begin(), comp_order_.end(), [&](int x, int y) {
        return A.components[static_cast<std::size_t>(x)].vertex_count() >
               A.components[static_cast<std::size_t>(y)].vertex_count();
      });
      if (match_component(0)) return witness_;
    }
    return std::nullopt;
  }

 private:
  const ProtoAlgorithm& A;
  const ProtoAlgorithm& B;
  std::size_t budget_;
  bool swap_ = false;

  std::vector<int> comp_order_;
  std::vector<int> comp_perm_;
  std::vector<char> comp_used_;
  std::vector<std::vector<int>> vmaps_;  // per A component: A vertex -> B vertex
  std::map<std::string, std::string> sym_fwd_, sym_rev_;
  std::vector<ValueId> dmap_;
  std::vector<char> dused_;
  IsomorphismWitness witness_;

  void tick() {
    if (budget_ == 0) throw resource_bound_error("isomorphism search budget exhausted");
    --budget_;
  }

  int blabel(int lab) const { return lab == -1 ? -1 : (swap_ ? 1 - lab : lab); }

  bool shape_feasible() const {
    if (A.components.size() != B.components.size()) return false;
    if (A.alphabet.processing.size() != B.alphabet.processing.size()) return false;
    if (A.alphabet.setting.size() != B.alphabet.setting.size()) return false;
    if (A.alphabet.getting.size() != B.alphabet.getting.size()) return false;
    if (A.alphabet.predicate.size() != B.alphabet.predicate.size()) return false;
    if (A.interp.main_domain.size() != B.interp.main_domain.size()) return false;
    if (A.interp.input_domain.size() != B.interp.input_domain.size()) return false;
    if (A.interp.output_domain.size() != B.interp.output_domain.size()) return false;
    if (A.interp.policy != B.interp.policy) return false;
    return true;
  }

  bool bind_symbol(const std::string& la, const std::string& lb) {
    auto f = sym_fwd_.find(la);
    if (f != sym_fwd_.end()) return f->second == lb;
    auto r = sym_rev_.find(lb);
    if (r != sym_rev_.end()) return false;
    if ((la == kIni) != (lb == kIni)) return false;
    if ((la == kFin) != (lb == kFin)) return false;
    sym_fwd_.emplace(la, lb);
    sym_rev_.emplace(lb, la);
    return true;
  }

  void unbind_symbol(const std::string& la) {
    auto f = sym_fwd_.find(la);
    if (f == sym_fwd_.end()) return;
    sym_rev_.erase(f->second);
    sym_fwd_.erase(f);
  }

  bool match_component(std::size_t pos) {
    tick();
    if (pos == comp_order_.size()) return complete_symbols_and_data();
    const int ca = comp_order_[pos];
    const auto& ga = A.components[static_cast<std::size_t>(ca)];
    for (int cb = 0; cb < static_cast<int>(B.components.size()); ++cb) {
      if (comp_used_[static_cast<std::size_t>(cb)]) continue;
      const auto& gb = B.components[static_cast<std::size_t>(cb)];
      if (ga.vertex_count() != gb.vertex_count()) continue;
      if (ga.is_main != gb.is_main) continue;
      comp_perm_[static_cast<std::size_t>(ca)] = cb;
      comp_used_[static_cast<std::size_t>(cb)] = 1;
      vmaps_[static_cast<std::size_t>(ca)].assign(static_cast<std::size_t>(ga.vertex_count()), -1);
      std::vector<char> used(static_cast<std::size_t>(gb.vertex_count()), 0);
      std::vector<int> order = vertex_order(ga);
      if (match_vertex(ca, cb, order, 0, used) && match_component(pos + 1)) return true;
      comp_perm_[static_cast<std::size_t>(ca)] = -1;
      comp_used_[static_cast<std::size_t>(cb)] = 0;
    }
    return false;
  }

  // Root first, then breadth-first from it so new vertices have assigned
  // neighbors to prune against; stragglers by index.
  std::vector<int> vertex_order(const ComponentGraph& g) const {
    std::vector<int> order;
    std::vector<char> seen(static_cast<std::size_t>(g.vertex_count()), 0);
    std::vector<int> queue{g.root};
    seen[static_cast<std::size_t>(g.root)] = 1;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      int v = queue[q];
      order.push_back(v);
      for (const Edge& e : g.out[static_cast<std::size_t>(v)])
        if (!seen[static_cast<std::size_t>(e.to)]) {
          seen[static_cast<std::size_t>(e.to)] = 1;
          queue.push_back(e.to);
        }
    }
    for (int v = 0; v < g.vertex_count(); ++v)
      if (!seen[static_cast<std::size_t>(v)]) order.push_back(v);
    return order;
  }

  static const Edge* find_edge(const ComponentGraph& g, int from, int to) {
    for (const Edge& e : g.out[static_cast<std::size_t>(from)])
      if (e.to == to) return &e;
    return nullptr;
  }

  bool vertex_compatible(const ComponentGraph& ga, const ComponentGraph& gb, int va, int vb,
                         const std::vector<int>& vmap) const {
    if (ga.label_kind[static_cast<std::size_t>(va)] != gb.label_kind[static_cast<std::size_t>(vb)])
      return false;
    if (ga.indegree[static_cast<std::size_t>(va)] != gb.indegree[static_cast<std::size_t>(vb)])
      return false;
    if (ga.outdegree(va) != gb.outdegree(vb)) return false;
    if ((va == ga.root) != (vb == gb.root)) return false;
    // edges to and from already-assigned vertices must be preserved, with
    // commuting labels
    for (int ua = 0; ua < ga.vertex_count(); ++ua) {
      int ub = vmap[static_cast<std::size_t>(ua)];
      if (ub < 0) continue;
      const Edge* ea = find_edge(ga, va, ua);
      const Edge* eb = find_edge(gb, vb, ub);
      if ((ea == nullptr) != (eb == nullptr)) return false;
      if (ea != nullptr && blabel(ea->label) != eb->label) return false;
      ea = find_edge(ga, ua, va);
      eb = find_edge(gb, ub, vb);
      if ((ea == nullptr) != (eb == nullptr)) return false;
      if (ea != nullptr && blabel(ea->label) != eb->label) return false;
    }
    return true;
  }

  bool match_vertex(int ca, int cb, const std::vector<int>& order, std::size_t pos,
                    std::vector<char>& used) {
    tick();
    const auto& ga = A.components[static_cast<std::size_t>(ca)];
    const auto& gb = B.components[static_cast<std::size_t>(cb)];
    if (pos == order.size()) return true;
    int va = order[pos];
    auto& vmap = vmaps_[static_cast<std::size_t>(ca)];
    for (int vb = 0; vb < gb.vertex_count(); ++vb) {
      if (used[static_cast<std::size_t>(vb)]) continue;
      if (!vertex_compatible(ga, gb, va, vb, vmap)) continue;
      bool fresh_binding = sym_fwd_.find(ga.label[static_cast<std::size_t>(va)]) == sym_fwd_.end();
      if (!bind_symbol(ga.label[static_cast<std::size_t>(va)], gb.label[static_cast<std::size_t>(vb)]))
        continue;
      vmap[static_cast<std::size_t>(va)] = vb;
      used[static_cast<std::size_t>(vb)] = 1;
      if (match_vertex(ca, cb, order, pos + 1, used)) return true;
      vmap[static_cast<std::size_t>(va)] = -1;
      used[static_cast<std::size_t>(vb)] = 0;
      if (fresh_binding) unbind_symbol(ga.label[static_cast<std::size_t>(va)]);
    }
    return false;
  }

  // Symbols unused by any vertex still need kind-preserving partners; they
  // are only constrained by the interpretation equations checked later.
  bool complete_symbols_and_data() {
    std::vector<std::vector<std::string>> rest_a(4), rest_b(4);
    auto kind_idx = [](SymbolKind k) { return static_cast<int>(k); };
    auto gather = [&](const Alphabet& al, std::vector<std::vector<std::string>>& rest, bool left) {
      for (const auto& [cls, kind] :
           std::vector<std::pair<const std::vector<std::string>*, SymbolKind>>{
               {&al.processing, SymbolKind::Processing},
               {&al.setting, SymbolKind::Setting},
               {&al.getting, SymbolKind::Getting},
               {&al.predicate, SymbolKind::Predicate}}) {
        for (const auto& s : *cls) {
          bool bound = left ? sym_fwd_.count(s) != 0 : sym_rev_.count(s) != 0;
          if (!bound) rest[static_cast<std::size_t>(kind_idx(kind))].push_back(s);
        }
      }
    };
    gather(A.alphabet, rest_a, true);
    gather(B.alphabet, rest_b, false);
    for (int k = 0; k < 4; ++k)
      if (rest_a[static_cast<std::size_t>(k)].size() != rest_b[static_cast<std::size_t>(k)].size())
        return false;
    return complete_symbol_kind(rest_a, rest_b, 0, 0);
  }

  bool complete_symbol_kind(std::vector<std::vector<std::string>>& rest_a,
                            std::vector<std::vector<std::string>>& rest_b, int kind, std::size_t pos) {
    tick();
    if (kind == 4) return assign_data();
    auto& list_a = rest_a[static_cast<std::size_t>(kind)];
    auto& list_b = rest_b[static_cast<std::size_t>(kind)];
    if (pos == list_a.size()) return complete_symbol_kind(rest_a, rest_b, kind + 1, 0);
    for (const auto& sb : list_b) {
      if (sym_rev_.count(sb)) continue;
      if (!bind_symbol(list_a[pos], sb)) continue;
      if (complete_symbol_kind(rest_a, rest_b, kind, pos + 1)) return true;
      unbind_symbol(list_a[pos]);
    }
    return false;
  }

  ValueId dimg(ValueId v) const { return v == kBot ? kBot : dmap_[static_cast<std::size_t>(v)]; }

  // Constraints on the main-domain bijection that are decidable with the
  // currently assigned prefix.
  bool data_partial_ok(ValueId d) const {
    const ValueId db = dmap_[static_cast<std::size_t>(d)];
    for (const auto& f : A.alphabet.processing) {
      if (f == kIni || f == kFin) continue;
      const auto& ta = A.interp.unary.at(f);
      const auto& tb = B.interp.unary.at(sym_fwd_.at(f));
      ValueId ra = ta.at(d);
      if (ra != kBot && dmap_[static_cast<std::size_t>(ra)] == kNone) continue;
      if (dimg(ra) != tb.at(db)) return false;
    }
    for (const auto& p : A.alphabet.predicate) {
      ValueId ba = A.interp.pred.at(p).at(d);
      ValueId bb = B.interp.pred.at(sym_fwd_.at(p)).at(db);
      if ((swap_ ? 1 - ba : ba) != bb) return false;
    }
    auto binary_check = [&](const std::string& f) {
      const auto& ta = A.interp.binary.at(f);
      const auto& tb = B.interp.binary.at(sym_fwd_.at(f));
      for (ValueId e = 0; e < A.interp.main_domain.size(); ++e) {
        if (dmap_[static_cast<std::size_t>(e)] == kNone) continue;
        for (auto [x, y] : {std::pair<ValueId, ValueId>{d, e}, {e, d}}) {
          ValueId ra = ta.at(x, y);
          if (ra != kBot && dmap_[static_cast<std::size_t>(ra)] == kNone) continue;
          if (dimg(ra) != tb.at(dimg(x), dimg(y))) return false;
        }
      }
      return true;
    };
    for (const auto& f : A.alphabet.setting)
      if (!binary_check(f)) return false;
    for (const auto& f : A.alphabet.getting)
      if (!binary_check(f)) return false;
    return true;
  }

  bool assign_data() {
    dmap_.assign(static_cast<std::size_t>(A.interp.main_domain.size()), kNone);
    dused_.assign(static_cast<std::size_t>(B.interp.main_domain.size()), 0);
    return assign_data_at(0);
  }

  bool assign_data_at(ValueId d) {
    tick();
    if (d == A.interp.main_domain.size()) return data_complete();
    for (ValueId db = 0; db < B.interp.main_domain.size(); ++db) {
      if (dused_[static_cast<std::size_t>(db)]) continue;
      dmap_[static_cast<std::size_t>(d)] = db;
      dused_[static_cast<std::size_t>(db)] = 1;
      if (data_partial_ok(d) && assign_data_at(d + 1)) return true;
      dmap_[static_cast<std::size_t>(d)] = kNone;
      dused_[static_cast<std::size_t>(db)] = 0;
    }
    return false;
  }

  bool data_complete() {
    // residual full checks (rows skipped while partial), then the _bot rows
    // under the lifted policy
    const ValueId nd = A.interp.main_domain.size();
    for (const auto& f : A.alphabet.processing) {
      if (f == kIni || f == kFin) continue;
      const auto& ta = A.interp.unary.at(f);
      const auto& tb = B.interp.unary.at(sym_fwd_.at(f));
      for (ValueId d = 0; d < nd; ++d)
        if (dimg(ta.at(d)) != tb.at(dimg(d))) return false;
      if (A.interp.policy == BottomPolicy::Lifted && dimg(ta.at(kBot)) != tb.at(kBot)) return false;
    }
    auto binary_full = [&](const std::string& f) {
      const auto& ta = A.interp.binary.at(f);
      const auto& tb = B.interp.binary.at(sym_fwd_.at(f));
      for (ValueId x = 0; x < nd; ++x)
        for (ValueId y = 0; y < nd; ++y)
          if (dimg(ta.at(x, y)) != tb.at(dimg(x), dimg(y))) return false;
      if (A.interp.policy == BottomPolicy::Lifted) {
        for (ValueId x = kBot; x < nd; ++x) {
          if (dimg(ta.at(x, kBot)) != tb.at(dimg(x), kBot)) return false;
          if (dimg(ta.at(kBot, x)) != tb.at(kBot, dimg(x))) return false;
        }
      }
      return true;
    };
    for (const auto& f : A.alphabet.setting)
      if (!binary_full(f)) return false;
    for (const auto& f : A.alphabet.getting)
      if (!binary_full(f)) return false;
    if (A.interp.policy == BottomPolicy::Lifted) {
      for (const auto& p : A.alphabet.predicate) {
        ValueId ba = A.interp.pred.at(p).at(kBot);
        if ((swap_ ? 1 - ba : ba) != B.interp.pred.at(sym_fwd_.at(p)).at(kBot)) return false;
      }
    }
    return assign_inputs();
  }

  bool assign_inputs() {
    const auto& ia = A.interp.unary.at(kIni);
    const auto& ib = B.interp.unary.at(kIni);
    std::vector<ValueId> imap(static_cast<std::size_t>(A.interp.input_domain.size()), kNone);
    std::vector<char> used(static_cast<std::size_t>(B.interp.input_domain.size()), 0);
    return assign_input_at(0, ia, ib, imap, used);
  }

  bool assign_input_at(ValueId d, const Interpretation::Unary& ia, const Interpretation::Unary& ib,
                       std::vector<ValueId>& imap, std::vector<char>& used) {
    tick();
    if (d == A.interp.input_domain.size()) return assign_outputs(imap);
    for (ValueId db = 0; db < B.interp.input_domain.size(); ++db) {
      if (used[static_cast<std::size_t>(db)]) continue;
      if (ib.at(db) != dimg(ia.at(d))) continue;
      imap[static_cast<std::size_t>(d)] = db;
      used[static_cast<std::size_t>(db)] = 1;
      if (assign_input_at(d + 1, ia, ib, imap, used)) return true;
      imap[static_cast<std::size_t>(d)] = kNone;
      used[static_cast<std::size_t>(db)] = 0;
    }
    return false;
  }

  bool assign_outputs(const std::vector<ValueId>& imap) {
    const auto& fa = A.interp.unary.at(kFin);
    const auto& fb = B.interp.unary.at(kFin);
    std::vector<ValueId> omap(static_cast<std::size_t>(A.interp.output_domain.size()), kNone);
    std::vector<char> used(static_cast<std::size_t>(B.interp.output_domain.size()), 0);
    auto force = [&](ValueId oa, ValueId ob) {
      if (oa == kBot || ob == kBot) return oa == ob;
      ValueId& slot = omap[static_cast<std::size_t>(oa)];
      if (slot != kNone) return slot == ob;
      if (used[static_cast<std::size_t>(ob)]) return false;
      slot = ob;
      used[static_cast<std::size_t>(ob)] = 1;
      return true;
    };
    for (ValueId d = 0; d < A.interp.main_domain.size(); ++d)
      if (!force(fa.at(d), fb.at(dimg(d)))) return false;
    if (A.interp.policy == BottomPolicy::Lifted && !force(fa.at(kBot), fb.at(kBot))) return false;
    // leftovers are unconstrained; pair them in canonical order
    std::vector<ValueId> free_b;
    for (ValueId ob = 0; ob < B.interp.output_domain.size(); ++ob)
      if (!used[static_cast<std::size_t>(ob)]) free_b.push_back(ob);
    std::size_t next = 0;
    for (ValueId oa = 0; oa < A.interp.output_domain.size(); ++oa)
      if (omap[static_cast<std::size_t>(oa)] == kNone) omap[static_cast<std::size_t>(oa)] = free_b[next++];

    build_witness(imap, omap);
    return true;
  }

  void build_witness(const std::vector<ValueId>& imap, const std::vector<ValueId>& omap) {
    witness_ = IsomorphismWitness{};
    witness_.component_perm = comp_perm_;
    witness_.edge_label_swap = swap_;
    witness_.symbol_map = sym_fwd_;
    witness_.vertex_maps.resize(A.components.size());
    for (std::size_t c = 0; c < A.components.size(); ++c) {
      const auto& ga = A.components[c];
      const auto& gb = B.components[static_cast<std::size_t>(comp_perm_[c])];
      for (int v = 0; v < ga.vertex_count(); ++v)
        witness_.vertex_maps[c].emplace(
            ga.vertex_ids[static_cast<std::size_t>(v)],
            gb.vertex_ids[static_cast<std::size_t>(vmaps_[c][static_cast<std::size_t>(v)])]);
    }
    for (ValueId d = 0; d < A.interp.main_domain.size(); ++d)
      witness_.data_map.emplace(A.interp.main_domain.token_of(d),
                                B.interp.main_domain.token_of(dmap_[static_cast<std::size_t>(d)]));
    for (ValueId d = 0; d < A.interp.input_domain.size(); ++d)
      witness_.input_map.emplace(A.interp.input_domain.token_of(d),
                                 B.interp.input_domain.token_of(imap[static_cast<std::size_t>(d)]));
    for (ValueId d = 0; d < A.interp.output_domain.size(); ++d)
      witness_.output_map.emplace(A.interp.output_domain.token_of(d),
                                  B.interp.output_domain.token_of(omap[static_cast<std::size_t>(d)]));
  }
};

}  // namespace detail

inline std::optional<IsomorphismWitness> check_isomorphism(const ProtoAlgorithm& a,
                                                           const ProtoAlgorithm& b,
                                                           const ResourceCaps& caps = {}) {
  return detail::IsoSearch(a, b, caps.search_budget).run();
}

// Re-checks every clause of a claimed witness from first principles.
inline std::vector<Diagnostic> verify_isomorphism(const ProtoAlgorithm& a, const ProtoAlgorithm& b,
                                                  const IsomorphismWitness& w) {
  std::vector<Diagnostic> out;
  auto err = [&](std::string where, std::string msg) {
    out.push_back(make_error("NotAnIsomorphism", std::move(where), std::move(msg)));
  };

  const int n = static_cast<int>(a.components.size());
  if (static_cast<int>(b.components.size()) != n || static_cast<int>(w.component_perm.size()) != n) {
    err("components", "component counts do not line up");
    return out;
  }
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    int j = w.component_perm[static_cast<std::size_t>(i)];
    if (j < 0 || j >= n || used[static_cast<std::size_t>(j)]) {
      err("components", "component map is not a bijection");
      return out;
    }
    used[static_cast<std::size_t>(j)] = 1;
  }

  auto map_token = [&](const std::map<std::string, std::string>& m, const std::string& t,
                       const char* what) -> std::string {
    auto it = m.find(t);
    if (it == m.end()) {
      err(what, "no image for '" + t + "'");
      return "";
    }
    return it->second;
  };

  auto sym = [&](const std::string& s) { return map_token(w.symbol_map, s, "symbols"); };
  if (w.symbol_map.count(kIni) && w.symbol_map.at(kIni) != kIni) err("symbols", "ini must map to ini");
  if (w.symbol_map.count(kFin) && w.symbol_map.at(kFin) != kFin) err("symbols", "fin must map to fin");

  auto check_bijection = [&](const std::map<std::string, std::string>& m, std::size_t want,
                             const char* what) {
    std::set<std::string> images;
    for (const auto& [k, v] : m) images.insert(v);
    if (m.size() != want || images.size() != want) err(what, "map is not a bijection");
  };
  check_bijection(w.data_map, static_cast<std::size_t>(a.interp.main_domain.size()), "data");
  check_bijection(w.input_map, static_cast<std::size_t>(a.interp.input_domain.size()), "inputs");
  check_bijection(w.output_map, static_cast<std::size_t>(a.interp.output_domain.size()), "outputs");
  if (!out.empty()) return out;

  auto bl = [&](int lab) { return lab == -1 ? -1 : (w.edge_label_swap ? 1 - lab : lab); };

  for (int i = 0; i < n; ++i) {
    const auto& ga = a.components[static_cast<std::size_t>(i)];
    const auto& gb = b.components[static_cast<std::size_t>(w.component_perm[static_cast<std::size_t>(i)])];
    const auto& vm = w.vertex_maps[static_cast<std::size_t>(i)];
    if (vm.size() != static_cast<std::size_t>(ga.vertex_count()) ||
        ga.vertex_count() != gb.vertex_count()) {
      err("vertices", "vertex map sizes do not line up in component " + std::to_string(i + 1));
      return out;
    }
    auto vimg = [&](int v) {
      auto it = vm.find(ga.vertex_ids[static_cast<std::size_t>(v)]);
      return it == vm.end() ? -1 : gb.index_of(it->second);
    };
    for (int v = 0; v < ga.vertex_count(); ++v) {
      int v2 = vimg(v);
      if (v2 < 0) {
        err("vertices", "vertex image missing in component " + std::to_string(i + 1));
        return out;
      }
      if (sym(ga.label[static_cast<std::size_t>(v)]) != gb.label[static_cast<std::size_t>(v2)])
        err("labels", "label of '" + ga.vertex_ids[static_cast<std::size_t>(v)] + "' does not commute");
      for (int u = 0; u < ga.vertex_count(); ++u) {
        const Edge* ea = nullptr;
        for (const Edge& e : ga.out[static_cast<std::size_t>(v)])
          if (e.to == u) ea = &e;
        const Edge* eb = nullptr;
        for (const Edge& e : gb.out[static_cast<std::size_t>(v2)])
          if (e.to == vimg(u)) eb = &e;
        if ((ea == nullptr) != (eb == nullptr))
          err("edges", "edge preservation fails at '" + ga.vertex_ids[static_cast<std::size_t>(v)] + "'");
        else if (ea && bl(ea->label) != eb->label)
          err("edges", "edge label commutation fails at '" + ga.vertex_ids[static_cast<std::size_t>(v)] + "'");
      }
    }
  }

  // interpretation commutation
  const auto& DA = a.interp.main_domain;
  auto dimg = [&](ValueId v) -> ValueId {
    return v == kBot ? kBot : b.interp.main_domain.id_of(w.data_map.at(DA.token_of(v)));
  };
  bool lifted = a.interp.policy == BottomPolicy::Lifted && b.interp.policy == BottomPolicy::Lifted;
  if (a.interp.policy != b.interp.policy) err("interpretation", "bottom policies differ");

  for (ValueId d = 0; d < a.interp.input_domain.size(); ++d) {
    ValueId db = b.interp.input_domain.id_of(w.input_map.at(a.interp.input_domain.token_of(d)));
    if (dimg(a.interp.unary.at(kIni).at(d)) != b.interp.unary.at(kIni).at(db))
      err("interpretation/ini", "ini does not commute on '" + a.interp.input_domain.token_of(d) + "'");
  }
  auto oimg = [&](ValueId v) -> ValueId {
    return v == kBot ? kBot : b.interp.output_domain.id_of(w.output_map.at(a.interp.output_domain.token_of(v)));
  };
  for (ValueId d = kBot; d < a.interp.main_domain.size(); ++d) {
    if (d == kBot && !lifted) continue;
    if (oimg(a.interp.unary.at(kFin).at(d)) != b.interp.unary.at(kFin).at(dimg(d)))
      err("interpretation/fin", "fin does not commute on '" + DA.token_of(d) + "'");
  }
  for (const auto& f : a.alphabet.processing) {
    if (f == kIni || f == kFin) continue;
    const auto& ta = a.interp.unary.at(f);
    const auto& tb = b.interp.unary.at(w.symbol_map.at(f));
    for (ValueId d = kBot; d < a.interp.main_domain.size(); ++d) {
      if (d == kBot && !lifted) continue;
      if (dimg(ta.at(d)) != tb.at(dimg(d)))
        err("interpretation/" + f, "table does not commute on '" + DA.token_of(d) + "'");
    }
  }
  for (const auto& p : a.alphabet.predicate) {
    const auto& ta = a.interp.pred.at(p);
    const auto& tb = b.interp.pred.at(w.symbol_map.at(p));
    for (ValueId d = kBot; d < a.interp.main_domain.size(); ++d) {
      if (d == kBot && !lifted) continue;
      ValueId lhs = ta.at(d);
      if ((w.edge_label_swap ? 1 - lhs : lhs) != tb.at(dimg(d)))
        err("interpretation/" + p, "predicate does not commute on '" + DA.token_of(d) + "'");
    }
  }
  auto check_binary = [&](const std::string& f) {
    const auto& ta = a.interp.binary.at(f);
    const auto& tb = b.interp.binary.at(w.symbol_map.at(f));
    for (ValueId x = kBot; x < a.interp.main_domain.size(); ++x)
      for (ValueId y = kBot; y < a.interp.main_domain.size(); ++y) {
        if ((x == kBot || y == kBot) && !lifted) continue;
        if (dimg(ta.at(x, y)) != tb.at(dimg(x), dimg(y)))
          err("interpretation/" + f,
              "table does not commute on (" + DA.token_of(x) + "," + DA.token_of(y) + ")");
      }
  };
  for (const auto& f : a.alphabet.setting) check_binary(f);
  for (const auto& f : a.alphabet.getting) check_binary(f);

  return out;
}

}  // namespace protoalg
