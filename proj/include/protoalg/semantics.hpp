#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "protoalg/diagnostics.hpp"
#include "protoalg/proto_algorithm.hpp"
#include "protoalg/state.hpp"

namespace protoalg {

enum class Variant { Algorithmic, Computational };

inline const char* variant_name(Variant v) {
  return v == Variant::Algorithmic ? "algorithmic" : "computational";
}

namespace detail {

inline void canonicalize_states(std::vector<State>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace detail

// The full step relation.  An empty result means the state is stuck, which
// can only happen under the strict bottom policy (or from states no rule
// addresses, such as an unset scheduled slot).
inline std::vector<State> algorithmic_step(const ProtoAlgorithm& a, const State& s) {
  std::vector<State> out;
  const int n = a.component_count();

  switch (s.kind()) {
    case State::Kind::Final:
      out.push_back(s);  // final states step to themselves
      return out;

    case State::Kind::Initial: {
      const int i = a.main_index;
      const auto& g = a.components[static_cast<std::size_t>(i)];
      if (g.label[static_cast<std::size_t>(g.root)] != kIni) break;
      const ValueId d = a.interp.apply_ini(s.input);
      for (const Edge& e : g.out[static_cast<std::size_t>(g.root)]) {
        State t;
        t.ctrl.resize(static_cast<std::size_t>(n));
        t.priv.assign(static_cast<std::size_t>(n), kBot);
        for (int k = 0; k < n; ++k)
          t.ctrl[static_cast<std::size_t>(k)] = a.components[static_cast<std::size_t>(k)].root;
        t.ctrl[static_cast<std::size_t>(i)] = e.to;
        t.priv[static_cast<std::size_t>(i)] = d;
        for (int j = 0; j < n; ++j) {
          t.sched = j;
          out.push_back(t);
        }
      }
      break;
    }

    case State::Kind::Internal: {
      const int i = s.sched;
      if (i < 0) break;
      const int v = s.ctrl[static_cast<std::size_t>(i)];
      if (v < 0) break;
      const auto& g = a.components[static_cast<std::size_t>(i)];
      const std::string& f = g.label[static_cast<std::size_t>(v)];
      const ValueId x = s.priv[static_cast<std::size_t>(i)];

      switch (g.label_kind[static_cast<std::size_t>(v)]) {
        case SymbolKind::Processing: {
          if (f == kIni) break;  // ini applies to initial states only
          if (f == kFin) {
            const ValueId d_o = a.interp.apply_fin(x);
            if (d_o == kNone) break;
            out.push_back(make_final(a, d_o));
            break;
          }
          const ValueId d = a.interp.apply_processing(f, x);
          if (d == kNone) break;
          for (const Edge& e : g.out[static_cast<std::size_t>(v)]) {
            State t = s;
            t.ctrl[static_cast<std::size_t>(i)] = e.to;
            t.priv[static_cast<std::size_t>(i)] = d;
            for (int j = 0; j < n; ++j) {
              t.sched = j;
              out.push_back(t);
            }
          }
          break;
        }
        case SymbolKind::Setting: {
          const ValueId d = a.interp.apply_binary(f, x, s.shared);
          if (d == kNone) break;
          for (const Edge& e : g.out[static_cast<std::size_t>(v)]) {
            State t = s;
            t.ctrl[static_cast<std::size_t>(i)] = e.to;
            t.shared = d;
            for (int j = 0; j < n; ++j) {
              t.sched = j;
              out.push_back(t);
            }
          }
          break;
        }
        case SymbolKind::Getting: {
          const ValueId d = a.interp.apply_binary(f, x, s.shared);
          if (d == kNone) break;
          for (const Edge& e : g.out[static_cast<std::size_t>(v)]) {
            State t = s;
            t.ctrl[static_cast<std::size_t>(i)] = e.to;
            t.priv[static_cast<std::size_t>(i)] = d;
            for (int j = 0; j < n; ++j) {
              t.sched = j;
              out.push_back(t);
            }
          }
          break;
        }
        case SymbolKind::Predicate: {
          const ValueId b = a.interp.apply_predicate(f, x);
          if (b == kNone) break;
          const Edge* e = g.edge_with_label(v, static_cast<int>(b));
          if (e == nullptr) break;
          State t = s;  // the scheduled index is retained
          t.ctrl[static_cast<std::size_t>(i)] = e->to;
          out.push_back(t);
          break;
        }
      }
      break;
    }
  }
  detail::canonicalize_states(out);
  return out;
}

// Like the algorithmic step, but condition inspections are concealed: from
// a state whose scheduled component sits at a predicate vertex, the step
// first runs the (deterministic) predicate chain to its end.  The chain is
// finite because no cycle consists of predicate vertices only.
inline std::vector<State> computational_step(const ProtoAlgorithm& a, const State& s) {
  State cur = s;
  if (cur.kind() == State::Kind::Internal) {
    int guard = 0;
    while (true) {
      const int i = cur.sched;
      if (i < 0) break;
      const int v = cur.ctrl[static_cast<std::size_t>(i)];
      if (v < 0) break;
      const auto& g = a.components[static_cast<std::size_t>(i)];
      if (g.label_kind[static_cast<std::size_t>(v)] != SymbolKind::Predicate) break;
      const ValueId b = a.interp.apply_predicate(g.label[static_cast<std::size_t>(v)],
                                                 cur.priv[static_cast<std::size_t>(i)]);
      if (b == kNone) return {};  // strict policy: the chain blocks
      const Edge* e = g.edge_with_label(v, static_cast<int>(b));
      if (e == nullptr) return {};
      cur.ctrl[static_cast<std::size_t>(i)] = e->to;
      if (++guard > g.vertex_count())
        throw std::logic_error("predicate chain longer than the component; validation is broken");
    }
  }
  return algorithmic_step(a, cur);
}

inline std::vector<State> step(const ProtoAlgorithm& a, const State& s, Variant variant) {
  return variant == Variant::Algorithmic ? algorithmic_step(a, s) : computational_step(a, s);
}

// Extensional successor structure over the reachable states (plus every
// final state, one per output value, which equivalence coverage needs even
// when unreachable).  States are kept in canonical (sorted) order.
struct StateGraph {
  Variant variant = Variant::Algorithmic;
  std::vector<State> states;
  std::vector<std::vector<int>> succ;
  std::vector<char> from_initial;  // reached from the seeded initial states
  std::vector<int> stuck;          // indices with no successors

  int size() const { return static_cast<int>(states.size()); }

  int index_of(const State& s) const {
    auto it = std::lower_bound(states.begin(), states.end(), s);
    if (it == states.end() || !(*it == s)) return -1;
    return static_cast<int>(it - states.begin());
  }
};

inline StateGraph build_state_graph(const ProtoAlgorithm& a, Variant variant,
                                    const std::vector<ValueId>& inputs,
                                    std::size_t state_cap = ResourceCaps{}.state_cap) {
  std::map<State, int> index;
  std::vector<State> order;
  std::deque<int> work;

  auto intern = [&](const State& s) {
    auto [it, inserted] = index.emplace(s, static_cast<int>(order.size()));
    if (inserted) {
      order.push_back(s);
      work.push_back(it->second);
      if (order.size() > state_cap)
        throw resource_bound_error("state graph exceeds the cap of " + std::to_string(state_cap) +
                                   " states");
    }
    return it->second;
  };

  std::vector<int> seeds;
  for (ValueId d_i : inputs) seeds.push_back(intern(make_initial(a, d_i)));
  for (ValueId d_o = 0; d_o < a.interp.output_domain.size(); ++d_o) intern(make_final(a, d_o));

  std::vector<std::vector<int>> succ_tmp;
  while (!work.empty()) {
    int id = work.front();
    work.pop_front();
    const State s = order[static_cast<std::size_t>(id)];
    std::vector<int> row;
    for (const State& t : step(a, s, variant)) row.push_back(intern(t));
    succ_tmp.resize(order.size());
    succ_tmp[static_cast<std::size_t>(id)] = std::move(row);
  }
  succ_tmp.resize(order.size());

  // Re-index into canonical order.
  StateGraph g;
  g.variant = variant;
  g.states = order;
  std::sort(g.states.begin(), g.states.end());
  std::vector<int> remap(order.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    remap[i] = g.index_of(order[i]);
  g.succ.assign(g.states.size(), {});
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto& row = g.succ[static_cast<std::size_t>(remap[i])];
    for (int t : succ_tmp[i]) row.push_back(remap[static_cast<std::size_t>(t)]);
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }

  // Reachability from the seeded initial states.
  g.from_initial.assign(g.states.size(), 0);
  std::deque<int> bfs;
  for (int s : seeds) {
    int i = remap[static_cast<std::size_t>(s)];
    if (!g.from_initial[static_cast<std::size_t>(i)]) {
      g.from_initial[static_cast<std::size_t>(i)] = 1;
      bfs.push_back(i);
    }
  }
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop_front();
    for (int t : g.succ[static_cast<std::size_t>(v)])
      if (!g.from_initial[static_cast<std::size_t>(t)]) {
        g.from_initial[static_cast<std::size_t>(t)] = 1;
        bfs.push_back(t);
      }
  }

  for (int i = 0; i < g.size(); ++i)
    if (g.succ[static_cast<std::size_t>(i)].empty()) g.stuck.push_back(i);
  return g;
}

inline std::vector<ValueId> all_inputs(const ProtoAlgorithm& a) {
  std::vector<ValueId> inputs;
  for (ValueId d = 0; d < a.interp.input_domain.size(); ++d) inputs.push_back(d);
  return inputs;
}

// A maximal finite exploration of the step relation from an initial state.
// FINAL runs stop at the first final state (the final self-loop is never
// unrolled); LASSO runs encode a divergent run as stem plus cycle; STUCK
// runs end in a state with no enabled step; CUTOFF runs hit the step bound.
struct Run {
  Variant variant = Variant::Algorithmic;
  std::vector<State> states;
  enum class Terminal { Final, Stuck, Cutoff, Lasso } terminal = Terminal::Final;
  int cycle_start = -1;    // LASSO: index the closing edge returns to
  std::size_t bound = 0;   // CUTOFF: the bound that fired

  friend bool operator<(const Run& x, const Run& y) {
    if (x.states != y.states) return x.states < y.states;
    return static_cast<int>(x.terminal) < static_cast<int>(y.terminal);
  }
};

inline const char* terminal_name(Run::Terminal t) {
  switch (t) {
    case Run::Terminal::Final: return "FINAL";
    case Run::Terminal::Stuck: return "STUCK";
    case Run::Terminal::Cutoff: return "CUTOFF";
    case Run::Terminal::Lasso: return "LASSO";
  }
  return "?";
}

inline std::vector<Run> enumerate_runs(const ProtoAlgorithm& a, ValueId d_i, Variant variant,
                                       std::size_t max_steps = 10000, std::size_t max_runs = 100000) {
  std::vector<Run> runs;
  std::map<State, std::vector<State>> succ_cache;
  auto successors = [&](const State& s) -> const std::vector<State>& {
    auto it = succ_cache.find(s);
    if (it == succ_cache.end()) it = succ_cache.emplace(s, step(a, s, variant)).first;
    return it->second;
  };

  std::vector<State> path;
  std::map<State, int> on_path;
  std::vector<std::size_t> cursor;

  auto emit = [&](Run::Terminal t, int cycle_start, std::size_t bound) {
    if (runs.size() >= max_runs)
      throw resource_bound_error("run enumeration exceeds the cap of " + std::to_string(max_runs) +
                                 " runs");
    Run r;
    r.variant = variant;
    r.states = path;
    r.terminal = t;
    r.cycle_start = cycle_start;
    r.bound = bound;
    runs.push_back(std::move(r));
  };

  path.push_back(make_initial(a, d_i));
  on_path.emplace(path.back(), 0);
  cursor.push_back(0);

  while (!path.empty()) {
    const State& s = path.back();
    bool leaf = false;
    if (cursor.back() == 0) {
      // first visit: terminal checks
      if (s.kind() == State::Kind::Final) {
        emit(Run::Terminal::Final, -1, 0);
        leaf = true;
      } else if (successors(s).empty()) {
        emit(Run::Terminal::Stuck, -1, 0);
        leaf = true;
      } else if (path.size() >= max_steps) {
        emit(Run::Terminal::Cutoff, -1, max_steps);
        leaf = true;
      }
    }
    if (!leaf) {
      const auto& succs = successors(s);
      if (cursor.back() < succs.size()) {
        const State& t = succs[cursor.back()++];
        auto it = on_path.find(t);
        if (it != on_path.end()) {
          emit(Run::Terminal::Lasso, it->second, 0);
          continue;
        }
        on_path.emplace(t, static_cast<int>(path.size()));
        path.push_back(t);
        cursor.push_back(0);
        continue;
      }
      leaf = true;  // exhausted successors
    }
    on_path.erase(path.back());
    path.pop_back();
    cursor.pop_back();
  }

  std::sort(runs.begin(), runs.end());
  return runs;
}

// First proper output value along the sequence; _bot when no state carries one.
inline ValueId output_value(const Run& run) {
  for (const State& s : run.states)
    if (s.output != kBot) return s.output;
  return kBot;
}

// Divergence means some run has an infinite all-internal suffix.  Over a
// finite state space an infinite run exists exactly when a cycle is
// reachable, and a cycle on a run that avoids final states consists of
// internal states, so the check reduces to reaching a cycle of internal
// states in the algorithmic state graph.
struct DivergenceReport {
  bool divergent = false;
  std::optional<Run> witness;       // a lasso run entering the cycle
  std::vector<State> stuck_states;  // reachable states with no enabled step
};

namespace detail {

struct Lasso {
  std::vector<int> path;  // source ..= last cycle state; the closing edge returns into the path
  int cycle_start = -1;   // index of the state the closing edge returns to
};

// A cycle through internal states of `g` reachable from `source`, returned
// as a lasso (stem from source, then the cycle body), or nullopt.
inline std::optional<Lasso> reachable_internal_lasso(const StateGraph& g, int source) {
  const int n = g.size();
  std::vector<int> color(static_cast<std::size_t>(n), 0);
  std::vector<int> parent(static_cast<std::size_t>(n), -1);
  std::vector<std::pair<int, std::size_t>> frames;

  auto is_internal = [&](int v) {
    return g.states[static_cast<std::size_t>(v)].kind() == State::Kind::Internal;
  };

  frames.emplace_back(source, 0);
  color[static_cast<std::size_t>(source)] = 1;
  while (!frames.empty()) {
    int v = frames.back().first;
    const auto& succs = g.succ[static_cast<std::size_t>(v)];
    bool descended = false;
    while (frames.back().second < succs.size()) {
      int w = succs[frames.back().second++];
      if (color[static_cast<std::size_t>(w)] == 1 && is_internal(w) && is_internal(v)) {
        // candidate cycle w ->* v -> w along the DFS spine
        bool all_internal = true;
        for (int x = v; x != w; x = parent[static_cast<std::size_t>(x)])
          all_internal = all_internal && is_internal(x);
        if (all_internal) {
          Lasso lasso;
          for (int x = v; x != -1; x = parent[static_cast<std::size_t>(x)]) lasso.path.push_back(x);
          std::reverse(lasso.path.begin(), lasso.path.end());  // source ..= v
          for (std::size_t i = 0; i < lasso.path.size(); ++i)
            if (lasso.path[i] == w) lasso.cycle_start = static_cast<int>(i);
          return lasso;
        }
      }
      if (color[static_cast<std::size_t>(w)] == 0) {
        color[static_cast<std::size_t>(w)] = 1;
        parent[static_cast<std::size_t>(w)] = v;
        frames.emplace_back(w, 0);
        descended = true;
        break;
      }
    }
    if (!descended) {
      color[static_cast<std::size_t>(v)] = 2;
      frames.pop_back();
    }
  }
  return std::nullopt;
}

}  // namespace detail

inline DivergenceReport divergence_from_graph(const ProtoAlgorithm& a, const StateGraph& g,
                                              ValueId d_i) {
  DivergenceReport rep;
  for (int s : g.stuck)
    if (g.from_initial[static_cast<std::size_t>(s)])
      rep.stuck_states.push_back(g.states[static_cast<std::size_t>(s)]);

  int source = g.index_of(make_initial(a, d_i));
  if (source < 0) return rep;
  if (auto lasso = detail::reachable_internal_lasso(g, source)) {
    Run r;
    r.variant = g.variant;
    for (int idx : lasso->path) r.states.push_back(g.states[static_cast<std::size_t>(idx)]);
    r.cycle_start = lasso->cycle_start;
    r.terminal = Run::Terminal::Lasso;
    rep.divergent = true;
    rep.witness = std::move(r);
  }
  return rep;
}

inline DivergenceReport divergence_analysis(const ProtoAlgorithm& a, ValueId d_i,
                                            std::size_t state_cap = ResourceCaps{}.state_cap) {
  StateGraph g = build_state_graph(a, Variant::Algorithmic, {d_i}, state_cap);
  return divergence_from_graph(a, g, d_i);
}

// The function computed by the model: per input, either the set of output
// values over all runs, or undefined with a divergence (or, under the
// strict policy, stuckness) witness.  Undefined entries carry the reachable
// final outputs as a non-normative diagnostic.
struct ComputedFunction {
  struct Entry {
    bool defined = false;
    std::vector<ValueId> outputs;  // defined entries: exactly these
    enum class Reason { None, Divergent, Stuck } reason = Reason::None;
    std::optional<Run> divergence_witness;
    std::vector<State> stuck_witness;
    std::vector<ValueId> partial_outputs;  // diagnostic for undefined entries
  };
  std::vector<Entry> entries;  // indexed by input domain id
};

inline ComputedFunction computed_function(const ProtoAlgorithm& a,
                                          std::size_t state_cap = ResourceCaps{}.state_cap) {
  ComputedFunction cf;
  for (ValueId d_i = 0; d_i < a.interp.input_domain.size(); ++d_i) {
    StateGraph g = build_state_graph(a, Variant::Algorithmic, {d_i}, state_cap);
    ComputedFunction::Entry e;

    std::vector<ValueId> outs;
    for (int i = 0; i < g.size(); ++i) {
      const State& s = g.states[static_cast<std::size_t>(i)];
      if (g.from_initial[static_cast<std::size_t>(i)] && s.kind() == State::Kind::Final)
        outs.push_back(s.output);
    }
    std::sort(outs.begin(), outs.end());
    outs.erase(std::unique(outs.begin(), outs.end()), outs.end());

    DivergenceReport div = divergence_from_graph(a, g, d_i);
    if (div.divergent) {
      e.defined = false;
      e.reason = ComputedFunction::Entry::Reason::Divergent;
      e.divergence_witness = div.witness;
      e.partial_outputs = outs;
    } else if (!div.stuck_states.empty()) {
      e.defined = false;
      e.reason = ComputedFunction::Entry::Reason::Stuck;
      e.stuck_witness = div.stuck_states;
      e.partial_outputs = outs;
    } else {
      e.defined = true;
      e.outputs = outs;
    }
    cf.entries.push_back(std::move(e));
  }
  return cf;
}

}  // namespace protoalg
