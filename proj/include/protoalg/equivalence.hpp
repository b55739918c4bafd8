#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "protoalg/diagnostics.hpp"
#include "protoalg/semantics.hpp"

namespace protoalg {

// A simulation of the left model by the right one, materialized over the
// two explored state graphs (reachable states from all inputs, plus every
// initial and final state).  The restriction is sound: successors of
// restricted states stay in the restriction and the coverage clauses only
// name initial and final states, so a simulation exists on the full state
// spaces iff one exists here.
struct SimulationWitness {
  Variant variant = Variant::Algorithmic;
  StateGraph left, right;
  std::vector<std::pair<int, int>> pairs;  // sorted

  bool contains(int a, int b) const {
    return std::binary_search(pairs.begin(), pairs.end(), std::make_pair(a, b));
  }
};

inline SimulationWitness inverse_witness(const SimulationWitness& w) {
  SimulationWitness inv;
  inv.variant = w.variant;
  inv.left = w.right;
  inv.right = w.left;
  inv.pairs.reserve(w.pairs.size());
  for (auto [a, b] : w.pairs) inv.pairs.emplace_back(b, a);
  std::sort(inv.pairs.begin(), inv.pairs.end());
  return inv;
}

namespace detail {

class PairBits {
 public:
  PairBits(int rows, int cols)
      : cols_(cols), bits_((static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) + 63) / 64, 0) {}

  bool get(int a, int b) const {
    std::size_t k = static_cast<std::size_t>(a) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(b);
    return (bits_[k >> 6] >> (k & 63)) & 1u;
  }
  void set(int a, int b) {
    std::size_t k = static_cast<std::size_t>(a) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(b);
    bits_[k >> 6] |= std::uint64_t{1} << (k & 63);
  }
  void clear(int a, int b) {
    std::size_t k = static_cast<std::size_t>(a) * static_cast<std::size_t>(cols_) + static_cast<std::size_t>(b);
    bits_[k >> 6] &= ~(std::uint64_t{1} << (k & 63));
  }

 private:
  int cols_;
  std::vector<std::uint64_t> bits_;
};

inline std::vector<std::vector<int>> predecessors(const StateGraph& g) {
  std::vector<std::vector<int>> pred(static_cast<std::size_t>(g.size()));
  for (int s = 0; s < g.size(); ++s)
    for (int t : g.succ[static_cast<std::size_t>(s)]) pred[static_cast<std::size_t>(t)].push_back(s);
  return pred;
}

// Greatest relation over kind-matching pairs closed under the transfer
// condition (both directions when `symmetric`), computed by iterated pair
// removal to a fixed point.
inline PairBits greatest_transfer_relation(const StateGraph& L, const StateGraph& R, bool symmetric,
                                           std::size_t pair_cap) {
  const std::size_t universe = static_cast<std::size_t>(L.size()) * static_cast<std::size_t>(R.size());
  if (universe > pair_cap)
    throw resource_bound_error("candidate pair universe " + std::to_string(universe) +
                               " exceeds the cap of " + std::to_string(pair_cap));

  PairBits rel(L.size(), R.size());
  for (int a = 0; a < L.size(); ++a)
    for (int b = 0; b < R.size(); ++b)
      if (L.states[static_cast<std::size_t>(a)].kind() == R.states[static_cast<std::size_t>(b)].kind())
        rel.set(a, b);

  auto transfer_ok = [&](int a, int b) {
    for (int t : L.succ[static_cast<std::size_t>(a)]) {
      bool found = false;
      for (int t2 : R.succ[static_cast<std::size_t>(b)])
        if (rel.get(t, t2)) {
          found = true;
          break;
        }
      if (!found) return false;
    }
    if (symmetric) {
      for (int t2 : R.succ[static_cast<std::size_t>(b)]) {
        bool found = false;
        for (int t : L.succ[static_cast<std::size_t>(a)])
          if (rel.get(t, t2)) {
            found = true;
            break;
          }
        if (!found) return false;
      }
    }
    return true;
  };

  const auto predL = predecessors(L);
  const auto predR = predecessors(R);
  std::deque<std::pair<int, int>> removed;
  for (int a = 0; a < L.size(); ++a)
    for (int b = 0; b < R.size(); ++b)
      if (rel.get(a, b) && !transfer_ok(a, b)) {
        rel.clear(a, b);
        removed.emplace_back(a, b);
      }
  while (!removed.empty()) {
    auto [t, t2] = removed.front();
    removed.pop_front();
    for (int a : predL[static_cast<std::size_t>(t)])
      for (int b : predR[static_cast<std::size_t>(t2)])
        if (rel.get(a, b) && !transfer_ok(a, b)) {
          rel.clear(a, b);
          removed.emplace_back(a, b);
        }
  }
  return rel;
}

inline std::vector<std::pair<int, int>> collect_pairs(const PairBits& rel, const StateGraph& L,
                                                      const StateGraph& R) {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < L.size(); ++a)
    for (int b = 0; b < R.size(); ++b)
      if (rel.get(a, b)) out.emplace_back(a, b);
  return out;
}

// Every initial state of L related to some initial state of R.
inline bool initial_coverage(const PairBits& rel, const StateGraph& L, const StateGraph& R,
                             std::string* missing) {
  for (int a = 0; a < L.size(); ++a) {
    if (L.states[static_cast<std::size_t>(a)].kind() != State::Kind::Initial) continue;
    bool covered = false;
    for (int b = 0; b < R.size() && !covered; ++b)
      covered = R.states[static_cast<std::size_t>(b)].kind() == State::Kind::Initial && rel.get(a, b);
    if (!covered) {
      if (missing) *missing = "initial state #" + std::to_string(a) + " is uncovered";
      return false;
    }
  }
  return true;
}

// Every final state of R related to some final state of L.
inline bool final_coverage(const PairBits& rel, const StateGraph& L, const StateGraph& R,
                           std::string* missing) {
  for (int b = 0; b < R.size(); ++b) {
    if (R.states[static_cast<std::size_t>(b)].kind() != State::Kind::Final) continue;
    bool covered = false;
    for (int a = 0; a < L.size() && !covered; ++a)
      covered = L.states[static_cast<std::size_t>(a)].kind() == State::Kind::Final && rel.get(a, b);
    if (!covered) {
      if (missing) *missing = "final state #" + std::to_string(b) + " of the right model is uncovered";
      return false;
    }
  }
  return true;
}

}  // namespace detail

// The greatest algorithmic/computational simulation of `a` by `b`, or
// nullopt when the coverage clauses fail (no simulation exists at all then,
// since any simulation is contained in the greatest transfer relation).
inline std::optional<SimulationWitness> greatest_simulation(const ProtoAlgorithm& a,
                                                            const ProtoAlgorithm& b, Variant variant,
                                                            const ResourceCaps& caps = {},
                                                            std::string* failure = nullptr) {
  SimulationWitness w;
  w.variant = variant;
  w.left = build_state_graph(a, variant, all_inputs(a), caps.state_cap);
  w.right = build_state_graph(b, variant, all_inputs(b), caps.state_cap);
  auto rel = detail::greatest_transfer_relation(w.left, w.right, /*symmetric=*/false, caps.pair_cap);
  std::string why;
  if (!detail::initial_coverage(rel, w.left, w.right, &why) ||
      !detail::final_coverage(rel, w.left, w.right, &why)) {
    if (failure) *failure = why;
    return std::nullopt;
  }
  w.pairs = detail::collect_pairs(rel, w.left, w.right);
  return w;
}

struct EquivalenceReport {
  Variant variant = Variant::Algorithmic;
  bool verdict = false;
  std::optional<SimulationWitness> witness;  // R; its inverse is the reverse simulation
  std::vector<ValueId> gamma_i;              // A input id -> B input id
  std::vector<ValueId> gamma_o;              // B output id -> A output id
  std::string failure;
};

// Input/output translations read off a simulation witness, picking the
// lowest canonically ordered partner when several qualify.
inline void extract_gammas(const SimulationWitness& w, std::vector<ValueId>& gamma_i,
                           std::vector<ValueId>& gamma_o, ValueId input_count, ValueId output_count) {
  gamma_i.assign(static_cast<std::size_t>(input_count), kNone);
  gamma_o.assign(static_cast<std::size_t>(output_count), kNone);
  for (auto [ai, bi] : w.pairs) {
    const State& s = w.left.states[static_cast<std::size_t>(ai)];
    const State& t = w.right.states[static_cast<std::size_t>(bi)];
    if (s.kind() == State::Kind::Initial && t.kind() == State::Kind::Initial &&
        gamma_i[static_cast<std::size_t>(s.input)] == kNone)
      gamma_i[static_cast<std::size_t>(s.input)] = t.input;
    if (s.kind() == State::Kind::Final && t.kind() == State::Kind::Final &&
        gamma_o[static_cast<std::size_t>(t.output)] == kNone)
      gamma_o[static_cast<std::size_t>(t.output)] = s.output;
  }
}

// Decides algorithmic/computational equivalence: a single relation must be
// a simulation in both directions (its inverse taken exactly), which the
// greatest kind-preserving relation with symmetric transfer witnesses
// whenever one exists.
inline EquivalenceReport check_equivalence(const ProtoAlgorithm& a, const ProtoAlgorithm& b,
                                           Variant variant, const ResourceCaps& caps = {}) {
  EquivalenceReport rep;
  rep.variant = variant;
  SimulationWitness w;
  w.variant = variant;
  w.left = build_state_graph(a, variant, all_inputs(a), caps.state_cap);
  w.right = build_state_graph(b, variant, all_inputs(b), caps.state_cap);
  auto rel = detail::greatest_transfer_relation(w.left, w.right, /*symmetric=*/true, caps.pair_cap);

  std::string why;
  bool ok = detail::initial_coverage(rel, w.left, w.right, &why) &&
            detail::final_coverage(rel, w.left, w.right, &why);
  if (ok) {
    // the inverse direction's coverage clauses
    for (int b2 = 0; b2 < w.right.size() && ok; ++b2) {
      if (w.right.states[static_cast<std::size_t>(b2)].kind() != State::Kind::Initial) continue;
      bool covered = false;
      for (int a2 = 0; a2 < w.left.size() && !covered; ++a2)
        covered = w.left.states[static_cast<std::size_t>(a2)].kind() == State::Kind::Initial &&
                  rel.get(a2, b2);
      if (!covered) {
        ok = false;
        why = "initial state #" + std::to_string(b2) + " of the right model is uncovered";
      }
    }
    for (int a2 = 0; a2 < w.left.size() && ok; ++a2) {
      if (w.left.states[static_cast<std::size_t>(a2)].kind() != State::Kind::Final) continue;
      bool covered = false;
      for (int b2 = 0; b2 < w.right.size() && !covered; ++b2)
        covered = w.right.states[static_cast<std::size_t>(b2)].kind() == State::Kind::Final &&
                  rel.get(a2, b2);
      if (!covered) {
        ok = false;
        why = "final state #" + std::to_string(a2) + " of the left model is uncovered";
      }
    }
  }

  if (!ok) {
    rep.verdict = false;
    rep.failure = why;
    return rep;
  }
  w.pairs = detail::collect_pairs(rel, w.left, w.right);
  rep.verdict = true;
  extract_gammas(w, rep.gamma_i, rep.gamma_o, a.interp.input_domain.size(),
                 b.interp.output_domain.size());
  rep.witness = std::move(w);
  return rep;
}

// Independent validator: re-checks kind preservation, transfer, and the two
// coverage clauses of a stored witness directly against its state graphs.
inline std::vector<Diagnostic> verify_simulation(const SimulationWitness& w) {
  std::vector<Diagnostic> out;
  auto err = [&](std::string code, std::string where, std::string msg) {
    out.push_back(make_error(std::move(code), std::move(where), std::move(msg)));
  };

  for (auto [ai, bi] : w.pairs) {
    if (ai < 0 || ai >= w.left.size() || bi < 0 || bi >= w.right.size()) {
      err("NotASimulation", "pairs", "pair indexes outside the state graphs");
      return out;
    }
    const State& s = w.left.states[static_cast<std::size_t>(ai)];
    const State& t = w.right.states[static_cast<std::size_t>(bi)];
    if (s.kind() != t.kind())
      err("KindPreservationViolated",
          "pair(" + std::to_string(ai) + "," + std::to_string(bi) + ")",
          std::string("related states have kinds ") + kind_label(s.kind()) + " and " + kind_label(t.kind()));
  }

  for (auto [ai, bi] : w.pairs) {
    for (int t : w.left.succ[static_cast<std::size_t>(ai)]) {
      bool found = false;
      for (int t2 : w.right.succ[static_cast<std::size_t>(bi)])
        if (w.contains(t, t2)) {
          found = true;
          break;
        }
      if (!found)
        err("TransferViolated", "pair(" + std::to_string(ai) + "," + std::to_string(bi) + ")",
            "successor #" + std::to_string(t) + " has no related successor on the right");
    }
  }

  for (int a = 0; a < w.left.size(); ++a) {
    if (w.left.states[static_cast<std::size_t>(a)].kind() != State::Kind::Initial) continue;
    bool covered = false;
    for (auto [ai, bi] : w.pairs)
      if (ai == a && w.right.states[static_cast<std::size_t>(bi)].kind() == State::Kind::Initial) {
        covered = true;
        break;
      }
    if (!covered) err("InitialCoverageViolated", "state#" + std::to_string(a), "uncovered initial state");
  }
  for (int b = 0; b < w.right.size(); ++b) {
    if (w.right.states[static_cast<std::size_t>(b)].kind() != State::Kind::Final) continue;
    bool covered = false;
    for (auto [ai, bi] : w.pairs)
      if (bi == b && w.left.states[static_cast<std::size_t>(ai)].kind() == State::Kind::Final) {
        covered = true;
        break;
      }
    if (!covered) err("FinalCoverageViolated", "state#" + std::to_string(b), "uncovered final state");
  }
  return out;
}

// Lifts a run of the left model to a pairwise-related, equal-length run of
// the right model along the transfer condition, choosing the canonically
// least witness at every step.  For non-FINAL runs the result is the
// equal-length related prefix, marked CUTOFF.
inline Run lift_run(const SimulationWitness& w, const Run& run, const std::vector<ValueId>& gamma_i) {
  if (run.states.empty()) throw not_a_simulation("cannot lift an empty run");
  const State& first = run.states.front();
  if (first.kind() != State::Kind::Initial) throw not_a_simulation("runs start at initial states");

  Run lifted;
  lifted.variant = run.variant;

  State start = w.right.states.empty() ? State{} : w.right.states.front();
  // locate the initial state of the right model with input gamma_i(d_i)
  ValueId want = gamma_i[static_cast<std::size_t>(first.input)];
  int cur = -1;
  for (int b = 0; b < w.right.size(); ++b) {
    const State& t = w.right.states[static_cast<std::size_t>(b)];
    if (t.kind() == State::Kind::Initial && t.input == want) {
      cur = b;
      break;
    }
  }
  int left_idx = w.left.index_of(first);
  if (cur < 0 || left_idx < 0 || !w.contains(left_idx, cur))
    throw not_a_simulation("initial states are not related under the witness");
  lifted.states.push_back(w.right.states[static_cast<std::size_t>(cur)]);
  (void)start;

  for (std::size_t k = 1; k < run.states.size(); ++k) {
    int next_left = w.left.index_of(run.states[k]);
    if (next_left < 0) throw not_a_simulation("run state missing from the witness state graph");
    int chosen = -1;
    for (int t2 : w.right.succ[static_cast<std::size_t>(cur)])
      if (w.contains(next_left, t2)) {
        chosen = t2;
        break;
      }
    if (chosen < 0) throw not_a_simulation("transfer fails along the run; the witness is not a simulation");
    cur = chosen;
    lifted.states.push_back(w.right.states[static_cast<std::size_t>(cur)]);
  }
  if (run.terminal == Run::Terminal::Final) {
    lifted.terminal = Run::Terminal::Final;
  } else {
    lifted.terminal = Run::Terminal::Cutoff;
    lifted.bound = lifted.states.size();
  }
  return lifted;
}

// Checks the consequences a simulation forces on the computed functions:
// (1) definedness transfer, (2) output modeling through the pointwise
// extension of gamma_o, and for algorithmic simulations (3) equal-length
// run lifting.  Violations signal checker defects, so everything found is
// reported rather than thrown.
struct Theorem1Report {
  bool clause1 = true;
  bool clause2 = true;
  bool clause3 = true;
  bool clause3_applicable = false;
  std::vector<std::string> violations;
};

inline Theorem1Report verify_theorem1(const ProtoAlgorithm& a, const ProtoAlgorithm& b,
                                      const SimulationWitness& w, const std::vector<ValueId>& gamma_i,
                                      const std::vector<ValueId>& gamma_o,
                                      std::size_t max_steps = 10000, std::size_t max_runs = 100000) {
  Theorem1Report rep;
  ComputedFunction fa = computed_function(a);
  ComputedFunction fb = computed_function(b);

  for (ValueId d_i = 0; d_i < a.interp.input_domain.size(); ++d_i) {
    const auto& ea = fa.entries[static_cast<std::size_t>(d_i)];
    const auto& eb = fb.entries[static_cast<std::size_t>(gamma_i[static_cast<std::size_t>(d_i)])];
    if (!ea.defined) continue;
    if (!eb.defined) {
      rep.clause1 = false;
      rep.violations.push_back("clause1: input " + a.interp.input_domain.token_of(d_i) +
                               " defined on the left, undefined on the right");
      continue;
    }
    for (ValueId d_o : ea.outputs) {
      bool modeled = false;
      for (ValueId d_o2 : eb.outputs)
        modeled = modeled || gamma_o[static_cast<std::size_t>(d_o2)] == d_o;
      if (!modeled) {
        rep.clause2 = false;
        rep.violations.push_back("clause2: output " + a.interp.output_domain.token_of(d_o) +
                                 " of input " + a.interp.input_domain.token_of(d_i) +
                                 " is not modeled through gamma_o");
      }
    }
  }

  if (w.variant == Variant::Algorithmic) {
    rep.clause3_applicable = true;
    for (ValueId d_i = 0; d_i < a.interp.input_domain.size(); ++d_i) {
      if (!fa.entries[static_cast<std::size_t>(d_i)].defined) continue;
      for (const Run& run : enumerate_runs(a, d_i, Variant::Algorithmic, max_steps, max_runs)) {
        Run lifted = lift_run(w, run, gamma_i);
        if (lifted.states.size() != run.states.size()) {
          rep.clause3 = false;
          rep.violations.push_back("clause3: lifted run length mismatch on input " +
                                   a.interp.input_domain.token_of(d_i));
          continue;
        }
        // the lifted sequence must itself be a run of the right model
        for (std::size_t k = 0; k + 1 < lifted.states.size(); ++k) {
          auto succs = step(b, lifted.states[k], w.variant);
          if (!std::binary_search(succs.begin(), succs.end(), lifted.states[k + 1])) {
            rep.clause3 = false;
            rep.violations.push_back("clause3: lifted sequence is not a run on input " +
                                     a.interp.input_domain.token_of(d_i));
            break;
          }
        }
        if (run.terminal == Run::Terminal::Final &&
            lifted.states.back().kind() != State::Kind::Final) {
          rep.clause3 = false;
          rep.violations.push_back("clause3: lifted run does not end final on input " +
                                   a.interp.input_domain.token_of(d_i));
        }
      }
    }
  }
  return rep;
}

}  // namespace protoalg
