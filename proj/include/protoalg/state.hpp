#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

#include "protoalg/proto_algorithm.hpp"
#include "protoalg/values.hpp"

namespace protoalg {

// A state (d_i, c, d_o): the control tuple c holds a per-component vertex,
// a per-component private datum, the shared datum, and the scheduled
// component.  All-kBot control is the dummy control tuple of initial and
// final states.  Field order doubles as the canonical state order.
struct State {
  ValueId input = kBot;            // d_i, member of the input domain or _bot
  std::vector<std::int32_t> ctrl;  // vertex index per component, kBot if unset
  std::vector<ValueId> priv;       // private datum per component
  ValueId shared = kBot;
  std::int32_t sched = kBot;       // 0-based scheduled component, kBot if unset
  ValueId output = kBot;           // d_o

  enum class Kind { Initial, Internal, Final };

  bool control_is_bot() const {
    for (auto v : ctrl)
      if (v != kBot) return false;
    for (auto v : priv)
      if (v != kBot) return false;
    return shared == kBot && sched == kBot;
  }

  Kind kind() const {
    if (input != kBot) return Kind::Initial;
    if (output != kBot) return Kind::Final;
    return Kind::Internal;
  }

  auto operator<=>(const State&) const = default;
};

inline State make_initial(const ProtoAlgorithm& a, ValueId d_i) {
  State s;
  s.input = d_i;
  s.ctrl.assign(static_cast<std::size_t>(a.component_count()), kBot);
  s.priv.assign(static_cast<std::size_t>(a.component_count()), kBot);
  return s;
}

inline State make_final(const ProtoAlgorithm& a, ValueId d_o) {
  State s;
  s.output = d_o;
  s.ctrl.assign(static_cast<std::size_t>(a.component_count()), kBot);
  s.priv.assign(static_cast<std::size_t>(a.component_count()), kBot);
  return s;
}

inline const char* kind_label(State::Kind k) {
  switch (k) {
    case State::Kind::Initial: return "initial";
    case State::Kind::Internal: return "internal";
    case State::Kind::Final: return "final";
  }
  return "?";
}

inline std::string state_to_string(const ProtoAlgorithm& a, const State& s) {
  auto vtx = [&](int i) {
    return s.ctrl[static_cast<std::size_t>(i)] == kBot
               ? std::string(kBotToken)
               : a.components[static_cast<std::size_t>(i)]
                     .vertex_ids[static_cast<std::size_t>(s.ctrl[static_cast<std::size_t>(i)])];
  };
  std::string out = "(" + a.interp.input_domain.token_of(s.input) + "|";
  for (int i = 0; i < a.component_count(); ++i) out += (i ? "," : "") + vtx(i);
  out += "|";
  for (int i = 0; i < a.component_count(); ++i)
    out += (i ? "," : "") + a.interp.main_domain.token_of(s.priv[static_cast<std::size_t>(i)]);
  out += "|" + a.interp.main_domain.token_of(s.shared);
  out += "|" + (s.sched == kBot ? std::string(kBotToken) : std::to_string(s.sched + 1));
  out += "|" + a.interp.output_domain.token_of(s.output) + ")";
  return out;
}

struct RawState {
  std::string input;              // token or "_bot"
  std::vector<std::string> ctrl;  // vertex ids or "_bot"
  std::vector<std::string> priv;  // tokens or "_bot"
  std::string shared;
  std::string sched;  // 1-based index as text, or "_bot"
  std::string output;
};

// Checks the state well-formedness conditions and classifies the state.
inline Validated<State> classify_state(const ProtoAlgorithm& a, const RawState& raw) {
  Validated<State> result;
  auto err = [&](std::string code, std::string where, std::string msg) {
    result.diags.push_back(make_error(std::move(code), std::move(where), std::move(msg)));
  };
  const int n = a.component_count();
  State s;
  s.ctrl.assign(static_cast<std::size_t>(n), kBot);
  s.priv.assign(static_cast<std::size_t>(n), kBot);

  if (static_cast<int>(raw.ctrl.size()) != n || static_cast<int>(raw.priv.size()) != n) {
    err("IllFormedState", "control", "control and private tuples must have one slot per component");
    return result;
  }

  auto parse_value = [&](const Domain& dom, const std::string& tok, const char* where) {
    ValueId v = dom.id_of(tok);
    if (v == kNone) err("UndeclaredValue", where, "'" + tok + "' is not in the domain");
    return v;
  };
  s.input = parse_value(a.interp.input_domain, raw.input, "input");
  s.output = parse_value(a.interp.output_domain, raw.output, "output");
  s.shared = parse_value(a.interp.main_domain, raw.shared, "shared");
  for (int i = 0; i < n; ++i) {
    const auto& g = a.components[static_cast<std::size_t>(i)];
    if (raw.ctrl[static_cast<std::size_t>(i)] != kBotToken) {
      int v = g.index_of(raw.ctrl[static_cast<std::size_t>(i)]);
      if (v < 0)
        err("UnknownVertex", "control", "'" + raw.ctrl[static_cast<std::size_t>(i)] + "' is not a vertex");
      s.ctrl[static_cast<std::size_t>(i)] = v;
    }
    s.priv[static_cast<std::size_t>(i)] =
        parse_value(a.interp.main_domain, raw.priv[static_cast<std::size_t>(i)], "private");
  }
  if (raw.sched != kBotToken) {
    int j = 0;
    try {
      j = std::stoi(raw.sched);
    } catch (...) {
      j = 0;
    }
    if (j < 1 || j > n)
      err("IllFormedState", "sched", "scheduled index must be in 1.." + std::to_string(n));
    else
      s.sched = j - 1;
  }
  if (result.error_count() > 0) return result;

  if (s.control_is_bot()) {
    if ((s.input == kBot) != (s.output != kBot))
      err("IllFormedState", "state",
          "with the dummy control tuple, exactly one of input and output must be a proper value");
  } else {
    if (s.input != kBot || s.output != kBot)
      err("IllFormedState", "state", "with a live control tuple, input and output must both be _bot");
  }

  if (result.error_count() == 0) result.value = std::move(s);
  return result;
}

}  // namespace protoalg
