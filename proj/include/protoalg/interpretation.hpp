#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "protoalg/alphabet.hpp"
#include "protoalg/diagnostics.hpp"
#include "protoalg/values.hpp"

namespace protoalg {

// Under the strict policy a step rule fires only when all of its operands
// are proper domain values; tables then cover exactly their declared
// signatures.  Under the lifted policy tables additionally cover _bot rows
// and every state can keep stepping, which is what makes multi-component
// models executable from their _bot-initialized private slots.
enum class BottomPolicy { Strict, Lifted };

enum class ValidationLevel { Strict, Lenient };

inline const char* bottom_policy_name(BottomPolicy p) {
  return p == BottomPolicy::Strict ? "strict" : "lifted";
}

struct RawTable {
  bool binary = false;
  // unary rows: arg -> result.  binary rows: (first=private, second=shared) -> result.
  std::vector<std::pair<std::string, std::string>> unary_rows;
  std::vector<std::tuple<std::string, std::string, std::string>> binary_rows;
};

struct RawDomains {
  std::vector<std::string> main, input, output;
};

struct RawInterpretation {
  std::string bottom_policy = "lifted";
  std::map<std::string, RawTable> tables;
};

struct Interpretation {
  Domain main_domain;    // D
  Domain input_domain;   // D_i
  Domain output_domain;  // D_o
  BottomPolicy policy = BottomPolicy::Lifted;

  // Rows are indexed by argument id + 1; slot 0 is the _bot row (kNone when
  // absent).  Predicate rows hold 0/1.
  struct Unary {
    std::vector<ValueId> row;
    ValueId at(ValueId a) const { return row[static_cast<std::size_t>(a + 1)]; }
  };
  struct Binary {
    std::vector<ValueId> cell;
    int stride = 0;
    ValueId at(ValueId a, ValueId b) const {
      return cell[static_cast<std::size_t>((a + 1) * stride + (b + 1))];
    }
  };

  std::unordered_map<std::string, Unary> unary;    // ini, fin, plain processing
  std::unordered_map<std::string, Binary> binary;  // setting, getting
  std::unordered_map<std::string, Unary> pred;

  // Minimality closure of the main domain: all values reachable from the
  // ini images under the function tables.
  std::vector<ValueId> closure;

  ValueId apply_ini(ValueId d_i) const { return unary.at(kIni).at(d_i); }

  // Step-rule operand lookups: kNone means the rule is not enabled.
  ValueId lookup_unary(const Unary& t, ValueId a) const {
    if (a == kBot && policy == BottomPolicy::Strict) return kNone;
    return t.at(a);
  }
  ValueId apply_fin(ValueId d) const { return lookup_unary(unary.at(kFin), d); }
  ValueId apply_processing(const std::string& f, ValueId d) const {
    return lookup_unary(unary.at(f), d);
  }
  ValueId apply_binary(const std::string& f, ValueId priv, ValueId shared) const {
    if ((priv == kBot || shared == kBot) && policy == BottomPolicy::Strict) return kNone;
    return binary.at(f).at(priv, shared);
  }
  ValueId apply_predicate(const std::string& p, ValueId d) const {
    return lookup_unary(pred.at(p), d);
  }
};

namespace detail {

inline std::vector<ValueId> minimality_closure(const Alphabet& alphabet, const Interpretation& in) {
  std::set<ValueId> closed;
  std::vector<ValueId> work;
  auto add = [&](ValueId v) {
    if (v == kBot || v == kNone) return;
    if (closed.insert(v).second) work.push_back(v);
  };
  for (ValueId d_i = 0; d_i < in.input_domain.size(); ++d_i) add(in.unary.at(kIni).at(d_i));
  const auto plain = alphabet.plain_processing();
  std::vector<const Interpretation::Binary*> bins;
  for (const auto& s : alphabet.setting) bins.push_back(&in.binary.at(s));
  for (const auto& s : alphabet.getting) bins.push_back(&in.binary.at(s));
  while (!work.empty()) {
    ValueId d = work.back();
    work.pop_back();
    for (const auto& f : plain) add(in.unary.at(f).at(d));
    // binary images over all pairs already in the closure
    std::vector<ValueId> snapshot(closed.begin(), closed.end());
    for (const auto* t : bins)
      for (ValueId e : snapshot) {
        add(t->at(d, e));
        add(t->at(e, d));
      }
  }
  return {closed.begin(), closed.end()};
}

}  // namespace detail

// Validates domains and tables.  Signature totality violations are always
// errors; the minimality condition and the setting/getting laws degrade to
// warnings under the lenient level.  The computed closure is attached to
// the result so callers can inspect which data is actually reachable.
inline Validated<Interpretation> validate_interpretation(const RawDomains& raw_domains,
                                                         const RawInterpretation& raw,
                                                         const Alphabet& alphabet, ValidationLevel level) {
  Validated<Interpretation> result;
  auto err = [&](std::string code, std::string where, std::string msg) {
    result.diags.push_back(make_error(std::move(code), std::move(where), std::move(msg)));
  };

  Interpretation in;
  if (raw.bottom_policy == "strict")
    in.policy = BottomPolicy::Strict;
  else if (raw.bottom_policy == "lifted")
    in.policy = BottomPolicy::Lifted;
  else
    err("UnknownField", "interpretation/bottom_policy",
        "bottom_policy must be 'strict' or 'lifted', got '" + raw.bottom_policy + "'");

  auto check_domain = [&](const std::vector<std::string>& toks, const char* name) {
    if (toks.empty()) err("EmptyDomain", std::string("domains/") + name, "domains must be non-empty");
    std::set<std::string> seen;
    for (const auto& t : toks) {
      if (t == kBotToken)
        err("BotInDomain", std::string("domains/") + name, "'_bot' cannot be a domain value");
      else if (t.empty())
        err("UndeclaredValue", std::string("domains/") + name, "domain values must be non-empty tokens");
      else if (!seen.insert(t).second)
        err("DuplicateId", std::string("domains/") + name, "value '" + t + "' declared twice");
    }
  };
  check_domain(raw_domains.main, "main");
  check_domain(raw_domains.input, "input");
  check_domain(raw_domains.output, "output");
  if (result.error_count() > 0) return result;

  in.main_domain = Domain(raw_domains.main);
  in.input_domain = Domain(raw_domains.input);
  in.output_domain = Domain(raw_domains.output);

  const Domain& D = in.main_domain;
  const bool lifted = in.policy == BottomPolicy::Lifted;

  for (const auto& [sym, table] : raw.tables)
    if (!alphabet.contains(sym))
      err("UnknownSymbol", "interpretation/tables/" + sym, "table for a symbol not in the alphabet");

  // Builds one unary table.  `bot_row`: 0 = forbidden, 1 = required under
  // the lifted policy.  Under the strict policy _bot rows are semantically
  // dead and are dropped without further checks, so a lifted document can
  // be re-validated under a strict override.
  auto build_unary = [&](const std::string& sym, const Domain& arg_dom, const Domain& res_dom,
                         bool result_may_bot, int bot_row) -> Interpretation::Unary {
    Interpretation::Unary t;
    t.row.assign(static_cast<std::size_t>(arg_dom.size()) + 1, kNone);
    const std::string where = "interpretation/tables/" + sym;
    auto it = raw.tables.find(sym);
    if (it == raw.tables.end()) {
      err("IncompleteTable", where, "no table for symbol '" + sym + "'");
      return t;
    }
    if (it->second.binary) {
      err("SignatureMismatch", where, "symbol '" + sym + "' takes one argument");
      return t;
    }
    for (const auto& [arg, res] : it->second.unary_rows) {
      ValueId a = arg_dom.id_of(arg);
      if (arg == kBotToken) {
        if (bot_row == 0 && lifted) {
          err("SignatureMismatch", where, "'" + sym + "' is never applied to _bot");
          continue;
        }
        if (!lifted) continue;  // dead row under the strict policy
        a = kBot;
      } else if (a == kNone) {
        err("UndeclaredValue", where + "/" + arg, "argument '" + arg + "' is outside the table's domain");
        continue;
      }
      if (t.row[static_cast<std::size_t>(a + 1)] != kNone) {
        err("DuplicateId", where + "/" + arg, "row declared twice");
        continue;
      }
      ValueId r = res_dom.id_of(res);
      if (res == kBotToken) {
        if (!result_may_bot) {
          err("SignatureMismatch", where + "/" + arg, "'" + sym + "' may not produce _bot");
          continue;
        }
        r = kBot;
      } else if (r == kNone) {
        err("UndeclaredValue", where + "/" + arg, "result '" + res + "' is outside the table's codomain");
        continue;
      }
      t.row[static_cast<std::size_t>(a + 1)] = r;
    }
    for (ValueId a = 0; a < arg_dom.size(); ++a)
      if (t.row[static_cast<std::size_t>(a + 1)] == kNone)
        err("IncompleteTable", where + "/" + arg_dom.token_of(a), "missing row");
    if (bot_row == 1 && lifted && t.row[0] == kNone)
      err("IncompleteTable", where + "/" + kBotToken, "missing _bot row");
    return t;
  };

  auto build_pred = [&](const std::string& sym) -> Interpretation::Unary {
    Interpretation::Unary t;
    t.row.assign(static_cast<std::size_t>(D.size()) + 1, kNone);
    const std::string where = "interpretation/tables/" + sym;
    auto it = raw.tables.find(sym);
    if (it == raw.tables.end()) {
      err("IncompleteTable", where, "no table for symbol '" + sym + "'");
      return t;
    }
    if (it->second.binary) {
      err("SignatureMismatch", where, "predicate '" + sym + "' takes one argument");
      return t;
    }
    for (const auto& [arg, res] : it->second.unary_rows) {
      if (arg == kBotToken && !lifted) continue;  // dead row under the strict policy
      ValueId a = arg == kBotToken ? kBot : D.id_of(arg);
      if (a == kNone) {
        err("UndeclaredValue", where + "/" + arg, "argument '" + arg + "' is outside the main domain");
        continue;
      }
      if (t.row[static_cast<std::size_t>(a + 1)] != kNone) {
        err("DuplicateId", where + "/" + arg, "row declared twice");
        continue;
      }
      if (res == kBotToken) {
        err("PredicateReturnsBot", where + "/" + arg, "predicates must return 0 or 1");
        continue;
      }
      if (res != "0" && res != "1") {
        err("SignatureMismatch", where + "/" + arg, "predicates must return 0 or 1");
        continue;
      }
      t.row[static_cast<std::size_t>(a + 1)] = res == "1" ? 1 : 0;
    }
    for (ValueId a = 0; a < D.size(); ++a)
      if (t.row[static_cast<std::size_t>(a + 1)] == kNone)
        err("IncompleteTable", where + "/" + D.token_of(a), "missing row");
    if (lifted && t.row[0] == kNone) err("IncompleteTable", where + "/" + kBotToken, "missing _bot row");
    return t;
  };

  auto build_binary = [&](const std::string& sym) -> Interpretation::Binary {
    Interpretation::Binary t;
    t.stride = D.size() + 1;
    t.cell.assign(static_cast<std::size_t>(t.stride) * static_cast<std::size_t>(t.stride), kNone);
    const std::string where = "interpretation/tables/" + sym;
    auto it = raw.tables.find(sym);
    if (it == raw.tables.end()) {
      err("IncompleteTable", where, "no table for symbol '" + sym + "'");
      return t;
    }
    if (!it->second.binary) {
      err("SignatureMismatch", where, "symbol '" + sym + "' takes two arguments");
      return t;
    }
    std::set<std::pair<ValueId, ValueId>> seen;
    for (const auto& [first, second, res] : it->second.binary_rows) {
      if ((first == kBotToken || second == kBotToken) && !lifted) continue;  // dead rows
      ValueId a = first == kBotToken ? kBot : D.id_of(first);
      ValueId b = second == kBotToken ? kBot : D.id_of(second);
      const std::string rw = where + "/" + first + "/" + second;
      if (a == kNone || b == kNone) {
        err("UndeclaredValue", rw, "argument outside the main domain");
        continue;
      }
      if (!seen.emplace(a, b).second) {
        err("DuplicateId", rw, "row declared twice");
        continue;
      }
      ValueId r = res == kBotToken ? kBot : D.id_of(res);
      if (res == kBotToken && !lifted) {
        err("SignatureMismatch", rw, "'" + sym + "' may not produce _bot under the strict policy");
        continue;
      }
      if (r == kNone) {
        err("UndeclaredValue", rw, "result '" + res + "' is outside the main domain");
        continue;
      }
      t.cell[static_cast<std::size_t>((a + 1) * t.stride + (b + 1))] = r;
    }
    for (ValueId a = 0; a < D.size(); ++a)
      for (ValueId b = 0; b < D.size(); ++b)
        if (t.at(a, b) == kNone)
          err("IncompleteTable", where + "/" + D.token_of(a) + "/" + D.token_of(b), "missing row");
    if (lifted) {
      for (ValueId a = kBot; a < D.size(); ++a) {
        if (t.at(a, kBot) == kNone)
          err("IncompleteTable", where + "/" + D.token_of(a) + "/" + kBotToken, "missing _bot row");
        if (a != kBot && t.at(kBot, a) == kNone)
          err("IncompleteTable", where + "/" + std::string(kBotToken) + "/" + D.token_of(a),
              "missing _bot row");
      }
    }
    return t;
  };

  for (const auto& f : alphabet.processing) {
    if (f == kIni)
      in.unary.emplace(f, build_unary(f, in.input_domain, D, /*result_may_bot=*/false, /*bot_row=*/0));
    else if (f == kFin)
      in.unary.emplace(f, build_unary(f, D, in.output_domain, /*result_may_bot=*/false, /*bot_row=*/1));
    else
      in.unary.emplace(f, build_unary(f, D, D, /*result_may_bot=*/lifted, /*bot_row=*/1));
  }
  for (const auto& p : alphabet.predicate) in.pred.emplace(p, build_pred(p));
  for (const auto& s : alphabet.setting) in.binary.emplace(s, build_binary(s));
  for (const auto& s : alphabet.getting) in.binary.emplace(s, build_binary(s));

  if (result.error_count() > 0) return result;

  // Semantic conditions, checked over proper domain values only.
  auto semantic = [&](std::string code, std::string where, std::string msg) {
    result.diags.push_back(level == ValidationLevel::Strict
                               ? make_error(std::move(code), std::move(where), std::move(msg))
                               : make_warning(std::move(code), std::move(where), std::move(msg)));
  };

  in.closure = detail::minimality_closure(alphabet, in);
  if (static_cast<ValueId>(in.closure.size()) != D.size()) {
    std::string witness;
    for (ValueId v : in.closure) {
      if (!witness.empty()) witness += ",";
      witness += D.token_of(v);
    }
    semantic("NonMinimalDomain", "domains/main",
             "proper subset {" + witness + "} is closed under ini images and all function tables");
  }

  auto law_witness = [&](const std::string& f, ValueId d, ValueId d2) {
    return "interpretation/tables/" + f + "/" + D.token_of(d) + "/" + D.token_of(d2);
  };
  for (const auto& f : alphabet.setting) {
    const auto& t = in.binary.at(f);
    for (ValueId d = 0; d < D.size(); ++d)
      for (ValueId d2 = 0; d2 < D.size(); ++d2) {
        ValueId m = t.at(d, d2);
        if (m == kBot) {
          semantic("SettingGettingLawViolated", law_witness(f, d, d2),
                   "setting result leaves the main domain");
          continue;
        }
        if (t.at(d, m) != m)
          semantic("SettingGettingLawViolated", law_witness(f, d, d2),
                   "re-setting the written value must be idempotent");
        bool recovered = false;
        for (const auto& g : alphabet.getting)
          recovered = recovered || in.binary.at(g).at(d, m) == d;
        if (!recovered)
          semantic("SettingGettingLawViolated", law_witness(f, d, d2),
                   "no getting symbol recovers the private operand from the written value");
      }
  }
  for (const auto& f : alphabet.getting) {
    const auto& t = in.binary.at(f);
    for (ValueId d = 0; d < D.size(); ++d)
      for (ValueId d2 = 0; d2 < D.size(); ++d2) {
        ValueId m = t.at(d, d2);
        if (m == kBot) {
          semantic("SettingGettingLawViolated", law_witness(f, d, d2),
                   "getting result leaves the main domain");
          continue;
        }
        if (t.at(m, d2) != m)
          semantic("SettingGettingLawViolated", law_witness(f, d, d2),
                   "re-reading the read value must be idempotent");
        bool recovered = false;
        for (const auto& g : alphabet.setting)
          recovered = recovered || in.binary.at(g).at(m, d2) == d2;
        if (!recovered)
          semantic("SettingGettingLawViolated", law_witness(f, d, d2),
                   "no setting symbol reconstructs the shared operand from the read value");
      }
  }

  if (result.error_count() == 0) result.value = std::move(in);
  return result;
}

}  // namespace protoalg
