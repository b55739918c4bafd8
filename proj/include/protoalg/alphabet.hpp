#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "protoalg/diagnostics.hpp"
#include "protoalg/values.hpp"

namespace protoalg {

enum class SymbolKind { Processing, Setting, Getting, Predicate };

inline constexpr const char* kIni = "ini";
inline constexpr const char* kFin = "fin";

inline const char* kind_name(SymbolKind k) {
  switch (k) {
    case SymbolKind::Processing: return "processing";
    case SymbolKind::Setting: return "setting";
    case SymbolKind::Getting: return "getting";
    case SymbolKind::Predicate: return "predicate";
  }
  return "?";
}

struct RawAlphabet {
  std::vector<std::string> processing, setting, getting, predicate;
};

// The four pairwise disjoint symbol classes.  ini and fin are reserved
// processing symbols: ini inputs the first value, fin outputs the last.
struct Alphabet {
  std::vector<std::string> processing, setting, getting, predicate;
  std::unordered_map<std::string, SymbolKind> kind;

  bool classical() const { return setting.empty() && getting.empty(); }
  bool contains(const std::string& s) const { return kind.count(s) != 0; }
  SymbolKind kind_of(const std::string& s) const { return kind.at(s); }

  // Processing symbols other than ini and fin (the ones allowed in cycles).
  bool is_plain_processing(const std::string& s) const {
    auto it = kind.find(s);
    return it != kind.end() && it->second == SymbolKind::Processing && s != kIni && s != kFin;
  }

  std::vector<std::string> plain_processing() const {
    std::vector<std::string> out;
    for (const auto& s : processing)
      if (s != kIni && s != kFin) out.push_back(s);
    return out;
  }
};

inline Validated<Alphabet> validate_alphabet(const RawAlphabet& raw) {
  Validated<Alphabet> result;
  Alphabet a;
  a.processing = raw.processing;
  a.setting = raw.setting;
  a.getting = raw.getting;
  a.predicate = raw.predicate;

  auto add_class = [&](const std::vector<std::string>& names, SymbolKind k, const char* cls) {
    for (const auto& s : names) {
      if (s.empty()) {
        result.diags.push_back(make_error("EmptySymbolName", std::string("alphabet/") + cls,
                                          "symbol names must be non-empty"));
        continue;
      }
      if (s == kBotToken) {
        result.diags.push_back(make_error("ReservedSymbolMisplaced", std::string("alphabet/") + cls,
                                          "'_bot' is not a usable symbol name"));
        continue;
      }
      auto [it, inserted] = a.kind.emplace(s, k);
      if (!inserted) {
        if (it->second == k) {
          result.diags.push_back(
              make_error("DuplicateId", std::string("alphabet/") + cls, "symbol '" + s + "' declared twice"));
        } else {
          result.diags.push_back(make_error("OverlappingSymbolClasses", std::string("alphabet/") + cls,
                                            "symbol '" + s + "' appears in both " +
                                                kind_name(it->second) + " and " + cls));
        }
      }
    }
  };
  add_class(raw.processing, SymbolKind::Processing, "processing");
  add_class(raw.setting, SymbolKind::Setting, "setting");
  add_class(raw.getting, SymbolKind::Getting, "getting");
  add_class(raw.predicate, SymbolKind::Predicate, "predicate");

  auto in_list = [](const std::vector<std::string>& v, const std::string& s) {
    for (const auto& x : v)
      if (x == s) return true;
    return false;
  };
  for (const char* res : {kIni, kFin}) {
    if (!in_list(a.processing, res)) {
      result.diags.push_back(make_error("MissingReservedSymbol", "alphabet/processing",
                                        std::string("'") + res + "' must be a processing symbol"));
    }
    for (const auto& [cls, names] : {std::pair<const char*, const std::vector<std::string>*>{"setting", &a.setting},
                                     {"getting", &a.getting},
                                     {"predicate", &a.predicate}}) {
      if (in_list(*names, res))
        result.diags.push_back(make_error("ReservedSymbolMisplaced", std::string("alphabet/") + cls,
                                          std::string("'") + res + "' may only be a processing symbol"));
    }
  }

  if (result.error_count() == 0) result.value = std::move(a);
  return result;
}

}  // namespace protoalg
