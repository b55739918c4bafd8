#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace protoalg {

// Values are opaque tokens drawn from a declared finite domain; all meaning
// lives in interpretation tables.  Inside the engine a value is an index
// into its domain.  kBot is the dummy value; it is never a domain member.
using ValueId = std::int32_t;
inline constexpr ValueId kBot = -1;
inline constexpr ValueId kNone = -2;  // absent table row / lookup miss

inline constexpr const char* kBotToken = "_bot";

struct Domain {
  std::vector<std::string> tokens;  // declared order
  std::unordered_map<std::string, ValueId> index;

  Domain() = default;
  explicit Domain(std::vector<std::string> toks) : tokens(std::move(toks)) {
    for (ValueId i = 0; i < static_cast<ValueId>(tokens.size()); ++i) index.emplace(tokens[i], i);
  }

  ValueId id_of(const std::string& token) const {
    if (token == kBotToken) return kBot;
    auto it = index.find(token);
    return it == index.end() ? kNone : it->second;
  }

  const std::string& token_of(ValueId v) const {
    static const std::string bot = kBotToken;
    return v == kBot ? bot : tokens.at(static_cast<std::size_t>(v));
  }

  bool contains(const std::string& token) const { return index.count(token) != 0; }
  ValueId size() const { return static_cast<ValueId>(tokens.size()); }
};

}  // namespace protoalg
