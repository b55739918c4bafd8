#pragma once

#include <string>
#include <vector>

#include "protoalg/alphabet.hpp"
#include "protoalg/component_graph.hpp"
#include "protoalg/diagnostics.hpp"
#include "protoalg/interpretation.hpp"

namespace protoalg {

// An alphabet, an ordered tuple of component graphs of which exactly one is
// main, and an interpretation.  Immutable once validated.
struct ProtoAlgorithm {
  Alphabet alphabet;
  std::vector<ComponentGraph> components;
  Interpretation interp;
  ValidationLevel level = ValidationLevel::Strict;

  int main_index = 0;  // the unique main component
  bool classical = false;
  bool sequential = false;
  bool nondet_components = false;  // some function vertex actually branches

  int component_count() const { return static_cast<int>(components.size()); }
};

inline Validated<ProtoAlgorithm> validate_proto_algorithm(Alphabet alphabet,
                                                          std::vector<ComponentGraph> components,
                                                          Interpretation interp, ValidationLevel level) {
  Validated<ProtoAlgorithm> result;
  ProtoAlgorithm a;
  a.alphabet = std::move(alphabet);
  a.components = std::move(components);
  a.interp = std::move(interp);
  a.level = level;

  int mains = 0;
  for (int i = 0; i < a.component_count(); ++i) {
    if (a.components[static_cast<std::size_t>(i)].is_main) {
      a.main_index = i;
      ++mains;
    }
  }
  if (a.components.empty())
    result.diags.push_back(make_error("NoMainComponent", "components", "a model needs at least one component"));
  else if (mains == 0)
    result.diags.push_back(
        make_error("NoMainComponent", "components", "exactly one component must be a main component graph"));
  else if (mains > 1)
    result.diags.push_back(
        make_error("MultipleMainComponents", "components", "exactly one component may be a main component graph"));

  a.sequential = a.component_count() == 1;
  a.nondet_components = false;
  bool all_deterministic = true;
  for (const auto& g : a.components) {
    if (!g.deterministic()) {
      a.nondet_components = true;
      all_deterministic = false;
    }
  }
  a.classical = a.alphabet.classical() && a.sequential && all_deterministic;

  if (result.error_count() == 0) result.value = std::move(a);
  return result;
}

}  // namespace protoalg
