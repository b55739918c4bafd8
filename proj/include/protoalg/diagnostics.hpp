#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace protoalg {

enum class Severity { Error, Warning };

// One validation finding.  `code` is a stable machine-readable identifier,
// `where` names the offending element (a document path, a vertex/edge, a
// witness triple, ...) so that no failure is reported without a witness.
struct Diagnostic {
  std::string code;
  Severity severity = Severity::Error;
  std::string where;
  std::string message;
};

inline Diagnostic make_error(std::string code, std::string where, std::string message) {
  return Diagnostic{std::move(code), Severity::Error, std::move(where), std::move(message)};
}

inline Diagnostic make_warning(std::string code, std::string where, std::string message) {
  return Diagnostic{std::move(code), Severity::Warning, std::move(where), std::move(message)};
}

// Outcome of a validation pass: the value is present iff no error-severity
// diagnostic was produced.  Warnings survive on success.
template <typename T>
struct Validated {
  std::optional<T> value;
  std::vector<Diagnostic> diags;

  bool ok() const { return value.has_value(); }
  const T& operator*() const { return *value; }
  T& operator*() { return *value; }
  const T* operator->() const { return &*value; }

  bool has_error(const std::string& code) const {
    for (const auto& d : diags)
      if (d.severity == Severity::Error && d.code == code) return true;
    return false;
  }

  std::size_t error_count() const {
    std::size_t n = 0;
    for (const auto& d : diags) n += d.severity == Severity::Error ? 1 : 0;
    return n;
  }

  std::vector<Diagnostic> errors() const {
    std::vector<Diagnostic> out;
    for (const auto& d : diags)
      if (d.severity == Severity::Error) out.push_back(d);
    return out;
  }
};

// Thrown when an exploration exceeds its configured cap.
class resource_bound_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when a relation handed in as a simulation fails its transfer
// condition mid-use; signals a checker bug, not a model property.
class not_a_simulation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct ResourceCaps {
  std::size_t state_cap = 1000000;     // states per explored graph
  std::size_t pair_cap = 200000000;    // candidate pairs in relation computations
  std::size_t search_budget = 20000000;  // backtracking nodes for isomorphism
};

}  // namespace protoalg
