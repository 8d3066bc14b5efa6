#pragma once

#include <string>
#include <vector>

#include "pml/core.hpp"

namespace pml::analysis {

enum class FindingSeverity { Inconsistent, Restricted, PolicyViolation, PatternError };

inline const char* to_string(FindingSeverity s) {
  switch (s) {
    case FindingSeverity::Inconsistent: return "Inconsistent";
    case FindingSeverity::Restricted: return "Restricted";
    case FindingSeverity::PolicyViolation: return "PolicyViolation";
    case FindingSeverity::PatternError: return "PatternError";
  }
  return "?";
}

/// A broken or suspicious promise. `promises` always cites at least one
/// promise or bundle body, in display form.
struct Finding {
  FindingSeverity severity = FindingSeverity::PatternError;
  std::string code;
  std::string message;
  std::vector<std::string> promises;

  friend bool operator==(const Finding&, const Finding&) = default;
};

/// Outcome of a structural check that either passes or lists findings.
struct CheckReport {
  bool ok = true;
  std::vector<Finding> findings;

  bool has(const std::string& code) const {
    for (const auto& f : findings)
      if (f.code == code) return true;
    return false;
  }
};

inline std::string cite(const Bundle& b, const PromiseBody& body) { return b.name + ": " + describe(body); }

}  // namespace pml::analysis
