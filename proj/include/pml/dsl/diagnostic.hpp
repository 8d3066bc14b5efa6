#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace pml::dsl {

/// 1-based, end-inclusive line/column range.
struct SourceSpan {
  std::string file;
  std::size_t start_line = 1;
  std::size_t start_col = 1;
  std::size_t end_line = 1;
  std::size_t end_col = 1;

  friend auto operator<=>(const SourceSpan&, const SourceSpan&) = default;
  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

inline bool overlaps(const SourceSpan& a, const SourceSpan& b) {
  auto before = [](std::size_t l1, std::size_t c1, std::size_t l2, std::size_t c2) {
    return l1 < l2 || (l1 == l2 && c1 < c2);
  };
  // a ends before b starts, or b ends before a starts
  if (before(a.end_line, a.end_col, b.start_line, b.start_col)) return false;
  if (before(b.end_line, b.end_col, a.start_line, a.start_col)) return false;
  return true;
}

inline std::string to_string(const SourceSpan& s) {
  return s.file + ":" + std::to_string(s.start_line) + ":" + std::to_string(s.start_col);
}

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  SourceSpan span;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

inline std::string format(const Diagnostic& d) {
  return to_string(d.span) + ": " + (d.severity == Severity::Error ? "error" : "warning") + " [" + d.code +
         "] " + d.message;
}

inline bool has_errors(const std::vector<Diagnostic>& ds) {
  for (const auto& d : ds)
    if (d.severity == Severity::Error) return true;
  return false;
}

}  // namespace pml::dsl
