#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "pml/analysis/finding.hpp"
#include "pml/analysis/hierarchy.hpp"
#include "pml/analysis/roles.hpp"
#include "pml/core.hpp"
#include "pml/dsl/diagnostic.hpp"

namespace pml {

inline constexpr const char* kToolVersion = "0.1.0";

struct FileReport {
  std::string path;
  std::vector<dsl::Diagnostic> diagnostics;
};

struct RoleSummary {
  std::string file;
  analysis::Role role;
};

struct Report {
  std::string version = kToolVersion;
  std::vector<FileReport> files;
  std::vector<analysis::Finding> findings;
  std::vector<RoleSummary> roles;
  /// keyed by role label
  std::vector<std::pair<std::string, analysis::RoleClass>> hierarchy;
};

namespace detail {

inline nlohmann::json span_json(const dsl::SourceSpan& s) {
  return {{"file", s.file},
          {"start_line", s.start_line},
          {"start_col", s.start_col},
          {"end_line", s.end_line},
          {"end_col", s.end_col}};
}

inline nlohmann::json bodies_json(const std::vector<PromiseBody>& bodies) {
  auto arr = nlohmann::json::array();
  for (const auto& b : bodies) arr.push_back(describe(b));
  return arr;
}

}  // namespace detail

inline nlohmann::json to_json(const Report& r) {
  using nlohmann::json;
  json files = json::array();
  for (const auto& f : r.files) {
    json diags = json::array();
    for (const auto& d : f.diagnostics)
      diags.push_back({{"severity", d.severity == dsl::Severity::Error ? "error" : "warning"},
                       {"code", d.code},
                       {"message", d.message},
                       {"span", detail::span_json(d.span)}});
    files.push_back({{"path", f.path}, {"diagnostics", std::move(diags)}});
  }
  json findings = json::array();
  for (const auto& f : r.findings)
    findings.push_back(
        {{"severity", analysis::to_string(f.severity)}, {"code", f.code}, {"message", f.message}, {"promises", f.promises}});
  json roles = json::array();
  for (const auto& [file, role] : r.roles) {
    json sig = json::array();
    for (const auto& e : role.signature.entries) {
      const auto& [dir, pol, type] = e;
      sig.push_back(std::string(dir == analysis::Direction::Out ? "out " : "in ") +
                    (pol == Polarity::Give ? "+" : "-") + (type.empty() ? "(link)" : type));
    }
    roles.push_back({{"file", file}, {"label", role.label}, {"members", role.members}, {"signature", std::move(sig)}});
  }
  json hierarchy = json::object();
  for (const auto& [key, rc] : r.hierarchy) {
    json subtypes = json::array();
    for (const auto& s : rc.subtypes) subtypes.push_back({{"condition", s.key}, {"bodies", detail::bodies_json(s.bodies)}});
    hierarchy[key] = {{"members", rc.role.members},
                      {"base", detail::bodies_json(rc.base)},
                      {"subtypes", std::move(subtypes)},
                      {"warnings", rc.warnings}};
  }
  return {{"version", r.version},
          {"files", std::move(files)},
          {"findings", std::move(findings)},
          {"roles", std::move(roles)},
          {"hierarchy", std::move(hierarchy)}};
}

/// Sorted keys, two-space indent, trailing newline.
inline std::string report_json(const Report& r) { return to_json(r).dump(2) + "\n"; }

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline std::string edge_label(const PromiseBody& b) {
  std::string out = b.polarity == Polarity::Give ? "+" : "-";
  if (b.is_link() && b.constraints.size() == 1) {
    out += to_string(b.constraints[0].lhs) + "=" + to_string(b.constraints[0].rhs);
  } else if (b.constraints.size() == 1 && b.constraints[0].lhs == Term::attr(b.type)) {
    out += b.type + "=" + to_string(b.constraints[0].rhs);
  } else {
    out += b.is_link() ? "(link)" : b.type;
    if (!b.constraints.empty()) {
      out += "{";
      for (std::size_t i = 0; i < b.constraints.size(); ++i) out += (i ? "," : "") + to_string(b.constraints[i]);
      out += "}";
    }
  }
  if (b.conditional()) out += " / " + to_string(b.condition);
  return out;
}

}  // namespace detail

/// One node per agent, one labelled edge per promise, in graph order.
inline std::string export_dot(const PromiseGraph& g) {
  std::string out = "digraph pml {\n";
  for (const auto& a : g.agents()) out += "  \"" + detail::dot_escape(a.name) + "\";\n";
  for (const auto& p : g.promises())
    out += "  \"" + detail::dot_escape(p.promiser) + "\" -> \"" + detail::dot_escape(p.promisee) + "\" [label=\"" +
           detail::dot_escape(detail::edge_label(p.body)) + "\"];\n";
  out += "}\n";
  return out;
}

}  // namespace pml
