#pragma once

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pml/analysis/conflicts.hpp"
#include "pml/analysis/hierarchy.hpp"
#include "pml/analysis/inheritance.hpp"
#include "pml/analysis/roles.hpp"
#include "pml/dsl/resolver.hpp"
#include "pml/report.hpp"

namespace pml::cli {

enum ExitCode : int { kClean = 0, kFindings = 1, kInputError = 2, kUsage = 3 };

struct RunConfig {
  std::string command;
  std::vector<std::string> inputs;
  bool json = false;
  std::string output;
  std::string child, parent;  // isa only
};

namespace detail {

struct Loaded {
  FileReport file;
  std::optional<PromiseGraph> graph;
};

inline Loaded load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {{path, {{dsl::Severity::Error, "E-IO-001", "cannot read '" + path + "'", {path, 0, 0, 0, 0}}}}, {}};
  std::ostringstream ss;
  ss << in.rdbuf();
  auto r = dsl::load(ss.str(), path);
  return {{path, std::move(r.diagnostics)}, r.ok() ? std::move(r.graph) : std::nullopt};
}

inline std::string text_report(const Report& r, const std::string& command) {
  std::string out;
  for (const auto& f : r.files)
    for (const auto& d : f.diagnostics) out += dsl::format(d) + "\n";

  if (command == "check" || command == "roles" || command == "classes") {
    out += "roles:\n";
    for (const auto& [file, role] : r.roles) {
      out += "  " + role.label + ": ";
      for (std::size_t i = 0; i < role.members.size(); ++i) out += (i ? ", " : "") + role.members[i];
      out += "\n    " + analysis::to_string(role.signature) + "\n";
    }
  }
  if (command == "classes") {
    out += "classes:\n";
    for (const auto& [label, rc] : r.hierarchy) {
      out += "  " + label + "\n";
      for (const auto& b : rc.base) out += "    " + describe(b) + "\n";
      for (const auto& s : rc.subtypes) {
        out += "    subtype if " + s.key + "\n";
        for (const auto& b : s.bodies) out += "      " + describe(b) + "\n";
      }
      for (const auto& w : rc.warnings) out += "    warning: " + w + "\n";
    }
  }
  if (!r.findings.empty()) {
    out += "findings:\n";
    for (const auto& f : r.findings) {
      out += "  [" + std::string(analysis::to_string(f.severity)) + "] " + f.code + ": " + f.message + "\n";
      for (const auto& p : f.promises) out += "      " + p + "\n";
    }
  }
  std::size_t errors = 0;
  for (const auto& f : r.files)
    errors += std::count_if(f.diagnostics.begin(), f.diagnostics.end(),
                            [](const dsl::Diagnostic& d) { return d.severity == dsl::Severity::Error; });
  out += "summary: " + std::to_string(r.files.size()) + " file(s), " + std::to_string(r.roles.size()) + " role(s), " +
         std::to_string(r.findings.size()) + " conflict(s), " + std::to_string(errors) + " error(s)\n";
  return out;
}

inline int execute(const RunConfig& cfg, std::string& text) {
  Report report;
  bool input_error = false;
  const bool many = cfg.inputs.size() > 1;

  for (const auto& path : cfg.inputs) {
    auto loaded = load_file(path);
    input_error = input_error || !loaded.graph;
    report.files.push_back(std::move(loaded.file));
    if (!loaded.graph) continue;
    const auto& g = *loaded.graph;

    if (cfg.command == "dot") {
      text = export_dot(g);
      return kClean;
    }
    if (cfg.command == "check" || cfg.command == "roles" || cfg.command == "classes")
      for (auto& role : analysis::discover_roles(g)) report.roles.push_back({path, std::move(role)});
    if (cfg.command == "check")
      for (auto f : analysis::detect_conflicts(g)) {
        if (many) f.message = path + ": " + f.message;
        report.findings.push_back(std::move(f));
      }
    if (cfg.command == "classes")
      for (auto& rc : analysis::derive_class_hierarchy(g).classes) report.hierarchy.emplace_back(rc.role.label, std::move(rc));
    if (cfg.command == "isa") {
      const auto* child = g.find_bundle(cfg.child);
      const auto* parent = g.find_bundle(cfg.parent);
      for (const auto* name : {&cfg.child, &cfg.parent})
        if (!g.find_bundle(*name)) {
          report.files.back().diagnostics.push_back(
              {dsl::Severity::Error, "E-RESOLVE-003", "unknown bundle '" + *name + "'", {path, 0, 0, 0, 0}});
          input_error = true;
        }
      if (!child || !parent) continue;
      try {
        auto v = analysis::check_is_a(*child, *parent);
        using O = analysis::IsAVerdict::Outcome;
        if (v.outcome == O::Restricted)
          report.findings.push_back({analysis::FindingSeverity::Restricted, "I-RESTRICTED",
                                     child->name + " is not a " + parent->name + ": promising both forces " +
                                         v.detail(),
                                     v.involved});
        else if (v.outcome == O::Inconsistent)
          report.findings.push_back({analysis::FindingSeverity::Inconsistent, "I-INCONSISTENT",
                                     child->name + " is not a " + parent->name + ": promising both binds " +
                                         v.detail(),
                                     v.involved});
      } catch (const std::invalid_argument& e) {
        report.findings.push_back(
            {analysis::FindingSeverity::Inconsistent, "I-INCONSISTENT", e.what(), {child->name, parent->name}});
      }
    }
  }

  text = cfg.json ? report_json(report) : text_report(report, cfg.command);
  if (cfg.command == "isa" && report.findings.empty() && !input_error && !cfg.json)
    text = cfg.child + " is a " + cfg.parent + "\n" + text;
  if (input_error) return kInputError;
  return report.findings.empty() ? kClean : kFindings;
}

}  // namespace detail

/// Runs one command. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::string single;
  CLI::App app{"Static analysis of promise models", "pml"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_flag("--json", cfg.json, "Emit the JSON report");
  app.add_option("-o,--output", cfg.output, "Write output to PATH instead of stdout");

  auto* check = app.add_subcommand("check", "Parse, resolve and detect conflicting promises");
  check->add_option("files", cfg.inputs, "Model files")->required();
  auto* roles = app.add_subcommand("roles", "List the roles of a model");
  roles->add_option("file", single, "Model file")->required();
  auto* classes = app.add_subcommand("classes", "Derive the role class hierarchy");
  classes->add_option("file", single, "Model file")->required();
  auto* isa = app.add_subcommand("isa", "Check whether bundle CHILD is a bundle PARENT");
  isa->add_option("file", single, "Model file")->required();
  isa->add_option("child", cfg.child, "Child bundle")->required();
  isa->add_option("parent", cfg.parent, "Parent bundle")->required();
  auto* dot = app.add_subcommand("dot", "Export the promise graph as DOT");
  dot->add_option("file", single, "Model file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kClean;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kClean;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kClean;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  if (cfg.command != "check") cfg.inputs = {single};

  std::string text;
  const int code = detail::execute(cfg, text);
  if (cfg.output.empty()) {
    out << text;
    return code;
  }
  std::ofstream file(cfg.output, std::ios::binary);
  if (!(file << text)) {
    err << "E-IO-001: cannot write '" << cfg.output << "'\n";
    return kInputError;
  }
  return code;
}

}  // namespace pml::cli
