#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "pml/dsl/resolver.hpp"

namespace testutil {

inline std::string corpus_path(const std::string& name) { return std::string(PML_CORPUS_DIR) + "/" + name; }

inline std::string read_corpus(const std::string& name) {
  std::ifstream in(corpus_path(name), std::ios::binary);
  if (!in) throw std::runtime_error("missing corpus file " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline pml::PromiseGraph load_text(const std::string& text, const std::string& file = "<test>") {
  auto r = pml::dsl::load(text, file);
  if (!r.ok()) {
    std::string msg;
    for (const auto& d : r.diagnostics) msg += pml::dsl::format(d) + "\n";
    throw std::runtime_error(msg);
  }
  return *r.graph;
}

inline pml::PromiseGraph load_corpus(const std::string& name) { return load_text(read_corpus(name), name); }

}  // namespace testutil
