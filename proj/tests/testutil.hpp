#pragma once

#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <string>

#include "fspec/parser.hpp"
#include "fspec/typecheck.hpp"

namespace fspec::test {

inline std::string corpusPath(const std::string& name) {
  return std::string(FSPEC_CORPUS_DIR) + "/" + name;
}

inline std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string corpusSource(const std::string& name) {
  return readFile(corpusPath(name));
}

struct Pipeline {
  ast::Spec ast;
  ConstEnv consts;
  TypedSpec typed;
};

inline Pipeline load(const std::string& source, const std::string& filename,
                     std::map<std::string, int64_t> overrides = {},
                     int64_t defaultValue = 5) {
  Pipeline p;
  p.ast = parseSource(source, filename);
  p.consts = resolveConstants(p.ast, overrides, defaultValue);
  p.typed = typecheckSpec(p.ast, p.consts);
  return p;
}

inline Pipeline loadCorpus(const std::string& name,
                           std::map<std::string, int64_t> overrides = {},
                           int64_t defaultValue = 5) {
  return load(corpusSource(name), name, std::move(overrides), defaultValue);
}

/// Replaces every "(123 ms" timing token with "(T ms" so transcripts can be
/// compared against goldens.
inline std::string wildcardTimes(const std::string& transcript) {
  static const std::regex timing("\\([0-9]+ ms");
  return std::regex_replace(transcript, timing, "(T ms");
}

}  // namespace fspec::test
