#pragma once

#include <string_view>
#include <vector>

#include "fspec/ast.hpp"
#include "fspec/token.hpp"

namespace fspec {

/// Parses a token stream (as produced by tokenize) into the declaration AST.
/// Throws ParseError at the first offending position.
ast::Spec parseSpec(const std::vector<Token>& tokens);

/// Convenience: tokenize + parse.
ast::Spec parseSource(std::string_view source, const std::string& filename);

}  // namespace fspec
