#pragma once

#include <string>

#include "fspec/ast.hpp"

namespace fspec {

/// Canonical Unicode rendering. parseSource(prettyPrint(s)) is structurally
/// equal to s; an empty spec prints as "".
std::string prettyPrint(const ast::Spec& spec);

std::string printDecl(const ast::Decl& decl);

/// Single-line expression/type renderings, used for diagnostics and
/// annotation texts in checker transcripts.
std::string printExpr(const ast::Expr& e);
std::string printType(const ast::TypeExpr& t);

}  // namespace fspec
