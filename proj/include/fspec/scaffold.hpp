#pragma once

#include <string>
#include <vector>

#include "fspec/ast.hpp"

namespace fspec {

/// A problem specification given as a precondition predicate over the input
/// parameters and a postcondition predicate over inputs plus one output.
struct SpecSkeleton {
  std::string preName;
  std::string postName;
  std::vector<ast::Param> inputParams;
  ast::Param outputParam;
};

/// Looks up the two predicates and derives the skeleton: the postcondition
/// must take the precondition's parameters plus exactly one output
/// parameter. Throws UnknownPredicate on unresolved names or an arity or
/// type mismatch.
SpecSkeleton buildSkeleton(const ast::Spec& spec, const std::string& preName,
                           const std::string& postName);

struct GeneratedSuite {
  // <post>_preSat, <post>_postNotValid, <post>_postSat, <post>_resultUnique,
  // <post>_Fun — in this order
  std::vector<ast::DeclPtr> decls;
  // the weaker not-valid variant, rendered commented out
  ast::DeclPtr weakNotValid;
};

/// Purely syntactic generation of the validation declarations; never
/// evaluates the predicates.
GeneratedSuite generateValidationTheorems(const SpecSkeleton& skel);

/// Pretty-prints the suite, with the weak variant commented out.
std::string renderSuite(const GeneratedSuite& suite);

}  // namespace fspec
