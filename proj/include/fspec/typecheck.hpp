#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "fspec/ast.hpp"
#include "fspec/typed.hpp"

namespace fspec {

/// Gives every unspecified ℕ constant its override value (else
/// defaultValue), then evaluates defined constants in declaration order and
/// verifies parameterless theorems. Throws UnknownConstant for an override
/// that does not name an unspecified constant, TheoremFailed when a
/// parameterless theorem is false, and propagates evaluation errors from
/// defined constants.
ConstEnv resolveConstants(const ast::Spec& spec,
                          const std::map<std::string, int64_t>& overrides,
                          int64_t defaultValue);

/// Static checking over resolved constants: every expression receives its
/// SemType, every name is resolved, recursion requires a decreases clause.
/// Throws TypeError / MissingDecreases.
TypedSpec typecheckSpec(const ast::Spec& spec, const ConstEnv& consts);

}  // namespace fspec
