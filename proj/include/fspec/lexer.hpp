#pragma once

#include <string_view>
#include <vector>

#include "fspec/token.hpp"

namespace fspec {

/// Turns UTF-8 source text into the complete token stream, ending with an
/// EndOfFile token. Line and block comments are skipped; ASCII aliases are
/// normalized to the same TokenType as their Unicode forms.
/// Throws LexError on an illegal character, an unterminated block comment
/// (reported at the opening "/*"), or an out-of-range integer literal.
std::vector<Token> tokenize(std::string_view source, const std::string& filename);

}  // namespace fspec
