#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fspec/source.hpp"

namespace fspec {

/// Exact token identity. A Unicode operator and its ASCII alias share one
/// TokenType; only the lexeme differs.
enum class TokenType : uint8_t {
  // declarations & commands
  KwVal, KwType, KwFun, KwPred, KwTheorem, KwProc,
  KwRequires, KwEnsures, KwDecreases, KwInvariant, KwAssert,
  KwVar, KwWhile, KwDo, KwFor, KwIf, KwThen, KwElse, KwReturn,
  KwChoose, KwLet, KwWith, KwPrint,
  // type constructors
  KwBool, KwSet, KwTuple, KwRecord, KwArray, KwMap,
  // literals
  KwTrue, KwFalse,                      // ⊤ / ⊥
  // quantifiers & symbols with word aliases
  Forall, Exists, SumOp,                // ∀ ∃ ∑
  NatSym, IntSym,                       // ℕ ℤ
  EmptySet,                             // ∅
  // operators
  Plus, Minus, Times, Slash, Percent, Caret,
  Eq, Ne, Lt, Le, Gt, Ge,
  And, Or, Not, Implies, Iff,
  UnionOp, IntersectOp, SetMinus, Subseteq, In,
  Assign,                               // :=
  DotDot,                               // ..
  Bar,                                  // |
  // punctuation
  LParen, RParen, LBracket, RBracket, LBrace, RBrace,
  LAngle, RAngle,                       // ⟨ ⟩  (ASCII (| |) )
  Comma, Semicolon, Colon, Dot,
  // atoms
  Ident, IntLit,
  EndOfFile,
};

/// Coarse token class per the language surface.
enum class TokenClass : uint8_t { Keyword, Identifier, IntegerLiteral, Operator, Punctuation };

TokenClass tokenClass(TokenType t);

/// Canonical (Unicode) spelling used in diagnostics and pretty-printing.
const char* tokenSpelling(TokenType t);

struct Token {
  TokenType type = TokenType::EndOfFile;
  std::string lexeme;
  SourceSpan span;
  int64_t intValue = 0;  // valid when type == IntLit

  TokenClass cls() const { return tokenClass(type); }
};

}  // namespace fspec
