#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fspec/source.hpp"

namespace fspec::ast {

struct TypeExpr;
struct Expr;
struct Cmd;
struct Decl;

using TypeExprPtr = std::shared_ptr<const TypeExpr>;
using ExprPtr = std::shared_ptr<const Expr>;
using CmdPtr = std::shared_ptr<const Cmd>;
using DeclPtr = std::shared_ptr<const Decl>;

struct TypeExpr {
  enum class Kind {
    Bool,
    Nat,           // ℕ[bound]
    NatUnbounded,  // ℕ — only as the type of an unspecified constant
    Int,           // ℤ[lo, hi]
    Set,           // Set[elem]
    Tuple,         // Tuple[c1, …, cn]
    Record,        // Record[f1: T1, …]
    Array,         // Array[length, elem]
    Map,           // Map[dom, cod]
    Named,         // reference to a type declaration
  };
  Kind kind;
  SourceSpan span;
  ExprPtr bound;                      // Nat bound; Int lo; Array length
  ExprPtr hi;                         // Int hi
  std::vector<TypeExprPtr> args;      // element/component types
  std::vector<std::string> fields;    // Record field names
  std::string name;                   // Named
};

enum class BinOp : uint8_t {
  Add, Sub, Mul, Div, Mod, Pow,
  Eq, Ne, Lt, Le, Gt, Ge,
  And, Or, Implies, Iff,
  Union, Intersect, Diff, Subseteq, In,
};

enum class UnOp : uint8_t { Neg, Not };

/// One bound variable: either `name: type` or `name ∈ domain`.
struct Binder {
  std::string name;
  TypeExprPtr type;   // null when domain is set
  ExprPtr domain;     // null when type is set
  SourceSpan span;
};

struct Expr {
  enum class Kind {
    IntLit,     // intValue
    BoolLit,    // boolValue
    Var,        // name
    Unary,      // un, args[0]
    Binary,     // bin, args[0], args[1]
    Call,       // name, args
    TupleE,     // args
    Proj,       // args[0] . projIndex (1-based)
    Index,      // args[0] [ args[1] ]
    ArrayCtor,  // Array[args[0], typeArg](args[1])
    SetLit,     // { args… }, non-empty
    SetEmpty,   // ∅[typeArg]
    SetRange,   // args[0] .. args[1]
    SetCompr,   // { body | binders with filter }
    Quant,      // ∀/∃ binders with filter . body
    Sum,        // ∑ binders with filter . body
    Choose,     // choose binders with filter
    IfE,        // if args[0] then args[1] else args[2]
    LetE,       // let name = args[0] in body
    Print,      // print args[0]
    SetSize,    // | args[0] |
  };
  Kind kind;
  SourceSpan span;
  int64_t intValue = 0;
  bool boolValue = false;
  bool isExists = false;  // Quant
  int64_t projIndex = 0;
  std::string name;
  BinOp bin = BinOp::Add;
  UnOp un = UnOp::Neg;
  std::vector<ExprPtr> args;
  std::vector<Binder> binders;
  ExprPtr filter;  // optional `with` formula
  ExprPtr body;    // quantifier/sum body, comprehension head, let body
  TypeExprPtr typeArg;
};

/// Loop annotations: invariants plus an optional termination measure.
struct LoopSpec {
  std::vector<ExprPtr> invariants;
  ExprPtr decreases;
};

struct Cmd {
  enum class Kind {
    VarDecl,        // var name: type := e1
    Assign,         // name [e1]? := e2
    Block,          // { cmds }
    If,             // if e1 then c1 else c2?
    While,          // while e1 do loop c1
    ForCount,       // for var name: type := e1; e2; update do loop c1
    ForIn,          // for name ∈ e1 do loop c1
    ChooseCmd,      // choose binders with filter
    ChooseThenElse, // choose binders with filter then c1 else c2
    ChooseDo,       // choose binders with filter do loop c1
    Assert,         // assert e1
  };
  Kind kind;
  SourceSpan span;
  std::string name;
  TypeExprPtr type;
  ExprPtr e1;
  ExprPtr e2;
  CmdPtr c1;
  CmdPtr c2;
  CmdPtr update;
  std::vector<CmdPtr> cmds;
  std::vector<Binder> binders;
  ExprPtr filter;
  LoopSpec loop;
};

struct Param {
  std::string name;
  TypeExprPtr type;
  SourceSpan span;
};

struct Contract {
  ExprPtr requires_;
  ExprPtr ensures_;
  ExprPtr decreases_;
};

struct Decl {
  enum class Kind { Val, Type, Fun, Pred, Theorem, Proc };
  Kind kind;
  SourceSpan span;
  std::string name;
  TypeExprPtr type;           // Val declared type; Fun/Proc result type
  ExprPtr value;              // Val definition; Fun body; Pred/Theorem formula
  std::vector<Param> params;
  Contract contract;
  std::vector<CmdPtr> body;   // Proc commands
  ExprPtr returnExpr;         // Proc
};

struct Spec {
  std::vector<DeclPtr> decls;
};

/// Structural equality, ignoring source spans.
bool equal(const TypeExpr& a, const TypeExpr& b);
bool equal(const Expr& a, const Expr& b);
bool equal(const Cmd& a, const Cmd& b);
bool equal(const Decl& a, const Decl& b);
bool equal(const Spec& a, const Spec& b);

}  // namespace fspec::ast
