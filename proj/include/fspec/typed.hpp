#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fspec/ast.hpp"
#include "fspec/semtype.hpp"
#include "fspec/source.hpp"
#include "fspec/value.hpp"

namespace fspec {

/// Interned identifier; lookup and comparison avoid string compares in the
/// evaluator's hot path.
using Symbol = uint32_t;

Symbol intern(const std::string& name);
const std::string& symbolName(Symbol s);

struct TExpr;
struct TCmd;
struct TDecl;
using TExprP = std::shared_ptr<const TExpr>;
using TCmdP = std::shared_ptr<const TCmd>;

struct TBinder {
  Symbol name = 0;
  SemTypeP type;    // domain as a type (x:T)
  TExprP domain;    // domain as a set expression (x ∈ e)
  SourceSpan span;
};

struct TExpr {
  enum class Kind : uint8_t {
    IntLit, BoolLit, ConstVal,  // resolved global constant
    Var, Unary, Binary, Call, TupleE, Proj, Index, ArrayCtor,
    SetLit, SetEmpty, SetRange, SetCompr, Quant, Sum, Choose,
    IfE, LetE, Print, SetSize,
  };
  Kind kind;
  SemTypeP type;
  SourceSpan span;
  bool branches = false;  // may yield more than one value in nondet mode
  int64_t intValue = 0;
  bool boolValue = false;
  bool isExists = false;
  uint32_t projIndex = 0;  // resolved, 0-based
  Symbol name = 0;
  const TDecl* callee = nullptr;
  Value constValue;
  ast::BinOp bin = ast::BinOp::Add;
  ast::UnOp un = ast::UnOp::Neg;
  std::vector<TExprP> args;
  std::vector<TBinder> binders;
  TExprP filter;
  TExprP body;
  std::string text;  // pretty form, for choice/annotation diagnostics
};

/// A checked annotation: the typed formula plus its rendered source text
/// ("invariant …;", "decreases …;") for error transcripts.
struct TClause {
  TExprP expr;
  std::string text;
  SourceSpan span;
};

struct TLoopInfo {
  std::vector<TClause> invariants;
  TClause measure;  // expr == nullptr when absent
  std::vector<std::pair<Symbol, Symbol>> snapshots;  // (var, old_var)
  Symbol forSetVar = 0;                              // ForIn loops only
};

struct TCmd {
  enum class Kind : uint8_t {
    VarDecl, Assign, Block, If, While, ForCount, ForIn,
    ChooseCmd, ChooseThenElse, ChooseDo, Assert,
  };
  Kind kind;
  SourceSpan span;
  bool branches = false;
  Symbol name = 0;
  SemTypeP varType;     // VarDecl/ForCount var type; Assign target declared type
  TExprP e1, e2;        // per kind: cond/init/index/rhs/domain
  TCmdP c1, c2, update;
  std::vector<TCmdP> cmds;
  std::vector<TBinder> binders;
  TExprP filter;
  TLoopInfo loop;
  std::string text;  // assert/choose text for diagnostics
};

struct TParam {
  Symbol sym = 0;
  std::string name;
  SemTypeP type;
};

struct TDecl {
  ast::Decl::Kind kind = ast::Decl::Kind::Val;
  std::string name;
  SourceSpan span;
  std::vector<TParam> params;
  SemTypeP resultType;  // fun/proc result; Bool for pred/theorem
  TClause requiresC, ensuresC, decreasesC;
  TExprP body;               // fun/pred/theorem
  std::vector<TCmdP> cmds;   // proc
  TExprP returnExpr;         // proc
  bool branches = false;       // invocation may branch in nondet mode
  bool containsChoice = false; // any nondeterministic construct, transitively
  bool recursive = false;
  // Val declarations:
  bool isConst = false;
  Value constValue;
  std::string declText;  // one-line rendering, used when a theorem is violated
};

/// Values of all global constants: unspecified ℕ constants (overridden or
/// defaulted) plus every defined constant and parameterless theorem,
/// evaluated in declaration order.
struct ConstEnv {
  std::map<std::string, Value> values;
  std::map<std::string, int64_t> unspecified;
};

struct TypedSpec {
  std::vector<std::shared_ptr<const TDecl>> decls;
  std::map<std::string, const TDecl*> byName;  // operations and constants

  const TDecl* find(const std::string& name) const {
    auto it = byName.find(name);
    return it == byName.end() ? nullptr : it->second;
  }
};

}  // namespace fspec
