#include "fspec/typecheck.hpp"

#include <limits>
#include <mutex>
#include <set>
#include <unordered_map>

#include "fspec/diagnostics.hpp"
#include "fspec/eval.hpp"
#include "fspec/printer.hpp"

namespace fspec {

namespace {

std::mutex symMutex;
std::unordered_map<std::string, Symbol> symIds;
std::vector<std::string> symNames;

}  // namespace

Symbol intern(const std::string& name) {
  std::lock_guard<std::mutex> lock(symMutex);
  auto it = symIds.find(name);
  if (it != symIds.end()) return it->second;
  Symbol id = static_cast<Symbol>(symNames.size());
  symNames.push_back(name);
  symIds.emplace(name, id);
  return id;
}

const std::string& symbolName(Symbol s) {
  std::lock_guard<std::mutex> lock(symMutex);
  return symNames[s];
}

namespace {

using ast::BinOp;
using ast::UnOp;
using EK = ast::Expr::Kind;
using CK = ast::Cmd::Kind;
using TEK = TExpr::Kind;
using TCK = TCmd::Kind;

constexpr int64_t I64MIN = std::numeric_limits<int64_t>::min();
constexpr int64_t I64MAX = std::numeric_limits<int64_t>::max();

int64_t clamp128(__int128 v) {
  if (v < static_cast<__int128>(I64MIN)) return I64MIN;
  if (v > static_cast<__int128>(I64MAX)) return I64MAX;
  return static_cast<int64_t>(v);
}

SemTypeP wideInt() { return SemType::integer(I64MIN, I64MAX); }

// Best-effort interval for arithmetic result types; semantically inert
// (dynamic checks use declared types only).
SemTypeP arithInterval(BinOp op, const SemType& a, const SemType& b) {
  using I = __int128;
  I alo = a.lo, ahi = a.hi, blo = b.lo, bhi = b.hi;
  switch (op) {
    case BinOp::Add:
      return SemType::integer(clamp128(alo + blo), clamp128(ahi + bhi));
    case BinOp::Sub:
      return SemType::integer(clamp128(alo - bhi), clamp128(ahi - blo));
    case BinOp::Mul: {
      I c[4] = {alo * blo, alo * bhi, ahi * blo, ahi * bhi};
      I lo = c[0], hi = c[0];
      for (I v : c) {
        if (v < lo) lo = v;
        if (v > hi) hi = v;
      }
      return SemType::integer(clamp128(lo), clamp128(hi));
    }
    case BinOp::Mod: {
      int64_t m = std::max(std::abs(clamp128(blo)), std::abs(clamp128(bhi)));
      return SemType::integer(0, m > 0 ? m - 1 : 0);
    }
    default:
      return wideInt();
  }
}

SemTypeP joinTypes(const SemTypeP& a, const SemTypeP& b) {
  if (a->kind == SemType::Kind::Int)
    return SemType::integer(std::min(a->lo, b->lo), std::max(a->hi, b->hi));
  if (a->comps.empty()) return a;
  std::vector<SemTypeP> comps;
  comps.reserve(a->comps.size());
  for (size_t i = 0; i < a->comps.size(); ++i)
    comps.push_back(joinTypes(a->comps[i], b->comps[i]));
  switch (a->kind) {
    case SemType::Kind::Set: return SemType::set(comps[0]);
    case SemType::Kind::Tuple: return SemType::tuple(std::move(comps));
    case SemType::Kind::Record: return SemType::record(a->fields, std::move(comps));
    case SemType::Kind::Array: return SemType::array(a->length, comps[0]);
    case SemType::Kind::Map: return SemType::map(comps[0], comps[1]);
    default: return a;
  }
}

/// Lexical scope entry.
struct Binding {
  SemTypeP type;
  bool assignable = false;
};

class Scope {
 public:
  void push() { frames_.emplace_back(); }
  void pop() { frames_.pop_back(); }

  void declare(const std::string& name, SemTypeP type, bool assignable,
               const SourceSpan& span) {
    auto& top = frames_.back();
    if (top.count(name))
      throw TypeError(span, "duplicate declaration of '" + name + "'");
    top.emplace(name, Binding{std::move(type), assignable});
  }

  const Binding* lookup(const std::string& name) const {
    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) {
      auto found = it->find(name);
      if (found != it->end()) return &found->second;
    }
    return nullptr;
  }

 private:
  std::vector<std::map<std::string, Binding>> frames_;
};

/// Names assigned anywhere in a command, excluding names declared inside it.
/// These get an old_* snapshot at enclosing-loop entry.
void assignedVars(const ast::Cmd& c, std::set<std::string>& local,
                  std::set<std::string>& out) {
  switch (c.kind) {
    case CK::VarDecl:
      local.insert(c.name);
      break;
    case CK::Assign:
      if (!local.count(c.name)) out.insert(c.name);
      break;
    case CK::Block: {
      std::set<std::string> inner = local;
      for (const auto& sub : c.cmds) assignedVars(*sub, inner, out);
      break;
    }
    case CK::If: {
      std::set<std::string> l1 = local;
      assignedVars(*c.c1, l1, out);
      if (c.c2) {
        std::set<std::string> l2 = local;
        assignedVars(*c.c2, l2, out);
      }
      break;
    }
    case CK::While: {
      std::set<std::string> inner = local;
      assignedVars(*c.c1, inner, out);
      break;
    }
    case CK::ForCount: {
      std::set<std::string> inner = local;
      inner.insert(c.name);
      assignedVars(*c.update, inner, out);
      assignedVars(*c.c1, inner, out);
      break;
    }
    case CK::ForIn: {
      std::set<std::string> inner = local;
      inner.insert(c.name);
      assignedVars(*c.c1, inner, out);
      break;
    }
    case CK::ChooseThenElse: {
      std::set<std::string> l1 = local;
      for (const auto& b : c.binders) l1.insert(b.name);
      assignedVars(*c.c1, l1, out);
      std::set<std::string> l2 = local;
      assignedVars(*c.c2, l2, out);
      break;
    }
    case CK::ChooseDo: {
      std::set<std::string> inner = local;
      for (const auto& b : c.binders) inner.insert(b.name);
      assignedVars(*c.c1, inner, out);
      break;
    }
    case CK::ChooseCmd:
      for (const auto& b : c.binders) local.insert(b.name);
      break;
    case CK::Assert:
      break;
  }
}

class Analyzer {
 public:
  Analyzer(const ast::Spec& spec, std::map<std::string, int64_t> unspecified,
           bool verifyTheorems)
      : spec_(spec), unspecified_(std::move(unspecified)), verify_(verifyTheorems) {}

  void run() {
    for (const auto& d : spec_.decls) handleDecl(*d);
  }

  TypedSpec takeSpec() { return std::move(out_); }
  ConstEnv takeEnv() { return std::move(env_); }

 private:
  const ast::Spec& spec_;
  std::map<std::string, int64_t> unspecified_;
  bool verify_;
  TypedSpec out_;
  ConstEnv env_;
  std::map<std::string, SemTypeP> typeDefs_;
  Scope scope_;

  // current operation state
  TDecl* current_ = nullptr;
  std::set<std::string> paramNames_;
  bool selfCall_ = false;
  SourceSpan selfCallSpan_;
  bool choiceSeen_ = false;

  Value evalConst(const TExprP& e) {
    Evaluator ev(out_, EvalMode::Deterministic);
    return ev.evalDet(*e, Context().push());
  }

  int64_t evalConstInt(const ast::Expr& e, const char* what) {
    TExprP te = checkExpr(e);
    if (te->type->kind != SemType::Kind::Int)
      throw TypeError(e.span, std::string(what) + " must be an integer");
    return evalConst(te).asInt();
  }

  // ------------------------------------------------------------- types

  SemTypeP resolveType(const ast::TypeExpr& t) {
    using K = ast::TypeExpr::Kind;
    switch (t.kind) {
      case K::Bool:
        return SemType::boolean();
      case K::NatUnbounded:
        throw TypeError(t.span, "ℕ without a bound is only legal for an unspecified constant");
      case K::Nat: {
        int64_t n = evalConstInt(*t.bound, "type bound");
        if (n < 0) throw TypeError(t.span, "ℕ bound must be non-negative");
        return SemType::integer(0, n);
      }
      case K::Int: {
        int64_t lo = evalConstInt(*t.bound, "type bound");
        int64_t hi = evalConstInt(*t.hi, "type bound");
        if (lo > hi) throw TypeError(t.span, "empty integer interval");
        return SemType::integer(lo, hi);
      }
      case K::Set:
        return SemType::set(resolveType(*t.args[0]));
      case K::Tuple: {
        std::vector<SemTypeP> comps;
        for (const auto& a : t.args) comps.push_back(resolveType(*a));
        return SemType::tuple(std::move(comps));
      }
      case K::Record: {
        std::vector<SemTypeP> comps;
        for (const auto& a : t.args) comps.push_back(resolveType(*a));
        return SemType::record(t.fields, std::move(comps));
      }
      case K::Array: {
        int64_t n = evalConstInt(*t.bound, "array length");
        if (n < 0) throw TypeError(t.span, "array length must be non-negative");
        return SemType::array(static_cast<uint64_t>(n), resolveType(*t.args[0]));
      }
      case K::Map:
        return SemType::map(resolveType(*t.args[0]), resolveType(*t.args[1]));
      case K::Named: {
        auto it = typeDefs_.find(t.name);
        if (it == typeDefs_.end())
          throw TypeError(t.span, "unknown type '" + t.name + "'");
        return it->second;
      }
    }
    throw TypeError(t.span, "unsupported type");
  }

  // ------------------------------------------------------- expressions

  TExprP requireBool(const ast::Expr& e) {
    TExprP te = checkExpr(e);
    if (te->type->kind != SemType::Kind::Bool)
      throw TypeError(e.span, "expected a formula of type Bool, found " + typeName(*te->type));
    return te;
  }

  TExprP requireInt(const ast::Expr& e) {
    TExprP te = checkExpr(e);
    if (te->type->kind != SemType::Kind::Int)
      throw TypeError(e.span, "expected an integer expression, found " + typeName(*te->type));
    return te;
  }

  std::shared_ptr<TExpr> makeNode(const ast::Expr& e, TEK kind) {
    auto n = std::make_shared<TExpr>();
    n->kind = kind;
    n->span = e.span;
    n->text = printExpr(e);
    return n;
  }

  std::vector<TBinder> checkBinders(const std::vector<ast::Binder>& binders,
                                    std::vector<TExprP>* domainExprs = nullptr) {
    std::vector<TBinder> out;
    for (const auto& b : binders) {
      TBinder tb;
      tb.name = intern(b.name);
      tb.span = b.span;
      if (b.type) {
        tb.type = resolveType(*b.type);
      } else {
        tb.domain = checkExpr(*b.domain);
        if (tb.domain->type->kind != SemType::Kind::Set)
          throw TypeError(b.domain->span, "binder domain must be a set, found " +
                                              typeName(*tb.domain->type));
        tb.type = tb.domain->type->comps[0];
        if (domainExprs) domainExprs->push_back(tb.domain);
      }
      scope_.declare(b.name, tb.type, /*assignable=*/false, b.span);
      out.push_back(std::move(tb));
    }
    return out;
  }

  bool anyBranches(const std::vector<TExprP>& args) {
    for (const auto& a : args)
      if (a && a->branches) return true;
    return false;
  }

  TExprP checkExpr(const ast::Expr& e) {
    switch (e.kind) {
      case EK::IntLit: {
        auto n = makeNode(e, TEK::IntLit);
        n->intValue = e.intValue;
        n->type = SemType::integer(e.intValue, e.intValue);
        return n;
      }
      case EK::BoolLit: {
        auto n = makeNode(e, TEK::BoolLit);
        n->boolValue = e.boolValue;
        n->type = SemType::boolean();
        return n;
      }
      case EK::Var: {
        if (const Binding* b = scope_.lookup(e.name)) {
          auto n = makeNode(e, TEK::Var);
          n->name = intern(e.name);
          n->type = b->type;
          return n;
        }
        if (const TDecl* d = out_.find(e.name)) {
          if (d->isConst) {
            auto n = makeNode(e, TEK::ConstVal);
            n->constValue = d->constValue;
            n->type = d->resultType;
            n->callee = d;
            return n;
          }
          throw TypeError(e.span, "'" + e.name + "' is an operation; apply it to arguments");
        }
        throw TypeError(e.span, "unknown variable '" + e.name + "'");
      }
      case EK::Unary: {
        auto n = makeNode(e, TEK::Unary);
        n->un = e.un;
        if (e.un == UnOp::Not) {
          n->args = {requireBool(*e.args[0])};
          n->type = SemType::boolean();
        } else {
          n->args = {requireInt(*e.args[0])};
          const auto& t = *n->args[0]->type;
          n->type = SemType::integer(clamp128(-static_cast<__int128>(t.hi)),
                                     clamp128(-static_cast<__int128>(t.lo)));
        }
        n->branches = n->args[0]->branches;
        return n;
      }
      case EK::Binary:
        return checkBinary(e);
      case EK::Call:
        return checkCall(e);
      case EK::TupleE: {
        auto n = makeNode(e, TEK::TupleE);
        std::vector<SemTypeP> comps;
        for (const auto& a : e.args) {
          n->args.push_back(checkExpr(*a));
          comps.push_back(n->args.back()->type);
        }
        n->type = SemType::tuple(std::move(comps));
        n->branches = anyBranches(n->args);
        return n;
      }
      case EK::Proj: {
        auto n = makeNode(e, TEK::Proj);
        n->args = {checkExpr(*e.args[0])};
        const auto& bt = *n->args[0]->type;
        if (bt.kind != SemType::Kind::Tuple && bt.kind != SemType::Kind::Record)
          throw TypeError(e.span, "projection needs a tuple or record, found " + typeName(bt));
        if (e.projIndex < 1 || static_cast<size_t>(e.projIndex) > bt.comps.size())
          throw TypeError(e.span, "projection index out of range");
        n->projIndex = static_cast<uint32_t>(e.projIndex - 1);
        n->type = bt.comps[n->projIndex];
        n->branches = n->args[0]->branches;
        return n;
      }
      case EK::Index: {
        auto n = makeNode(e, TEK::Index);
        n->args = {checkExpr(*e.args[0]), checkExpr(*e.args[1])};
        const auto& bt = *n->args[0]->type;
        if (bt.kind == SemType::Kind::Array) {
          if (n->args[1]->type->kind != SemType::Kind::Int)
            throw TypeError(e.args[1]->span, "array index must be an integer");
          n->type = bt.comps[0];
        } else if (bt.kind == SemType::Kind::Map) {
          if (!compatible(*n->args[1]->type, *bt.comps[0]))
            throw TypeError(e.args[1]->span, "map key has the wrong type");
          n->type = bt.comps[1];
        } else {
          throw TypeError(e.span, "indexing needs an array or map, found " + typeName(bt));
        }
        n->branches = anyBranches(n->args);
        return n;
      }
      case EK::ArrayCtor: {
        auto n = makeNode(e, TEK::ArrayCtor);
        int64_t len = evalConstInt(*e.args[0], "array length");
        if (len < 0) throw TypeError(e.span, "array length must be non-negative");
        SemTypeP elem = resolveType(*e.typeArg);
        n->args = {checkExpr(*e.args[1])};
        if (!compatible(*n->args[0]->type, *elem))
          throw TypeError(e.args[1]->span, "array initializer has the wrong type");
        n->intValue = len;
        n->type = SemType::array(static_cast<uint64_t>(len), std::move(elem));
        n->branches = n->args[0]->branches;
        return n;
      }
      case EK::SetLit: {
        auto n = makeNode(e, TEK::SetLit);
        SemTypeP elem;
        for (const auto& a : e.args) {
          n->args.push_back(checkExpr(*a));
          const SemTypeP& t = n->args.back()->type;
          if (!elem) {
            elem = t;
          } else {
            if (!compatible(*elem, *t))
              throw TypeError(a->span, "set elements have mismatching types");
            elem = joinTypes(elem, t);
          }
        }
        n->type = SemType::set(elem);
        n->branches = anyBranches(n->args);
        return n;
      }
      case EK::SetEmpty: {
        auto n = makeNode(e, TEK::SetEmpty);
        n->type = SemType::set(resolveType(*e.typeArg));
        return n;
      }
      case EK::SetRange: {
        auto n = makeNode(e, TEK::SetRange);
        n->args = {requireInt(*e.args[0]), requireInt(*e.args[1])};
        n->type = SemType::set(SemType::integer(
            std::min(n->args[0]->type->lo, n->args[1]->type->lo),
            std::max(n->args[0]->type->hi, n->args[1]->type->hi)));
        n->branches = anyBranches(n->args);
        return n;
      }
      case EK::SetCompr: {
        auto n = makeNode(e, TEK::SetCompr);
        scope_.push();
        n->binders = checkBinders(e.binders);
        if (e.filter) n->filter = requireBool(*e.filter);
        n->body = checkExpr(*e.body);
        scope_.pop();
        n->type = SemType::set(n->body->type);
        return n;
      }
      case EK::Quant: {
        auto n = makeNode(e, TEK::Quant);
        n->isExists = e.isExists;
        scope_.push();
        n->binders = checkBinders(e.binders);
        if (e.filter) n->filter = requireBool(*e.filter);
        n->body = requireBool(*e.body);
        scope_.pop();
        n->type = SemType::boolean();
        return n;
      }
      case EK::Sum: {
        auto n = makeNode(e, TEK::Sum);
        scope_.push();
        n->binders = checkBinders(e.binders);
        if (e.filter) n->filter = requireBool(*e.filter);
        n->body = requireInt(*e.body);
        scope_.pop();
        n->type = wideInt();
        return n;
      }
      case EK::Choose: {
        auto n = makeNode(e, TEK::Choose);
        choiceSeen_ = true;
        n->branches = true;
        scope_.push();
        n->binders = checkBinders(e.binders);
        if (e.filter) n->filter = requireBool(*e.filter);
        scope_.pop();
        if (n->binders.size() == 1) {
          n->type = n->binders[0].type;
        } else {
          std::vector<SemTypeP> comps;
          for (const auto& b : n->binders) comps.push_back(b.type);
          n->type = SemType::tuple(std::move(comps));
        }
        return n;
      }
      case EK::IfE: {
        auto n = makeNode(e, TEK::IfE);
        n->args = {requireBool(*e.args[0]), checkExpr(*e.args[1]), checkExpr(*e.args[2])};
        if (!compatible(*n->args[1]->type, *n->args[2]->type))
          throw TypeError(e.span, "if branches have mismatching types");
        n->type = joinTypes(n->args[1]->type, n->args[2]->type);
        n->branches = anyBranches(n->args);
        return n;
      }
      case EK::LetE: {
        auto n = makeNode(e, TEK::LetE);
        n->name = intern(e.name);
        n->args = {checkExpr(*e.args[0])};
        scope_.push();
        scope_.declare(e.name, n->args[0]->type, /*assignable=*/false, e.span);
        n->body = checkExpr(*e.body);
        scope_.pop();
        n->type = n->body->type;
        n->branches = n->args[0]->branches || n->body->branches;
        return n;
      }
      case EK::Print: {
        auto n = makeNode(e, TEK::Print);
        n->args = {checkExpr(*e.args[0])};
        n->type = n->args[0]->type;
        n->branches = n->args[0]->branches;
        return n;
      }
      case EK::SetSize: {
        auto n = makeNode(e, TEK::SetSize);
        n->args = {checkExpr(*e.args[0])};
        if (n->args[0]->type->kind != SemType::Kind::Set)
          throw TypeError(e.span, "|…| needs a set, found " + typeName(*n->args[0]->type));
        n->type = SemType::integer(0, I64MAX);
        n->branches = n->args[0]->branches;
        return n;
      }
    }
    throw TypeError(e.span, "unsupported expression");
  }

  TExprP checkBinary(const ast::Expr& e) {
    auto n = makeNode(e, TEK::Binary);
    n->bin = e.bin;
    switch (e.bin) {
      case BinOp::Add: case BinOp::Sub: case BinOp::Mul:
      case BinOp::Div: case BinOp::Mod: case BinOp::Pow: {
        n->args = {requireInt(*e.args[0]), requireInt(*e.args[1])};
        n->type = e.bin == BinOp::Pow ? wideInt()
                                      : arithInterval(e.bin, *n->args[0]->type,
                                                      *n->args[1]->type);
        break;
      }
      case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge: {
        n->args = {requireInt(*e.args[0]), requireInt(*e.args[1])};
        n->type = SemType::boolean();
        break;
      }
      case BinOp::Eq: case BinOp::Ne: {
        n->args = {checkExpr(*e.args[0]), checkExpr(*e.args[1])};
        if (!compatible(*n->args[0]->type, *n->args[1]->type))
          throw TypeError(e.span, "comparison of mismatching types " +
                                      typeName(*n->args[0]->type) + " and " +
                                      typeName(*n->args[1]->type));
        n->type = SemType::boolean();
        break;
      }
      case BinOp::And: case BinOp::Or: case BinOp::Implies: case BinOp::Iff: {
        n->args = {requireBool(*e.args[0]), requireBool(*e.args[1])};
        n->type = SemType::boolean();
        break;
      }
      case BinOp::Union: case BinOp::Intersect: case BinOp::Diff: {
        n->args = {checkExpr(*e.args[0]), checkExpr(*e.args[1])};
        if (n->args[0]->type->kind != SemType::Kind::Set ||
            !compatible(*n->args[0]->type, *n->args[1]->type))
          throw TypeError(e.span, "set operation needs sets of equal element type");
        n->type = joinTypes(n->args[0]->type, n->args[1]->type);
        break;
      }
      case BinOp::Subseteq: {
        n->args = {checkExpr(*e.args[0]), checkExpr(*e.args[1])};
        if (n->args[0]->type->kind != SemType::Kind::Set ||
            !compatible(*n->args[0]->type, *n->args[1]->type))
          throw TypeError(e.span, "⊆ needs sets of equal element type");
        n->type = SemType::boolean();
        break;
      }
      case BinOp::In: {
        n->args = {checkExpr(*e.args[0]), checkExpr(*e.args[1])};
        if (n->args[1]->type->kind != SemType::Kind::Set ||
            !compatible(*n->args[0]->type, *n->args[1]->type->comps[0]))
          throw TypeError(e.span, "∈ needs an element and a set over its type");
        n->type = SemType::boolean();
        break;
      }
    }
    n->branches = anyBranches(n->args);
    return n;
  }

  TExprP checkCall(const ast::Expr& e) {
    const TDecl* callee = nullptr;
    if (current_ && e.name == current_->name) {
      callee = current_;
      selfCall_ = true;
      if (selfCallSpan_.file.empty()) selfCallSpan_ = e.span;
    } else {
      callee = out_.find(e.name);
    }
    if (!callee) throw TypeError(e.span, "unknown operation '" + e.name + "'");
    if (callee->isConst)
      throw TypeError(e.span, "'" + e.name + "' is a constant, not an operation");
    auto n = makeNode(e, TEK::Call);
    n->name = intern(e.name);
    n->callee = callee;
    if (e.args.size() != callee->params.size())
      throw TypeError(e.span, "'" + e.name + "' expects " +
                                  std::to_string(callee->params.size()) + " arguments, got " +
                                  std::to_string(e.args.size()));
    for (size_t i = 0; i < e.args.size(); ++i) {
      n->args.push_back(checkExpr(*e.args[i]));
      if (!compatible(*n->args.back()->type, *callee->params[i].type))
        throw TypeError(e.args[i]->span,
                        "argument " + std::to_string(i + 1) + " of '" + e.name +
                            "' has type " + typeName(*n->args.back()->type) +
                            ", expected " + typeName(*callee->params[i].type));
    }
    n->type = callee->resultType;
    n->branches = anyBranches(n->args) || callee->branches;
    if (callee->containsChoice) choiceSeen_ = true;
    return n;
  }

  // ---------------------------------------------------------- commands

  std::shared_ptr<TCmd> makeCmd(const ast::Cmd& c, TCK kind) {
    auto n = std::make_shared<TCmd>();
    n->kind = kind;
    n->span = c.span;
    return n;
  }

  /// old_* snapshots for a loop: every variable of the enclosing scope
  /// assigned anywhere in the loop body (plus the counted-for update).
  std::vector<std::pair<Symbol, Symbol>> snapshotsFor(const ast::Cmd& loop) {
    std::set<std::string> local, assigned;
    if (loop.kind == CK::ForCount) assignedVars(*loop.update, local, assigned);
    if (loop.kind == CK::ChooseDo)
      for (const auto& b : loop.binders) local.insert(b.name);
    if (loop.kind == CK::ForIn) local.insert(loop.name);
    assignedVars(*loop.c1, local, assigned);
    std::vector<std::pair<Symbol, Symbol>> out;
    for (const auto& name : assigned) {
      const Binding* b = scope_.lookup(name);
      if (!b) continue;
      std::string oldName = "old_" + name;
      if (scope_.lookup(oldName))
        throw TypeError(loop.span, "'" + oldName + "' collides with an existing variable");
      out.emplace_back(intern(name), intern(oldName));
    }
    return out;
  }

  TLoopInfo checkLoopSpec(const ast::Cmd& loop, SemTypeP forSetType) {
    TLoopInfo info;
    info.snapshots = snapshotsFor(loop);
    scope_.push();
    for (const auto& [var, oldVar] : info.snapshots)
      scope_.declare(symbolName(oldVar), scope_.lookup(symbolName(var))->type,
                     /*assignable=*/false, loop.span);
    if (forSetType) {
      info.forSetVar = intern("forSet");
      scope_.declare("forSet", forSetType, /*assignable=*/false, loop.span);
    }
    for (const auto& inv : loop.loop.invariants) {
      TClause c;
      c.expr = requireBool(*inv);
      c.text = "invariant " + printExpr(*inv) + ";";
      c.span = inv->span;
      info.invariants.push_back(std::move(c));
    }
    if (loop.loop.decreases) {
      info.measure.expr = requireInt(*loop.loop.decreases);
      info.measure.text = "decreases " + printExpr(*loop.loop.decreases) + ";";
      info.measure.span = loop.loop.decreases->span;
    }
    scope_.pop();
    return info;
  }

  TCmdP checkCmd(const ast::Cmd& c) {
    switch (c.kind) {
      case CK::VarDecl: {
        auto n = makeCmd(c, TCK::VarDecl);
        n->name = intern(c.name);
        n->varType = resolveType(*c.type);
        n->e1 = checkExpr(*c.e1);
        if (!compatible(*n->e1->type, *n->varType))
          throw TypeError(c.e1->span, "initializer has type " + typeName(*n->e1->type) +
                                          ", expected " + typeName(*n->varType));
        n->text = "var " + c.name + ":" + printType(*c.type) + " := " + printExpr(*c.e1) + ";";
        scope_.declare(c.name, n->varType, /*assignable=*/true, c.span);
        n->branches = n->e1->branches;
        return n;
      }
      case CK::Assign: {
        auto n = makeCmd(c, TCK::Assign);
        n->name = intern(c.name);
        const Binding* b = scope_.lookup(c.name);
        if (!b) throw TypeError(c.span, "unknown variable '" + c.name + "'");
        if (!b->assignable)
          throw TypeError(c.span, "'" + c.name + "' is not assignable");
        n->varType = b->type;
        if (c.e1) {
          n->e1 = checkExpr(*c.e1);
          if (b->type->kind == SemType::Kind::Array) {
            if (n->e1->type->kind != SemType::Kind::Int)
              throw TypeError(c.e1->span, "array index must be an integer");
          } else if (b->type->kind == SemType::Kind::Map) {
            if (!compatible(*n->e1->type, *b->type->comps[0]))
              throw TypeError(c.e1->span, "map key has the wrong type");
          } else {
            throw TypeError(c.span, "'" + c.name + "' is not an array or map");
          }
          n->e2 = checkExpr(*c.e2);
          if (!compatible(*n->e2->type, *b->type->comps[b->type->kind == SemType::Kind::Map ? 1 : 0]))
            throw TypeError(c.e2->span, "assigned value has the wrong type");
        } else {
          n->e2 = checkExpr(*c.e2);
          if (!compatible(*n->e2->type, *b->type))
            throw TypeError(c.e2->span, "assigned value has type " + typeName(*n->e2->type) +
                                            ", expected " + typeName(*b->type));
        }
        n->text = c.name + (c.e1 ? "[" + printExpr(*c.e1) + "]" : "") + " := " +
                  printExpr(*c.e2) + ";";
        n->branches = (n->e1 && n->e1->branches) || n->e2->branches;
        return n;
      }
      case CK::Block: {
        auto n = makeCmd(c, TCK::Block);
        scope_.push();
        for (const auto& sub : c.cmds) {
          n->cmds.push_back(checkCmd(*sub));
          n->branches = n->branches || n->cmds.back()->branches;
        }
        scope_.pop();
        return n;
      }
      case CK::If: {
        auto n = makeCmd(c, TCK::If);
        n->e1 = requireBool(*c.e1);
        scope_.push();
        n->c1 = checkCmd(*c.c1);
        scope_.pop();
        if (c.c2) {
          scope_.push();
          n->c2 = checkCmd(*c.c2);
          scope_.pop();
        }
        n->branches = n->e1->branches || n->c1->branches || (n->c2 && n->c2->branches);
        return n;
      }
      case CK::While: {
        auto n = makeCmd(c, TCK::While);
        n->loop = checkLoopSpec(c, nullptr);
        n->e1 = requireBool(*c.e1);
        scope_.push();
        n->c1 = checkCmd(*c.c1);
        scope_.pop();
        n->branches = n->e1->branches || n->c1->branches;
        return n;
      }
      case CK::ForCount: {
        auto n = makeCmd(c, TCK::ForCount);
        n->name = intern(c.name);
        n->varType = resolveType(*c.type);
        n->e1 = checkExpr(*c.e1);
        if (!compatible(*n->e1->type, *n->varType))
          throw TypeError(c.e1->span, "initializer has the wrong type");
        scope_.push();
        scope_.declare(c.name, n->varType, /*assignable=*/true, c.span);
        n->loop = checkLoopSpec(c, nullptr);
        n->e2 = requireBool(*c.e2);
        n->update = checkCmd(*c.update);
        scope_.push();
        n->c1 = checkCmd(*c.c1);
        scope_.pop();
        scope_.pop();
        n->branches = n->e1->branches || n->e2->branches || n->update->branches ||
                      n->c1->branches;
        return n;
      }
      case CK::ForIn: {
        auto n = makeCmd(c, TCK::ForIn);
        n->name = intern(c.name);
        n->e1 = checkExpr(*c.e1);
        if (n->e1->type->kind != SemType::Kind::Set)
          throw TypeError(c.e1->span, "for-loop domain must be a set");
        n->varType = n->e1->type->comps[0];
        n->loop = checkLoopSpec(c, n->e1->type);
        scope_.push();
        scope_.declare(c.name, n->varType, /*assignable=*/false, c.span);
        n->c1 = checkCmd(*c.c1);
        scope_.pop();
        choiceSeen_ = true;
        n->branches = true;
        return n;
      }
      case CK::ChooseCmd: {
        auto n = makeCmd(c, TCK::ChooseCmd);
        choiceSeen_ = true;
        n->branches = true;
        n->binders = checkBindersIntoCurrentScope(c);
        if (c.filter) n->filter = requireBool(*c.filter);
        n->text = chooseText(c);
        return n;
      }
      case CK::ChooseThenElse: {
        auto n = makeCmd(c, TCK::ChooseThenElse);
        choiceSeen_ = true;
        n->branches = true;
        scope_.push();
        n->binders = checkBinders(c.binders);
        if (c.filter) n->filter = requireBool(*c.filter);
        n->c1 = checkCmd(*c.c1);
        scope_.pop();
        scope_.push();
        n->c2 = checkCmd(*c.c2);
        scope_.pop();
        n->text = chooseText(c);
        return n;
      }
      case CK::ChooseDo: {
        auto n = makeCmd(c, TCK::ChooseDo);
        choiceSeen_ = true;
        n->branches = true;
        n->loop = checkLoopSpec(c, nullptr);
        scope_.push();
        n->binders = checkBinders(c.binders);
        if (c.filter) n->filter = requireBool(*c.filter);
        n->c1 = checkCmd(*c.c1);
        scope_.pop();
        n->text = chooseText(c);
        return n;
      }
      case CK::Assert: {
        auto n = makeCmd(c, TCK::Assert);
        n->e1 = requireBool(*c.e1);
        n->text = "assert " + printExpr(*c.e1) + ";";
        n->branches = n->e1->branches;
        return n;
      }
    }
    throw TypeError(c.span, "unsupported command");
  }

  // plain `choose …;` introduces its constants into the enclosing scope
  std::vector<TBinder> checkBindersIntoCurrentScope(const ast::Cmd& c) {
    std::vector<TBinder> out;
    for (const auto& b : c.binders) {
      TBinder tb;
      tb.name = intern(b.name);
      tb.span = b.span;
      if (b.type) {
        tb.type = resolveType(*b.type);
      } else {
        tb.domain = checkExpr(*b.domain);
        if (tb.domain->type->kind != SemType::Kind::Set)
          throw TypeError(b.domain->span, "binder domain must be a set");
        tb.type = tb.domain->type->comps[0];
      }
      scope_.declare(b.name, tb.type, /*assignable=*/false, b.span);
      out.push_back(std::move(tb));
    }
    return out;
  }

  std::string chooseText(const ast::Cmd& c) {
    ast::Expr probe;
    probe.kind = EK::Choose;
    probe.binders = c.binders;
    probe.filter = c.filter;
    return printExpr(probe) + ";";
  }

  // ------------------------------------------------------- declarations

  void handleDecl(const ast::Decl& d) {
    if (out_.find(d.name) || typeDefs_.count(d.name))
      throw TypeError(d.span, "duplicate declaration of '" + d.name + "'");
    switch (d.kind) {
      case ast::Decl::Kind::Type:
        typeDefs_[d.name] = resolveType(*d.type);
        return;
      case ast::Decl::Kind::Val:
        handleVal(d);
        return;
      default:
        handleOp(d);
        return;
    }
  }

  void registerDecl(std::shared_ptr<TDecl> td) {
    out_.byName[td->name] = td.get();
    out_.decls.push_back(std::move(td));
  }

  void handleVal(const ast::Decl& d) {
    auto td = std::make_shared<TDecl>();
    td->kind = ast::Decl::Kind::Val;
    td->name = d.name;
    td->span = d.span;
    td->isConst = true;
    if (!d.value) {
      if (!d.type || d.type->kind != ast::TypeExpr::Kind::NatUnbounded)
        throw TypeError(d.span, "a constant without a definition must have type ℕ");
      auto it = unspecified_.find(d.name);
      int64_t v = it != unspecified_.end() ? it->second : 0;
      td->constValue = Value::integer(v);
      td->resultType = SemType::integer(v, v);
      env_.unspecified[d.name] = v;
      env_.values[d.name] = td->constValue;
      registerDecl(std::move(td));
      return;
    } else {
      TExprP body = checkExpr(*d.value);
      SemTypeP declared;
      if (d.type && d.type->kind != ast::TypeExpr::Kind::NatUnbounded) {
        declared = resolveType(*d.type);
        if (!compatible(*body->type, *declared))
          throw TypeError(d.value->span, "definition has type " + typeName(*body->type) +
                                             ", expected " + typeName(*declared));
      } else if (d.type) {
        declared = SemType::integer(0, I64MAX);
      }
      Value v = evalConst(body);
      if (declared && !valueFits(v, *declared))
        throw EvalError(ErrKind::RangeError, d.value->span, printDecl(d),
                        "value " + formatValue(v) + " is outside type " + typeName(*declared));
      td->constValue = v;
      td->resultType = declared ? declared : body->type;
    }
    env_.values[d.name] = td->constValue;
    registerDecl(std::move(td));
  }

  void handleOp(const ast::Decl& d) {
    auto td = std::make_shared<TDecl>();
    td->kind = d.kind;
    td->name = d.name;
    td->span = d.span;
    td->declText = declHeaderText(d);

    current_ = td.get();
    selfCall_ = false;
    selfCallSpan_ = {};
    choiceSeen_ = false;
    paramNames_.clear();

    for (const auto& p : d.params) {
      TParam tp;
      tp.sym = intern(p.name);
      tp.name = p.name;
      tp.type = resolveType(*p.type);
      td->params.push_back(std::move(tp));
    }
    td->resultType = (d.kind == ast::Decl::Kind::Fun || d.kind == ast::Decl::Kind::Proc)
                         ? resolveType(*d.type)
                         : SemType::boolean();

    scope_.push();
    for (size_t i = 0; i < d.params.size(); ++i) {
      scope_.declare(d.params[i].name, td->params[i].type, /*assignable=*/false,
                     d.params[i].span);
      paramNames_.insert(d.params[i].name);
    }

    if (d.contract.requires_) {
      td->requiresC.expr = requireBool(*d.contract.requires_);
      td->requiresC.text = "requires " + printExpr(*d.contract.requires_) + ";";
      td->requiresC.span = d.contract.requires_->span;
    }
    if (d.contract.ensures_) {
      if (d.kind == ast::Decl::Kind::Theorem)
        throw TypeError(d.contract.ensures_->span, "theorems cannot have an ensures clause");
      scope_.push();
      scope_.declare("result", td->resultType, /*assignable=*/false, d.span);
      td->ensuresC.expr = requireBool(*d.contract.ensures_);
      td->ensuresC.text = "ensures " + printExpr(*d.contract.ensures_) + ";";
      td->ensuresC.span = d.contract.ensures_->span;
      scope_.pop();
    }
    if (d.contract.decreases_) {
      td->decreasesC.expr = requireInt(*d.contract.decreases_);
      td->decreasesC.text = "decreases " + printExpr(*d.contract.decreases_) + ";";
      td->decreasesC.span = d.contract.decreases_->span;
    }

    if (d.kind == ast::Decl::Kind::Proc) {
      scope_.push();
      for (const auto& c : d.body) {
        td->cmds.push_back(checkCmd(*c));
        td->branches = td->branches || td->cmds.back()->branches;
      }
      td->returnExpr = checkExpr(*d.returnExpr);
      if (!compatible(*td->returnExpr->type, *td->resultType))
        throw TypeError(d.returnExpr->span,
                        "return value has type " + typeName(*td->returnExpr->type) +
                            ", expected " + typeName(*td->resultType));
      td->branches = td->branches || td->returnExpr->branches;
      scope_.pop();
    } else {
      td->body = d.kind == ast::Decl::Kind::Fun ? checkExpr(*d.value)
                                                : requireBool(*d.value);
      if (d.kind == ast::Decl::Kind::Fun &&
          !compatible(*td->body->type, *td->resultType))
        throw TypeError(d.value->span, "body has type " + typeName(*td->body->type) +
                                           ", expected " + typeName(*td->resultType));
      td->branches = td->body->branches;
    }
    scope_.pop();

    td->recursive = selfCall_;
    if (selfCall_ && !td->decreasesC.expr)
      throw MissingDecreases(selfCallSpan_,
                             "recursive operation '" + d.name +
                                 "' needs a decreases clause");
    td->containsChoice = choiceSeen_;
    current_ = nullptr;

    // a parameterless theorem is a boolean constant, evaluated immediately
    if (d.kind == ast::Decl::Kind::Theorem && d.params.empty()) {
      td->isConst = true;
      Evaluator ev(out_, EvalMode::Deterministic);
      Value v = ev.evalDet(*td->body, Context().push());
      td->constValue = v;
      env_.values[d.name] = v;
      registerDecl(std::move(td));
      if (verify_ && !v.asBool()) throw TheoremFailed(d.name);
      return;
    }
    registerDecl(std::move(td));
  }

  std::string declHeaderText(const ast::Decl& d) {
    // one-line rendering used in "theorem is violated" transcripts
    std::string s = printDecl(d);
    std::string out;
    bool pendingSpace = false;
    for (char ch : s) {
      if (ch == '\n') {
        pendingSpace = true;
        continue;
      }
      if (pendingSpace && !out.empty()) out += ' ';
      pendingSpace = false;
      out += ch;
    }
    return out;
  }
};

std::map<std::string, int64_t> unspecifiedNames(const ast::Spec& spec) {
  std::map<std::string, int64_t> names;
  for (const auto& d : spec.decls)
    if (d->kind == ast::Decl::Kind::Val && !d->value && d->type &&
        d->type->kind == ast::TypeExpr::Kind::NatUnbounded)
      names[d->name] = 0;
  return names;
}

}  // namespace

ConstEnv resolveConstants(const ast::Spec& spec,
                          const std::map<std::string, int64_t>& overrides,
                          int64_t defaultValue) {
  std::map<std::string, int64_t> values = unspecifiedNames(spec);
  for (auto& [name, v] : values) v = defaultValue;
  for (const auto& [name, v] : overrides) {
    auto it = values.find(name);
    if (it == values.end()) throw UnknownConstant(name);
    it->second = v;
  }
  Analyzer a(spec, std::move(values), /*verifyTheorems=*/true);
  a.run();
  return a.takeEnv();
}

TypedSpec typecheckSpec(const ast::Spec& spec, const ConstEnv& consts) {
  Analyzer a(spec, consts.unspecified, /*verifyTheorems=*/false);
  a.run();
  return a.takeSpec();
}

}  // namespace fspec
