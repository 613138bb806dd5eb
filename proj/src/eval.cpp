#include "fspec/eval.hpp"

#include <algorithm>

#include "fspec/diagnostics.hpp"

namespace fspec {

namespace {

using EK = TExpr::Kind;
using CK = TCmd::Kind;
using ast::BinOp;
using ast::UnOp;

[[noreturn]] void overflow(const TExpr& e) {
  throw EvalError(ErrKind::Overflow, e.span, e.text, "arithmetic overflow");
}

std::string argsText(const std::vector<Value>& args) {
  std::string out;
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += formatValue(args[i]);
  }
  return out;
}

}  // namespace

void Evaluator::emitPrint(const Value& v) const {
  if (sink_) sink_("print: " + formatValue(v));
}

// ---------------------------------------------------------------- shared

Value Evaluator::evalBinary(const TExpr& e, const Value& a, const Value& b) const {
  switch (e.bin) {
    case BinOp::Add: {
      int64_t r;
      if (__builtin_add_overflow(a.asInt(), b.asInt(), &r)) overflow(e);
      return Value::integer(r);
    }
    case BinOp::Sub: {
      int64_t r;
      if (__builtin_sub_overflow(a.asInt(), b.asInt(), &r)) overflow(e);
      return Value::integer(r);
    }
    case BinOp::Mul: {
      int64_t r;
      if (__builtin_mul_overflow(a.asInt(), b.asInt(), &r)) overflow(e);
      return Value::integer(r);
    }
    case BinOp::Div: {
      int64_t x = a.asInt(), y = b.asInt();
      if (y == 0)
        throw EvalError(ErrKind::DivisionByZero, e.span, e.text, "division by zero");
      if (x == INT64_MIN && y == -1) overflow(e);
      int64_t q = x / y;
      if ((x % y != 0) && ((x < 0) != (y < 0))) --q;  // floor division
      return Value::integer(q);
    }
    case BinOp::Mod: {
      int64_t x = a.asInt(), y = b.asInt();
      if (y == 0)
        throw EvalError(ErrKind::DivisionByZero, e.span, e.text, "division by zero");
      int64_t r = x % y;
      if (r < 0) r += (y < 0 ? -y : y);  // result in [0, |y|)
      return Value::integer(r);
    }
    case BinOp::Pow: {
      int64_t base = a.asInt(), exp = b.asInt();
      if (exp < 0)
        throw EvalError(ErrKind::RangeError, e.span, e.text,
                        "exponent " + std::to_string(exp) + " is negative");
      int64_t r = 1;
      for (int64_t i = 0; i < exp; ++i)
        if (__builtin_mul_overflow(r, base, &r)) overflow(e);
      return Value::integer(r);
    }
    case BinOp::Eq: return Value::boolean(valueEquals(a, b));
    case BinOp::Ne: return Value::boolean(!valueEquals(a, b));
    case BinOp::Lt: return Value::boolean(a.asInt() < b.asInt());
    case BinOp::Le: return Value::boolean(a.asInt() <= b.asInt());
    case BinOp::Gt: return Value::boolean(a.asInt() > b.asInt());
    case BinOp::Ge: return Value::boolean(a.asInt() >= b.asInt());
    case BinOp::Iff: return Value::boolean(a.asBool() == b.asBool());
    case BinOp::Union: return setUnion(a, b);
    case BinOp::Intersect: return setIntersect(a, b);
    case BinOp::Diff: return setDifference(a, b);
    case BinOp::Subseteq: return Value::boolean(setSubseteq(a, b));
    case BinOp::In: return Value::boolean(setContains(b, a));
    default:
      break;  // And/Or/Implies are short-circuited by the callers
  }
  throw EvalError(ErrKind::Overflow, e.span, e.text, "unexpected operator");
}

Value Evaluator::applyIndex(const TExpr& e, const Value& base, const Value& index) const {
  if (base.kind() == Value::Kind::Array) {
    int64_t i = index.asInt();
    if (i < 0 || static_cast<uint64_t>(i) >= base.elems().size())
      throw EvalError(ErrKind::RangeError, e.span, e.text,
                      "index " + std::to_string(i) + " is outside array bounds [0," +
                          std::to_string(base.elems().size() ? base.elems().size() - 1 : 0) +
                          "]");
    return base.elems()[static_cast<size_t>(i)];
  }
  // total map: keys at even slots, ascending
  const auto& es = base.elems();
  size_t lo = 0, hi = es.size() / 2;
  while (lo < hi) {
    size_t mid = (lo + hi) / 2;
    int c = compareValues(es[2 * mid], index);
    if (c == 0) return es[2 * mid + 1];
    if (c < 0) lo = mid + 1; else hi = mid;
  }
  throw EvalError(ErrKind::RangeError, e.span, e.text,
                  "key " + formatValue(index) + " is not in the map domain");
}

bool Evaluator::truth(const TExpr& e, const Context& ctx, const MeasureEnv& env) const {
  return eval(e, ctx, env).asBool();
}

// Deterministic visit of all bindings of a binder list, innermost varying
// fastest, filtered by the `with` formula. fn returns false to stop early.
bool Evaluator::bindingsVisit(
    const std::vector<TBinder>& binders, size_t i, const TExpr* filter, const Context& ctx,
    const MeasureEnv& env, const std::function<bool(const Context&, std::vector<Value>&)>& fn,
    std::vector<Value>& acc) const {
  if (i == binders.size()) {
    if (filter && !truth(*filter, ctx, env)) return true;
    return fn(ctx, acc);
  }
  const TBinder& b = binders[i];
  if (b.domain) {
    Value dom = eval(*b.domain, ctx, env);
    for (const Value& v : dom.elems()) {
      acc.push_back(v);
      bool go = bindingsVisit(binders, i + 1, filter, ctx.declare(b.name, v), env, fn, acc);
      acc.pop_back();
      if (!go) return false;
    }
    return true;
  }
  if (const std::vector<Value>* vals = materialized(b.type)) {
    for (const Value& v : *vals) {
      acc.push_back(v);
      bool go = bindingsVisit(binders, i + 1, filter, ctx.declare(b.name, v), env, fn, acc);
      acc.pop_back();
      if (!go) return false;
    }
    return true;
  }
  Seq<Value> seq = enumerateType(b.type);
  for (const auto* c = seq.force(); c; c = c->tail.force()) {
    acc.push_back(c->head);
    bool go =
        bindingsVisit(binders, i + 1, filter, ctx.declare(b.name, c->head), env, fn, acc);
    acc.pop_back();
    if (!go) return false;
  }
  return true;
}

Seq<std::vector<Value>> Evaluator::bindingsSeq(
    std::shared_ptr<const std::vector<TBinder>> binders, size_t i, const TExpr* filter,
    const Context& ctx, const MeasureEnv& env, std::vector<Value> acc) const {
  using VS = Seq<std::vector<Value>>;
  if (i == binders->size()) {
    if (filter && !truth(*filter, ctx, env)) return VS::empty();
    return VS::single(std::move(acc));
  }
  const TBinder& b = (*binders)[i];
  Seq<Value> dom;
  if (b.domain) {
    Value d = eval(*b.domain, ctx, env);
    auto elems = std::make_shared<std::vector<Value>>(d.elems());
    dom = Seq<Value>::fromVector(std::move(elems));
  } else {
    dom = enumerateType(b.type);
  }
  return flatMapSeq(dom, [this, binders, i, filter, ctx, env, acc, name = b.name](
                             const Value& v) {
    std::vector<Value> acc2 = acc;
    acc2.push_back(v);
    return bindingsSeq(binders, i + 1, filter, ctx.declare(name, v), env, std::move(acc2));
  });
}

Value Evaluator::chooseValue(const TExpr& e, std::vector<Value> witness) const {
  if (witness.size() == 1) return witness[0];
  return Value::tuple(std::move(witness));
}

// ------------------------------------------------------- deterministic path

Value Evaluator::eval(const TExpr& e, const Context& ctx, const MeasureEnv& env) const {
  switch (e.kind) {
    case EK::IntLit: return Value::integer(e.intValue);
    case EK::BoolLit: return Value::boolean(e.boolValue);
    case EK::ConstVal: return e.constValue;
    case EK::Var: {
      const Value* v = ctx.lookup(e.name);
      return *v;
    }
    case EK::Unary: {
      Value a = eval(*e.args[0], ctx, env);
      if (e.un == UnOp::Not) return Value::boolean(!a.asBool());
      int64_t r;
      if (__builtin_sub_overflow(int64_t{0}, a.asInt(), &r)) overflow(e);
      return Value::integer(r);
    }
    case EK::Binary: {
      if (e.bin == BinOp::And) {
        if (!truth(*e.args[0], ctx, env)) return Value::boolean(false);
        return Value::boolean(truth(*e.args[1], ctx, env));
      }
      if (e.bin == BinOp::Or) {
        if (truth(*e.args[0], ctx, env)) return Value::boolean(true);
        return Value::boolean(truth(*e.args[1], ctx, env));
      }
      if (e.bin == BinOp::Implies) {
        if (!truth(*e.args[0], ctx, env)) return Value::boolean(true);
        return Value::boolean(truth(*e.args[1], ctx, env));
      }
      Value a = eval(*e.args[0], ctx, env);
      Value b = eval(*e.args[1], ctx, env);
      return evalBinary(e, a, b);
    }
    case EK::Call: {
      std::vector<Value> args;
      args.reserve(e.args.size());
      for (const auto& a : e.args) args.push_back(eval(*a, ctx, env));
      return invoke(*e.callee, std::move(args), env, e.span);
    }
    case EK::TupleE: {
      std::vector<Value> comps;
      comps.reserve(e.args.size());
      for (const auto& a : e.args) comps.push_back(eval(*a, ctx, env));
      return Value::tuple(std::move(comps));
    }
    case EK::Proj:
      return eval(*e.args[0], ctx, env).elems()[e.projIndex];
    case EK::Index: {
      Value base = eval(*e.args[0], ctx, env);
      Value index = eval(*e.args[1], ctx, env);
      return applyIndex(e, base, index);
    }
    case EK::ArrayCtor: {
      Value init = eval(*e.args[0], ctx, env);
      if (!valueFits(init, *e.type->comps[0]))
        throw EvalError(ErrKind::RangeError, e.span, e.text,
                        "value " + formatValue(init) + " is outside type " +
                            typeName(*e.type->comps[0]));
      return Value::array(std::vector<Value>(static_cast<size_t>(e.intValue), init));
    }
    case EK::SetLit: {
      std::vector<Value> elems;
      elems.reserve(e.args.size());
      for (const auto& a : e.args) elems.push_back(eval(*a, ctx, env));
      return Value::set(std::move(elems));
    }
    case EK::SetEmpty:
      return Value::setSorted({});
    case EK::SetRange: {
      int64_t lo = eval(*e.args[0], ctx, env).asInt();
      int64_t hi = eval(*e.args[1], ctx, env).asInt();
      std::vector<Value> elems;
      if (lo <= hi) {
        if (static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) >= (uint64_t{1} << 22))
          throw EvalError(ErrKind::Overflow, e.span, e.text, "range is too large");
        elems.reserve(static_cast<size_t>(hi - lo + 1));
        for (int64_t v = lo; v <= hi; ++v) elems.push_back(Value::integer(v));
      }
      return Value::setSorted(std::move(elems));
    }
    case EK::SetCompr: {
      std::vector<Value> elems;
      std::vector<Value> acc;
      bindingsVisit(e.binders, 0, e.filter.get(), ctx, env,
                    [&](const Context& c, std::vector<Value>&) {
                      elems.push_back(eval(*e.body, c, env));
                      return true;
                    },
                    acc);
      return Value::set(std::move(elems));
    }
    case EK::Quant: {
      bool result = !e.isExists;
      std::vector<Value> acc;
      bindingsVisit(e.binders, 0, e.filter.get(), ctx, env,
                    [&](const Context& c, std::vector<Value>&) {
                      bool v = truth(*e.body, c, env);
                      if (v == e.isExists) {
                        result = e.isExists;
                        return false;  // witness / counterexample found
                      }
                      return true;
                    },
                    acc);
      return Value::boolean(result);
    }
    case EK::Sum: {
      int64_t total = 0;
      std::vector<Value> acc;
      bindingsVisit(e.binders, 0, e.filter.get(), ctx, env,
                    [&](const Context& c, std::vector<Value>&) {
                      if (__builtin_add_overflow(total, eval(*e.body, c, env).asInt(),
                                                 &total))
                        overflow(e);
                      return true;
                    },
                    acc);
      return Value::integer(total);
    }
    case EK::Choose: {
      std::optional<Value> found;
      std::vector<Value> acc;
      bindingsVisit(e.binders, 0, e.filter.get(), ctx, env,
                    [&](const Context&, std::vector<Value>& witness) {
                      found = chooseValue(e, witness);
                      return false;
                    },
                    acc);
      if (!found)
        throw EvalError(ErrKind::NoChoice, e.span, e.text,
                        "no value satisfies the choice condition");
      return *found;
    }
    case EK::IfE:
      return truth(*e.args[0], ctx, env) ? eval(*e.args[1], ctx, env)
                                         : eval(*e.args[2], ctx, env);
    case EK::LetE: {
      Value v = eval(*e.args[0], ctx, env);
      Context inner = ctx.push().declare(e.name, std::move(v));
      return eval(*e.body, inner, env);
    }
    case EK::Print: {
      Value v = eval(*e.args[0], ctx, env);
      emitPrint(v);
      return v;
    }
    case EK::SetSize:
      return Value::integer(static_cast<int64_t>(eval(*e.args[0], ctx, env).elems().size()));
  }
  throw EvalError(ErrKind::Overflow, e.span, e.text, "unexpected expression");
}

int64_t Evaluator::checkMeasure(const TClause& measure, const Context& ctx,
                                const MeasureEnv& env,
                                std::optional<int64_t> previous) const {
  int64_t m = eval(*measure.expr, ctx, env).asInt();
  if (measureProbe) measureProbe(m);
  if (m < 0)
    throw EvalError(ErrKind::MeasureNegative, measure.span, measure.text,
                    "termination measure is negative: " + std::to_string(m));
  if (previous && m >= *previous)
    throw EvalError(ErrKind::MeasureNotDecreased, measure.span, measure.text,
                    "termination measure is not decreased: " + std::to_string(*previous) +
                        " to " + std::to_string(m));
  return m;
}

void Evaluator::checkInvariants(const TLoopInfo& loop, const Context& ctx,
                                const MeasureEnv& env, uint64_t iteration) const {
  for (const TClause& inv : loop.invariants) {
    if (!truth(*inv.expr, ctx, env))
      throw EvalError(ErrKind::InvariantViolated, inv.span, inv.text,
                      "invariant is violated (iteration " + std::to_string(iteration) + ")");
  }
}

// Push the annotation frame: old_* snapshots, plus forSet for ForIn loops.
Context Evaluator::loopEntry(const TLoopInfo& loop, const Context& ctx) const {
  Context c = ctx.push();
  for (const auto& [var, oldVar] : loop.snapshots) c = c.declare(oldVar, *ctx.lookup(var));
  if (loop.forSetVar) c = c.declare(loop.forSetVar, Value::setSorted({}));
  return c;
}

std::optional<int64_t> Evaluator::loopBoundary(const TLoopInfo& loop, const Context& ctx,
                                               const MeasureEnv& env, uint64_t iteration,
                                               std::optional<int64_t> prev) const {
  checkInvariants(loop, ctx, env, iteration);
  if (loop.measure.expr) return checkMeasure(loop.measure, ctx, env, prev);
  return std::nullopt;
}

Context Evaluator::exec(const TCmd& c, const Context& ctx, const MeasureEnv& env) const {
  switch (c.kind) {
    case CK::VarDecl: {
      Value v = eval(*c.e1, ctx, env);
      if (!valueFits(v, *c.varType))
        throw EvalError(ErrKind::RangeError, c.span, c.text,
                        "value " + formatValue(v) + " is outside type " +
                            typeName(*c.varType));
      return ctx.declare(c.name, std::move(v));
    }
    case CK::Assign: {
      if (c.e1) {
        Value index = eval(*c.e1, ctx, env);
        Value rhs = eval(*c.e2, ctx, env);
        const Value& cur = *ctx.lookup(c.name);
        if (cur.kind() == Value::Kind::Array) {
          int64_t i = index.asInt();
          if (i < 0 || static_cast<uint64_t>(i) >= cur.elems().size())
            throw EvalError(ErrKind::RangeError, c.span, c.text,
                            "index " + std::to_string(i) + " is outside array bounds [0," +
                                std::to_string(cur.elems().size() ? cur.elems().size() - 1 : 0) +
                                "]");
          if (!valueFits(rhs, *c.varType->comps[0]))
            throw EvalError(ErrKind::RangeError, c.span, c.text,
                            "value " + formatValue(rhs) + " is outside type " +
                                typeName(*c.varType->comps[0]));
          std::vector<Value> elems = cur.elems();
          elems[static_cast<size_t>(i)] = std::move(rhs);
          return ctx.assign(c.name, Value::array(std::move(elems)));
        }
        // map update
        if (!valueFits(rhs, *c.varType->comps[1]))
          throw EvalError(ErrKind::RangeError, c.span, c.text,
                          "value " + formatValue(rhs) + " is outside type " +
                              typeName(*c.varType->comps[1]));
        std::vector<Value> elems = cur.elems();
        bool found = false;
        for (size_t i = 0; i + 1 < elems.size(); i += 2) {
          if (valueEquals(elems[i], index)) {
            elems[i + 1] = std::move(rhs);
            found = true;
            break;
          }
        }
        if (!found)
          throw EvalError(ErrKind::RangeError, c.span, c.text,
                          "key " + formatValue(index) + " is not in the map domain");
        return ctx.assign(c.name, Value::map(std::move(elems)));
      }
      Value rhs = eval(*c.e2, ctx, env);
      if (!valueFits(rhs, *c.varType))
        throw EvalError(ErrKind::RangeError, c.span, c.text,
                        "value " + formatValue(rhs) + " is outside type " +
                            typeName(*c.varType));
      return ctx.assign(c.name, std::move(rhs));
    }
    case CK::Block: {
      Context inner = ctx.push();
      for (const auto& sub : c.cmds) inner = exec(*sub, inner, env);
      return inner.pop();
    }
    case CK::If: {
      if (truth(*c.e1, ctx, env)) return exec(*c.c1, ctx.push(), env).pop();
      if (c.c2) return exec(*c.c2, ctx.push(), env).pop();
      return ctx;
    }
    case CK::While: {
      Context body = loopEntry(c.loop, ctx);
      if (!truth(*c.e1, body, env)) return body.pop();
      std::optional<int64_t> prev = loopBoundary(c.loop, body, env, 0, std::nullopt);
      for (uint64_t iter = 1;; ++iter) {
        body = exec(*c.c1, body.push(), env).pop();
        prev = loopBoundary(c.loop, body, env, iter, prev);
        if (!truth(*c.e1, body, env)) return body.pop();
      }
    }
    case CK::ForCount: {
      Value init = eval(*c.e1, ctx, env);
      if (!valueFits(init, *c.varType))
        throw EvalError(ErrKind::RangeError, c.span, c.text,
                        "value " + formatValue(init) + " is outside type " +
                            typeName(*c.varType));
      Context body = ctx.push().declare(c.name, std::move(init));
      body = loopEntry(c.loop, body);
      if (!truth(*c.e2, body, env)) return body.pop().pop();
      std::optional<int64_t> prev = loopBoundary(c.loop, body, env, 0, std::nullopt);
      for (uint64_t iter = 1;; ++iter) {
        body = exec(*c.c1, body.push(), env).pop();
        body = exec(*c.update, body, env);
        prev = loopBoundary(c.loop, body, env, iter, prev);
        if (!truth(*c.e2, body, env)) return body.pop().pop();
      }
    }
    case CK::ForIn: {
      Value dom = eval(*c.e1, ctx, env);
      Context body = loopEntry(c.loop, ctx);
      const std::vector<Value> elems = dom.elems();  // snapshot, canonical order
      if (elems.empty()) return body.pop();
      std::optional<int64_t> prev = loopBoundary(c.loop, body, env, 0, std::nullopt);
      uint64_t iter = 0;
      for (const Value& x : elems) {
        body = exec(*c.c1, body.push().declare(c.name, x), env).pop();
        if (c.loop.forSetVar) {
          Value fs = setUnion(*body.lookup(c.loop.forSetVar), Value::setSorted({x}));
          body = body.assign(c.loop.forSetVar, std::move(fs));
        }
        prev = loopBoundary(c.loop, body, env, ++iter, prev);
      }
      return body.pop();
    }
    case CK::ChooseCmd: {
      std::optional<std::vector<Value>> witness;
      std::vector<Value> acc;
      bindingsVisit(c.binders, 0, c.filter.get(), ctx, env,
                    [&](const Context&, std::vector<Value>& w) {
                      witness = w;
                      return false;
                    },
                    acc);
      if (!witness)
        throw EvalError(ErrKind::NoChoice, c.span, c.text,
                        "no value satisfies the choice condition");
      Context out = ctx;
      for (size_t i = 0; i < c.binders.size(); ++i)
        out = out.declare(c.binders[i].name, (*witness)[i]);
      return out;
    }
    case CK::ChooseThenElse: {
      std::optional<std::vector<Value>> witness;
      std::vector<Value> acc;
      bindingsVisit(c.binders, 0, c.filter.get(), ctx, env,
                    [&](const Context&, std::vector<Value>& w) {
                      witness = w;
                      return false;
                    },
                    acc);
      if (!witness) return exec(*c.c2, ctx.push(), env).pop();
      Context inner = ctx.push();
      for (size_t i = 0; i < c.binders.size(); ++i)
        inner = inner.declare(c.binders[i].name, (*witness)[i]);
      return exec(*c.c1, inner, env).pop();
    }
    case CK::ChooseDo: {
      Context body = loopEntry(c.loop, ctx);
      auto firstWitness = [&](const Context& cur) {
        std::optional<std::vector<Value>> witness;
        std::vector<Value> acc;
        bindingsVisit(c.binders, 0, c.filter.get(), cur, env,
                      [&](const Context&, std::vector<Value>& w) {
                        witness = w;
                        return false;
                      },
                      acc);
        return witness;
      };
      std::optional<std::vector<Value>> witness = firstWitness(body);
      if (!witness) return body.pop();
      std::optional<int64_t> prev = loopBoundary(c.loop, body, env, 0, std::nullopt);
      for (uint64_t iter = 1;; ++iter) {
        Context inner = body.push();
        for (size_t i = 0; i < c.binders.size(); ++i)
          inner = inner.declare(c.binders[i].name, (*witness)[i]);
        body = exec(*c.c1, inner, env).pop();
        prev = loopBoundary(c.loop, body, env, iter, prev);
        witness = firstWitness(body);
        if (!witness) return body.pop();
      }
    }
    case CK::Assert: {
      if (!truth(*c.e1, ctx, env))
        throw EvalError(ErrKind::AssertionFailed, c.span, c.text, "assertion is violated");
      return ctx;
    }
  }
  throw EvalError(ErrKind::Overflow, c.span, c.text, "unexpected command");
}

// ------------------------------------------------------------- invocation

Context Evaluator::bindParams(const TDecl& op, const std::vector<Value>& args,
                              const SourceSpan& callSpan) const {
  Context ctx = Context().push();
  for (size_t i = 0; i < op.params.size(); ++i) {
    if (!valueFits(args[i], *op.params[i].type))
      throw EvalError(ErrKind::RangeError, callSpan, op.name + "(" + argsText(args) + ")",
                      "argument " + formatValue(args[i]) + " is outside type " +
                          typeName(*op.params[i].type));
    ctx = ctx.declare(op.params[i].sym, args[i]);
  }
  return ctx;
}

Evaluator::MeasureEnv Evaluator::enterOperation(const TDecl& op, const Context& paramCtx,
                                                const MeasureEnv& env,
                                                const SourceSpan& callSpan) const {
  if (!op.decreasesC.expr) return env;
  int64_t m = eval(*op.decreasesC.expr, paramCtx, env).asInt();
  if (measureProbe) measureProbe(m);
  if (m < 0)
    throw EvalError(ErrKind::MeasureNegative, op.decreasesC.span, op.decreasesC.text,
                    "termination measure is negative: " + std::to_string(m));
  for (const MeasureLink* l = env.get(); l; l = l->next.get()) {
    if (l->op == &op) {
      if (m >= l->value)
        throw EvalError(ErrKind::MeasureNotDecreased, op.decreasesC.span, op.decreasesC.text,
                        "termination measure is not decreased: " + std::to_string(l->value) +
                            " to " + std::to_string(m));
      break;
    }
  }
  auto link = std::make_shared<MeasureLink>();
  link->op = &op;
  link->value = m;
  link->next = env;
  return link;
}

void Evaluator::checkEnsures(const TDecl& op, const Context& paramCtx, const Value& result,
                             const MeasureEnv& env) const {
  if (!op.ensuresC.expr) return;
  Context ctx = paramCtx.push().declare(intern("result"), result);
  if (!truth(*op.ensuresC.expr, ctx, env))
    throw EvalError(ErrKind::PostconditionViolated, op.ensuresC.span, op.ensuresC.text,
                    "postcondition is violated by result " + formatValue(result));
}

Value Evaluator::checkResult(const TDecl& op, const Value& result) const {
  if ((op.kind == ast::Decl::Kind::Fun || op.kind == ast::Decl::Kind::Proc) &&
      !valueFits(result, *op.resultType))
    throw EvalError(ErrKind::RangeError, op.span, op.name,
                    "result " + formatValue(result) + " is outside type " +
                        typeName(*op.resultType));
  return result;
}

Value Evaluator::invoke(const TDecl& op, std::vector<Value> args, const MeasureEnv& env,
                        const SourceSpan& callSpan) const {
  Context ctx = bindParams(op, args, callSpan);
  if (op.requiresC.expr && !truth(*op.requiresC.expr, ctx, env))
    throw EvalError(ErrKind::PreconditionViolated, op.requiresC.span, op.requiresC.text,
                    "precondition of " + op.name + " is violated by arguments (" +
                        argsText(args) + ")");
  MeasureEnv inner = enterOperation(op, ctx, env, callSpan);
  Value result = [&] {
    if (op.kind == ast::Decl::Kind::Proc) {
      Context c = ctx.push();
      for (const auto& cmd : op.cmds) c = exec(*cmd, c, inner);
      return eval(*op.returnExpr, c, inner);
    }
    return eval(*op.body, ctx, inner);
  }();
  checkResult(op, result);
  checkEnsures(op, ctx, result, inner);
  return result;
}

// --------------------------------------------------- nondeterministic path

Seq<Value> Evaluator::evalSeq(const TExpr& e, const Context& ctx,
                              const MeasureEnv& env) const {
  if (!e.branches) {
    // no choice point inside: the value is unique
    return Seq<Value>::lazy([this, &e, ctx, env] {
      return Seq<Value>::single(eval(e, ctx, env));
    });
  }
  switch (e.kind) {
    case EK::Unary:
      return mapSeq(evalSeq(*e.args[0], ctx, env), [this, &e](const Value& a) {
        if (e.un == UnOp::Not) return Value::boolean(!a.asBool());
        int64_t r;
        if (__builtin_sub_overflow(int64_t{0}, a.asInt(), &r)) overflow(e);
        return Value::integer(r);
      });
    case EK::Binary: {
      if (e.bin == BinOp::And || e.bin == BinOp::Or || e.bin == BinOp::Implies) {
        return flatMapSeq(evalSeq(*e.args[0], ctx, env), [this, &e, ctx,
                                                          env](const Value& a) {
          bool stop = e.bin == BinOp::And ? !a.asBool()
                      : e.bin == BinOp::Or ? a.asBool()
                                           : !a.asBool();
          if (stop)
            return Seq<Value>::single(Value::boolean(e.bin != BinOp::And));
          return mapSeq(evalSeq(*e.args[1], ctx, env),
                        [](const Value& b) { return Value::boolean(b.asBool()); });
        });
      }
      return flatMapSeq(evalSeq(*e.args[0], ctx, env), [this, &e, ctx,
                                                        env](const Value& a) {
        return mapSeq(evalSeq(*e.args[1], ctx, env),
                      [this, &e, a](const Value& b) { return evalBinary(e, a, b); });
      });
    }
    case EK::Call:
      // nondeterministic arguments branch before the call itself
      return evalCallRest(e, 0, {}, ctx, env);
    case EK::TupleE:
      return evalListRest(e, 0, {}, ctx, env);
    case EK::Proj:
      return mapSeq(evalSeq(*e.args[0], ctx, env),
                    [&e](const Value& v) { return v.elems()[e.projIndex]; });
    case EK::Index:
      return flatMapSeq(evalSeq(*e.args[0], ctx, env), [this, &e, ctx,
                                                        env](const Value& base) {
        return mapSeq(evalSeq(*e.args[1], ctx, env), [this, &e, base](const Value& i) {
          return applyIndex(e, base, i);
        });
      });
    case EK::ArrayCtor:
      return mapSeq(evalSeq(*e.args[0], ctx, env), [this, &e](const Value& init) {
        if (!valueFits(init, *e.type->comps[0]))
          throw EvalError(ErrKind::RangeError, e.span, e.text,
                          "value " + formatValue(init) + " is outside type " +
                              typeName(*e.type->comps[0]));
        return Value::array(std::vector<Value>(static_cast<size_t>(e.intValue), init));
      });
    case EK::SetLit:
      return evalListRest(e, 0, {}, ctx, env);
    case EK::SetRange:
      return flatMapSeq(evalSeq(*e.args[0], ctx, env), [this, &e, ctx,
                                                        env](const Value& lo) {
        return mapSeq(evalSeq(*e.args[1], ctx, env), [this, &e, lo](const Value& hi) {
          std::vector<Value> elems;
          for (int64_t v = lo.asInt(); v <= hi.asInt(); ++v)
            elems.push_back(Value::integer(v));
          return Value::setSorted(std::move(elems));
        });
      });
    case EK::Choose: {
      auto binders = std::make_shared<const std::vector<TBinder>>(e.binders);
      return mapSeq(bindingsSeq(binders, 0, e.filter.get(), ctx, env, {}),
                    [this, &e](const std::vector<Value>& w) {
                      return chooseValue(e, std::vector<Value>(w));
                    });
    }
    case EK::IfE:
      return flatMapSeq(evalSeq(*e.args[0], ctx, env), [this, &e, ctx,
                                                        env](const Value& c) {
        return evalSeq(c.asBool() ? *e.args[1] : *e.args[2], ctx, env);
      });
    case EK::LetE:
      return flatMapSeq(evalSeq(*e.args[0], ctx, env), [this, &e, ctx,
                                                        env](const Value& v) {
        return evalSeq(*e.body, ctx.push().declare(e.name, v), env);
      });
    case EK::Print:
      return mapSeq(evalSeq(*e.args[0], ctx, env), [this](const Value& v) {
        emitPrint(v);
        return v;
      });
    case EK::SetSize:
      return mapSeq(evalSeq(*e.args[0], ctx, env), [](const Value& v) {
        return Value::integer(static_cast<int64_t>(v.elems().size()));
      });
    default:
      // quantified forms evaluate deterministically (choice-free fold)
      return Seq<Value>::lazy([this, &e, ctx, env] {
        return Seq<Value>::single(eval(e, ctx, env));
      });
  }
}

Seq<Value> Evaluator::evalCallRest(const TExpr& call, size_t i, std::vector<Value> acc,
                                   const Context& ctx, const MeasureEnv& env) const {
  if (i == call.args.size()) return invokeSeq(*call.callee, std::move(acc), env, call.span);
  return flatMapSeq(evalSeq(*call.args[i], ctx, env),
                    [this, &call, i, acc, ctx, env](const Value& v) {
                      std::vector<Value> acc2 = acc;
                      acc2.push_back(v);
                      return evalCallRest(call, i + 1, std::move(acc2), ctx, env);
                    });
}

Seq<Value> Evaluator::evalListRest(const TExpr& e, size_t i, std::vector<Value> acc,
                                   const Context& ctx, const MeasureEnv& env) const {
  if (i == e.args.size()) {
    Value v = e.kind == EK::TupleE ? Value::tuple(std::move(acc)) : Value::set(std::move(acc));
    return Seq<Value>::single(std::move(v));
  }
  return flatMapSeq(evalSeq(*e.args[i], ctx, env),
                    [this, &e, i, acc, ctx, env](const Value& v) {
                      std::vector<Value> acc2 = acc;
                      acc2.push_back(v);
                      return evalListRest(e, i + 1, std::move(acc2), ctx, env);
                    });
}

Seq<Context> Evaluator::execSeq(const TCmd& c, const Context& ctx,
                                const MeasureEnv& env) const {
  if (!c.branches) {
    return Seq<Context>::lazy([this, &c, ctx, env] {
      return Seq<Context>::single(exec(c, ctx, env));
    });
  }
  switch (c.kind) {
    case CK::VarDecl:
      return mapSeq(evalSeq(*c.e1, ctx, env), [this, &c, ctx](const Value& v) {
        if (!valueFits(v, *c.varType))
          throw EvalError(ErrKind::RangeError, c.span, c.text,
                          "value " + formatValue(v) + " is outside type " +
                              typeName(*c.varType));
        return ctx.declare(c.name, v);
      });
    case CK::Assign: {
      if (c.e1) {
        return flatMapSeq(evalSeq(*c.e1, ctx, env), [this, &c, ctx,
                                                     env](const Value& index) {
          return mapSeq(evalSeq(*c.e2, ctx, env), [this, &c, ctx, index](const Value& rhs) {
            // reuse the deterministic element-update logic
            return execIndexedAssign(c, ctx, index, rhs);
          });
        });
      }
      return mapSeq(evalSeq(*c.e2, ctx, env), [this, &c, ctx](const Value& rhs) {
        if (!valueFits(rhs, *c.varType))
          throw EvalError(ErrKind::RangeError, c.span, c.text,
                          "value " + formatValue(rhs) + " is outside type " +
                              typeName(*c.varType));
        return ctx.assign(c.name, rhs);
      });
    }
    case CK::Block:
      return mapSeq(execBlockSeq(c, 0, ctx.push(), env),
                    [](const Context& inner) { return inner.pop(); });
    case CK::If:
      return flatMapSeq(evalSeq(*c.e1, ctx, env), [this, &c, ctx,
                                                   env](const Value& b) {
        if (b.asBool())
          return mapSeq(execSeq(*c.c1, ctx.push(), env),
                        [](const Context& x) { return x.pop(); });
        if (c.c2)
          return mapSeq(execSeq(*c.c2, ctx.push(), env),
                        [](const Context& x) { return x.pop(); });
        return Seq<Context>::single(ctx);
      });
    case CK::While:
      return whileSeq(c, loopEntry(c.loop, ctx), std::nullopt, 0, env);
    case CK::ForCount:
      return flatMapSeq(evalSeq(*c.e1, ctx, env), [this, &c, ctx,
                                                   env](const Value& init) {
        if (!valueFits(init, *c.varType))
          throw EvalError(ErrKind::RangeError, c.span, c.text,
                          "value " + formatValue(init) + " is outside type " +
                              typeName(*c.varType));
        Context body = loopEntry(c.loop, ctx.push().declare(c.name, init));
        return forCountSeq(c, body, std::nullopt, 0, env);
      });
    case CK::ForIn:
      return flatMapSeq(evalSeq(*c.e1, ctx, env), [this, &c, ctx,
                                                   env](const Value& dom) {
        auto remaining = std::make_shared<const std::vector<Value>>(dom.elems());
        return forInSeq(c, loopEntry(c.loop, ctx), remaining, std::nullopt, 0, env);
      });
    case CK::ChooseCmd: {
      auto binders = std::make_shared<const std::vector<TBinder>>(c.binders);
      Seq<std::vector<Value>> ws = bindingsSeq(binders, 0, c.filter.get(), ctx, env, {});
      return Seq<Context>::lazy([this, &c, ctx, ws] {
        if (!ws.force())
          throw EvalError(ErrKind::NoChoice, c.span, c.text,
                          "no value satisfies the choice condition");
        return mapSeq(ws, [&c, ctx](const std::vector<Value>& w) {
          Context out = ctx;
          for (size_t i = 0; i < c.binders.size(); ++i)
            out = out.declare(c.binders[i].name, w[i]);
          return out;
        });
      });
    }
    case CK::ChooseThenElse: {
      auto binders = std::make_shared<const std::vector<TBinder>>(c.binders);
      Seq<std::vector<Value>> ws = bindingsSeq(binders, 0, c.filter.get(), ctx, env, {});
      return Seq<Context>::lazy([this, &c, ctx, env, ws]() -> Seq<Context> {
        if (!ws.force())
          return mapSeq(execSeq(*c.c2, ctx.push(), env),
                        [](const Context& x) { return x.pop(); });
        return flatMapSeq(ws, [this, &c, ctx, env](const std::vector<Value>& w) {
          Context inner = ctx.push();
          for (size_t i = 0; i < c.binders.size(); ++i)
            inner = inner.declare(c.binders[i].name, w[i]);
          return mapSeq(execSeq(*c.c1, inner, env),
                        [](const Context& x) { return x.pop(); });
        });
      });
    }
    case CK::ChooseDo:
      return chooseDoSeq(c, loopEntry(c.loop, ctx), std::nullopt, 0, env);
    case CK::Assert:
      return Seq<Context>::lazy([this, &c, ctx, env] {
        if (!truth(*c.e1, ctx, env))
          throw EvalError(ErrKind::AssertionFailed, c.span, c.text, "assertion is violated");
        return Seq<Context>::single(ctx);
      });
  }
  throw EvalError(ErrKind::Overflow, c.span, c.text, "unexpected command");
}

Context Evaluator::execIndexedAssign(const TCmd& c, const Context& ctx, const Value& index,
                                     const Value& rhs) const {
  const Value& cur = *ctx.lookup(c.name);
  if (cur.kind() == Value::Kind::Array) {
    int64_t i = index.asInt();
    if (i < 0 || static_cast<uint64_t>(i) >= cur.elems().size())
      throw EvalError(ErrKind::RangeError, c.span, c.text,
                      "index " + std::to_string(i) + " is outside array bounds [0," +
                          std::to_string(cur.elems().size() ? cur.elems().size() - 1 : 0) +
                          "]");
    if (!valueFits(rhs, *c.varType->comps[0]))
      throw EvalError(ErrKind::RangeError, c.span, c.text,
                      "value " + formatValue(rhs) + " is outside type " +
                          typeName(*c.varType->comps[0]));
    std::vector<Value> elems = cur.elems();
    elems[static_cast<size_t>(i)] = rhs;
    return ctx.assign(c.name, Value::array(std::move(elems)));
  }
  if (!valueFits(rhs, *c.varType->comps[1]))
    throw EvalError(ErrKind::RangeError, c.span, c.text,
                    "value " + formatValue(rhs) + " is outside type " +
                        typeName(*c.varType->comps[1]));
  std::vector<Value> elems = cur.elems();
  for (size_t i = 0; i + 1 < elems.size(); i += 2) {
    if (valueEquals(elems[i], index)) {
      elems[i + 1] = rhs;
      return ctx.assign(c.name, Value::map(std::move(elems)));
    }
  }
  throw EvalError(ErrKind::RangeError, c.span, c.text,
                  "key " + formatValue(index) + " is not in the map domain");
}

Seq<Context> Evaluator::execBlockSeq(const TCmd& block, size_t i, const Context& ctx,
                                     const MeasureEnv& env) const {
  if (i == block.cmds.size()) return Seq<Context>::single(ctx);
  return flatMapSeq(execSeq(*block.cmds[i], ctx, env),
                    [this, &block, i, env](const Context& next) {
                      return execBlockSeq(block, i + 1, next, env);
                    });
}

Seq<Context> Evaluator::whileSeq(const TCmd& c, Context ctx, std::optional<int64_t> prev,
                                 uint64_t iter, const MeasureEnv& env) const {
  return flatMapSeq(evalSeq(*c.e1, ctx, env), [this, &c, ctx, prev, iter,
                                               env](const Value& b) -> Seq<Context> {
    if (!b.asBool()) return Seq<Context>::single(ctx.pop());
    std::optional<int64_t> m =
        iter == 0 ? loopBoundary(c.loop, ctx, env, 0, std::nullopt) : prev;
    return flatMapSeq(execSeq(*c.c1, ctx.push(), env),
                      [this, &c, m, iter, env](const Context& afterBody) {
                        Context next = afterBody.pop();
                        std::optional<int64_t> m2 =
                            loopBoundary(c.loop, next, env, iter + 1, m);
                        return whileSeq(c, next, m2, iter + 1, env);
                      });
  });
}

Seq<Context> Evaluator::forCountSeq(const TCmd& c, Context ctx, std::optional<int64_t> prev,
                                    uint64_t iter, const MeasureEnv& env) const {
  return flatMapSeq(evalSeq(*c.e2, ctx, env), [this, &c, ctx, prev, iter,
                                               env](const Value& b) -> Seq<Context> {
    if (!b.asBool()) return Seq<Context>::single(ctx.pop().pop());
    std::optional<int64_t> m =
        iter == 0 ? loopBoundary(c.loop, ctx, env, 0, std::nullopt) : prev;
    return flatMapSeq(
        execSeq(*c.c1, ctx.push(), env), [this, &c, m, iter, env](const Context& afterBody) {
          return flatMapSeq(execSeq(*c.update, afterBody.pop(), env),
                            [this, &c, m, iter, env](const Context& next) {
                              std::optional<int64_t> m2 =
                                  loopBoundary(c.loop, next, env, iter + 1, m);
                              return forCountSeq(c, next, m2, iter + 1, env);
                            });
        });
  });
}

Seq<Context> Evaluator::forInSeq(const TCmd& c, Context ctx,
                                 std::shared_ptr<const std::vector<Value>> remaining,
                                 std::optional<int64_t> prev, uint64_t iter,
                                 const MeasureEnv& env) const {
  if (remaining->empty()) return Seq<Context>::single(ctx.pop());
  std::optional<int64_t> m =
      iter == 0 ? loopBoundary(c.loop, ctx, env, 0, std::nullopt) : prev;
  // each remaining element may come next: one branch per pick
  Seq<Context> all;
  std::vector<Seq<Context>> branches;
  for (size_t pick = 0; pick < remaining->size(); ++pick) {
    branches.push_back(Seq<Context>::lazy([this, &c, ctx, remaining, m, iter, env, pick] {
      const Value& x = (*remaining)[pick];
      return flatMapSeq(
          execSeq(*c.c1, ctx.push().declare(c.name, x), env),
          [this, &c, remaining, m, iter, env, pick, x](const Context& afterBody) {
            Context next = afterBody.pop();
            if (c.loop.forSetVar) {
              Value fs = setUnion(*next.lookup(c.loop.forSetVar), Value::setSorted({x}));
              next = next.assign(c.loop.forSetVar, std::move(fs));
            }
            std::optional<int64_t> m2 = loopBoundary(c.loop, next, env, iter + 1, m);
            auto rest = std::make_shared<std::vector<Value>>();
            rest->reserve(remaining->size() - 1);
            for (size_t j = 0; j < remaining->size(); ++j)
              if (j != pick) rest->push_back((*remaining)[j]);
            return forInSeq(c, next, std::move(rest), m2, iter + 1, env);
          });
    }));
  }
  all = Seq<Context>::empty();
  for (auto it = branches.rbegin(); it != branches.rend(); ++it)
    all = Seq<Context>::append(*it, all);
  return all;
}

Seq<Context> Evaluator::chooseDoSeq(const TCmd& c, Context ctx, std::optional<int64_t> prev,
                                    uint64_t iter, const MeasureEnv& env) const {
  auto binders = std::make_shared<const std::vector<TBinder>>(c.binders);
  Seq<std::vector<Value>> ws = bindingsSeq(binders, 0, c.filter.get(), ctx, env, {});
  return Seq<Context>::lazy([this, &c, ctx, prev, iter, env, ws]() -> Seq<Context> {
    if (!ws.force()) return Seq<Context>::single(ctx.pop());
    std::optional<int64_t> m =
        iter == 0 ? loopBoundary(c.loop, ctx, env, 0, std::nullopt) : prev;
    return flatMapSeq(ws, [this, &c, ctx, m, iter, env](const std::vector<Value>& w) {
      Context inner = ctx.push();
      for (size_t i = 0; i < c.binders.size(); ++i)
        inner = inner.declare(c.binders[i].name, w[i]);
      return flatMapSeq(execSeq(*c.c1, inner, env),
                        [this, &c, m, iter, env](const Context& afterBody) {
                          Context next = afterBody.pop();
                          std::optional<int64_t> m2 =
                              loopBoundary(c.loop, next, env, iter + 1, m);
                          return chooseDoSeq(c, next, m2, iter + 1, env);
                        });
    });
  });
}

Seq<Value> Evaluator::invokeSeq(const TDecl& op, std::vector<Value> args,
                                const MeasureEnv& env, const SourceSpan& callSpan) const {
  if (!op.branches)
    return Seq<Value>::single(invoke(op, std::move(args), env, callSpan));
  Context ctx = bindParams(op, args, callSpan);
  if (op.requiresC.expr && !truth(*op.requiresC.expr, ctx, env))
    throw EvalError(ErrKind::PreconditionViolated, op.requiresC.span, op.requiresC.text,
                    "precondition of " + op.name + " is violated by arguments (" +
                        argsText(args) + ")");
  MeasureEnv inner = enterOperation(op, ctx, env, callSpan);
  Seq<Value> results;
  if (op.kind == ast::Decl::Kind::Proc) {
    Seq<Context> finals = Seq<Context>::single(ctx.push());
    for (const auto& cmd : op.cmds) {
      Seq<Context> prev = finals;
      const TCmd* cp = cmd.get();
      finals = flatMapSeq(prev, [this, cp, inner](const Context& c) {
        return execSeq(*cp, c, inner);
      });
    }
    results = flatMapSeq(finals, [this, &op, inner](const Context& c) {
      return evalSeq(*op.returnExpr, c, inner);
    });
  } else {
    results = evalSeq(*op.body, ctx, inner);
  }
  return mapSeq(results, [this, &op, ctx, inner](const Value& v) {
    checkResult(op, v);
    checkEnsures(op, ctx, v, inner);
    return v;
  });
}

// ----------------------------------------------------------- public surface

Seq<Value> Evaluator::evalExpr(const TExpr& e, const Context& ctx) const {
  if (mode_ == EvalMode::Deterministic) {
    const TExpr* ep = &e;
    return Seq<Value>::lazy([this, ep, ctx] {
      return Seq<Value>::single(eval(*ep, ctx, nullptr));
    });
  }
  return evalSeq(e, ctx, nullptr);
}

Seq<Context> Evaluator::execCommand(const TCmd& c, const Context& ctx) const {
  if (mode_ == EvalMode::Deterministic) {
    const TCmd* cp = &c;
    return Seq<Context>::lazy([this, cp, ctx] {
      return Seq<Context>::single(exec(*cp, ctx, nullptr));
    });
  }
  return execSeq(c, ctx, nullptr);
}

Value Evaluator::evalDet(const TExpr& e, const Context& ctx) const {
  return eval(e, ctx, nullptr);
}

Evaluator::Invocation Evaluator::invokeOperation(const TDecl& op,
                                                 const std::vector<Value>& args) const {
  Invocation inv;
  Context ctx = bindParams(op, args, op.span);
  if (op.requiresC.expr && !truth(*op.requiresC.expr, ctx, nullptr)) {
    inv.admissible = false;
    return inv;
  }
  bool isTheorem = op.kind == ast::Decl::Kind::Theorem;
  auto checkTheorem = [this, &op, args](const Value& v) {
    if (!v.asBool())
      throw EvalError(ErrKind::TheoremViolated, op.span, op.declText,
                      "theorem is violated by arguments (" + argsText(args) + ")");
    return v;
  };
  if (mode_ == EvalMode::Deterministic) {
    std::vector<Value> argsCopy = args;
    inv.results = Seq<Value>::lazy([this, &op, argsCopy, isTheorem, checkTheorem] {
      Value v = invokeNoRequires(op, argsCopy);
      if (isTheorem) checkTheorem(v);
      return Seq<Value>::single(std::move(v));
    });
    return inv;
  }
  Seq<Value> results = invokeSeqNoRequires(op, args);
  inv.results = isTheorem ? mapSeq(results, checkTheorem) : results;
  return inv;
}

Value Evaluator::invokeNoRequires(const TDecl& op, const std::vector<Value>& args) const {
  Context ctx = bindParams(op, args, op.span);
  MeasureEnv inner = enterOperation(op, ctx, nullptr, op.span);
  Value result = [&] {
    if (op.kind == ast::Decl::Kind::Proc) {
      Context c = ctx.push();
      for (const auto& cmd : op.cmds) c = exec(*cmd, c, inner);
      return eval(*op.returnExpr, c, inner);
    }
    return eval(*op.body, ctx, inner);
  }();
  checkResult(op, result);
  checkEnsures(op, ctx, result, inner);
  return result;
}

Seq<Value> Evaluator::invokeSeqNoRequires(const TDecl& op,
                                          const std::vector<Value>& args) const {
  if (!op.branches) {
    std::vector<Value> argsCopy = args;
    return Seq<Value>::lazy([this, &op, argsCopy] {
      return Seq<Value>::single(invokeNoRequires(op, argsCopy));
    });
  }
  Context ctx = bindParams(op, args, op.span);
  MeasureEnv inner = enterOperation(op, ctx, nullptr, op.span);
  Seq<Value> results;
  if (op.kind == ast::Decl::Kind::Proc) {
    Seq<Context> finals = Seq<Context>::single(ctx.push());
    for (const auto& cmd : op.cmds) {
      Seq<Context> prev = finals;
      const TCmd* cp = cmd.get();
      finals = flatMapSeq(prev, [this, cp, inner](const Context& c) {
        return execSeq(*cp, c, inner);
      });
    }
    results = flatMapSeq(finals, [this, &op, inner](const Context& c) {
      return evalSeq(*op.returnExpr, c, inner);
    });
  } else {
    results = evalSeq(*op.body, ctx, inner);
  }
  return mapSeq(results, [this, &op, ctx, inner](const Value& v) {
    checkResult(op, v);
    checkEnsures(op, ctx, v, inner);
    return v;
  });
}

}  // namespace fspec
