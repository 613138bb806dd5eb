#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fspec/lazyseq.hpp"
#include "fspec/typed.hpp"

namespace fspec {

enum class EvalMode : uint8_t { Deterministic, Nondeterministic };

enum class ErrKind : uint8_t {
  PreconditionViolated,
  PostconditionViolated,
  InvariantViolated,
  MeasureNegative,
  MeasureNotDecreased,
  AssertionFailed,
  NoChoice,
  RangeError,
  DivisionByZero,
  Overflow,
  TheoremViolated,
};

/// A runtime check failed. Carries the violated annotation's rendered text
/// and source span plus a one-line reason for the error transcript.
class EvalError : public std::exception {
 public:
  EvalError(ErrKind kind, SourceSpan span, std::string annotation, std::string reason)
      : kind_(kind),
        span_(std::move(span)),
        annotation_(std::move(annotation)),
        reason_(std::move(reason)),
        what_(annotation_ + " @ " + span_.str() + ": " + reason_) {}

  ErrKind kind() const { return kind_; }
  const SourceSpan& span() const { return span_; }
  const std::string& annotation() const { return annotation_; }
  const std::string& reason() const { return reason_; }
  const char* what() const noexcept override { return what_.c_str(); }

 private:
  ErrKind kind_;
  SourceSpan span_;
  std::string annotation_;
  std::string reason_;
  std::string what_;
};

/// Immutable chain of frames. Extension and assignment produce new contexts
/// by path copying; existing frames are never mutated, which keeps captured
/// contexts in lazy branches stable.
class Context {
 public:
  Context() = default;

  Context push() const {
    auto f = std::make_shared<Frame>();
    f->parent = top_;
    return Context(std::move(f));
  }

  Context pop() const { return Context(top_->parent); }

  Context declare(Symbol name, Value v) const {
    auto f = std::make_shared<Frame>(*top_);
    f->vars.emplace_back(name, std::move(v));
    return Context(std::move(f));
  }

  /// Replaces the innermost binding of `name`; the caller guarantees it
  /// exists (the typechecker resolved it).
  Context assign(Symbol name, Value v) const { return Context(assignFrame(top_, name, v)); }

  const Value* lookup(Symbol name) const {
    for (const Frame* f = top_.get(); f; f = f->parent.get()) {
      for (auto it = f->vars.rbegin(); it != f->vars.rend(); ++it)
        if (it->first == name) return &it->second;
    }
    return nullptr;
  }

 private:
  struct Frame {
    std::vector<std::pair<Symbol, Value>> vars;
    std::shared_ptr<const Frame> parent;
  };
  using FrameP = std::shared_ptr<const Frame>;

  explicit Context(FrameP f) : top_(std::move(f)) {}

  static FrameP assignFrame(const FrameP& frame, Symbol name, const Value& v) {
    auto f = std::make_shared<Frame>(*frame);
    for (auto it = f->vars.rbegin(); it != f->vars.rend(); ++it) {
      if (it->first == name) {
        it->second = v;
        return f;
      }
    }
    f->parent = assignFrame(frame->parent, name, v);
    return f;
  }

  FrameP top_;
};

using PrintSink = std::function<void(const std::string&)>;

/// Dual-mode evaluator. Deterministic entry points return the single value
/// a choice-free reading produces (choices take the canonically first
/// witness); sequence entry points enumerate every value reachable through
/// nondeterministic choices, depth-first, most recent choice backtracked
/// first. Contracts, invariants, measures and assertions are checked as
/// evaluation proceeds; violations throw EvalError.
class Evaluator {
 public:
  Evaluator(const TypedSpec& spec, EvalMode mode, PrintSink sink = nullptr)
      : spec_(spec), mode_(mode), sink_(std::move(sink)) {}

  EvalMode mode() const { return mode_; }

  /// In deterministic mode the sequence has exactly one element, equal to
  /// the first element of the nondeterministic sequence.
  Seq<Value> evalExpr(const TExpr& e, const Context& ctx) const;
  Seq<Context> execCommand(const TCmd& c, const Context& ctx) const;

  struct Invocation {
    bool admissible = true;
    Seq<Value> results;
  };

  /// Evaluates requires (inadmissible when false at this, the top level),
  /// runs the body, and checks ensures / theorem truth / measures against
  /// every produced result.
  Invocation invokeOperation(const TDecl& op, const std::vector<Value>& args) const;

  /// Deterministic evaluation regardless of mode; used by annotations,
  /// defined constants, and test oracles.
  Value evalDet(const TExpr& e, const Context& ctx) const;

  /// Test instrumentation: observes every termination-measure evaluation.
  std::function<void(int64_t)> measureProbe;

 private:
  struct MeasureLink {
    const TDecl* op;
    int64_t value;
    std::shared_ptr<const MeasureLink> next;
  };
  using MeasureEnv = std::shared_ptr<const MeasureLink>;

  // deterministic walkers
  Value eval(const TExpr& e, const Context& ctx, const MeasureEnv& env) const;
  Context exec(const TCmd& c, const Context& ctx, const MeasureEnv& env) const;
  Value invoke(const TDecl& op, std::vector<Value> args, const MeasureEnv& env,
               const SourceSpan& callSpan) const;

  // nondeterministic walkers
  Seq<Value> evalSeq(const TExpr& e, const Context& ctx, const MeasureEnv& env) const;
  Seq<Context> execSeq(const TCmd& c, const Context& ctx, const MeasureEnv& env) const;
  Seq<Value> invokeSeq(const TDecl& op, std::vector<Value> args, const MeasureEnv& env,
                       const SourceSpan& callSpan) const;

  // shared pieces
  Value invokeNoRequires(const TDecl& op, const std::vector<Value>& args) const;
  Seq<Value> invokeSeqNoRequires(const TDecl& op, const std::vector<Value>& args) const;
  Seq<Value> evalCallRest(const TExpr& call, size_t i, std::vector<Value> acc,
                          const Context& ctx, const MeasureEnv& env) const;
  Seq<Value> evalListRest(const TExpr& e, size_t i, std::vector<Value> acc,
                          const Context& ctx, const MeasureEnv& env) const;
  Context execIndexedAssign(const TCmd& c, const Context& ctx, const Value& index,
                            const Value& rhs) const;
  Seq<Context> execBlockSeq(const TCmd& block, size_t i, const Context& ctx,
                            const MeasureEnv& env) const;
  Value evalBinary(const TExpr& e, const Value& a, const Value& b) const;
  Value applyIndex(const TExpr& e, const Value& base, const Value& index) const;
  bool truth(const TExpr& e, const Context& ctx, const MeasureEnv& env) const;
  bool bindingsVisit(const std::vector<TBinder>& binders, size_t i, const TExpr* filter,
                     const Context& ctx, const MeasureEnv& env,
                     const std::function<bool(const Context&, std::vector<Value>&)>& fn,
                     std::vector<Value>& acc) const;
  Seq<std::vector<Value>> bindingsSeq(std::shared_ptr<const std::vector<TBinder>> binders,
                                      size_t i, const TExpr* filter, const Context& ctx,
                                      const MeasureEnv& env, std::vector<Value> acc) const;
  Value chooseValue(const TExpr& e, std::vector<Value> witness) const;
  int64_t checkMeasure(const TClause& measure, const Context& ctx, const MeasureEnv& env,
                       std::optional<int64_t> previous) const;
  void checkInvariants(const TLoopInfo& loop, const Context& ctx, const MeasureEnv& env,
                       uint64_t iteration) const;
  Context loopEntry(const TLoopInfo& loop, const Context& ctx) const;
  std::optional<int64_t> loopBoundary(const TLoopInfo& loop, const Context& ctx,
                                      const MeasureEnv& env, uint64_t iteration,
                                      std::optional<int64_t> prev) const;
  MeasureEnv enterOperation(const TDecl& op, const Context& paramCtx, const MeasureEnv& env,
                            const SourceSpan& callSpan) const;
  Context bindParams(const TDecl& op, const std::vector<Value>& args,
                     const SourceSpan& callSpan) const;
  void checkEnsures(const TDecl& op, const Context& paramCtx, const Value& result,
                    const MeasureEnv& env) const;
  Value checkResult(const TDecl& op, const Value& result) const;

  // nondeterministic loop engines
  Seq<Context> whileSeq(const TCmd& c, Context ctx, std::optional<int64_t> prev,
                        uint64_t iter, const MeasureEnv& env) const;
  Seq<Context> forCountSeq(const TCmd& c, Context ctx, std::optional<int64_t> prev,
                           uint64_t iter, const MeasureEnv& env) const;
  Seq<Context> forInSeq(const TCmd& c, Context ctx,
                        std::shared_ptr<const std::vector<Value>> remaining,
                        std::optional<int64_t> prev, uint64_t iter,
                        const MeasureEnv& env) const;
  Seq<Context> chooseDoSeq(const TCmd& c, Context ctx, std::optional<int64_t> prev,
                           uint64_t iter, const MeasureEnv& env) const;

  void emitPrint(const Value& v) const;

  const TypedSpec& spec_;
  EvalMode mode_;
  PrintSink sink_;
};

}  // namespace fspec
