#include "fspec/ast.hpp"

namespace fspec::ast {

namespace {

bool equalPtr(const TypeExprPtr& a, const TypeExprPtr& b) {
  if (!a || !b) return !a && !b;
  return equal(*a, *b);
}

bool equalPtr(const ExprPtr& a, const ExprPtr& b) {
  if (!a || !b) return !a && !b;
  return equal(*a, *b);
}

bool equalPtr(const CmdPtr& a, const CmdPtr& b) {
  if (!a || !b) return !a && !b;
  return equal(*a, *b);
}

template <typename T, typename Eq>
bool equalVec(const std::vector<T>& a, const std::vector<T>& b, Eq eq) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!eq(a[i], b[i])) return false;
  return true;
}

bool equalBinders(const std::vector<Binder>& a, const std::vector<Binder>& b) {
  return equalVec(a, b, [](const Binder& x, const Binder& y) {
    return x.name == y.name && equalPtr(x.type, y.type) && equalPtr(x.domain, y.domain);
  });
}

bool equalLoop(const LoopSpec& a, const LoopSpec& b) {
  return equalVec(a.invariants, b.invariants,
                  [](const ExprPtr& x, const ExprPtr& y) { return equalPtr(x, y); }) &&
         equalPtr(a.decreases, b.decreases);
}

}  // namespace

bool equal(const TypeExpr& a, const TypeExpr& b) {
  if (a.kind != b.kind || a.name != b.name || a.fields != b.fields) return false;
  return equalPtr(a.bound, b.bound) && equalPtr(a.hi, b.hi) &&
         equalVec(a.args, b.args, [](const TypeExprPtr& x, const TypeExprPtr& y) {
           return equalPtr(x, y);
         });
}

bool equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  if (a.intValue != b.intValue || a.boolValue != b.boolValue ||
      a.isExists != b.isExists || a.projIndex != b.projIndex ||
      a.name != b.name || a.bin != b.bin || a.un != b.un)
    return false;
  return equalVec(a.args, b.args, [](const ExprPtr& x, const ExprPtr& y) {
           return equalPtr(x, y);
         }) &&
         equalBinders(a.binders, b.binders) && equalPtr(a.filter, b.filter) &&
         equalPtr(a.body, b.body) && equalPtr(a.typeArg, b.typeArg);
}

bool equal(const Cmd& a, const Cmd& b) {
  if (a.kind != b.kind || a.name != b.name) return false;
  return equalPtr(a.type, b.type) && equalPtr(a.e1, b.e1) && equalPtr(a.e2, b.e2) &&
         equalPtr(a.c1, b.c1) && equalPtr(a.c2, b.c2) &&
         equalPtr(a.update, b.update) &&
         equalVec(a.cmds, b.cmds, [](const CmdPtr& x, const CmdPtr& y) {
           return equalPtr(x, y);
         }) &&
         equalBinders(a.binders, b.binders) && equalPtr(a.filter, b.filter) &&
         equalLoop(a.loop, b.loop);
}

bool equal(const Decl& a, const Decl& b) {
  if (a.kind != b.kind || a.name != b.name) return false;
  if (!equalVec(a.params, b.params, [](const Param& x, const Param& y) {
        return x.name == y.name && equalPtr(x.type, y.type);
      }))
    return false;
  return equalPtr(a.type, b.type) && equalPtr(a.value, b.value) &&
         equalPtr(a.contract.requires_, b.contract.requires_) &&
         equalPtr(a.contract.ensures_, b.contract.ensures_) &&
         equalPtr(a.contract.decreases_, b.contract.decreases_) &&
         equalVec(a.body, b.body, [](const CmdPtr& x, const CmdPtr& y) {
           return equalPtr(x, y);
         }) &&
         equalPtr(a.returnExpr, b.returnExpr);
}

bool equal(const Spec& a, const Spec& b) {
  return equalVec(a.decls, b.decls, [](const DeclPtr& x, const DeclPtr& y) {
    return x && y && equal(*x, *y);
  });
}

}  // namespace fspec::ast
