#include "fspec/scaffold.hpp"

#include <sstream>

#include "fspec/diagnostics.hpp"
#include "fspec/printer.hpp"

namespace fspec {

namespace {

using ast::Binder;
using ast::Decl;
using ast::DeclPtr;
using ast::Expr;
using ast::ExprPtr;
using ast::Param;

SourceSpan genSpan() { return SourceSpan{"<generated>", 1, 1, 0}; }

ExprPtr var(const std::string& name) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Var;
  e->name = name;
  e->span = genSpan();
  return e;
}

ExprPtr call(const std::string& name, const std::vector<std::string>& argNames) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Call;
  e->name = name;
  e->span = genSpan();
  for (const auto& a : argNames) e->args.push_back(var(a));
  return e;
}

ExprPtr binary(ast::BinOp op, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Binary;
  e->bin = op;
  e->span = genSpan();
  e->args = {std::move(a), std::move(b)};
  return e;
}

ExprPtr negate(ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Unary;
  e->un = ast::UnOp::Not;
  e->span = genSpan();
  e->args = {std::move(a)};
  return e;
}

Binder typedBinder(const Param& p) {
  Binder b;
  b.name = p.name;
  b.type = p.type;
  b.span = genSpan();
  return b;
}

ExprPtr quant(bool exists, const std::vector<Param>& params, ExprPtr body) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Quant;
  e->isExists = exists;
  e->span = genSpan();
  for (const auto& p : params) e->binders.push_back(typedBinder(p));
  e->body = std::move(body);
  return e;
}

ExprPtr chooseExpr(const Param& out, ExprPtr filter) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Choose;
  e->span = genSpan();
  e->binders = {typedBinder(out)};
  e->filter = std::move(filter);
  return e;
}

DeclPtr theorem(const std::string& name, std::vector<Param> params, ExprPtr body) {
  auto d = std::make_shared<Decl>();
  d->kind = Decl::Kind::Theorem;
  d->name = name;
  d->span = genSpan();
  d->params = std::move(params);
  d->value = std::move(body);
  return d;
}

std::vector<std::string> names(const std::vector<Param>& params) {
  std::vector<std::string> out;
  for (const auto& p : params) out.push_back(p.name);
  return out;
}

}  // namespace

SpecSkeleton buildSkeleton(const ast::Spec& spec, const std::string& preName,
                           const std::string& postName) {
  const ast::Decl* pre = nullptr;
  const ast::Decl* post = nullptr;
  for (const auto& d : spec.decls) {
    if (d->kind != ast::Decl::Kind::Pred) continue;
    if (d->name == preName) pre = d.get();
    if (d->name == postName) post = d.get();
  }
  if (!pre) throw UnknownPredicate("unknown precondition predicate '" + preName + "'");
  if (!post) throw UnknownPredicate("unknown postcondition predicate '" + postName + "'");
  if (post->params.size() != pre->params.size() + 1)
    throw UnknownPredicate("'" + postName + "' must take the parameters of '" + preName +
                           "' plus one output parameter");
  for (size_t i = 0; i < pre->params.size(); ++i) {
    if (!ast::equal(*pre->params[i].type, *post->params[i].type))
      throw UnknownPredicate("parameter " + std::to_string(i + 1) + " of '" + postName +
                             "' does not match '" + preName + "'");
  }
  SpecSkeleton skel;
  skel.preName = preName;
  skel.postName = postName;
  skel.inputParams = pre->params;
  skel.outputParam = post->params.back();
  return skel;
}

GeneratedSuite generateValidationTheorems(const SpecSkeleton& skel) {
  const auto& xs = skel.inputParams;
  const Param& y = skel.outputParam;
  std::vector<std::string> xNames = names(xs);
  std::vector<std::string> xyNames = xNames;
  xyNames.push_back(y.name);

  auto preX = [&] { return call(skel.preName, xNames); };
  auto postXY = [&] { return call(skel.postName, xyNames); };

  GeneratedSuite suite;

  // ∃x. P(x)
  suite.decls.push_back(
      theorem(skel.postName + "_preSat", {}, quant(/*exists=*/true, xs, preX())));

  // ∀-parameters; P(x) ⇒ ∃y. ¬Q(x, y)
  suite.decls.push_back(theorem(
      skel.postName + "_postNotValid", xs,
      binary(ast::BinOp::Implies, preX(),
             quant(/*exists=*/true, {y}, negate(postXY())))));

  // P(x) ⇒ ∃y. Q(x, y)
  suite.decls.push_back(theorem(
      skel.postName + "_postSat", xs,
      binary(ast::BinOp::Implies, preX(), quant(/*exists=*/true, {y}, postXY()))));

  // P(x) ∧ Q(x, y1) ∧ Q(x, y2) ⇒ y1 = y2
  Param y1 = y, y2 = y;
  y1.name = y.name + "1";
  y2.name = y.name + "2";
  std::vector<Param> uniqueParams = xs;
  uniqueParams.push_back(y1);
  uniqueParams.push_back(y2);
  std::vector<std::string> xy1 = xNames, xy2 = xNames;
  xy1.push_back(y1.name);
  xy2.push_back(y2.name);
  suite.decls.push_back(theorem(
      skel.postName + "_resultUnique", uniqueParams,
      binary(ast::BinOp::Implies,
             binary(ast::BinOp::And,
                    binary(ast::BinOp::And, preX(), call(skel.postName, xy1)),
                    call(skel.postName, xy2)),
             binary(ast::BinOp::Eq, var(y1.name), var(y2.name)))));

  // fun <post>_Fun(x): T requires P(x); = choose y with Q(x, y);
  auto fun = std::make_shared<Decl>();
  fun->kind = Decl::Kind::Fun;
  fun->name = skel.postName + "_Fun";
  fun->span = genSpan();
  fun->params = xs;
  fun->type = y.type;
  fun->contract.requires_ = preX();
  fun->value = chooseExpr(y, postXY());
  suite.decls.push_back(fun);

  // weaker (not-valid) fallback: ∃x, y. P(x) ∧ ¬Q(x, y)
  std::vector<Param> xy = xs;
  xy.push_back(y);
  suite.weakNotValid =
      theorem(skel.postName + "_postNotValidWeak", {},
              quant(/*exists=*/true, xy, binary(ast::BinOp::And, preX(), negate(postXY()))));

  return suite;
}

std::string renderSuite(const GeneratedSuite& suite) {
  std::ostringstream os;
  for (const auto& d : suite.decls) os << printDecl(*d);
  if (suite.weakNotValid) {
    std::istringstream lines(printDecl(*suite.weakNotValid));
    std::string line;
    while (std::getline(lines, line)) os << "// " << line << "\n";
  }
  return os.str();
}

}  // namespace fspec
