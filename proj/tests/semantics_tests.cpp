#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fspec/diagnostics.hpp"
#include "fspec/eval.hpp"
#include "testutil.hpp"

using namespace fspec;
using fspec::test::loadCorpus;

TEST_CASE("resolveConstants: override wins") {
  ast::Spec spec = parseSource(test::corpusSource("gcd.fspec"), "gcd.fspec");
  ConstEnv env = resolveConstants(spec, {{"N", 20}}, 5);
  CHECK(env.unspecified.at("N") == 20);
  CHECK(env.values.at("N").asInt() == 20);
}

TEST_CASE("resolveConstants: default fallback") {
  ast::Spec spec = parseSource(test::corpusSource("gcd.fspec"), "gcd.fspec");
  ConstEnv env = resolveConstants(spec, {}, 5);
  CHECK(env.unspecified.at("N") == 5);
}

TEST_CASE("resolveConstants: parameterless theorem verified during resolution") {
  ast::Spec spec = parseSource(test::corpusSource("max.fspec"), "max.fspec");
  ConstEnv env = resolveConstants(spec, {{"N", 3}, {"M", 2}}, 5);
  CHECK(env.unspecified.at("N") == 3);
  CHECK(env.unspecified.at("M") == 2);
  CHECK(env.values.at("preSat").asBool());
}

TEST_CASE("resolveConstants: false parameterless theorem fails") {
  ast::Spec spec = parseSource("val N: ℕ; theorem bad ⇔ N = N+1;", "t");
  CHECK_THROWS_AS(resolveConstants(spec, {}, 5), TheoremFailed);
}

TEST_CASE("resolveConstants: unknown override") {
  ast::Spec spec = parseSource(test::corpusSource("gcd.fspec"), "gcd.fspec");
  CHECK_THROWS_AS(resolveConstants(spec, {{"Q", 3}}, 5), UnknownConstant);
  // overriding a defined constant is also unknown
  ast::Spec spec2 = parseSource("val K: ℕ[9] = 3;", "t");
  CHECK_THROWS_AS(resolveConstants(spec2, {{"K", 4}}, 5), UnknownConstant);
}

TEST_CASE("resolveConstants: defined constants evaluate in order") {
  ast::Spec spec = parseSource("val N: ℕ; val K = N+1; val L = K·K;", "t");
  ConstEnv env = resolveConstants(spec, {{"N", 4}}, 5);
  CHECK(env.values.at("K").asInt() == 5);
  CHECK(env.values.at("L").asInt() == 25);
}

TEST_CASE("typecheck: figure spec at N=20; gcd result type is ℤ[0,20]") {
  auto p = loadCorpus("gcd.fspec", {{"N", 20}});
  const TDecl* gcd = p.typed.find("gcd");
  REQUIRE(gcd != nullptr);
  CHECK(gcd->resultType->kind == SemType::Kind::Int);
  CHECK(gcd->resultType->lo == 0);
  CHECK(gcd->resultType->hi == 20);
  CHECK(gcd->params.size() == 2);
  CHECK(gcd->containsChoice);
  CHECK(gcd->branches);
  const TDecl* gcdp = p.typed.find("gcdp");
  CHECK(!gcdp->branches);          // the procedure body is choice-free
  CHECK(gcdp->containsChoice);     // …but its annotations call gcd
}

TEST_CASE("typecheck: ill-typed operands") {
  ast::Spec spec = parseSource("val K = 1 + ⊤;", "t");
  CHECK_THROWS_AS(resolveConstants(spec, {}, 5), TypeError);
  ast::Spec spec2 = parseSource("theorem t(x:ℕ[3]) ⇔ x;", "t");
  ConstEnv env;
  CHECK_THROWS_AS(typecheckSpec(spec2, env), TypeError);
}

TEST_CASE("typecheck: recursion without a measure is rejected") {
  std::string source = test::corpusSource("closure.fspec");
  std::string clause = "  decreases 2^((N+1)^2) - |r|;\n";
  size_t pos = source.find(clause);
  REQUIRE(pos != std::string::npos);
  source.erase(pos, clause.size());
  ast::Spec mutated = parseSource(source, "closure.fspec");
  ast::Spec original =
      parseSource(test::corpusSource("closure.fspec"), "closure.fspec");
  ConstEnv env = resolveConstants(original, {{"N", 2}}, 5);
  CHECK_THROWS_AS(typecheckSpec(mutated, env), MissingDecreases);
}

TEST_CASE("typecheck: every corpus file with its paper parameters") {
  CHECK_NOTHROW(loadCorpus("gcd.fspec", {{"N", 20}}));
  CHECK_NOTHROW(loadCorpus("max.fspec", {{"N", 3}, {"M", 2}}));
  CHECK_NOTHROW(loadCorpus("primes.fspec", {{"N", 30}}));
  CHECK_NOTHROW(loadCorpus("closure.fspec", {{"N", 2}}));
}

TEST_CASE("typecheck: deterministic and idempotent") {
  ast::Spec spec = parseSource(test::corpusSource("closure.fspec"), "closure.fspec");
  ConstEnv env = resolveConstants(spec, {{"N", 2}}, 5);
  TypedSpec a = typecheckSpec(spec, env);
  TypedSpec b = typecheckSpec(spec, env);
  REQUIRE(a.decls.size() == b.decls.size());
  for (size_t i = 0; i < a.decls.size(); ++i) {
    CHECK(a.decls[i]->name == b.decls[i]->name);
    CHECK(a.decls[i]->branches == b.decls[i]->branches);
    CHECK(a.decls[i]->containsChoice == b.decls[i]->containsChoice);
    CHECK(a.decls[i]->recursive == b.decls[i]->recursive);
    CHECK(sameType(*a.decls[i]->resultType, *b.decls[i]->resultType));
    REQUIRE(a.decls[i]->params.size() == b.decls[i]->params.size());
    for (size_t j = 0; j < a.decls[i]->params.size(); ++j)
      CHECK(sameType(*a.decls[i]->params[j].type, *b.decls[i]->params[j].type));
  }
}

TEST_CASE("typecheck: old_ and forSet are rejected outside annotations") {
  // old_a outside an invariant is just an unknown variable
  ast::Spec spec = parseSource(
      "proc p(m:ℕ[5]): ℕ[5] { var a:ℕ[5] := m; a := old_a; return a; }", "t");
  ConstEnv env;
  CHECK_THROWS_AS(typecheckSpec(spec, env), TypeError);
  ast::Spec spec2 = parseSource("theorem t(x:ℕ[3]) ⇔ forSet = forSet;", "t");
  CHECK_THROWS_AS(typecheckSpec(spec2, env), TypeError);
}

TEST_CASE("typecheck: parameters are not assignable") {
  ast::Spec spec =
      parseSource("proc p(m:ℕ[5]): ℕ[5] { m := 0; return m; }", "t");
  ConstEnv env;
  CHECK_THROWS_AS(typecheckSpec(spec, env), TypeError);
}

TEST_CASE("typecheck: subranges are one integer type; bounds are dynamic") {
  // assigning a wider expression into a narrower variable type-checks
  ast::Spec spec = parseSource(
      "proc p(m:ℕ[9]): ℕ[3] { var a:ℕ[3] := m; return a; }", "t");
  ConstEnv env;
  TypedSpec ts = typecheckSpec(spec, env);
  Evaluator ev(ts, EvalMode::Deterministic);
  auto ok = ev.invokeOperation(*ts.find("p"), {Value::integer(2)});
  CHECK(ok.results.force()->head.asInt() == 2);
  // …and fails at runtime when the value is out of range
  auto bad = ev.invokeOperation(*ts.find("p"), {Value::integer(7)});
  CHECK_THROWS_AS((void)bad.results.force(), EvalError);
}

TEST_CASE("typecheck: theorem bodies must be Bool; ensures on theorems rejected") {
  ast::Spec spec = parseSource("theorem t(x:ℕ[3]) ⇔ x + 1;", "t");
  ConstEnv env;
  CHECK_THROWS_AS(typecheckSpec(spec, env), TypeError);
  ast::Spec spec2 = parseSource("theorem t(x:ℕ[3]) ensures ⊤; ⇔ ⊤;", "t");
  CHECK_THROWS_AS(typecheckSpec(spec2, env), TypeError);
}

TEST_CASE("cardinality: the corpus input spaces") {
  auto p = loadCorpus("max.fspec", {{"N", 3}, {"M", 2}});
  const TDecl* maxFun = p.typed.find("maxFun");
  REQUIRE(maxFun);
  CHECK(cardinality(*maxFun->params[0].type) == 125);
  CHECK(cardinality(*maxFun->params[1].type) == 7);
  auto p2 = loadCorpus("closure.fspec", {{"N", 2}});
  const TDecl* closure = p2.typed.find("transitiveClosureI");
  REQUIRE(closure);
  CHECK(cardinality(*closure->params[0].type) == 512);
}

TEST_CASE("duplicate declarations are rejected") {
  ast::Spec spec = parseSource("val N: ℕ; val N: ℕ;", "t");
  CHECK_THROWS_AS(resolveConstants(spec, {}, 5), TypeError);
}

TEST_CASE("forward references are rejected") {
  ast::Spec spec = parseSource("theorem t ⇔ f(1) = 1; fun f(x:ℕ[3]): ℕ[3] = x;", "t");
  CHECK_THROWS_AS(resolveConstants(spec, {}, 5), TypeError);
}
