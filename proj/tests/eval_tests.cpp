#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "fspec/diagnostics.hpp"
#include "fspec/eval.hpp"
#include "testutil.hpp"

using namespace fspec;
using fspec::test::loadCorpus;

namespace {

// Evaluates a closed expression by making it a defined constant.
Value evalConst(const std::string& expr, const std::string& prelude = "") {
  auto p = test::load(prelude + "\nval testK = " + expr + ";", "eval");
  return p.consts.values.at("testK");
}

Value iv(int64_t i) { return Value::integer(i); }

std::vector<Value> resultsOf(const Evaluator& ev, const TDecl& op,
                             std::vector<Value> args) {
  auto inv = ev.invokeOperation(op, args);
  REQUIRE(inv.admissible);
  return toVector(inv.results);
}

}  // namespace

TEST_CASE("sum of odd squares (oracle: direct summation)") {
  int64_t expected = 0;
  for (int64_t x = 0; x <= 5; ++x)
    if (x % 2 != 0) expected += x * x;
  REQUIRE(expected == 35);
  CHECK(evalConst("∑ x:ℕ[5] with x%2 ≠ 0. x·x").asInt() == 35);
}

TEST_CASE("gcd choose body picks the brute-force witness (oracle: candidate scan)") {
  const int64_t N = 20;
  auto divides = [&](int64_t m, int64_t n) {
    for (int64_t p = 0; p <= N; ++p)
      if (m * p == n) return true;
    return false;
  };
  auto isGcd = [&](int64_t r, int64_t m, int64_t n) {
    if (!divides(r, m) || !divides(r, n)) return false;
    for (int64_t r0 = 0; r0 <= N; ++r0)
      if (divides(r0, m) && divides(r0, n) && r0 > r) return false;
    return true;
  };
  int64_t expected = -1;
  for (int64_t r = 0; r <= N && expected < 0; ++r)
    if (isGcd(r, 12, 8)) expected = r;
  REQUIRE(expected == 4);

  auto p = loadCorpus("gcd.fspec", {{"N", 20}});
  Evaluator ev(p.typed, EvalMode::Deterministic);
  auto rs = resultsOf(ev, *p.typed.find("gcd"), {iv(12), iv(8)});
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].asInt() == expected);
}

TEST_CASE("choose with no witness is a hard error") {
  CHECK_THROWS_AS(evalConst("choose x:ℕ[3] with x > 5"), EvalError);
  try {
    evalConst("choose x:ℕ[3] with x > 5");
  } catch (const EvalError& e) {
    CHECK(e.kind() == ErrKind::NoChoice);
  }
}

TEST_CASE("isTransitive (oracle: pair enumeration)") {
  auto p = loadCorpus("closure.fspec", {{"N", 2}});
  Evaluator ev(p.typed, EvalMode::Deterministic);
  const TDecl& isT = *p.typed.find("isTransitive");

  auto oracle = [](const std::vector<std::pair<int, int>>& r) {
    for (auto [a, b] : r)
      for (auto [c, d] : r) {
        if (b != c) continue;
        bool found = false;
        for (auto [e, f] : r) found = found || (e == a && f == d);
        if (!found) return false;
      }
    return true;
  };
  auto rel = [](const std::vector<std::pair<int, int>>& pairs) {
    std::vector<Value> es;
    for (auto [a, b] : pairs) es.push_back(Value::tuple({iv(a), iv(b)}));
    return Value::set(std::move(es));
  };

  std::vector<std::pair<int, int>> r1 = {{0, 1}, {1, 2}};
  std::vector<std::pair<int, int>> r2 = {{0, 1}, {1, 2}, {0, 2}};
  REQUIRE(!oracle(r1));
  REQUIRE(oracle(r2));
  CHECK(resultsOf(ev, isT, {rel(r1)})[0].asBool() == false);
  CHECK(resultsOf(ev, isT, {rel(r2)})[0].asBool() == true);
}

TEST_CASE("gcdp run: result agrees with gcd, measure decreases 20→12→4") {
  auto p = loadCorpus("gcd.fspec", {{"N", 20}});
  Evaluator ev(p.typed, EvalMode::Deterministic);
  std::vector<int64_t> measures;
  ev.measureProbe = [&](int64_t m) { measures.push_back(m); };
  auto rs = resultsOf(ev, *p.typed.find("gcdp"), {iv(12), iv(8)});
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].asInt() == std::gcd(12, 8));
  CHECK(measures == std::vector<int64_t>{20, 12, 4});
}

TEST_CASE("broken invariant is caught before the first iteration") {
  std::string source = test::corpusSource("gcd.fspec");
  std::string original = "invariant gcd(a, b) = gcd(old_a, old_b);";
  size_t pos = source.find(original);
  REQUIRE(pos != std::string::npos);
  source.replace(pos, original.size(), "invariant gcd(a, b) = 0;");
  auto p = test::load(source, "gcd.fspec", {{"N", 20}});
  Evaluator ev(p.typed, EvalMode::Deterministic);
  auto inv = ev.invokeOperation(*p.typed.find("gcdp"), {iv(1), iv(1)});
  REQUIRE(inv.admissible);
  try {
    (void)inv.results.force();
    FAIL("expected InvariantViolated");
  } catch (const EvalError& e) {
    CHECK(e.kind() == ErrKind::InvariantViolated);
    CHECK(e.annotation() == "invariant gcd(a, b) = 0;");
    CHECK(e.reason() == "invariant is violated (iteration 0)");
  }
}

TEST_CASE("set sieve terminates with the primes up to n") {
  auto p = loadCorpus("primes.fspec", {{"N", 30}});
  Evaluator ev(p.typed, EvalMode::Deterministic);
  auto rs = resultsOf(ev, *p.typed.find("SieveOfEratosthenesSet"), {iv(10)});
  REQUIRE(rs.size() == 1);
  CHECK(formatValue(rs[0]) == "{2,3,5,7}");
}

TEST_CASE("nondeterministic gcd yields exactly one result") {
  auto p = loadCorpus("gcd.fspec", {{"N", 20}});
  Evaluator ev(p.typed, EvalMode::Nondeterministic);
  const TDecl& gcd = *p.typed.find("gcd");

  auto rs = resultsOf(ev, gcd, {iv(1), iv(0)});
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].asInt() == 1);

  rs = resultsOf(ev, gcd, {iv(20), iv(20)});
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].asInt() == 20);

  auto inv = ev.invokeOperation(gcd, {iv(0), iv(0)});
  CHECK(!inv.admissible);
}

TEST_CASE("transitive closure of the paper's sample relation") {
  auto p = loadCorpus("closure.fspec", {{"N", 2}});
  Evaluator ev(p.typed, EvalMode::Deterministic);
  auto pairOf = [](int a, int b) { return Value::tuple({iv(a), iv(b)}); };
  Value input = Value::set({pairOf(1, 0), pairOf(0, 1), pairOf(2, 1), pairOf(0, 2)});
  std::vector<Value> full;
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b) full.push_back(pairOf(a, b));
  Value expected = Value::set(std::move(full));

  for (const char* fn : {"transitiveClosureI", "transitiveClosureR", "transitiveClosureP"}) {
    CAPTURE(fn);
    auto rs = resultsOf(ev, *p.typed.find(fn), {input});
    REQUIRE(rs.size() == 1);
    CHECK(valueEquals(rs[0], expected));
  }
}

TEST_CASE("mode coherence: deterministic result = first nondeterministic branch") {
  auto p = loadCorpus("gcd.fspec", {{"N", 12}});
  Evaluator det(p.typed, EvalMode::Deterministic);
  Evaluator nondet(p.typed, EvalMode::Nondeterministic);
  const TDecl& gcd = *p.typed.find("gcd");
  for (int64_t m = 0; m <= 12; ++m) {
    for (int64_t n = 0; n <= 12; ++n) {
      if (m == 0 && n == 0) continue;
      Value d = det.invokeOperation(gcd, {iv(m), iv(n)}).results.force()->head;
      Value f = nondet.invokeOperation(gcd, {iv(m), iv(n)}).results.force()->head;
      CHECK(valueEquals(d, f));
    }
  }
}

TEST_CASE("print is a side channel and yields its argument") {
  auto spec = parseSource("fun f(x:ℕ[5]): ℕ[5] = print x + 1;", "t");
  ConstEnv env;
  TypedSpec ts = typecheckSpec(spec, env);
  std::vector<std::string> lines;
  Evaluator ev(ts, EvalMode::Deterministic,
               [&lines](const std::string& s) { lines.push_back(s); });
  auto rs = resultsOf(ev, *ts.find("f"), {iv(2)});
  CHECK(rs[0].asInt() == 3);  // print extends maximally right
  CHECK(lines == std::vector<std::string>{"print: 3"});
}

TEST_CASE("remainder is non-negative; division floors; divisor zero errors") {
  CHECK(evalConst("7 % 3").asInt() == 1);
  CHECK(evalConst("(0-7) % 3").asInt() == 2);   // mathematical remainder
  CHECK(evalConst("7 % (0-3)").asInt() == 1);   // result in [0, |divisor|)
  CHECK(evalConst("(0-7) / 3").asInt() == -3);  // floor division
  CHECK(evalConst("7 / 3").asInt() == 2);
  CHECK((-3) * 3 + 2 == -7);                    // the division identity
  CHECK_THROWS_AS(evalConst("1 / 0"), EvalError);
  CHECK_THROWS_AS(evalConst("1 % 0"), EvalError);
}

TEST_CASE("arithmetic overflow is reported, never wrapped") {
  CHECK_THROWS_AS(evalConst("2^64"), EvalError);
  CHECK_THROWS_AS(evalConst("9223372036854775807 + 1"), EvalError);
  CHECK(evalConst("2^62").asInt() == (int64_t{1} << 62));
}

TEST_CASE("range m..n is empty when m > n") {
  CHECK(formatValue(evalConst("5..3")) == "{}");
  CHECK(formatValue(evalConst("2..5")) == "{2,3,4,5}");
}

TEST_CASE("nested call with violated precondition is an error, not inadmissible") {
  std::string prelude = test::corpusSource("gcd.fspec");
  auto p = test::load(prelude + "\nfun probe(x:nat): nat = gcd(0, 0);", "t", {{"N", 5}});
  Evaluator ev(p.typed, EvalMode::Deterministic);
  auto inv = ev.invokeOperation(*p.typed.find("probe"), {iv(1)});
  REQUIRE(inv.admissible);
  try {
    (void)inv.results.force();
    FAIL("expected PreconditionViolated");
  } catch (const EvalError& e) {
    CHECK(e.kind() == ErrKind::PreconditionViolated);
    CHECK(e.annotation() == "requires m ≠ 0 ∨ n ≠ 0;");
    CHECK(e.reason() == "precondition of gcd is violated by arguments (0,0)");
  }
}

TEST_CASE("nondeterministic for-in explores every order") {
  auto spec = parseSource(
      "proc f(s:Set[ℕ[2]]): ℕ[20]\n"
      "{\n"
      "  var acc:ℕ[20] := 0;\n"
      "  for x∈s do { acc := acc·3 + x; }\n"
      "  return acc;\n"
      "}",
      "t");
  ConstEnv env;
  TypedSpec ts = typecheckSpec(spec, env);
  Value s = Value::set({iv(1), iv(2)});

  Evaluator det(ts, EvalMode::Deterministic);
  auto drs = resultsOf(det, *ts.find("f"), {s});
  REQUIRE(drs.size() == 1);
  CHECK(drs[0].asInt() == 5);  // canonical order: 1 then 2

  Evaluator nondet(ts, EvalMode::Nondeterministic);
  auto nrs = resultsOf(nondet, *ts.find("f"), {s});
  REQUIRE(nrs.size() == 2);
  CHECK(nrs[0].asInt() == 5);  // first branch = canonical order
  CHECK(nrs[1].asInt() == 7);  // the other order: 2 then 1
}

TEST_CASE("return is only legal at the end of a procedure") {
  CHECK_THROWS_AS(parseSource("proc f(n:ℕ[9]): ℕ[9]\n"
                              "{\n"
                              "  choose d:ℕ[9] with d·d = n then\n"
                              "    return d;\n"
                              "  else\n"
                              "    return 0;\n"
                              "}",
                              "t"),
                  ParseError);
}

TEST_CASE("choose command binds into the enclosing scope") {
  auto src =
      "proc f(n:ℕ[9]): ℕ[9]\n"
      "{\n"
      "  choose d:ℕ[9] with d·d = n;\n"
      "  assert d·d = n;\n"
      "  return d;\n"
      "}";
  auto p = test::load(src, "t");
  Evaluator ev(p.typed, EvalMode::Deterministic);
  CHECK(resultsOf(ev, *p.typed.find("f"), {iv(9)})[0].asInt() == 3);
  auto inv = ev.invokeOperation(*p.typed.find("f"), {iv(7)});
  CHECK_THROWS_AS((void)inv.results.force(), EvalError);  // NoChoice
}

TEST_CASE("choose-then-else takes the else branch when no witness exists") {
  auto src =
      "proc f(n:ℕ[9]): ℕ[9]\n"
      "{\n"
      "  var r:ℕ[9] := 0;\n"
      "  choose d:ℕ[9] with d·d = n then\n"
      "    r := d;\n"
      "  else\n"
      "    r := 9;\n"
      "  return r;\n"
      "}";
  auto p = test::load(src, "t");
  Evaluator ev(p.typed, EvalMode::Deterministic);
  CHECK(resultsOf(ev, *p.typed.find("f"), {iv(4)})[0].asInt() == 2);
  CHECK(resultsOf(ev, *p.typed.find("f"), {iv(7)})[0].asInt() == 9);
}

TEST_CASE("assert failure carries its text") {
  auto p = test::load("proc f(n:ℕ[3]): ℕ[3] { assert n < 2; return n; }", "t");
  Evaluator ev(p.typed, EvalMode::Deterministic);
  auto inv = ev.invokeOperation(*p.typed.find("f"), {iv(2)});
  try {
    (void)inv.results.force();
    FAIL("expected AssertionFailed");
  } catch (const EvalError& e) {
    CHECK(e.kind() == ErrKind::AssertionFailed);
    CHECK(e.annotation() == "assert n < 2;");
  }
}

TEST_CASE("purity: evaluating the same expression twice gives identical values") {
  auto p = loadCorpus("closure.fspec", {{"N", 2}});
  Evaluator ev(p.typed, EvalMode::Deterministic);
  const TDecl& cl = *p.typed.find("transitiveClosureI");
  Value input = Value::set({Value::tuple({iv(0), iv(1)}), Value::tuple({iv(1), iv(2)})});
  Value a = resultsOf(ev, cl, {input})[0];
  Value b = resultsOf(ev, cl, {input})[0];
  CHECK(valueEquals(a, b));
}

TEST_CASE("recursive measure discipline: violated measures are reported") {
  // f recurses without shrinking its measure
  auto src =
      "fun f(n:ℕ[5]): ℕ[5]\n"
      "  decreases n;\n"
      "= if n = 0 then 0 else f(n);";
  auto p = test::load(src, "t");
  Evaluator ev(p.typed, EvalMode::Deterministic);
  auto inv = ev.invokeOperation(*p.typed.find("f"), {iv(2)});
  try {
    (void)inv.results.force();
    FAIL("expected MeasureNotDecreased");
  } catch (const EvalError& e) {
    CHECK(e.kind() == ErrKind::MeasureNotDecreased);
  }
}

TEST_CASE("measure must be non-negative") {
  auto src =
      "proc f(n:ℕ[5]): ℕ[5]\n"
      "{\n"
      "  var i:ℕ[5] := 0;\n"
      "  while i < n do\n"
      "    decreases 0 - 1;\n"
      "  {\n"
      "    i := i + 1;\n"
      "  }\n"
      "  return i;\n"
      "}";
  auto p = test::load(src, "t");
  Evaluator ev(p.typed, EvalMode::Deterministic);
  auto good = ev.invokeOperation(*p.typed.find("f"), {iv(0)});
  CHECK_NOTHROW((void)good.results.force());  // zero iterations, no checks
  auto bad = ev.invokeOperation(*p.typed.find("f"), {iv(2)});
  try {
    (void)bad.results.force();
    FAIL("expected MeasureNegative");
  } catch (const EvalError& e) {
    CHECK(e.kind() == ErrKind::MeasureNegative);
  }
}

TEST_CASE("evalExpr public surface: deterministic sequences have length one") {
  auto p = loadCorpus("gcd.fspec", {{"N", 8}});
  Evaluator det(p.typed, EvalMode::Deterministic);
  const TDecl& gcd = *p.typed.find("gcd");
  // the body of gcd is a choose expression
  Context ctx = Context().push().declare(intern("m"), iv(6)).declare(intern("n"), iv(4));
  auto seq = det.evalExpr(*gcd.body, ctx);
  REQUIRE(seqLength(seq) == 1);
  CHECK(seq.force()->head.asInt() == 2);

  Evaluator nondet(p.typed, EvalMode::Nondeterministic);
  auto all = nondet.evalExpr(*gcd.body, ctx);
  CHECK(seq.force()->head.asInt() == all.force()->head.asInt());
}
