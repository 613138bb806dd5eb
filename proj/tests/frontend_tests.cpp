#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fspec/diagnostics.hpp"
#include "fspec/lexer.hpp"
#include "fspec/parser.hpp"
#include "fspec/printer.hpp"
#include "testutil.hpp"

using namespace fspec;

namespace {

std::vector<TokenType> kinds(const std::string& src) {
  std::vector<TokenType> out;
  for (const Token& t : tokenize(src, "test")) {
    if (t.type == TokenType::EndOfFile) break;
    out.push_back(t.type);
  }
  return out;
}

const char* kCorpus[] = {"gcd.fspec", "max.fspec", "primes.fspec", "closure.fspec"};

}  // namespace

TEST_CASE("tokenize: unicode walk") {
  using T = TokenType;
  CHECK(kinds("∀x:nat. x ≥ 0") ==
        std::vector<T>{T::Forall, T::Ident, T::Colon, T::Ident, T::Dot, T::Ident, T::Ge,
                       T::IntLit});
}

TEST_CASE("tokenize: ascii aliases give the same kinds") {
  CHECK(kinds("forall x:nat. x >= 0") == kinds("∀x:nat. x ≥ 0"));
  CHECK(kinds("exists p:nat. m*p = n /\\ true") == kinds("∃p:nat. m·p = n ∧ ⊤"));
  CHECK(kinds("a \\/ b => c <=> ~d") == kinds("a ∨ b ⇒ c ⇔ ¬d"));
  CHECK(kinds("x in s union t intersect u") == kinds("x ∈ s ∪ t ∩ u"));
  CHECK(kinds("emptyset[Nat] subseteq s") == kinds("∅[ℕ] ⊆ s"));
  CHECK(kinds("(|1, 2|)") == kinds("⟨1, 2⟩"));
  CHECK(kinds("a ~= b") == kinds("a ≠ b"));
  CHECK(kinds("sum x:Int. x") == kinds("∑ x:ℤ. x"));
}

TEST_CASE("tokenize: val declaration") {
  using T = TokenType;
  CHECK(kinds("val N: ℕ;") ==
        std::vector<T>{T::KwVal, T::Ident, T::Colon, T::NatSym, T::Semicolon});
}

TEST_CASE("tokenize: comments are skipped") {
  CHECK(kinds("1 // comment\n+ 2") == kinds("1 + 2"));
  CHECK(kinds("1 /* x\n y */ + 2") == kinds("1 + 2"));
}

TEST_CASE("tokenize: errors") {
  CHECK_THROWS_AS(tokenize("val @", "t"), LexError);
  CHECK_THROWS_AS(tokenize("/* open", "t"), LexError);
  try {
    tokenize("x\n/* open", "t");
    FAIL("expected LexError");
  } catch (const LexError& e) {
    CHECK(e.span().line == 2);  // points at the opening /*
  }
}

TEST_CASE("tokenize: spans are 1-based, ordered, non-overlapping") {
  auto toks = tokenize("val N: ℕ;\ntype nat = ℕ[N];", "t");
  uint32_t line = 1, col = 1;
  for (const Token& t : toks) {
    if (t.type == TokenType::EndOfFile) break;
    CHECK(t.span.line >= 1);
    CHECK(t.span.column >= 1);
    bool advanced = t.span.line > line || (t.span.line == line && t.span.column >= col);
    CHECK(advanced);
    line = t.span.line;
    col = t.span.column + t.span.length;
  }
}

TEST_CASE("parse: figure source has 8 declarations") {
  ast::Spec spec = parseSource(test::corpusSource("gcd.fspec"), "gcd.fspec");
  REQUIRE(spec.decls.size() == 8);
  CHECK(spec.decls[0]->name == "N");
  CHECK(spec.decls[1]->name == "nat");
  CHECK(spec.decls[2]->name == "divides");
  CHECK(spec.decls[3]->name == "gcd");
  CHECK(spec.decls[4]->name == "gcd0");
  CHECK(spec.decls[5]->name == "gcd1");
  CHECK(spec.decls[6]->name == "gcd2");
  CHECK(spec.decls[7]->name == "gcdp");
  CHECK(spec.decls[7]->kind == ast::Decl::Kind::Proc);
}

TEST_CASE("parse: empty file") {
  CHECK(parseSource("", "t").decls.empty());
  CHECK(prettyPrint(parseSource("", "t")) == "");
}

TEST_CASE("parse: precedence of + over ·") {
  // 1+2·3 = 7 must group as 1+(2·3)
  ast::Spec spec = parseSource("theorem t ⇔ 1+2·3 = 7;", "t");
  const ast::Expr& body = *spec.decls[0]->value;
  REQUIRE(body.kind == ast::Expr::Kind::Binary);
  CHECK(body.bin == ast::BinOp::Eq);
  const ast::Expr& lhs = *body.args[0];
  REQUIRE(lhs.kind == ast::Expr::Kind::Binary);
  CHECK(lhs.bin == ast::BinOp::Add);
  CHECK(lhs.args[1]->bin == ast::BinOp::Mul);
}

TEST_CASE("parse: implication is right-associative, quantifier bodies extend right") {
  ast::Spec spec = parseSource("theorem t(p:Bool, q:Bool, r:Bool) ⇔ p ⇒ q ⇒ r;", "t");
  const ast::Expr& body = *spec.decls[0]->value;
  CHECK(body.bin == ast::BinOp::Implies);
  CHECK(body.args[1]->bin == ast::BinOp::Implies);

  ast::Spec spec2 =
      parseSource("theorem t(p:Bool) ⇔ p ∧ ∀x:ℕ[3]. x = x ⇒ p;", "t");
  const ast::Expr& b2 = *spec2.decls[0]->value;
  REQUIRE(b2.bin == ast::BinOp::And);
  CHECK(b2.args[1]->kind == ast::Expr::Kind::Quant);
  CHECK(b2.args[1]->body->bin == ast::BinOp::Implies);
}

TEST_CASE("parse: let initializer stops at in") {
  ast::Spec spec = parseSource("theorem t ⇔ let s = 1..2 in 1 ∈ s;", "t");
  const ast::Expr& body = *spec.decls[0]->value;
  REQUIRE(body.kind == ast::Expr::Kind::LetE);
  CHECK(body.args[0]->kind == ast::Expr::Kind::SetRange);
  CHECK(body.body->bin == ast::BinOp::In);
}

TEST_CASE("parse: errors carry the offending position") {
  CHECK_THROWS_AS(parseSource("val N ℕ;", "t"), ParseError);
  CHECK_THROWS_AS(parseSource("theorem t ⇔ ;", "t"), ParseError);
  CHECK_THROWS_AS(parseSource("fun f(): ℕ[3] = 1", "t"), ParseError);  // missing ';'
}

TEST_CASE("roundtrip: corpus files re-parse to structurally equal ASTs") {
  for (const char* name : kCorpus) {
    CAPTURE(name);
    ast::Spec parsed = parseSource(test::corpusSource(name), name);
    std::string printed = prettyPrint(parsed);
    ast::Spec reparsed = parseSource(printed, name);
    CHECK(ast::equal(parsed, reparsed));
    // printing is a fixed point once normalized
    CHECK(prettyPrint(reparsed) == printed);
  }
}

TEST_CASE("alias equivalence: ascii spellings give structurally equal ASTs") {
  const std::pair<const char*, const char*> aliases[] = {
      {"∀", "forall "}, {"∃", "exists "}, {"∑", "sum "}, {"⇔", "<=>"}, {"⇒", "=>"},
      {"∧", "/\\"},     {"∨", "\\/"},     {"¬", "~"},    {"≠", "~="}, {"≤", "<="},
      {"≥", ">="},      {"∈", " in "},    {"⊆", " subseteq "}, {"∪", " union "},
      {"∩", " intersect "}, {"∅", "emptyset"}, {"·", "*"}, {"ℕ", "Nat"}, {"ℤ", "Int"},
      {"⟨", "(|"},      {"⟩", "|)"},      {"⊤", "true"}, {"⊥", "false"},
  };
  for (const char* name : kCorpus) {
    CAPTURE(name);
    std::string source = test::corpusSource(name);
    std::string ascii = source;
    for (const auto& [uni, asc] : aliases) {
      size_t pos = 0;
      while ((pos = ascii.find(uni, pos)) != std::string::npos) {
        ascii.replace(pos, std::string(uni).size(), asc);
        pos += std::string(asc).size();
      }
    }
    ast::Spec a = parseSource(source, name);
    ast::Spec b = parseSource(ascii, name);
    CHECK(ast::equal(a, b));
  }
}

TEST_CASE("parse: tuple spellings agree") {
  ast::Spec a = parseSource("theorem t ⇔ ⟨1, 2⟩ = ⟨1, 2⟩;", "t");
  ast::Spec b = parseSource("theorem t ⇔ (|1, 2|) = (1, 2);", "t");
  CHECK(ast::equal(a, b));
}

TEST_CASE("error locality: deleting one character reports near the deletion") {
  std::mt19937_64 rng(20170911);
  for (const char* name : kCorpus) {
    std::string source = test::corpusSource(name);
    // byte → line map
    std::vector<uint32_t> lineOf(source.size() + 1, 1);
    uint32_t line = 1;
    for (size_t i = 0; i < source.size(); ++i) {
      lineOf[i] = line;
      if (source[i] == '\n') ++line;
    }
    lineOf[source.size()] = line;
    int trials = 0;
    while (trials < 120) {
      size_t pos = rng() % source.size();
      // deleting inside a multi-byte UTF-8 character yields invalid text,
      // which is not an interesting locality case
      if ((source[pos] & 0xC0) == 0x80 || (source[pos] & 0x80) != 0) continue;
      // deleting a block delimiter leaves a locally valid prefix whose
      // mismatch can only surface at the next structural boundary, so no
      // parser can report it near the deletion
      if (std::string("{}()[]").find(source[pos]) != std::string::npos) continue;
      ++trials;
      std::string mutated = source;
      mutated.erase(pos, 1);
      CAPTURE(name);
      CAPTURE(pos);
      try {
        ast::Spec spec = parseSource(mutated, name);
        (void)spec;  // some deletions still parse (e.g. whitespace)
      } catch (const Diagnostic& e) {
        CHECK(e.span().line <= lineOf[pos] + 1);
      }
    }
  }
}
