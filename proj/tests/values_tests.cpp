#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "fspec/diagnostics.hpp"
#include "fspec/semtype.hpp"
#include "testutil.hpp"

using namespace fspec;

namespace {

Value iv(int64_t i) { return Value::integer(i); }

Value setOf(std::vector<int64_t> xs) {
  std::vector<Value> vs;
  for (int64_t x : xs) vs.push_back(iv(x));
  return Value::set(std::move(vs));
}

Value pairOf(int64_t a, int64_t b) { return Value::tuple({iv(a), iv(b)}); }

}  // namespace

TEST_CASE("compareValues: examples") {
  CHECK(compareValues(iv(1), iv(2)) < 0);
  CHECK(compareValues(setOf({}), setOf({0})) < 0);           // size-first
  CHECK(compareValues(pairOf(1, 0), pairOf(0, 2)) > 0);      // lexicographic
  CHECK(compareValues(Value::boolean(false), Value::boolean(true)) < 0);
  CHECK(compareValues(setOf({1, 2}), setOf({2, 1})) == 0);   // canonical
}

TEST_CASE("sets are canonical under permutation") {
  std::vector<int64_t> xs = {3, 1, 4, 1, 5, 9, 2, 6};
  std::vector<int64_t> ys = xs;
  std::mt19937_64 rng(7);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(ys.begin(), ys.end(), rng);
    CHECK(valueEquals(setOf(xs), setOf(ys)));
    CHECK(formatValue(setOf(xs)) == formatValue(setOf(ys)));
  }
}

TEST_CASE("formatValue: examples") {
  CHECK(formatValue(Value::array({iv(-2), iv(0), iv(0)})) == "[-2,0,0]");
  CHECK(formatValue(setOf({})) == "{}");
  CHECK(formatValue(Value::set({pairOf(0, 1), pairOf(1, 0)})) == "{[0,1],[1,0]}");
  CHECK(formatValue(Value::boolean(true)) == "true");
  CHECK(formatValue(Value::boolean(false)) == "false");
  CHECK(formatValue(iv(-7)) == "-7");
  CHECK(formatValue(Value::map({iv(0), iv(5), iv(1), iv(6)})) == "[0:5,1:6]");
}

TEST_CASE("set algebra on canonical vectors") {
  Value a = setOf({1, 2, 3});
  Value b = setOf({2, 3, 4});
  CHECK(valueEquals(setUnion(a, b), setOf({1, 2, 3, 4})));
  CHECK(valueEquals(setIntersect(a, b), setOf({2, 3})));
  CHECK(valueEquals(setDifference(a, b), setOf({1})));
  CHECK(setContains(a, iv(2)));
  CHECK(!setContains(a, iv(4)));
  CHECK(setSubseteq(setOf({1, 3}), a));
  CHECK(!setSubseteq(b, a));
}

TEST_CASE("cardinality: examples") {
  CHECK(cardinality(*SemType::integer(0, 20)) == 21);
  auto pairT = SemType::tuple({SemType::integer(0, 2), SemType::integer(0, 2)});
  CHECK(cardinality(*SemType::set(pairT)) == 512);
  auto arr = SemType::array(3, SemType::integer(-2, 2));
  CHECK(cardinality(*arr) == 125);
  CHECK(cardinality(*arr) * cardinality(*SemType::integer(-3, 3)) == 875);
  CHECK(cardinality(*SemType::boolean()) == 2);
  CHECK(cardinality(*SemType::map(SemType::integer(0, 2), SemType::boolean())) == 8);
  CHECK_THROWS_AS(cardinality(*SemType::set(SemType::integer(0, 63))), CountOverflow);
}

TEST_CASE("enumerateType: interval") {
  auto vals = toVector(enumerateType(SemType::integer(-2, 2)));
  REQUIRE(vals.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(vals[i].asInt() == i - 2);
}

TEST_CASE("enumerateType: powerset by size then lexicographic") {
  auto vals = toVector(enumerateType(SemType::set(SemType::integer(0, 1))));
  REQUIRE(vals.size() == 4);
  CHECK(formatValue(vals[0]) == "{}");
  CHECK(formatValue(vals[1]) == "{0}");
  CHECK(formatValue(vals[2]) == "{1}");
  CHECK(formatValue(vals[3]) == "{0,1}");
}

TEST_CASE("enumerateType: 512 distinct relations") {
  auto pairT = SemType::tuple({SemType::integer(0, 2), SemType::integer(0, 2)});
  auto vals = toVector(enumerateType(SemType::set(pairT)));
  REQUIRE(vals.size() == 512);
  for (size_t i = 1; i < vals.size(); ++i) CHECK(compareValues(vals[i - 1], vals[i]) < 0);
}

TEST_CASE("enumerateType: tuples vary the last component fastest") {
  auto t = SemType::tuple({SemType::integer(0, 1), SemType::integer(0, 2)});
  auto vals = toVector(enumerateType(t));
  REQUIRE(vals.size() == 6);
  CHECK(formatValue(vals[0]) == "[0,0]");
  CHECK(formatValue(vals[1]) == "[0,1]");
  CHECK(formatValue(vals[2]) == "[0,2]");
  CHECK(formatValue(vals[3]) == "[1,0]");
}

TEST_CASE("enumerateType: maps are lexicographic over the ordered domain") {
  auto t = SemType::map(SemType::integer(0, 1), SemType::boolean());
  auto vals = toVector(enumerateType(t));
  REQUIRE(vals.size() == 4);
  CHECK(formatValue(vals[0]) == "[0:false,1:false]");
  CHECK(formatValue(vals[1]) == "[0:false,1:true]");
  CHECK(formatValue(vals[2]) == "[0:true,1:false]");
  CHECK(formatValue(vals[3]) == "[0:true,1:true]");
}

namespace {

// random SemType generator for the enumeration/cardinality cross-check
SemTypeP randomType(std::mt19937_64& rng, int depth) {
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };
  int kind = depth <= 0 ? pick(2) : pick(7);
  switch (kind) {
    case 0: return SemType::boolean();
    case 1: {
      int64_t lo = static_cast<int64_t>(rng() % 21) - 10;
      int64_t hi = lo + static_cast<int64_t>(rng() % 12);
      return SemType::integer(lo, hi);
    }
    case 2: return SemType::set(randomType(rng, depth - 1));
    case 3: {
      std::vector<SemTypeP> comps;
      int n = 1 + pick(3);
      for (int i = 0; i < n; ++i) comps.push_back(randomType(rng, depth - 1));
      return SemType::tuple(std::move(comps));
    }
    case 4: {
      std::vector<SemTypeP> comps;
      std::vector<std::string> fields;
      int n = 1 + pick(2);
      for (int i = 0; i < n; ++i) {
        comps.push_back(randomType(rng, depth - 1));
        fields.push_back("f" + std::to_string(i));
      }
      return SemType::record(std::move(fields), std::move(comps));
    }
    case 5: return SemType::array(rng() % 4, randomType(rng, depth - 1));
    default: return SemType::map(randomType(rng, depth - 1), randomType(rng, depth - 1));
  }
}

}  // namespace

TEST_CASE("property: enumeration length equals cardinality, distinct, increasing") {
  std::mt19937_64 rng(424242);
  int accepted = 0;
  while (accepted < 50) {
    SemTypeP t = randomType(rng, 3);
    uint64_t card;
    try {
      card = cardinality(*t);
    } catch (const CountOverflow&) {
      continue;
    }
    if (card > 100000) continue;
    ++accepted;
    CAPTURE(typeName(*t));
    uint64_t n = 0;
    Value prev;
    bool first = true;
    Seq<Value> seq = enumerateType(t);
    for (const auto* c = seq.force(); c; c = c->tail.force()) {
      if (!first) CHECK(compareValues(prev, c->head) < 0);
      CHECK(valueFits(c->head, *t));
      prev = c->head;
      first = false;
      ++n;
    }
    CHECK(n == card);
  }
}

TEST_CASE("lazy sequences are re-consumable and memoized") {
  int evals = 0;
  Seq<int> s = Seq<int>::lazy([&evals] {
    ++evals;
    return Seq<int>::cons(1, Seq<int>::single(2));
  });
  CHECK(toVector(s) == std::vector<int>{1, 2});
  CHECK(toVector(s) == std::vector<int>{1, 2});
  CHECK(evals == 1);
}

TEST_CASE("lazy sequences force only what is demanded") {
  bool touchedTail = false;
  Seq<int> s = Seq<int>::cons(1, Seq<int>::lazy([&touchedTail] {
    touchedTail = true;
    return Seq<int>::single(2);
  }));
  CHECK(s.force()->head == 1);
  CHECK(!touchedTail);
}
