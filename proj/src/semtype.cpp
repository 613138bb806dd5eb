#include "fspec/semtype.hpp"

#include <algorithm>

#include "fspec/diagnostics.hpp"

namespace fspec {

namespace {

// Types at or below this cardinality keep a materialized enumeration.
constexpr uint64_t kMaterializeLimit = 1u << 16;

uint64_t checkedMul(uint64_t a, uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) throw CountOverflow("type cardinality overflows");
  return a * b;
}

uint64_t checkedPow(uint64_t base, uint64_t exp) {
  uint64_t r = 1;
  for (uint64_t i = 0; i < exp; ++i) r = checkedMul(r, base);
  return r;
}

}  // namespace

SemTypeP SemType::boolean() {
  auto t = std::make_shared<SemType>();
  t->kind = Kind::Bool;
  return t;
}

SemTypeP SemType::integer(int64_t lo, int64_t hi) {
  auto t = std::make_shared<SemType>();
  t->kind = Kind::Int;
  t->lo = lo;
  t->hi = hi;
  return t;
}

SemTypeP SemType::set(SemTypeP elem) {
  auto t = std::make_shared<SemType>();
  t->kind = Kind::Set;
  t->comps = {std::move(elem)};
  return t;
}

SemTypeP SemType::tuple(std::vector<SemTypeP> comps) {
  auto t = std::make_shared<SemType>();
  t->kind = Kind::Tuple;
  t->comps = std::move(comps);
  return t;
}

SemTypeP SemType::record(std::vector<std::string> fields, std::vector<SemTypeP> comps) {
  auto t = std::make_shared<SemType>();
  t->kind = Kind::Record;
  t->fields = std::move(fields);
  t->comps = std::move(comps);
  return t;
}

SemTypeP SemType::array(uint64_t length, SemTypeP elem) {
  auto t = std::make_shared<SemType>();
  t->kind = Kind::Array;
  t->length = length;
  t->comps = {std::move(elem)};
  return t;
}

SemTypeP SemType::map(SemTypeP dom, SemTypeP cod) {
  auto t = std::make_shared<SemType>();
  t->kind = Kind::Map;
  t->comps = {std::move(dom), std::move(cod)};
  return t;
}

uint64_t cardinality(const SemType& t) {
  switch (t.kind) {
    case SemType::Kind::Bool:
      return 2;
    case SemType::Kind::Int: {
      // hi - lo + 1 computed in unsigned space; the full int64 interval
      // (2^64 values) does not fit a uint64 count.
      uint64_t span = static_cast<uint64_t>(t.hi) - static_cast<uint64_t>(t.lo);
      if (span == UINT64_MAX) throw CountOverflow("type cardinality overflows");
      return span + 1;
    }
    case SemType::Kind::Set: {
      uint64_t n = cardinality(*t.comps[0]);
      if (n >= 64) throw CountOverflow("type cardinality overflows");
      return uint64_t{1} << n;
    }
    case SemType::Kind::Tuple:
    case SemType::Kind::Record: {
      uint64_t r = 1;
      for (const auto& c : t.comps) r = checkedMul(r, cardinality(*c));
      return r;
    }
    case SemType::Kind::Array:
      return checkedPow(cardinality(*t.comps[0]), t.length);
    case SemType::Kind::Map:
      return checkedPow(cardinality(*t.comps[1]), cardinality(*t.comps[0]));
  }
  return 1;
}

bool compatible(const SemType& a, const SemType& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case SemType::Kind::Bool:
    case SemType::Kind::Int:
      return true;
    case SemType::Kind::Array:
      if (a.length != b.length) return false;
      break;
    case SemType::Kind::Record:
      if (a.fields != b.fields) return false;
      break;
    default:
      break;
  }
  if (a.comps.size() != b.comps.size()) return false;
  for (size_t i = 0; i < a.comps.size(); ++i)
    if (!compatible(*a.comps[i], *b.comps[i])) return false;
  return true;
}

bool sameType(const SemType& a, const SemType& b) {
  if (a.kind != b.kind || a.lo != b.lo || a.hi != b.hi || a.length != b.length ||
      a.fields != b.fields || a.comps.size() != b.comps.size())
    return false;
  for (size_t i = 0; i < a.comps.size(); ++i)
    if (!sameType(*a.comps[i], *b.comps[i])) return false;
  return true;
}

std::string typeSig(const SemType& t) {
  switch (t.kind) {
    case SemType::Kind::Bool: return "Bool";
    case SemType::Kind::Int: return "ℤ";
    case SemType::Kind::Set: return "Set[" + typeSig(*t.comps[0]) + "]";
    case SemType::Kind::Tuple: {
      std::string out = "Tuple[";
      for (size_t i = 0; i < t.comps.size(); ++i) {
        if (i) out += ",";
        out += typeSig(*t.comps[i]);
      }
      return out + "]";
    }
    case SemType::Kind::Record: {
      std::string out = "Record[";
      for (size_t i = 0; i < t.comps.size(); ++i) {
        if (i) out += ",";
        out += typeSig(*t.comps[i]);
      }
      return out + "]";
    }
    case SemType::Kind::Array: return "Array[" + typeSig(*t.comps[0]) + "]";
    case SemType::Kind::Map:
      return "Map[" + typeSig(*t.comps[0]) + "," + typeSig(*t.comps[1]) + "]";
  }
  return "?";
}

std::string typeName(const SemType& t) {
  switch (t.kind) {
    case SemType::Kind::Bool: return "Bool";
    case SemType::Kind::Int:
      if (t.lo == 0) return "ℕ[" + std::to_string(t.hi) + "]";
      return "ℤ[" + std::to_string(t.lo) + "," + std::to_string(t.hi) + "]";
    case SemType::Kind::Set: return "Set[" + typeName(*t.comps[0]) + "]";
    case SemType::Kind::Tuple: {
      std::string out = "Tuple[";
      for (size_t i = 0; i < t.comps.size(); ++i) {
        if (i) out += ",";
        out += typeName(*t.comps[i]);
      }
      return out + "]";
    }
    case SemType::Kind::Record: {
      std::string out = "Record[";
      for (size_t i = 0; i < t.comps.size(); ++i) {
        if (i) out += ",";
        out += t.fields[i] + ":" + typeName(*t.comps[i]);
      }
      return out + "]";
    }
    case SemType::Kind::Array:
      return "Array[" + std::to_string(t.length) + "," + typeName(*t.comps[0]) + "]";
    case SemType::Kind::Map:
      return "Map[" + typeName(*t.comps[0]) + "," + typeName(*t.comps[1]) + "]";
  }
  return "?";
}

bool valueFits(const Value& v, const SemType& t) {
  switch (t.kind) {
    case SemType::Kind::Bool:
      return v.kind() == Value::Kind::Bool;
    case SemType::Kind::Int:
      return v.kind() == Value::Kind::Int && v.asInt() >= t.lo && v.asInt() <= t.hi;
    case SemType::Kind::Set: {
      if (v.kind() != Value::Kind::Set) return false;
      for (const Value& e : v.elems())
        if (!valueFits(e, *t.comps[0])) return false;
      return true;
    }
    case SemType::Kind::Tuple:
    case SemType::Kind::Record: {
      if (v.kind() != (t.kind == SemType::Kind::Tuple ? Value::Kind::Tuple
                                                      : Value::Kind::Record))
        return false;
      if (v.elems().size() != t.comps.size()) return false;
      for (size_t i = 0; i < t.comps.size(); ++i)
        if (!valueFits(v.elems()[i], *t.comps[i])) return false;
      return true;
    }
    case SemType::Kind::Array: {
      if (v.kind() != Value::Kind::Array || v.elems().size() != t.length) return false;
      for (const Value& e : v.elems())
        if (!valueFits(e, *t.comps[0])) return false;
      return true;
    }
    case SemType::Kind::Map: {
      if (v.kind() != Value::Kind::Map) return false;
      const auto& es = v.elems();
      for (size_t i = 0; i + 1 < es.size(); i += 2) {
        if (!valueFits(es[i], *t.comps[0]) || !valueFits(es[i + 1], *t.comps[1]))
          return false;
      }
      return true;
    }
  }
  return false;
}

namespace {

Seq<Value> intRange(int64_t next, int64_t hi) {
  if (next > hi) return Seq<Value>::empty();
  return Seq<Value>::lazy([next, hi] {
    return Seq<Value>::cons(Value::integer(next),
                            next == hi ? Seq<Value>::empty() : intRange(next + 1, hi));
  });
}

using VecSeq = Seq<std::vector<Value>>;

/// Cartesian product of component enumerations, last component fastest.
/// The suffix sequence is shared so its cells are computed once.
VecSeq productSeq(std::vector<Seq<Value>> comps, size_t from) {
  if (from >= comps.size()) return VecSeq::single({});
  VecSeq rest = productSeq(comps, from + 1);
  return flatMapSeq(comps[from], [rest](const Value& v) {
    return mapSeq(rest, [v](const std::vector<Value>& tail) {
      std::vector<Value> out;
      out.reserve(tail.size() + 1);
      out.push_back(v);
      out.insert(out.end(), tail.begin(), tail.end());
      return out;
    });
  });
}

/// All k-element sorted selections of `elems`, lexicographically.
VecSeq combinations(Seq<Value> elems, uint64_t k) {
  if (k == 0) return VecSeq::single({});
  return VecSeq::lazy([elems, k] {
    const Seq<Value>::Cell* c = elems.force();
    if (!c) return VecSeq::empty();
    VecSeq withHead = mapSeq(combinations(c->tail, k - 1), [head = c->head](
                                                               const std::vector<Value>& rest) {
      std::vector<Value> out;
      out.reserve(rest.size() + 1);
      out.push_back(head);
      out.insert(out.end(), rest.begin(), rest.end());
      return out;
    });
    return VecSeq::append(withHead, combinations(c->tail, k));
  });
}

Seq<Value> setsBySize(Seq<Value> elems, uint64_t k, uint64_t maxK) {
  if (k > maxK) return Seq<Value>::empty();
  return Seq<Value>::lazy([elems, k, maxK] {
    return Seq<Value>::append(
        mapSeq(combinations(elems, k),
               [](const std::vector<Value>& es) { return Value::setSorted(es); }),
        setsBySize(elems, k + 1, maxK));
  });
}

Seq<Value> enumerateUncached(const SemTypeP& t);

Seq<Value> mapEnumeration(const SemTypeP& t) {
  // Total maps need the materialized domain for the key column.
  const std::vector<Value>* dom = materialized(t->comps[0]);
  if (!dom) throw CountOverflow("map domain too large to enumerate");
  std::vector<Seq<Value>> slots(dom->size(), enumerateType(t->comps[1]));
  auto keys = std::make_shared<std::vector<Value>>(*dom);
  return mapSeq(productSeq(std::move(slots), 0), [keys](const std::vector<Value>& cods) {
    std::vector<Value> inter;
    inter.reserve(cods.size() * 2);
    for (size_t i = 0; i < cods.size(); ++i) {
      inter.push_back((*keys)[i]);
      inter.push_back(cods[i]);
    }
    return Value::map(std::move(inter));
  });
}

Seq<Value> enumerateUncached(const SemTypeP& t) {
  switch (t->kind) {
    case SemType::Kind::Bool:
      return Seq<Value>::cons(Value::boolean(false),
                              Seq<Value>::single(Value::boolean(true)));
    case SemType::Kind::Int:
      return intRange(t->lo, t->hi);
    case SemType::Kind::Set: {
      uint64_t n = cardinality(*t->comps[0]);
      return setsBySize(enumerateType(t->comps[0]), 0, n);
    }
    case SemType::Kind::Tuple:
    case SemType::Kind::Record: {
      std::vector<Seq<Value>> comps;
      comps.reserve(t->comps.size());
      for (const auto& c : t->comps) comps.push_back(enumerateType(c));
      bool isTuple = t->kind == SemType::Kind::Tuple;
      return mapSeq(productSeq(std::move(comps), 0),
                    [isTuple](const std::vector<Value>& vs) {
                      return isTuple ? Value::tuple(vs) : Value::record(vs);
                    });
    }
    case SemType::Kind::Array: {
      std::vector<Seq<Value>> comps(t->length, enumerateType(t->comps[0]));
      return mapSeq(productSeq(std::move(comps), 0),
                    [](const std::vector<Value>& vs) { return Value::array(vs); });
    }
    case SemType::Kind::Map:
      return mapEnumeration(t);
  }
  return Seq<Value>::empty();
}

}  // namespace

const std::vector<Value>* materialized(const SemTypeP& t) {
  {
    std::lock_guard<std::mutex> lock(t->cacheMu);
    if (t->cacheTried) return t->cache ? t->cache.get() : nullptr;
  }
  std::shared_ptr<const std::vector<Value>> vec;
  try {
    if (cardinality(*t) <= kMaterializeLimit)
      vec = std::make_shared<const std::vector<Value>>(toVector(enumerateUncached(t)));
  } catch (const CountOverflow&) {
    // too big; leave uncached
  }
  std::lock_guard<std::mutex> lock(t->cacheMu);
  if (!t->cacheTried) {
    t->cache = std::move(vec);
    t->cacheTried = true;
  }
  return t->cache ? t->cache.get() : nullptr;
}

Seq<Value> enumerateType(const SemTypeP& t) {
  if (materialized(t)) {
    std::lock_guard<std::mutex> lock(t->cacheMu);
    return Seq<Value>::fromVector(t->cache, 0);
  }
  return enumerateUncached(t);
}

}  // namespace fspec
