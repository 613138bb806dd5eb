#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace fspec {

/// Closed semantic value. Booleans and integers are stored inline; composite
/// values share immutable element vectors. Sets are canonical: elements
/// strictly increasing under compareValues, so equal sets are structurally
/// equal. Maps store (key, value) pairs flattened in key order.
class Value {
 public:
  enum class Kind : uint8_t { Bool, Int, Set, Tuple, Record, Array, Map };

  Value() : rep_(false) {}

  static Value boolean(bool b) { return Value(b); }
  static Value integer(int64_t i) { return Value(i); }
  static Value set(std::vector<Value> elems);      // sorts and deduplicates
  static Value setSorted(std::vector<Value> elems);  // already canonical
  static Value tuple(std::vector<Value> comps) { return composite(Kind::Tuple, std::move(comps)); }
  static Value record(std::vector<Value> comps) { return composite(Kind::Record, std::move(comps)); }
  static Value array(std::vector<Value> elems) { return composite(Kind::Array, std::move(elems)); }
  static Value map(std::vector<Value> inter) { return composite(Kind::Map, std::move(inter)); }

  Kind kind() const {
    if (std::holds_alternative<bool>(rep_)) return Kind::Bool;
    if (std::holds_alternative<int64_t>(rep_)) return Kind::Int;
    return std::get<CompP>(rep_)->kind;
  }

  bool asBool() const { return std::get<bool>(rep_); }
  int64_t asInt() const { return std::get<int64_t>(rep_); }
  const std::vector<Value>& elems() const { return std::get<CompP>(rep_)->elems; }

 private:
  struct Composite {
    Kind kind;
    std::vector<Value> elems;
  };
  using CompP = std::shared_ptr<const Composite>;

  explicit Value(bool b) : rep_(b) {}
  explicit Value(int64_t i) : rep_(i) {}
  explicit Value(CompP c) : rep_(std::move(c)) {}

  static Value composite(Kind k, std::vector<Value> elems) {
    return Value(std::make_shared<const Composite>(Composite{k, std::move(elems)}));
  }

  std::variant<bool, int64_t, CompP> rep_;
};

/// Strict total order consistent with canonical enumeration: false < true;
/// integers ascending; tuples/records/arrays/maps lexicographic; sets by
/// size first, then lexicographic element lists. Both values must inhabit
/// the same type. Returns <0, 0, >0.
int compareValues(const Value& a, const Value& b);

inline bool valueEquals(const Value& a, const Value& b) { return compareValues(a, b) == 0; }
inline bool valueLess(const Value& a, const Value& b) { return compareValues(a, b) < 0; }

/// User-visible syntax: true/false, decimal integers, [..] for tuples and
/// arrays, {..} for sets in canonical order, [k:v,..] for maps.
std::string formatValue(const Value& v);

// Set algebra over canonical element vectors.
bool setContains(const Value& set, const Value& elem);
bool setSubseteq(const Value& a, const Value& b);
Value setUnion(const Value& a, const Value& b);
Value setIntersect(const Value& a, const Value& b);
Value setDifference(const Value& a, const Value& b);

}  // namespace fspec
