#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "fspec/lazyseq.hpp"
#include "fspec/value.hpp"

namespace fspec {

struct SemType;
using SemTypeP = std::shared_ptr<const SemType>;

/// A resolved, finite type. Every SemType has cardinality ≥ 1. Integer
/// bounds on expression types are best-effort intervals; bounds on declared
/// types (parameters, variables, binders) are exact and drive enumeration
/// and dynamic range checks.
struct SemType {
  enum class Kind : uint8_t { Bool, Int, Set, Tuple, Record, Array, Map };

  Kind kind = Kind::Bool;
  int64_t lo = 0, hi = 0;               // Int
  uint64_t length = 0;                  // Array
  std::vector<SemTypeP> comps;          // Set elem / Tuple / Record / Array elem / Map dom,cod
  std::vector<std::string> fields;      // Record

  // Lazily materialized canonical enumeration, shared by every evaluation
  // that reaches this type node.
  mutable std::mutex cacheMu;
  mutable std::shared_ptr<const std::vector<Value>> cache;
  mutable bool cacheTried = false;

  static SemTypeP boolean();
  static SemTypeP integer(int64_t lo, int64_t hi);
  static SemTypeP set(SemTypeP elem);
  static SemTypeP tuple(std::vector<SemTypeP> comps);
  static SemTypeP record(std::vector<std::string> fields, std::vector<SemTypeP> comps);
  static SemTypeP array(uint64_t length, SemTypeP elem);
  static SemTypeP map(SemTypeP dom, SemTypeP cod);
};

/// Exact value count. Throws CountOverflow when the count exceeds uint64.
uint64_t cardinality(const SemType& t);

/// Shape compatibility: integer bounds are ignored (subranges are one
/// integer type at runtime); array lengths and record fields must match.
bool compatible(const SemType& a, const SemType& b);

/// Structural equality including integer bounds and array lengths.
bool sameType(const SemType& a, const SemType& b);

/// Coarse signature used in checker transcripts: every integer type prints
/// as ℤ, arrays drop their length: Set[Tuple[ℤ,ℤ]], Array[ℤ], …
std::string typeSig(const SemType& t);

/// Precise rendering for diagnostics: ℤ[0,20], Array[3,ℤ[-2,2]], …
std::string typeName(const SemType& t);

/// Dynamic check that a runtime value inhabits the declared type.
bool valueFits(const Value& v, const SemType& t);

/// Canonical enumeration: exactly cardinality(t) pairwise-distinct values,
/// strictly increasing under compareValues. Bool: false < true; Int
/// ascending; Tuple/Record/Array/Map lexicographic with the last component
/// varying fastest; Set by size, then lexicographic element lists.
Seq<Value> enumerateType(const SemTypeP& t);

/// The cached enumeration vector, or nullptr when the type is too large to
/// materialize (callers then fall back to the lazy sequence).
const std::vector<Value>* materialized(const SemTypeP& t);

}  // namespace fspec
