#include "fspec/value.hpp"

#include <algorithm>

namespace fspec {

Value Value::set(std::vector<Value> elems) {
  std::sort(elems.begin(), elems.end(), valueLess);
  elems.erase(std::unique(elems.begin(), elems.end(), valueEquals), elems.end());
  return composite(Kind::Set, std::move(elems));
}

Value Value::setSorted(std::vector<Value> elems) {
  return composite(Kind::Set, std::move(elems));
}

int compareValues(const Value& a, const Value& b) {
  switch (a.kind()) {
    case Value::Kind::Bool: {
      int x = a.asBool() ? 1 : 0, y = b.asBool() ? 1 : 0;
      return x - y;
    }
    case Value::Kind::Int: {
      int64_t x = a.asInt(), y = b.asInt();
      return x < y ? -1 : x > y ? 1 : 0;
    }
    default: {
      const auto& xs = a.elems();
      const auto& ys = b.elems();
      if (a.kind() == Value::Kind::Set && xs.size() != ys.size())
        return xs.size() < ys.size() ? -1 : 1;
      size_t n = std::min(xs.size(), ys.size());
      for (size_t i = 0; i < n; ++i) {
        int c = compareValues(xs[i], ys[i]);
        if (c != 0) return c;
      }
      if (xs.size() != ys.size()) return xs.size() < ys.size() ? -1 : 1;
      return 0;
    }
  }
}

std::string formatValue(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Bool:
      return v.asBool() ? "true" : "false";
    case Value::Kind::Int:
      return std::to_string(v.asInt());
    case Value::Kind::Set: {
      std::string out = "{";
      const auto& es = v.elems();
      for (size_t i = 0; i < es.size(); ++i) {
        if (i) out += ",";
        out += formatValue(es[i]);
      }
      return out + "}";
    }
    case Value::Kind::Map: {
      std::string out = "[";
      const auto& es = v.elems();
      for (size_t i = 0; i + 1 < es.size(); i += 2) {
        if (i) out += ",";
        out += formatValue(es[i]) + ":" + formatValue(es[i + 1]);
      }
      return out + "]";
    }
    default: {  // Tuple, Record, Array
      std::string out = "[";
      const auto& es = v.elems();
      for (size_t i = 0; i < es.size(); ++i) {
        if (i) out += ",";
        out += formatValue(es[i]);
      }
      return out + "]";
    }
  }
}

bool setContains(const Value& set, const Value& elem) {
  const auto& es = set.elems();
  return std::binary_search(es.begin(), es.end(), elem, valueLess);
}

bool setSubseteq(const Value& a, const Value& b) {
  const auto& xs = a.elems();
  const auto& ys = b.elems();
  return std::includes(ys.begin(), ys.end(), xs.begin(), xs.end(), valueLess);
}

Value setUnion(const Value& a, const Value& b) {
  const auto& xs = a.elems();
  const auto& ys = b.elems();
  std::vector<Value> out;
  out.reserve(xs.size() + ys.size());
  std::set_union(xs.begin(), xs.end(), ys.begin(), ys.end(), std::back_inserter(out),
                 valueLess);
  return Value::setSorted(std::move(out));
}

Value setIntersect(const Value& a, const Value& b) {
  const auto& xs = a.elems();
  const auto& ys = b.elems();
  std::vector<Value> out;
  std::set_intersection(xs.begin(), xs.end(), ys.begin(), ys.end(),
                        std::back_inserter(out), valueLess);
  return Value::setSorted(std::move(out));
}

Value setDifference(const Value& a, const Value& b) {
  const auto& xs = a.elems();
  const auto& ys = b.elems();
  std::vector<Value> out;
  std::set_difference(xs.begin(), xs.end(), ys.begin(), ys.end(),
                      std::back_inserter(out), valueLess);
  return Value::setSorted(std::move(out));
}

}  // namespace fspec
