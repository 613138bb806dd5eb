#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fspec/eval.hpp"
#include "fspec/typed.hpp"

namespace fspec {

struct CheckOptions {
  std::string operationName;
  EvalMode mode = EvalMode::Deterministic;
  bool silent = false;
  unsigned workers = 1;
  uint64_t progressEvery = 0;  // 0 = no progress lines
  uint64_t chunkSize = 0;      // 0 = automatic
};

struct CheckError {
  uint64_t inputIndex = 0;
  std::string args;  // formatted argument list, e.g. "0,1"
  ErrKind kind = ErrKind::AssertionFailed;
  SourceSpan span;
  std::string annotation;
  std::string reason;
};

struct CheckReport {
  uint64_t totalInputs = 0;
  uint64_t checked = 0;
  uint64_t inadmissible = 0;
  uint64_t skippedAfterError = 0;
  std::optional<CheckError> firstError;
  std::chrono::milliseconds elapsed{0};
  bool nondetNote = false;

  bool clean() const { return !firstError.has_value(); }
};

/// Number of argument tuples of op (product of parameter cardinalities).
/// Throws CountOverflow when it exceeds uint64.
uint64_t inputCount(const TDecl& op);

/// Lazy Cartesian product of the parameter domains in canonical order, the
/// last parameter varying fastest.
Seq<std::vector<Value>> enumerateInputs(const TDecl& op);

/// Static chunk boundaries covering [0, total); workers claim them in order
/// from a shared cursor. chunkSize 0 picks a size from total and workers.
std::vector<std::pair<uint64_t, uint64_t>> partitionWork(uint64_t total, unsigned workers,
                                                         uint64_t chunkSize = 0);

/// Exhaustively checks one operation: enumerates every input, invokes the
/// operation on each admissible one with full annotation checking, and
/// writes the transcript to out. Failures land in the report, never throw.
CheckReport checkOperation(const TypedSpec& spec, const CheckOptions& opts,
                           std::ostream& out);

}  // namespace fspec
