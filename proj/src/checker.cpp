#include "fspec/checker.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "fspec/diagnostics.hpp"

namespace fspec {

namespace {

std::string signatureOf(const TDecl& op) {
  std::string sig;
  for (size_t i = 0; i < op.params.size(); ++i) {
    if (i) sig += ",";
    sig += typeSig(*op.params[i].type);
  }
  return sig;
}

std::string formatArgs(const std::vector<Value>& args) {
  std::string out;
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) out += ",";
    out += formatValue(args[i]);
  }
  return out;
}

Seq<std::vector<Value>> inputProduct(std::shared_ptr<const std::vector<SemTypeP>> types,
                                     size_t from) {
  using VS = Seq<std::vector<Value>>;
  if (from >= types->size()) return VS::single({});
  VS rest = inputProduct(types, from + 1);
  return flatMapSeq(enumerateType((*types)[from]), [rest](const Value& v) {
    return mapSeq(rest, [v](const std::vector<Value>& tail) {
      std::vector<Value> out;
      out.reserve(tail.size() + 1);
      out.push_back(v);
      out.insert(out.end(), tail.begin(), tail.end());
      return out;
    });
  });
}

uint64_t elapsedMs(std::chrono::steady_clock::time_point from) {
  return static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                   std::chrono::steady_clock::now() - from)
                                   .count());
}

enum class Outcome : uint8_t { Checked, Inadmissible, Error, Skipped };

struct ChunkResult {
  uint64_t start = 0, end = 0;
  std::vector<Outcome> outcomes;
  std::vector<std::string> output;
  std::optional<CheckError> error;
};

struct SharedState {
  std::atomic<uint64_t> nextStart{0};
  std::atomic<uint64_t> errorIndex{UINT64_MAX};
  std::atomic<uint64_t> completed{0};
  std::atomic<uint64_t> checked{0};
  std::atomic<uint64_t> inadmissible{0};
  std::mutex resultsMu;
  std::vector<ChunkResult> results;
  std::mutex outMu;
};

}  // namespace

uint64_t inputCount(const TDecl& op) {
  uint64_t total = 1;
  for (const auto& p : op.params) {
    uint64_t c = cardinality(*p.type);
    if (c != 0 && total > UINT64_MAX / c) throw CountOverflow("input count overflows");
    total *= c;
  }
  return total;
}

Seq<std::vector<Value>> enumerateInputs(const TDecl& op) {
  auto types = std::make_shared<std::vector<SemTypeP>>();
  for (const auto& p : op.params) types->push_back(p.type);
  return inputProduct(std::move(types), 0);
}

std::vector<std::pair<uint64_t, uint64_t>> partitionWork(uint64_t total, unsigned workers,
                                                         uint64_t chunkSize) {
  if (chunkSize == 0) {
    if (workers <= 1) {
      chunkSize = total;
    } else {
      uint64_t perWorker = (total + workers * 8 - 1) / (workers * 8);
      chunkSize = std::clamp<uint64_t>(perWorker, 1, 1024);
    }
  }
  std::vector<std::pair<uint64_t, uint64_t>> chunks;
  for (uint64_t start = 0; start < total; start += chunkSize)
    chunks.emplace_back(start, std::min(start + chunkSize, total));
  return chunks;
}

namespace {

/// Evaluates one input; returns its transcript lines (empty when silent or
/// inadmissible) and records the outcome.
Outcome runOneInput(const TypedSpec& spec, const TDecl& op, const CheckOptions& opts,
                    uint64_t index, const std::vector<Value>& args, std::string& output,
                    std::optional<CheckError>& error) {
  std::string buffer;
  auto sink = [&buffer](const std::string& line) { buffer += line + "\n"; };
  Evaluator ev(spec, opts.mode, sink);
  std::string argText = formatArgs(args);
  auto t0 = std::chrono::steady_clock::now();
  try {
    Evaluator::Invocation inv = ev.invokeOperation(op, args);
    if (!inv.admissible) return Outcome::Inadmissible;
    if (opts.mode == EvalMode::Deterministic) {
      buffer += "Run " + std::to_string(index) + " of deterministic function " + op.name +
                "(" + argText + "):\n";
      const auto* cell = inv.results.force();
      buffer += "Result (" + std::to_string(elapsedMs(t0)) + " ms): " +
                formatValue(cell->head) + "\n";
    } else {
      Seq<Value> rest = inv.results;
      for (uint64_t branch = 0;; ++branch) {
        buffer += "Branch " + std::to_string(branch) + ":" + std::to_string(index) +
                  " of nondeterministic function " + op.name + "(" + argText + "):\n";
        const auto* cell = rest.force();
        if (!cell) {
          buffer += "No more results (" + std::to_string(elapsedMs(t0)) + " ms).\n";
          break;
        }
        buffer += "Result (" + std::to_string(elapsedMs(t0)) + " ms): " +
                  formatValue(cell->head) + "\n";
        rest = cell->tail;
      }
    }
    if (!opts.silent) output = std::move(buffer);
    return Outcome::Checked;
  } catch (const EvalError& e) {
    error = CheckError{index, argText, e.kind(), e.span(), e.annotation(), e.reason()};
    return Outcome::Error;
  } catch (const std::exception& e) {
    error = CheckError{index, argText, ErrKind::Overflow, op.span, op.name, e.what()};
    return Outcome::Error;
  }
}

void workerLoop(const TypedSpec& spec, const TDecl& op, const CheckOptions& opts,
                uint64_t total, uint64_t chunk, SharedState& state, std::ostream& out) {
  Seq<std::vector<Value>> seq = enumerateInputs(op);
  uint64_t pos = 0;
  while (true) {
    uint64_t start = state.nextStart.fetch_add(chunk);
    if (start >= total) break;
    uint64_t end = std::min(start + chunk, total);
    if (start >= state.errorIndex.load()) break;
    while (pos < start) {
      seq = seq.force()->tail;
      ++pos;
    }
    ChunkResult res;
    res.start = start;
    res.end = end;
    res.outcomes.assign(end - start, Outcome::Skipped);
    res.output.assign(end - start, {});
    for (uint64_t idx = start; idx < end; ++idx) {
      if (idx > state.errorIndex.load()) break;
      const auto* cell = seq.force();
      const std::vector<Value>& args = cell->head;
      std::optional<CheckError> err;
      Outcome o = runOneInput(spec, op, opts, idx, args, res.output[idx - start], err);
      res.outcomes[idx - start] = o;
      seq = cell->tail;
      ++pos;
      if (o == Outcome::Error) {
        res.error = err;
        uint64_t cur = state.errorIndex.load();
        while (idx < cur && !state.errorIndex.compare_exchange_weak(cur, idx)) {
        }
        break;
      }
      if (o == Outcome::Checked) state.checked.fetch_add(1);
      else state.inadmissible.fetch_add(1);
      uint64_t done = state.completed.fetch_add(1) + 1;
      if (opts.progressEvery && done % opts.progressEvery == 0) {
        std::lock_guard<std::mutex> lock(state.outMu);
        out << done << " inputs (" << state.checked.load() << " checked, "
            << state.inadmissible.load() << " inadmissible, 0 ignored)...\n";
      }
    }
    {
      std::lock_guard<std::mutex> lock(state.resultsMu);
      state.results.push_back(std::move(res));
    }
  }
}

}  // namespace

CheckReport checkOperation(const TypedSpec& spec, const CheckOptions& opts,
                           std::ostream& out) {
  const TDecl* op = spec.find(opts.operationName);
  if (!op || op->isConst)
    throw std::invalid_argument("'" + opts.operationName + "' is not a checkable operation");
  CheckReport report;
  auto t0 = std::chrono::steady_clock::now();
  try {
    report.totalInputs = inputCount(*op);
  } catch (const CountOverflow& e) {
    out << "ERROR: " << e.what() << "\n";
    report.firstError = CheckError{0, "", ErrKind::Overflow, op->span, op->name, e.what()};
    return report;
  }
  report.nondetNote = opts.mode == EvalMode::Deterministic && op->containsChoice;

  out << "Executing " << op->name << "(" << signatureOf(*op) << ") with all "
      << report.totalInputs << " inputs.\n";
  if (!opts.silent) out << "Ignoring inadmissible inputs...\n";

  SharedState state;
  unsigned workers = std::max(1u, opts.workers);
  uint64_t chunk = opts.chunkSize;
  if (chunk == 0) {
    auto chunks = partitionWork(report.totalInputs, workers);
    chunk = chunks.empty() ? 1 : chunks.front().second - chunks.front().first;
  }
  if (chunk == 0) chunk = 1;

  if (workers == 1) {
    workerLoop(spec, *op, opts, report.totalInputs, chunk, state, out);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        workerLoop(spec, *op, opts, report.totalInputs, chunk, state, out);
      });
    for (auto& t : pool) t.join();
  }

  // aggregate in input order; counts are restricted to indices below the
  // first error so they are identical for every worker count
  std::sort(state.results.begin(), state.results.end(),
            [](const ChunkResult& a, const ChunkResult& b) { return a.start < b.start; });
  uint64_t errIdx = UINT64_MAX;
  for (const auto& res : state.results)
    if (res.error && res.error->inputIndex < errIdx) {
      errIdx = res.error->inputIndex;
      report.firstError = res.error;
    }
  uint64_t checked = 0, inadmissible = 0;
  for (const auto& res : state.results) {
    for (uint64_t idx = res.start; idx < res.end; ++idx) {
      if (idx >= errIdx) continue;
      Outcome o = res.outcomes[idx - res.start];
      if (o == Outcome::Checked) ++checked;
      else if (o == Outcome::Inadmissible) ++inadmissible;
      if (!opts.silent && !res.output[idx - res.start].empty())
        out << res.output[idx - res.start];
    }
  }
  report.checked = checked;
  report.inadmissible = inadmissible;
  report.elapsed = std::chrono::milliseconds(static_cast<int64_t>(elapsedMs(t0)));

  if (report.firstError) {
    report.skippedAfterError = report.totalInputs - checked - inadmissible - 1;
    const CheckError& e = *report.firstError;
    out << "ERROR in execution of " << op->name << "(" << e.args << "): evaluation of\n"
        << "  " << e.annotation << "\n"
        << "at line " << e.span.line << " in file " << e.span.file << ":\n"
        << "  " << e.reason << "\n"
        << "ERROR encountered in execution.\n";
    return report;
  }
  out << "Execution completed for ALL inputs (" << report.elapsed.count() << " ms, "
      << report.checked << " checked, " << report.inadmissible << " inadmissible).\n";
  if (report.nondetNote)
    out << "Not all nondeterministic branches may have been considered.\n";
  return report;
}

}  // namespace fspec
