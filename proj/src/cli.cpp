#include "fspec/cli.hpp"

#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "fspec/checker.hpp"
#include "fspec/diagnostics.hpp"
#include "fspec/parser.hpp"
#include "fspec/printer.hpp"
#include "fspec/scaffold.hpp"
#include "fspec/typecheck.hpp"

namespace fspec {

namespace {

constexpr int EXIT_OK = 0;
constexpr int EXIT_VIOLATION = 1;
constexpr int EXIT_FRONTEND = 2;
constexpr int EXIT_USAGE = 3;

struct CommonArgs {
  std::string file;
  std::string op;
  std::vector<std::string> consts;
  int64_t defaultValue = 5;
  bool silent = false;
  bool nondet = false;
  unsigned workers = 1;
  uint64_t progress = 0;
};

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::ios_base::failure("cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::map<std::string, int64_t> parseConstArgs(const std::vector<std::string>& consts) {
  std::map<std::string, int64_t> out;
  for (const auto& c : consts) {
    size_t eq = c.find('=');
    if (eq == std::string::npos || eq == 0)
      throw CLI::ValidationError("--const", "expected NAME=VALUE, got '" + c + "'");
    std::string name = c.substr(0, eq);
    int64_t value = 0;
    try {
      size_t used = 0;
      value = std::stoll(c.substr(eq + 1), &used);
      if (used != c.size() - eq - 1) throw std::invalid_argument(c);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--const", "expected NAME=VALUE, got '" + c + "'");
    }
    if (value < 0)
      throw CLI::ValidationError("--const", "constant values must be non-negative");
    out[name] = value;
  }
  return out;
}

struct LoadedSpec {
  ast::Spec ast;
  ConstEnv consts;
  TypedSpec typed;
};

LoadedSpec loadSpec(const CommonArgs& args) {
  LoadedSpec loaded;
  std::string source = readFile(args.file);
  loaded.ast = parseSource(source, args.file);
  loaded.consts = resolveConstants(loaded.ast, parseConstArgs(args.consts),
                                   args.defaultValue);
  loaded.typed = typecheckSpec(loaded.ast, loaded.consts);
  return loaded;
}

void addCommonOptions(CLI::App* cmd, CommonArgs& args, bool withChecking) {
  cmd->add_option("file", args.file, "specification file")->required();
  cmd->add_option("--const", args.consts,
                  "give an unspecified constant a value, as NAME=VALUE");
  cmd->add_option("--default", args.defaultValue,
                  "value for unspecified constants without an override")
      ->check(CLI::NonNegativeNumber);
  if (withChecking) {
    cmd->add_option("--op", args.op, "operation to check")->required();
    cmd->add_flag("--nondet", args.nondet, "enumerate all nondeterministic branches");
    cmd->add_option("--workers", args.workers, "number of worker threads")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--progress", args.progress,
                    "print a progress line every N inputs (0 = never)");
  }
}

int runCheck(const CommonArgs& args, bool silent, std::ostream& out, std::ostream& err) {
  LoadedSpec loaded = loadSpec(args);
  const TDecl* op = loaded.typed.find(args.op);
  if (!op || op->isConst) {
    err << "error: unknown operation '" << args.op << "'";
    if (op && op->isConst) err << " (it is a constant, checked at load time)";
    err << "\n";
    return EXIT_USAGE;
  }
  CheckOptions opts;
  opts.operationName = args.op;
  opts.mode = args.nondet ? EvalMode::Nondeterministic : EvalMode::Deterministic;
  opts.silent = silent;
  opts.workers = args.workers;
  opts.progressEvery = args.progress;
  CheckReport report = checkOperation(loaded.typed, opts, out);
  return report.clean() ? EXIT_OK : EXIT_VIOLATION;
}

}  // namespace

int cliMain(const std::vector<std::string>& argsIn, std::ostream& out, std::ostream& err) {
  CLI::App app{"finite-model specification checker"};
  app.require_subcommand(1);

  CommonArgs parseArgs, typecheckArgs, listArgs, checkArgs, runArgs, scaffoldArgs;
  std::string preName, postName, outFile;

  CLI::App* cmdParse = app.add_subcommand("parse", "parse a specification");
  cmdParse->add_option("file", parseArgs.file, "specification file")->required();

  CLI::App* cmdTypecheck =
      app.add_subcommand("typecheck", "resolve constants and type-check");
  addCommonOptions(cmdTypecheck, typecheckArgs, /*withChecking=*/false);

  CLI::App* cmdListOps =
      app.add_subcommand("list-ops", "list the checkable operations");
  addCommonOptions(cmdListOps, listArgs, /*withChecking=*/false);

  CLI::App* cmdCheck = app.add_subcommand("check", "exhaustively check one operation");
  addCommonOptions(cmdCheck, checkArgs, /*withChecking=*/true);
  cmdCheck->add_flag("--silent", checkArgs.silent, "suppress per-input output");

  CLI::App* cmdRun =
      app.add_subcommand("run", "check one operation with per-input output");
  addCommonOptions(cmdRun, runArgs, /*withChecking=*/true);

  CLI::App* cmdScaffold = app.add_subcommand(
      "scaffold", "generate specification-validation theorems from PRE and POST");
  cmdScaffold->add_option("file", scaffoldArgs.file, "specification file")->required();
  cmdScaffold->add_option("--pre", preName, "precondition predicate")->required();
  cmdScaffold->add_option("--post", postName, "postcondition predicate")->required();
  cmdScaffold->add_option("--out", outFile, "append the generated text to this file");

  std::vector<std::string> args = argsIn;
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return EXIT_OK;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return EXIT_USAGE;
  }

  try {
    if (cmdParse->parsed()) {
      ast::Spec spec = parseSource(readFile(parseArgs.file), parseArgs.file);
      out << "ok: " << spec.decls.size() << " declarations\n";
      return EXIT_OK;
    }
    if (cmdTypecheck->parsed()) {
      LoadedSpec loaded = loadSpec(typecheckArgs);
      out << "ok: " << loaded.typed.decls.size() << " declarations";
      if (!loaded.consts.unspecified.empty()) {
        out << " (";
        bool first = true;
        for (const auto& [name, v] : loaded.consts.unspecified) {
          if (!first) out << ", ";
          first = false;
          out << name << "=" << v;
        }
        out << ")";
      }
      out << "\n";
      return EXIT_OK;
    }
    if (cmdListOps->parsed()) {
      LoadedSpec loaded = loadSpec(listArgs);
      for (const auto& d : loaded.typed.decls) {
        if (d->isConst || d->kind == ast::Decl::Kind::Val) continue;
        const char* kind = d->kind == ast::Decl::Kind::Fun       ? "fun"
                           : d->kind == ast::Decl::Kind::Pred    ? "pred"
                           : d->kind == ast::Decl::Kind::Theorem ? "theorem"
                                                                 : "proc";
        out << kind << " " << d->name << "(";
        for (size_t i = 0; i < d->params.size(); ++i) {
          if (i) out << ",";
          out << typeSig(*d->params[i].type);
        }
        out << ")";
        if (d->kind == ast::Decl::Kind::Fun || d->kind == ast::Decl::Kind::Proc)
          out << ": " << typeSig(*d->resultType);
        out << "\n";
      }
      return EXIT_OK;
    }
    if (cmdCheck->parsed()) return runCheck(checkArgs, checkArgs.silent, out, err);
    if (cmdRun->parsed()) return runCheck(runArgs, /*silent=*/false, out, err);
    if (cmdScaffold->parsed()) {
      ast::Spec spec = parseSource(readFile(scaffoldArgs.file), scaffoldArgs.file);
      SpecSkeleton skel = buildSkeleton(spec, preName, postName);
      std::string text = renderSuite(generateValidationTheorems(skel));
      if (outFile.empty()) {
        out << text;
      } else {
        std::ofstream f(outFile, std::ios::app);
        if (!f) throw std::ios_base::failure("cannot open file '" + outFile + "'");
        f << "\n" << text;
        out << "appended " << skel.postName << " validation suite to " << outFile << "\n";
      }
      return EXIT_OK;
    }
  } catch (const Diagnostic& e) {
    err << e.span().str() << ": error: " << e.message() << "\n";
    return EXIT_FRONTEND;
  } catch (const TheoremFailed& e) {
    err << "error: " << e.what() << "\n";
    return EXIT_VIOLATION;
  } catch (const UnknownConstant& e) {
    err << "error: " << e.what() << "\n";
    return EXIT_FRONTEND;
  } catch (const UnknownPredicate& e) {
    err << "error: " << e.what() << "\n";
    return EXIT_USAGE;
  } catch (const CountOverflow& e) {
    err << "error: " << e.what() << "\n";
    return EXIT_FRONTEND;
  } catch (const EvalError& e) {
    err << e.span().str() << ": error: " << e.reason() << "\n";
    return EXIT_FRONTEND;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << "\n";
    return EXIT_USAGE;
  }
  return EXIT_USAGE;
}

}  // namespace fspec
