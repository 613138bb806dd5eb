#include "fspec/printer.hpp"

#include <sstream>

namespace fspec {

using ast::BinOp;
using ast::Cmd;
using ast::Decl;
using ast::Expr;
using ast::TypeExpr;
using ast::UnOp;

namespace {

// Mirrors the parser's precedence table.
constexpr int PREC_EXTENDER = 0;  // quantifier-like forms that extend right
constexpr int PREC_ATOM = 12;

struct OpText {
  const char* text;
  int prec;
  bool rightAssoc;
  bool spaced;
};

OpText opText(BinOp op) {
  switch (op) {
    case BinOp::Iff: return {"⇔", 1, false, true};
    case BinOp::Implies: return {"⇒", 2, true, true};
    case BinOp::Or: return {"∨", 3, false, true};
    case BinOp::And: return {"∧", 4, false, true};
    case BinOp::Eq: return {"=", 5, false, true};
    case BinOp::Ne: return {"≠", 5, false, true};
    case BinOp::Lt: return {"<", 5, false, true};
    case BinOp::Le: return {"≤", 5, false, true};
    case BinOp::Gt: return {">", 5, false, true};
    case BinOp::Ge: return {"≥", 5, false, true};
    case BinOp::In: return {"∈", 5, false, true};
    case BinOp::Subseteq: return {"⊆", 5, false, true};
    case BinOp::Add: return {"+", 7, false, false};
    case BinOp::Sub: return {"-", 7, false, false};
    case BinOp::Union: return {"∪", 7, false, true};
    case BinOp::Diff: return {"\\", 7, false, true};
    case BinOp::Mul: return {"·", 8, false, false};
    case BinOp::Div: return {"/", 8, false, false};
    case BinOp::Mod: return {"%", 8, false, false};
    case BinOp::Intersect: return {"∩", 8, false, true};
    case BinOp::Pow: return {"^", 9, true, false};
  }
  return {"?", 0, false, true};
}

int exprPrec(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Binary: return opText(e.bin).prec;
    case Expr::Kind::SetRange: return 6;
    case Expr::Kind::Unary: return 10;
    case Expr::Kind::Proj:
    case Expr::Kind::Index: return 11;
    case Expr::Kind::Quant:
    case Expr::Kind::Sum:
    case Expr::Kind::Choose:
    case Expr::Kind::IfE:
    case Expr::Kind::LetE:
    case Expr::Kind::Print: return PREC_EXTENDER;
    default: return PREC_ATOM;
  }
}

class Printer {
 public:
  std::string type(const TypeExpr& t) {
    std::ostringstream os;
    printTypeTo(os, t);
    return os.str();
  }

  std::string expr(const Expr& e, int minPrec = PREC_EXTENDER) {
    std::ostringstream os;
    printExprTo(os, e, minPrec);
    return os.str();
  }

  void printTypeTo(std::ostringstream& os, const TypeExpr& t) {
    using K = TypeExpr::Kind;
    switch (t.kind) {
      case K::Bool: os << "Bool"; break;
      case K::NatUnbounded: os << "ℕ"; break;
      case K::Nat:
        os << "ℕ[";
        printExprTo(os, *t.bound, PREC_EXTENDER);
        os << "]";
        break;
      case K::Int:
        os << "ℤ[";
        printExprTo(os, *t.bound, PREC_EXTENDER);
        os << ", ";
        printExprTo(os, *t.hi, PREC_EXTENDER);
        os << "]";
        break;
      case K::Set:
        os << "Set[";
        printTypeTo(os, *t.args[0]);
        os << "]";
        break;
      case K::Tuple: {
        os << "Tuple[";
        for (size_t i = 0; i < t.args.size(); ++i) {
          if (i) os << ", ";
          printTypeTo(os, *t.args[i]);
        }
        os << "]";
        break;
      }
      case K::Record: {
        os << "Record[";
        for (size_t i = 0; i < t.args.size(); ++i) {
          if (i) os << ", ";
          os << t.fields[i] << ":";
          printTypeTo(os, *t.args[i]);
        }
        os << "]";
        break;
      }
      case K::Array:
        os << "Array[";
        printExprTo(os, *t.bound, PREC_EXTENDER);
        os << ", ";
        printTypeTo(os, *t.args[0]);
        os << "]";
        break;
      case K::Map:
        os << "Map[";
        printTypeTo(os, *t.args[0]);
        os << ", ";
        printTypeTo(os, *t.args[1]);
        os << "]";
        break;
      case K::Named: os << t.name; break;
    }
  }

  void printBinders(std::ostringstream& os, const std::vector<ast::Binder>& binders,
                    const ast::ExprPtr& filter) {
    for (size_t i = 0; i < binders.size(); ++i) {
      if (i) os << ", ";
      os << binders[i].name;
      if (binders[i].type) {
        os << ":";
        printTypeTo(os, *binders[i].type);
      } else {
        os << "∈";
        printExprTo(os, *binders[i].domain, PREC_ATOM);
      }
    }
    if (filter) {
      os << " with ";
      printExprTo(os, *filter, PREC_EXTENDER);
    }
  }

  void printExprTo(std::ostringstream& os, const Expr& e, int minPrec) {
    bool paren = exprPrec(e) < minPrec;
    if (paren) os << "(";
    printExprBare(os, e);
    if (paren) os << ")";
  }

  void printExprBare(std::ostringstream& os, const Expr& e) {
    using K = Expr::Kind;
    switch (e.kind) {
      case K::IntLit: os << e.intValue; break;
      case K::BoolLit: os << (e.boolValue ? "⊤" : "⊥"); break;
      case K::Var: os << e.name; break;
      case K::Unary:
        os << (e.un == UnOp::Not ? "¬" : "-");
        printExprTo(os, *e.args[0], 10);
        break;
      case K::Binary: {
        OpText op = opText(e.bin);
        int lp = op.rightAssoc ? op.prec + 1 : op.prec;
        int rp = op.rightAssoc ? op.prec : op.prec + 1;
        printExprTo(os, *e.args[0], lp);
        os << (op.spaced ? " " : "") << op.text << (op.spaced ? " " : "");
        printExprTo(os, *e.args[1], rp);
        break;
      }
      case K::Call: {
        os << e.name << "(";
        for (size_t i = 0; i < e.args.size(); ++i) {
          if (i) os << ", ";
          printExprTo(os, *e.args[i], PREC_EXTENDER);
        }
        os << ")";
        break;
      }
      case K::TupleE: {
        os << "⟨";
        for (size_t i = 0; i < e.args.size(); ++i) {
          if (i) os << ", ";
          printExprTo(os, *e.args[i], PREC_EXTENDER);
        }
        os << "⟩";
        break;
      }
      case K::Proj:
        printExprTo(os, *e.args[0], 11);
        os << "." << e.projIndex;
        break;
      case K::Index:
        printExprTo(os, *e.args[0], 11);
        os << "[";
        printExprTo(os, *e.args[1], PREC_EXTENDER);
        os << "]";
        break;
      case K::ArrayCtor:
        os << "Array[";
        printExprTo(os, *e.args[0], PREC_EXTENDER);
        os << ", ";
        printTypeTo(os, *e.typeArg);
        os << "](";
        printExprTo(os, *e.args[1], PREC_EXTENDER);
        os << ")";
        break;
      case K::SetLit: {
        os << "{";
        for (size_t i = 0; i < e.args.size(); ++i) {
          if (i) os << ", ";
          printExprTo(os, *e.args[i], PREC_EXTENDER);
        }
        os << "}";
        break;
      }
      case K::SetEmpty:
        os << "∅[";
        printTypeTo(os, *e.typeArg);
        os << "]";
        break;
      case K::SetRange:
        printExprTo(os, *e.args[0], 7);
        os << "..";
        printExprTo(os, *e.args[1], 7);
        break;
      case K::SetCompr:
        os << "{";
        printExprTo(os, *e.body, PREC_EXTENDER);
        os << " | ";
        printBinders(os, e.binders, e.filter);
        os << "}";
        break;
      case K::Quant:
        os << (e.isExists ? "∃" : "∀");
        printBinders(os, e.binders, e.filter);
        os << ". ";
        printExprTo(os, *e.body, PREC_EXTENDER);
        break;
      case K::Sum:
        os << "∑ ";
        printBinders(os, e.binders, e.filter);
        os << ". ";
        printExprTo(os, *e.body, PREC_EXTENDER);
        break;
      case K::Choose:
        os << "choose ";
        printBinders(os, e.binders, e.filter);
        break;
      case K::IfE:
        os << "if ";
        printExprTo(os, *e.args[0], PREC_EXTENDER);
        os << " then ";
        printExprTo(os, *e.args[1], PREC_EXTENDER);
        os << " else ";
        printExprTo(os, *e.args[2], PREC_EXTENDER);
        break;
      case K::LetE:
        os << "let " << e.name << " = ";
        // keep the initializer above the `in` terminator's precedence
        printExprTo(os, *e.args[0], 6);
        os << " in ";
        printExprTo(os, *e.body, PREC_EXTENDER);
        break;
      case K::Print:
        os << "print ";
        printExprTo(os, *e.args[0], PREC_EXTENDER);
        break;
      case K::SetSize:
        os << "|";
        printExprTo(os, *e.args[0], PREC_EXTENDER);
        os << "|";
        break;
    }
  }

  void printLoopSpec(std::ostringstream& os, const ast::LoopSpec& loop,
                     const std::string& indent) {
    for (const auto& inv : loop.invariants)
      os << indent << "invariant " << expr(*inv) << ";\n";
    if (loop.decreases)
      os << indent << "decreases " << expr(*loop.decreases) << ";\n";
  }

  void printCmd(std::ostringstream& os, const Cmd& c, int depth) {
    std::string indent(static_cast<size_t>(depth) * 2, ' ');
    std::string inner(static_cast<size_t>(depth + 1) * 2, ' ');
    using K = Cmd::Kind;
    switch (c.kind) {
      case K::VarDecl:
        os << indent << "var " << c.name << ":" << type(*c.type) << " := "
           << expr(*c.e1) << ";\n";
        break;
      case K::Assign:
        os << indent << c.name;
        if (c.e1) os << "[" << expr(*c.e1) << "]";
        os << " := " << expr(*c.e2) << ";\n";
        break;
      case K::Block:
        os << indent << "{\n";
        for (const auto& sub : c.cmds) printCmd(os, *sub, depth + 1);
        os << indent << "}\n";
        break;
      case K::If:
        os << indent << "if " << expr(*c.e1) << " then\n";
        printCmd(os, *c.c1, depth + 1);
        if (c.c2) {
          os << indent << "else\n";
          printCmd(os, *c.c2, depth + 1);
        }
        break;
      case K::While:
        os << indent << "while " << expr(*c.e1) << " do\n";
        printLoopSpec(os, c.loop, inner);
        printCmd(os, *c.c1, depth);
        break;
      case K::ForCount: {
        os << indent << "for var " << c.name << ":" << type(*c.type) << " := "
           << expr(*c.e1) << "; " << expr(*c.e2) << "; " << c.update->name;
        if (c.update->e1) os << "[" << expr(*c.update->e1) << "]";
        os << " := " << expr(*c.update->e2) << " do\n";
        printLoopSpec(os, c.loop, inner);
        printCmd(os, *c.c1, depth);
        break;
      }
      case K::ForIn:
        os << indent << "for " << c.name << "∈" << expr(*c.e1, PREC_ATOM) << " do\n";
        printLoopSpec(os, c.loop, inner);
        printCmd(os, *c.c1, depth);
        break;
      case K::ChooseCmd: {
        std::ostringstream b;
        printBinders(b, c.binders, c.filter);
        os << indent << "choose " << b.str() << ";\n";
        break;
      }
      case K::ChooseThenElse: {
        std::ostringstream b;
        printBinders(b, c.binders, c.filter);
        os << indent << "choose " << b.str() << " then\n";
        printCmd(os, *c.c1, depth + 1);
        os << indent << "else\n";
        printCmd(os, *c.c2, depth + 1);
        break;
      }
      case K::ChooseDo: {
        std::ostringstream b;
        printBinders(b, c.binders, c.filter);
        os << indent << "choose " << b.str() << " do\n";
        printLoopSpec(os, c.loop, inner);
        printCmd(os, *c.c1, depth);
        break;
      }
      case K::Assert:
        os << indent << "assert " << expr(*c.e1) << ";\n";
        break;
    }
  }

  void printContract(std::ostringstream& os, const ast::Contract& c) {
    if (c.requires_) os << "  requires " << expr(*c.requires_) << ";\n";
    if (c.ensures_) os << "  ensures " << expr(*c.ensures_) << ";\n";
    if (c.decreases_) os << "  decreases " << expr(*c.decreases_) << ";\n";
  }

  void printParams(std::ostringstream& os, const std::vector<ast::Param>& params) {
    os << "(";
    for (size_t i = 0; i < params.size(); ++i) {
      if (i) os << ", ";
      os << params[i].name << ":" << type(*params[i].type);
    }
    os << ")";
  }

  std::string decl(const Decl& d) {
    std::ostringstream os;
    bool hasContract =
        d.contract.requires_ || d.contract.ensures_ || d.contract.decreases_;
    switch (d.kind) {
      case Decl::Kind::Val:
        os << "val " << d.name;
        if (d.type) os << ": " << type(*d.type);
        if (d.value) os << " = " << expr(*d.value);
        os << ";\n";
        break;
      case Decl::Kind::Type:
        os << "type " << d.name << " = " << type(*d.type) << ";\n";
        break;
      case Decl::Kind::Fun:
        os << "fun " << d.name;
        printParams(os, d.params);
        os << ": " << type(*d.type);
        if (hasContract) {
          os << "\n";
          printContract(os, d.contract);
          os << "= " << expr(*d.value) << ";\n";
        } else {
          os << " = " << expr(*d.value) << ";\n";
        }
        break;
      case Decl::Kind::Pred:
      case Decl::Kind::Theorem:
        os << (d.kind == Decl::Kind::Pred ? "pred " : "theorem ") << d.name;
        if (d.kind == Decl::Kind::Pred || !d.params.empty()) printParams(os, d.params);
        if (hasContract) {
          os << "\n";
          printContract(os, d.contract);
          os << "⇔ " << expr(*d.value) << ";\n";
        } else {
          os << " ⇔ " << expr(*d.value) << ";\n";
        }
        break;
      case Decl::Kind::Proc:
        os << "proc " << d.name;
        printParams(os, d.params);
        os << ": " << type(*d.type) << "\n";
        printContract(os, d.contract);
        os << "{\n";
        for (const auto& c : d.body) printCmd(os, *c, 1);
        os << "  return " << expr(*d.returnExpr) << ";\n";
        os << "}\n";
        break;
    }
    return os.str();
  }
};

}  // namespace

std::string prettyPrint(const ast::Spec& spec) {
  Printer p;
  std::string out;
  for (size_t i = 0; i < spec.decls.size(); ++i) {
    if (i) out += "\n";
    out += p.decl(*spec.decls[i]);
  }
  return out;
}

std::string printDecl(const ast::Decl& decl) { return Printer{}.decl(decl); }

std::string printExpr(const ast::Expr& e) { return Printer{}.expr(e); }

std::string printType(const ast::TypeExpr& t) { return Printer{}.type(t); }

}  // namespace fspec
