#include "fspec/parser.hpp"

#include <memory>
#include <utility>

#include "fspec/diagnostics.hpp"
#include "fspec/lexer.hpp"

namespace fspec {

using ast::Binder;
using ast::BinOp;
using ast::Cmd;
using ast::CmdPtr;
using ast::Decl;
using ast::DeclPtr;
using ast::Expr;
using ast::ExprPtr;
using ast::Param;
using ast::Spec;
using ast::TypeExpr;
using ast::TypeExprPtr;
using ast::UnOp;

namespace {

using T = TokenType;
using EK = Expr::Kind;
using CK = Cmd::Kind;

struct BinInfo {
  BinOp op;
  int prec;        // higher binds tighter
  bool rightAssoc;
};

// Precedence bands, loosest first: ⇔, ⇒, ∨, ∧, relational, .., additive,
// multiplicative, ^. Unary and postfix are handled separately.
constexpr int PREC_IFF = 1;
constexpr int PREC_IMPLIES = 2;
constexpr int PREC_OR = 3;
constexpr int PREC_AND = 4;
constexpr int PREC_REL = 5;
constexpr int PREC_RANGE = 6;
constexpr int PREC_ADD = 7;
constexpr int PREC_MUL = 8;
constexpr int PREC_POW = 9;

bool binaryInfo(TokenType t, BinInfo& out) {
  switch (t) {
    case T::Iff: out = {BinOp::Iff, PREC_IFF, false}; return true;
    case T::Implies: out = {BinOp::Implies, PREC_IMPLIES, true}; return true;
    case T::Or: out = {BinOp::Or, PREC_OR, false}; return true;
    case T::And: out = {BinOp::And, PREC_AND, false}; return true;
    case T::Eq: out = {BinOp::Eq, PREC_REL, false}; return true;
    case T::Ne: out = {BinOp::Ne, PREC_REL, false}; return true;
    case T::Lt: out = {BinOp::Lt, PREC_REL, false}; return true;
    case T::Le: out = {BinOp::Le, PREC_REL, false}; return true;
    case T::Gt: out = {BinOp::Gt, PREC_REL, false}; return true;
    case T::Ge: out = {BinOp::Ge, PREC_REL, false}; return true;
    case T::In: out = {BinOp::In, PREC_REL, false}; return true;
    case T::Subseteq: out = {BinOp::Subseteq, PREC_REL, false}; return true;
    case T::Plus: out = {BinOp::Add, PREC_ADD, false}; return true;
    case T::Minus: out = {BinOp::Sub, PREC_ADD, false}; return true;
    case T::UnionOp: out = {BinOp::Union, PREC_ADD, false}; return true;
    case T::SetMinus: out = {BinOp::Diff, PREC_ADD, false}; return true;
    case T::Times: out = {BinOp::Mul, PREC_MUL, false}; return true;
    case T::Slash: out = {BinOp::Div, PREC_MUL, false}; return true;
    case T::Percent: out = {BinOp::Mod, PREC_MUL, false}; return true;
    case T::IntersectOp: out = {BinOp::Intersect, PREC_MUL, false}; return true;
    case T::Caret: out = {BinOp::Pow, PREC_POW, true}; return true;
    default: return false;
  }
}

class Parser {
 public:
  explicit Parser(const std::vector<Token>& toks) : toks_(toks) {}

  Spec parseSpec() {
    Spec spec;
    while (!at(T::EndOfFile)) spec.decls.push_back(parseDecl());
    return spec;
  }

 private:
  const std::vector<Token>& toks_;
  size_t pos_ = 0;

  const Token& peek(size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  bool at(TokenType t) const { return peek().type == t; }
  const Token& advance() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool accept(TokenType t) {
    if (!at(t)) return false;
    advance();
    return true;
  }

  // The span just past the previously consumed token; "expected X" errors
  // point here so the report stays on the line where the gap opens.
  SourceSpan gapSpan() const {
    if (pos_ == 0) return peek().span;
    SourceSpan s = toks_[pos_ - 1].span;
    s.column += s.length;
    s.length = 0;
    return s;
  }

  [[noreturn]] void errorExpected(const std::string& what) const {
    throw ParseError(gapSpan(), "expected " + what + ", found '" +
                                    (peek().type == T::EndOfFile
                                         ? "end of file"
                                         : peek().lexeme) +
                                    "'");
  }

  const Token& expect(TokenType t, const char* what) {
    if (!at(t)) errorExpected(what);
    return advance();
  }

  std::string expectIdent(const char* what) {
    if (!at(T::Ident)) errorExpected(what);
    return advance().lexeme;
  }

  // ---------------------------------------------------------------- types

  TypeExprPtr parseType(bool allowUnboundedNat = false) {
    auto node = std::make_shared<TypeExpr>();
    node->span = peek().span;
    switch (peek().type) {
      case T::KwBool:
        advance();
        node->kind = TypeExpr::Kind::Bool;
        break;
      case T::NatSym: {
        advance();
        if (at(T::LBracket)) {
          advance();
          node->kind = TypeExpr::Kind::Nat;
          node->bound = parseExpr();
          expect(T::RBracket, "']'");
        } else if (allowUnboundedNat) {
          node->kind = TypeExpr::Kind::NatUnbounded;
        } else {
          errorExpected("'[' after ℕ");
        }
        break;
      }
      case T::IntSym: {
        advance();
        expect(T::LBracket, "'['");
        node->kind = TypeExpr::Kind::Int;
        node->bound = parseExpr();
        expect(T::Comma, "','");
        node->hi = parseExpr();
        expect(T::RBracket, "']'");
        break;
      }
      case T::KwSet: {
        advance();
        expect(T::LBracket, "'['");
        node->kind = TypeExpr::Kind::Set;
        node->args.push_back(parseType());
        expect(T::RBracket, "']'");
        break;
      }
      case T::KwTuple: {
        advance();
        expect(T::LBracket, "'['");
        node->kind = TypeExpr::Kind::Tuple;
        node->args.push_back(parseType());
        while (accept(T::Comma)) node->args.push_back(parseType());
        expect(T::RBracket, "']'");
        break;
      }
      case T::KwRecord: {
        advance();
        expect(T::LBracket, "'['");
        node->kind = TypeExpr::Kind::Record;
        do {
          node->fields.push_back(expectIdent("field name"));
          expect(T::Colon, "':'");
          node->args.push_back(parseType());
        } while (accept(T::Comma));
        expect(T::RBracket, "']'");
        break;
      }
      case T::KwArray: {
        advance();
        expect(T::LBracket, "'['");
        node->kind = TypeExpr::Kind::Array;
        node->bound = parseExpr();
        expect(T::Comma, "','");
        node->args.push_back(parseType());
        expect(T::RBracket, "']'");
        break;
      }
      case T::KwMap: {
        advance();
        expect(T::LBracket, "'['");
        node->kind = TypeExpr::Kind::Map;
        node->args.push_back(parseType());
        expect(T::Comma, "','");
        node->args.push_back(parseType());
        expect(T::RBracket, "']'");
        break;
      }
      case T::Ident:
        node->kind = TypeExpr::Kind::Named;
        node->name = advance().lexeme;
        break;
      default:
        errorExpected("a type");
    }
    return node;
  }

  // -------------------------------------------------------------- binders

  // binder-list ::= binder (',' binder)* ['with' expr]
  std::vector<Binder> parseBinders(ExprPtr& filter) {
    std::vector<Binder> binders;
    do {
      Binder b;
      b.span = peek().span;
      b.name = expectIdent("a bound variable");
      if (accept(T::Colon)) {
        b.type = parseType();
      } else if (accept(T::In)) {
        b.domain = parseExpr();
      } else {
        errorExpected("':' or '∈' after bound variable");
      }
      binders.push_back(std::move(b));
    } while (accept(T::Comma));
    if (accept(T::KwWith)) filter = parseExpr();
    return binders;
  }

  // ---------------------------------------------------------- expressions

  ExprPtr parseExpr(int minPrec = PREC_IFF, bool noIn = false) {
    ExprPtr lhs = parseUnary(noIn);
    int relSeen = 0;
    while (true) {
      BinInfo info;
      if (!binaryInfo(peek().type, info)) {
        if (at(T::DotDot) && PREC_RANGE >= minPrec) {
          SourceSpan span = peek().span;
          advance();
          auto node = std::make_shared<Expr>();
          node->kind = EK::SetRange;
          node->span = span;
          node->args = {lhs, parseExpr(PREC_RANGE + 1, noIn)};
          lhs = node;
          continue;
        }
        break;
      }
      if (info.op == BinOp::In && noIn) break;  // `let x = e in …` terminator
      if (info.prec < minPrec) break;
      if (info.prec == PREC_REL) {
        if (++relSeen > 1)
          throw ParseError(peek().span, "relational operators do not chain; use ∧");
      }
      SourceSpan span = peek().span;
      advance();
      int rhsMin = info.rightAssoc ? info.prec : info.prec + 1;
      ExprPtr rhs = parseExpr(rhsMin, noIn);
      auto node = std::make_shared<Expr>();
      node->kind = EK::Binary;
      node->bin = info.op;
      node->span = span;
      node->args = {lhs, rhs};
      lhs = node;
    }
    return lhs;
  }

  ExprPtr parseUnary(bool noIn) {
    if (at(T::Not) || at(T::Minus)) {
      auto node = std::make_shared<Expr>();
      node->kind = EK::Unary;
      node->un = at(T::Not) ? UnOp::Not : UnOp::Neg;
      node->span = peek().span;
      advance();
      node->args = {parseUnary(noIn)};
      return node;
    }
    return parsePostfix(noIn);
  }

  ExprPtr parsePostfix(bool noIn) {
    ExprPtr e = parsePrimary(noIn);
    while (true) {
      if (at(T::Dot) && peek(1).type == T::IntLit) {
        auto node = std::make_shared<Expr>();
        node->kind = EK::Proj;
        node->span = peek().span;
        advance();
        node->projIndex = advance().intValue;
        node->args = {e};
        e = node;
      } else if (at(T::LBracket)) {
        auto node = std::make_shared<Expr>();
        node->kind = EK::Index;
        node->span = peek().span;
        advance();
        node->args = {e, parseExpr()};
        expect(T::RBracket, "']'");
        e = node;
      } else {
        break;
      }
    }
    return e;
  }

  ExprPtr parsePrimary(bool noIn) {
    auto node = std::make_shared<Expr>();
    node->span = peek().span;
    switch (peek().type) {
      case T::IntLit:
        node->kind = EK::IntLit;
        node->intValue = advance().intValue;
        return node;
      case T::KwTrue:
        advance();
        node->kind = EK::BoolLit;
        node->boolValue = true;
        return node;
      case T::KwFalse:
        advance();
        node->kind = EK::BoolLit;
        node->boolValue = false;
        return node;
      case T::Ident: {
        node->name = advance().lexeme;
        if (at(T::LParen)) {
          advance();
          node->kind = EK::Call;
          if (!at(T::RParen)) {
            node->args.push_back(parseExpr());
            while (accept(T::Comma)) node->args.push_back(parseExpr());
          }
          expect(T::RParen, "')'");
        } else {
          node->kind = EK::Var;
        }
        return node;
      }
      case T::LParen: {
        advance();
        ExprPtr first = parseExpr();
        if (at(T::Comma)) {
          node->kind = EK::TupleE;
          node->args.push_back(first);
          while (accept(T::Comma)) node->args.push_back(parseExpr());
          expect(T::RParen, "')'");
          return node;
        }
        expect(T::RParen, "')'");
        return first;
      }
      case T::LAngle: {
        advance();
        node->kind = EK::TupleE;
        node->args.push_back(parseExpr());
        while (accept(T::Comma)) node->args.push_back(parseExpr());
        expect(T::RAngle, "'⟩'");
        return node;
      }
      case T::Bar: {
        advance();
        node->kind = EK::SetSize;
        node->args = {parseExpr()};
        expect(T::Bar, "'|'");
        return node;
      }
      case T::EmptySet: {
        advance();
        expect(T::LBracket, "'[' after ∅");
        node->kind = EK::SetEmpty;
        node->typeArg = parseType();
        expect(T::RBracket, "']'");
        return node;
      }
      case T::LBrace: {
        advance();
        ExprPtr first = parseExpr();
        if (accept(T::Bar)) {
          node->kind = EK::SetCompr;
          node->body = first;
          node->binders = parseBinders(node->filter);
          expect(T::RBrace, "'}'");
          return node;
        }
        node->kind = EK::SetLit;
        node->args.push_back(first);
        while (accept(T::Comma)) node->args.push_back(parseExpr());
        expect(T::RBrace, "'}'");
        return node;
      }
      case T::KwArray: {
        advance();
        expect(T::LBracket, "'['");
        node->kind = EK::ArrayCtor;
        ExprPtr len = parseExpr();
        expect(T::Comma, "','");
        node->typeArg = parseType();
        expect(T::RBracket, "']'");
        expect(T::LParen, "'('");
        ExprPtr init = parseExpr();
        expect(T::RParen, "')'");
        node->args = {len, init};
        return node;
      }
      case T::Forall:
      case T::Exists: {
        node->isExists = at(T::Exists);
        advance();
        node->kind = EK::Quant;
        node->binders = parseBinders(node->filter);
        expect(T::Dot, "'.'");
        node->body = parseExpr(PREC_IFF, noIn);
        return node;
      }
      case T::SumOp: {
        advance();
        node->kind = EK::Sum;
        node->binders = parseBinders(node->filter);
        expect(T::Dot, "'.'");
        node->body = parseExpr(PREC_IFF, noIn);
        return node;
      }
      case T::KwChoose: {
        advance();
        node->kind = EK::Choose;
        node->binders = parseBinders(node->filter);
        return node;
      }
      case T::KwIf: {
        advance();
        node->kind = EK::IfE;
        ExprPtr cond = parseExpr();
        expect(T::KwThen, "'then'");
        ExprPtr thenE = parseExpr();
        expect(T::KwElse, "'else'");
        ExprPtr elseE = parseExpr(PREC_IFF, noIn);
        node->args = {cond, thenE, elseE};
        return node;
      }
      case T::KwLet: {
        advance();
        node->kind = EK::LetE;
        node->name = expectIdent("a variable");
        expect(T::Eq, "'='");
        node->args = {parseExpr(PREC_IFF, /*noIn=*/true)};
        expect(T::In, "'in'");
        node->body = parseExpr(PREC_IFF, noIn);
        return node;
      }
      case T::KwPrint: {
        advance();
        node->kind = EK::Print;
        node->args = {parseExpr(PREC_IFF, noIn)};
        return node;
      }
      default:
        errorExpected("an expression");
    }
  }

  // ------------------------------------------------------------- commands

  // Loop annotations: any number of `invariant F;`, at most one
  // `decreases E;`.
  ast::LoopSpec parseLoopSpec() {
    ast::LoopSpec loop;
    while (at(T::KwInvariant) || at(T::KwDecreases)) {
      if (accept(T::KwInvariant)) {
        loop.invariants.push_back(parseExpr());
        expect(T::Semicolon, "';'");
      } else {
        advance();
        if (loop.decreases)
          throw ParseError(gapSpan(), "duplicate decreases annotation");
        loop.decreases = parseExpr();
        expect(T::Semicolon, "';'");
      }
    }
    return loop;
  }

  CmdPtr parseCmd() {
    auto node = std::make_shared<Cmd>();
    node->span = peek().span;
    switch (peek().type) {
      case T::KwVar: {
        advance();
        node->kind = CK::VarDecl;
        node->name = expectIdent("a variable name");
        expect(T::Colon, "':'");
        node->type = parseType();
        expect(T::Assign, "':='");
        node->e1 = parseExpr();
        expect(T::Semicolon, "';'");
        return node;
      }
      case T::KwAssert: {
        advance();
        node->kind = CK::Assert;
        node->e1 = parseExpr();
        expect(T::Semicolon, "';'");
        return node;
      }
      case T::LBrace: {
        advance();
        node->kind = CK::Block;
        while (!at(T::RBrace)) node->cmds.push_back(parseCmd());
        expect(T::RBrace, "'}'");
        return node;
      }
      case T::KwIf: {
        advance();
        node->kind = CK::If;
        node->e1 = parseExpr();
        expect(T::KwThen, "'then'");
        node->c1 = parseCmd();
        if (accept(T::KwElse)) node->c2 = parseCmd();
        return node;
      }
      case T::KwWhile: {
        advance();
        node->kind = CK::While;
        node->e1 = parseExpr();
        expect(T::KwDo, "'do'");
        node->loop = parseLoopSpec();
        node->c1 = parseCmd();
        return node;
      }
      case T::KwFor: {
        advance();
        if (accept(T::KwVar)) {
          node->kind = CK::ForCount;
          node->name = expectIdent("a variable name");
          expect(T::Colon, "':'");
          node->type = parseType();
          expect(T::Assign, "':='");
          node->e1 = parseExpr();
          expect(T::Semicolon, "';'");
          node->e2 = parseExpr();
          expect(T::Semicolon, "';'");
          node->update = parseUpdate();
          expect(T::KwDo, "'do'");
          node->loop = parseLoopSpec();
          node->c1 = parseCmd();
        } else {
          node->kind = CK::ForIn;
          node->name = expectIdent("a variable name");
          expect(T::In, "'∈'");
          node->e1 = parseExpr();
          expect(T::KwDo, "'do'");
          node->loop = parseLoopSpec();
          node->c1 = parseCmd();
        }
        return node;
      }
      case T::KwChoose: {
        advance();
        node->binders = parseBinders(node->filter);
        if (accept(T::KwThen)) {
          node->kind = CK::ChooseThenElse;
          node->c1 = parseCmd();
          expect(T::KwElse, "'else'");
          node->c2 = parseCmd();
        } else if (accept(T::KwDo)) {
          node->kind = CK::ChooseDo;
          node->loop = parseLoopSpec();
          node->c1 = parseCmd();
        } else {
          node->kind = CK::ChooseCmd;
          expect(T::Semicolon, "';'");
        }
        return node;
      }
      case T::Ident: {
        node->kind = CK::Assign;
        node->name = advance().lexeme;
        if (accept(T::LBracket)) {
          node->e1 = parseExpr();
          expect(T::RBracket, "']'");
        }
        expect(T::Assign, "':='");
        node->e2 = parseExpr();
        expect(T::Semicolon, "';'");
        return node;
      }
      default:
        errorExpected("a command");
    }
  }

  // counted-for update clause: an assignment without the trailing ';'
  CmdPtr parseUpdate() {
    auto node = std::make_shared<Cmd>();
    node->span = peek().span;
    node->kind = CK::Assign;
    node->name = expectIdent("a variable name");
    if (accept(T::LBracket)) {
      node->e1 = parseExpr();
      expect(T::RBracket, "']'");
    }
    expect(T::Assign, "':='");
    node->e2 = parseExpr();
    return node;
  }

  // ---------------------------------------------------------- declarations

  std::vector<Param> parseParams() {
    std::vector<Param> params;
    expect(T::LParen, "'('");
    if (!at(T::RParen)) {
      do {
        Param p;
        p.span = peek().span;
        p.name = expectIdent("a parameter name");
        expect(T::Colon, "':'");
        p.type = parseType();
        params.push_back(std::move(p));
      } while (accept(T::Comma));
    }
    expect(T::RParen, "')'");
    return params;
  }

  ast::Contract parseContract() {
    ast::Contract c;
    while (at(T::KwRequires) || at(T::KwEnsures) || at(T::KwDecreases)) {
      TokenType t = advance().type;
      ExprPtr e = parseExpr();
      expect(T::Semicolon, "';'");
      auto& slot = t == T::KwRequires ? c.requires_
                  : t == T::KwEnsures ? c.ensures_
                                      : c.decreases_;
      if (slot) throw ParseError(e->span, "duplicate contract clause");
      slot = e;
    }
    return c;
  }

  DeclPtr parseDecl() {
    auto node = std::make_shared<Decl>();
    node->span = peek().span;
    switch (peek().type) {
      case T::KwVal: {
        advance();
        node->kind = Decl::Kind::Val;
        node->name = expectIdent("a constant name");
        if (accept(T::Colon)) node->type = parseType(/*allowUnboundedNat=*/true);
        if (accept(T::Eq)) node->value = parseExpr();
        if (!node->type && !node->value)
          throw ParseError(gapSpan(), "a constant needs a type or a definition");
        expect(T::Semicolon, "';'");
        return node;
      }
      case T::KwType: {
        advance();
        node->kind = Decl::Kind::Type;
        node->name = expectIdent("a type name");
        expect(T::Eq, "'='");
        node->type = parseType();
        expect(T::Semicolon, "';'");
        return node;
      }
      case T::KwFun: {
        advance();
        node->kind = Decl::Kind::Fun;
        node->name = expectIdent("a function name");
        node->params = parseParams();
        expect(T::Colon, "':'");
        node->type = parseType();
        node->contract = parseContract();
        expect(T::Eq, "'='");
        node->value = parseExpr();
        expect(T::Semicolon, "';'");
        return node;
      }
      case T::KwPred: {
        advance();
        node->kind = Decl::Kind::Pred;
        node->name = expectIdent("a predicate name");
        node->params = parseParams();
        node->contract = parseContract();
        expect(T::Iff, "'⇔'");
        node->value = parseExpr();
        expect(T::Semicolon, "';'");
        return node;
      }
      case T::KwTheorem: {
        advance();
        node->kind = Decl::Kind::Theorem;
        node->name = expectIdent("a theorem name");
        if (at(T::LParen)) node->params = parseParams();
        node->contract = parseContract();
        expect(T::Iff, "'⇔'");
        node->value = parseExpr();
        expect(T::Semicolon, "';'");
        return node;
      }
      case T::KwProc: {
        advance();
        node->kind = Decl::Kind::Proc;
        node->name = expectIdent("a procedure name");
        node->params = parseParams();
        expect(T::Colon, "':'");
        node->type = parseType();
        node->contract = parseContract();
        expect(T::LBrace, "'{'");
        while (!at(T::KwReturn)) node->body.push_back(parseCmd());
        expect(T::KwReturn, "'return'");
        node->returnExpr = parseExpr();
        expect(T::Semicolon, "';'");
        expect(T::RBrace, "'}'");
        return node;
      }
      default:
        errorExpected("a declaration");
    }
  }
};

}  // namespace

Spec parseSpec(const std::vector<Token>& tokens) {
  Parser p(tokens);
  return p.parseSpec();
}

Spec parseSource(std::string_view source, const std::string& filename) {
  return parseSpec(tokenize(source, filename));
}

}  // namespace fspec
