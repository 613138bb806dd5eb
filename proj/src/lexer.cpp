#include "fspec/lexer.hpp"

#include <cctype>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include "fspec/diagnostics.hpp"

namespace fspec {

TokenClass tokenClass(TokenType t) {
  using T = TokenType;
  switch (t) {
    case T::KwVal: case T::KwType: case T::KwFun: case T::KwPred:
    case T::KwTheorem: case T::KwProc: case T::KwRequires: case T::KwEnsures:
    case T::KwDecreases: case T::KwInvariant: case T::KwAssert: case T::KwVar:
    case T::KwWhile: case T::KwDo: case T::KwFor: case T::KwIf: case T::KwThen:
    case T::KwElse: case T::KwReturn: case T::KwChoose: case T::KwLet:
    case T::KwWith: case T::KwPrint: case T::KwBool: case T::KwSet:
    case T::KwTuple: case T::KwRecord: case T::KwArray: case T::KwMap:
    case T::KwTrue: case T::KwFalse:
      return TokenClass::Keyword;
    case T::Ident:
      return TokenClass::Identifier;
    case T::IntLit:
      return TokenClass::IntegerLiteral;
    case T::LParen: case T::RParen: case T::LBracket: case T::RBracket:
    case T::LBrace: case T::RBrace: case T::LAngle: case T::RAngle:
    case T::Comma: case T::Semicolon: case T::Colon: case T::Dot:
    case T::EndOfFile:
      return TokenClass::Punctuation;
    default:
      return TokenClass::Operator;
  }
}

const char* tokenSpelling(TokenType t) {
  using T = TokenType;
  switch (t) {
    case T::KwVal: return "val";
    case T::KwType: return "type";
    case T::KwFun: return "fun";
    case T::KwPred: return "pred";
    case T::KwTheorem: return "theorem";
    case T::KwProc: return "proc";
    case T::KwRequires: return "requires";
    case T::KwEnsures: return "ensures";
    case T::KwDecreases: return "decreases";
    case T::KwInvariant: return "invariant";
    case T::KwAssert: return "assert";
    case T::KwVar: return "var";
    case T::KwWhile: return "while";
    case T::KwDo: return "do";
    case T::KwFor: return "for";
    case T::KwIf: return "if";
    case T::KwThen: return "then";
    case T::KwElse: return "else";
    case T::KwReturn: return "return";
    case T::KwChoose: return "choose";
    case T::KwLet: return "let";
    case T::KwWith: return "with";
    case T::KwPrint: return "print";
    case T::KwBool: return "Bool";
    case T::KwSet: return "Set";
    case T::KwTuple: return "Tuple";
    case T::KwRecord: return "Record";
    case T::KwArray: return "Array";
    case T::KwMap: return "Map";
    case T::KwTrue: return "⊤";
    case T::KwFalse: return "⊥";
    case T::Forall: return "∀";
    case T::Exists: return "∃";
    case T::SumOp: return "∑";
    case T::NatSym: return "ℕ";
    case T::IntSym: return "ℤ";
    case T::EmptySet: return "∅";
    case T::Plus: return "+";
    case T::Minus: return "-";
    case T::Times: return "·";
    case T::Slash: return "/";
    case T::Percent: return "%";
    case T::Caret: return "^";
    case T::Eq: return "=";
    case T::Ne: return "≠";
    case T::Lt: return "<";
    case T::Le: return "≤";
    case T::Gt: return ">";
    case T::Ge: return "≥";
    case T::And: return "∧";
    case T::Or: return "∨";
    case T::Not: return "¬";
    case T::Implies: return "⇒";
    case T::Iff: return "⇔";
    case T::UnionOp: return "∪";
    case T::IntersectOp: return "∩";
    case T::SetMinus: return "\\";
    case T::Subseteq: return "⊆";
    case T::In: return "∈";
    case T::Assign: return ":=";
    case T::DotDot: return "..";
    case T::Bar: return "|";
    case T::LParen: return "(";
    case T::RParen: return ")";
    case T::LBracket: return "[";
    case T::RBracket: return "]";
    case T::LBrace: return "{";
    case T::RBrace: return "}";
    case T::LAngle: return "⟨";
    case T::RAngle: return "⟩";
    case T::Comma: return ",";
    case T::Semicolon: return ";";
    case T::Colon: return ":";
    case T::Dot: return ".";
    case T::Ident: return "<identifier>";
    case T::IntLit: return "<integer>";
    case T::EndOfFile: return "<end of file>";
  }
  return "?";
}

namespace {

const std::unordered_map<std::string_view, TokenType>& wordTable() {
  using T = TokenType;
  static const std::unordered_map<std::string_view, TokenType> table = {
      {"val", T::KwVal},       {"type", T::KwType},     {"fun", T::KwFun},
      {"pred", T::KwPred},     {"theorem", T::KwTheorem}, {"proc", T::KwProc},
      {"requires", T::KwRequires}, {"ensures", T::KwEnsures},
      {"decreases", T::KwDecreases}, {"invariant", T::KwInvariant},
      {"assert", T::KwAssert}, {"var", T::KwVar},       {"while", T::KwWhile},
      {"do", T::KwDo},         {"for", T::KwFor},       {"if", T::KwIf},
      {"then", T::KwThen},     {"else", T::KwElse},     {"return", T::KwReturn},
      {"choose", T::KwChoose}, {"let", T::KwLet},       {"with", T::KwWith},
      {"print", T::KwPrint},   {"Bool", T::KwBool},     {"Set", T::KwSet},
      {"Tuple", T::KwTuple},   {"Record", T::KwRecord}, {"Array", T::KwArray},
      {"Map", T::KwMap},
      // word aliases of Unicode symbols
      {"true", T::KwTrue},     {"false", T::KwFalse},
      {"forall", T::Forall},   {"exists", T::Exists},   {"sum", T::SumOp},
      {"Nat", T::NatSym},      {"Int", T::IntSym},
      {"emptyset", T::EmptySet},
      {"in", T::In},           {"union", T::UnionOp},
      {"intersect", T::IntersectOp}, {"subseteq", T::Subseteq},
  };
  return table;
}

struct CodePoint {
  uint32_t value = 0;
  unsigned bytes = 0;
};

class Cursor {
 public:
  Cursor(std::string_view src, std::string file)
      : src_(src), file_(std::move(file)) {}

  bool atEnd() const { return pos_ >= src_.size(); }

  CodePoint peek() const {
    if (atEnd()) return {0, 0};
    const auto* p = reinterpret_cast<const unsigned char*>(src_.data() + pos_);
    unsigned remaining = static_cast<unsigned>(src_.size() - pos_);
    unsigned c0 = p[0];
    if (c0 < 0x80) return {c0, 1};
    unsigned need = (c0 >= 0xF0) ? 4 : (c0 >= 0xE0) ? 3 : (c0 >= 0xC0) ? 2 : 0;
    if (need == 0 || remaining < need)
      throw LexError(here(1), "invalid UTF-8 byte sequence");
    uint32_t v = c0 & (0x7F >> need);
    for (unsigned i = 1; i < need; ++i) {
      if ((p[i] & 0xC0) != 0x80)
        throw LexError(here(1), "invalid UTF-8 byte sequence");
      v = (v << 6) | (p[i] & 0x3F);
    }
    return {v, need};
  }

  void advance() {
    CodePoint cp = peek();
    pos_ += cp.bytes;
    if (cp.value == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
  }

  bool startsWith(std::string_view s) const {
    return src_.substr(pos_).substr(0, s.size()) == s;
  }

  SourceSpan here(uint32_t length = 0) const {
    return SourceSpan{file_, line_, column_, length};
  }

  size_t pos() const { return pos_; }
  uint32_t line() const { return line_; }
  uint32_t column() const { return column_; }
  std::string_view slice(size_t from) const { return src_.substr(from, pos_ - from); }

 private:
  std::string_view src_;
  std::string file_;
  size_t pos_ = 0;
  uint32_t line_ = 1;
  uint32_t column_ = 1;
};

bool isIdentStart(uint32_t c) { return c == '_' || (c < 128 && std::isalpha(static_cast<int>(c))); }
bool isIdentCont(uint32_t c) { return c == '_' || (c < 128 && std::isalnum(static_cast<int>(c))); }

}  // namespace

std::vector<Token> tokenize(std::string_view source, const std::string& filename) {
  Cursor cur(source, filename);
  std::vector<Token> out;

  auto emit = [&](TokenType type, const SourceSpan& start, size_t fromByte) {
    Token t;
    t.type = type;
    t.span = start;
    t.span.length = cur.column() >= start.column && cur.line() == start.line
                        ? cur.column() - start.column
                        : 0;
    t.lexeme = std::string(cur.slice(fromByte));
    out.push_back(std::move(t));
  };

  while (true) {
    // skip whitespace and comments
    while (!cur.atEnd()) {
      CodePoint cp = cur.peek();
      if (cp.value == ' ' || cp.value == '\t' || cp.value == '\r' || cp.value == '\n') {
        cur.advance();
      } else if (cur.startsWith("//")) {
        while (!cur.atEnd() && cur.peek().value != '\n') cur.advance();
      } else if (cur.startsWith("/*")) {
        SourceSpan open = cur.here(2);
        cur.advance();
        cur.advance();
        bool closed = false;
        while (!cur.atEnd()) {
          if (cur.startsWith("*/")) {
            cur.advance();
            cur.advance();
            closed = true;
            break;
          }
          cur.advance();
        }
        if (!closed) throw LexError(open, "unterminated block comment");
      } else {
        break;
      }
    }
    if (cur.atEnd()) {
      Token eof;
      eof.type = TokenType::EndOfFile;
      eof.span = cur.here();
      out.push_back(std::move(eof));
      return out;
    }

    SourceSpan start = cur.here();
    size_t fromByte = cur.pos();
    CodePoint cp = cur.peek();

    // identifiers and word-spelled symbols
    if (isIdentStart(cp.value)) {
      while (!cur.atEnd() && isIdentCont(cur.peek().value)) cur.advance();
      std::string_view word = cur.slice(fromByte);
      auto it = wordTable().find(word);
      emit(it != wordTable().end() ? it->second : TokenType::Ident, start, fromByte);
      continue;
    }

    // integer literals
    if (cp.value >= '0' && cp.value <= '9') {
      int64_t v = 0;
      while (!cur.atEnd()) {
        uint32_t d = cur.peek().value;
        if (d < '0' || d > '9') break;
        if (v > (std::numeric_limits<int64_t>::max() - static_cast<int64_t>(d - '0')) / 10)
          throw LexError(start, "integer literal out of range");
        v = v * 10 + static_cast<int64_t>(d - '0');
        cur.advance();
      }
      emit(TokenType::IntLit, start, fromByte);
      out.back().intValue = v;
      continue;
    }

    // multi-character ASCII operators, longest match first
    using T = TokenType;
    struct Multi { std::string_view text; TokenType type; };
    static constexpr Multi multi[] = {
        {"<=>", T::Iff},  {"(|", T::LAngle}, {"|)", T::RAngle},
        {":=", T::Assign}, {"..", T::DotDot}, {"~=", T::Ne},
        {"<=", T::Le},     {">=", T::Ge},     {"=>", T::Implies},
        {"/\\", T::And},   {"\\/", T::Or},    {"&&", T::And},
        {"||", T::Or},
    };
    bool matched = false;
    for (const Multi& m : multi) {
      if (cur.startsWith(m.text)) {
        for (size_t i = 0; i < m.text.size(); ++i) cur.advance();
        emit(m.type, start, fromByte);
        matched = true;
        break;
      }
    }
    if (matched) continue;

    TokenType single;
    switch (cp.value) {
      case '+': single = T::Plus; break;
      case '-': case 0x2212: single = T::Minus; break;          // − U+2212
      case '*': case 0xB7: single = T::Times; break;            // · U+00B7
      case '/': single = T::Slash; break;
      case '%': single = T::Percent; break;
      case '^': single = T::Caret; break;
      case '=': single = T::Eq; break;
      case '<': single = T::Lt; break;
      case '>': single = T::Gt; break;
      case '~': case 0xAC: single = T::Not; break;              // ¬ U+00AC
      case '\\': single = T::SetMinus; break;
      case '|': single = T::Bar; break;
      case '(': single = T::LParen; break;
      case ')': single = T::RParen; break;
      case '[': single = T::LBracket; break;
      case ']': single = T::RBracket; break;
      case '{': single = T::LBrace; break;
      case '}': single = T::RBrace; break;
      case ',': single = T::Comma; break;
      case ';': single = T::Semicolon; break;
      case ':': single = T::Colon; break;
      case '.': single = T::Dot; break;
      case 0x2200: single = T::Forall; break;                   // ∀
      case 0x2203: single = T::Exists; break;                   // ∃
      case 0x2211: single = T::SumOp; break;                    // ∑
      case 0x21D2: single = T::Implies; break;                  // ⇒
      case 0x21D4: single = T::Iff; break;                      // ⇔
      case 0x2227: single = T::And; break;                      // ∧
      case 0x2228: single = T::Or; break;                       // ∨
      case 0x2260: single = T::Ne; break;                       // ≠
      case 0x2264: single = T::Le; break;                       // ≤
      case 0x2265: single = T::Ge; break;                       // ≥
      case 0x2208: single = T::In; break;                       // ∈
      case 0x2286: single = T::Subseteq; break;                 // ⊆
      case 0x222A: single = T::UnionOp; break;                  // ∪
      case 0x2229: single = T::IntersectOp; break;              // ∩
      case 0x2205: single = T::EmptySet; break;                 // ∅
      case 0x2115: single = T::NatSym; break;                   // ℕ
      case 0x2124: single = T::IntSym; break;                   // ℤ
      case 0x27E8: single = T::LAngle; break;                   // ⟨
      case 0x27E9: single = T::RAngle; break;                   // ⟩
      case 0x22A4: single = T::KwTrue; break;                   // ⊤
      case 0x22A5: single = T::KwFalse; break;                  // ⊥
      default:
        throw LexError(cur.here(1), "illegal character");
    }
    cur.advance();
    emit(single, start, fromByte);
  }
}

}  // namespace fspec
