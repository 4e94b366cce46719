#include "dedalus/datalog_text.hpp"

#include <cctype>
#include <sstream>

namespace dedalus {

ParseError::ParseError(std::string msg, int line, int col)
    : std::runtime_error("line " + std::to_string(line) + ", col " +
                         std::to_string(col) + ": " + std::move(msg)),
      line(line),
      col(col) {}

namespace {

struct Token {
  enum Kind { Ident, Number, LParen, RParen, Comma, Dot, Arrow, At, End } kind;
  std::string text;
  int line;
  int col;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : s_(text) {}

  Token next() {
    skip_ws();
    int line = line_, col = col_;
    if (i_ >= s_.size()) return {Token::End, "", line, col};
    char c = s_[i_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string ident;
      while (i_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_'))
        ident += advance();
      return {Token::Ident, ident, line, col};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string num;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_])))
        num += advance();
      return {Token::Number, num, line, col};
    }
    switch (c) {
      case '(': advance(); return {Token::LParen, "(", line, col};
      case ')': advance(); return {Token::RParen, ")", line, col};
      case ',': advance(); return {Token::Comma, ",", line, col};
      case '.': advance(); return {Token::Dot, ".", line, col};
      case '@': advance(); return {Token::At, "@", line, col};
      case '<':
        advance();
        if (i_ < s_.size() && s_[i_] == '-') {
          advance();
          return {Token::Arrow, "<-", line, col};
        }
        throw ParseError("expected '<-'", line, col);
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
  }

 private:
  char advance() {
    char c = s_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_ws() {
    while (i_ < s_.size()) {
      char c = s_[i_];
      if (c == '%') {
        while (i_ < s_.size() && s_[i_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  const std::string& s_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(const std::string& text) : lex_(text) { tok_ = lex_.next(); }

  std::vector<ParsedRule> rules() {
    std::vector<ParsedRule> out;
    while (tok_.kind != Token::End) out.push_back(rule());
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg, tok_.line, tok_.col);
  }

  Token eat(Token::Kind k, const char* what) {
    if (tok_.kind != k) fail(std::string("expected ") + what);
    Token t = tok_;
    tok_ = lex_.next();
    return t;
  }

  ParsedRule rule() {
    ParsedRule r;
    r.line = tok_.line;
    r.col = tok_.col;
    r.rule.head = atom();
    if (tok_.kind == Token::At) {
      tok_ = lex_.next();
      Token name = eat(Token::Ident, "annotation after '@'");
      if (name.text == "next") {
        r.annotation = HeadAnnotation::Next;
      } else if (std::isupper(static_cast<unsigned char>(name.text[0]))) {
        r.annotation = HeadAnnotation::Async;
        r.addressee = name.text;
      } else {
        throw ParseError("head annotation must be 'next' or a variable",
                         name.line, name.col);
      }
    }
    if (tok_.kind == Token::Arrow) {
      tok_ = lex_.next();
      while (true) {
        if (tok_.kind == Token::Ident && tok_.text == "not") {
          tok_ = lex_.next();
          r.rule.neg.push_back(atom());
        } else {
          r.rule.pos.push_back(atom());
        }
        if (tok_.kind != Token::Comma) break;
        tok_ = lex_.next();
      }
    }
    eat(Token::Dot, "'.'");
    return r;
  }

  Atom atom() {
    Token name = eat(Token::Ident, "relation name");
    if (std::isupper(static_cast<unsigned char>(name.text[0])))
      throw ParseError("relation names must start lowercase", name.line, name.col);
    Atom a{name.text, {}};
    eat(Token::LParen, "'('");
    if (tok_.kind != Token::RParen) {
      while (true) {
        a.args.push_back(term());
        if (tok_.kind != Token::Comma) break;
        tok_ = lex_.next();
      }
    }
    eat(Token::RParen, "')'");
    return a;
  }

  Term term() {
    if (tok_.kind == Token::Number) {
      Token n = eat(Token::Number, "number");
      return Value::ts(std::stoull(n.text));
    }
    Token t = eat(Token::Ident, "variable or constant");
    if (std::isupper(static_cast<unsigned char>(t.text[0])))
      return Variable{t.text};
    return Value::sym(t.text);
  }

  Lexer lex_;
  Token tok_;
};

}  // namespace

std::vector<ParsedRule> parse_rule_text(const std::string& text) {
  return Parser(text).rules();
}

Program parse_program(const std::string& text) {
  std::vector<Rule> rules;
  for (ParsedRule& pr : parse_rule_text(text)) {
    if (pr.annotation != HeadAnnotation::None)
      throw ParseError("head annotations are not allowed here", pr.line, pr.col);
    rules.push_back(std::move(pr.rule));
  }
  return Program(std::move(rules));
}

std::string print_program(const Program& p) {
  std::ostringstream os;
  for (const Rule& r : p.rules()) os << r.to_string() << '\n';
  return os.str();
}

}  // namespace dedalus
