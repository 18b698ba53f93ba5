#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tracecheck/error.hpp"

namespace tracecheck::detail {

enum class Tok {
  Ident, Int,
  LBracket, RBracket, LParen, RParen, Semi, Colon, DotDot, Arrow, Prime, Assign,
  Eq, Ne, Lt, Le, Gt, Ge,
  Amp, Bar, Bang, Plus, Minus, Star,
  End,
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::int64_t value = 0;
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t offset = 0;
};

const char* token_name(Tok t);

// Splits text into tokens, skipping whitespace and `//` comments. The result
// always ends with a Tok::End token.
std::vector<Token> tokenize(std::string_view text);

// Cursor over a token vector with positioned error reporting.
class TokenStream {
 public:
  explicit TokenStream(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  bool at(Tok kind) const { return peek().kind == kind; }
  bool at_keyword(std::string_view kw) const { return at(Tok::Ident) && peek().text == kw; }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }
  bool accept(Tok kind) {
    if (!at(kind)) return false;
    next();
    return true;
  }
  const Token& expect(Tok kind, std::string_view what) {
    if (!at(kind)) fail(peek(), "expected " + std::string(what) + ", found " + describe(peek()));
    return next();
  }
  void expect_keyword(std::string_view kw) {
    if (!at_keyword(kw)) fail(peek(), "expected '" + std::string(kw) + "', found " + describe(peek()));
    next();
  }

  [[noreturn]] static void fail(const Token& at, const std::string& msg) {
    throw ParseError(msg, at.line, at.column, at.offset);
  }
  static std::string describe(const Token& t);

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace tracecheck::detail
