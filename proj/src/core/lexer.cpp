#include "lexer.hpp"

#include <cctype>
#include <limits>

namespace tracecheck::detail {

const char* token_name(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Semi: return "';'";
    case Tok::Colon: return "':'";
    case Tok::DotDot: return "'..'";
    case Tok::Arrow: return "'->'";
    case Tok::Prime: return "'''";
    case Tok::Assign: return "'='";
    case Tok::Eq: return "'=='";
    case Tok::Ne: return "'!='";
    case Tok::Lt: return "'<'";
    case Tok::Le: return "'<='";
    case Tok::Gt: return "'>'";
    case Tok::Ge: return "'>='";
    case Tok::Amp: return "'&'";
    case Tok::Bar: return "'|'";
    case Tok::Bang: return "'!'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::End: return "end of input";
  }
  return "token";
}

std::string TokenStream::describe(const Token& t) {
  if (t.kind == Tok::Ident || t.kind == Tok::Int) return std::string(token_name(t.kind)) + " '" + t.text + "'";
  return token_name(t.kind);
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  std::size_t line = 1;
  std::size_t line_start = 0;

  auto push = [&](Tok kind, std::size_t start, std::size_t len) {
    Token t;
    t.kind = kind;
    t.text = std::string(text.substr(start, len));
    t.line = line;
    t.column = start - line_start + 1;
    t.offset = start;
    out.push_back(std::move(t));
  };

  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++i;
      ++line;
      line_start = i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalpha(uc) || c == '_') {
      const std::size_t start = i;
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
      push(Tok::Ident, start, i - start);
      continue;
    }
    if (std::isdigit(uc)) {
      const std::size_t start = i;
      std::int64_t value = 0;
      bool overflow = false;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        const int digit = text[i] - '0';
        if (value > (std::numeric_limits<std::int64_t>::max() - digit) / 10) overflow = true;
        if (!overflow) value = value * 10 + digit;
        ++i;
      }
      if (overflow) {
        throw ParseError("integer literal out of range", line, start - line_start + 1, start);
      }
      push(Tok::Int, start, i - start);
      out.back().value = value;
      continue;
    }
    auto two = [&](char second) { return i + 1 < text.size() && text[i + 1] == second; };
    Tok kind;
    std::size_t len = 1;
    switch (c) {
      case '[': kind = Tok::LBracket; break;
      case ']': kind = Tok::RBracket; break;
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case ';': kind = Tok::Semi; break;
      case ':': kind = Tok::Colon; break;
      case '\'': kind = Tok::Prime; break;
      case '&': kind = Tok::Amp; break;
      case '|': kind = Tok::Bar; break;
      case '+': kind = Tok::Plus; break;
      case '*': kind = Tok::Star; break;
      case '.':
        if (!two('.')) throw ParseError("unexpected character '.'", line, i - line_start + 1, i);
        kind = Tok::DotDot;
        len = 2;
        break;
      case '-':
        if (two('>')) {
          kind = Tok::Arrow;
          len = 2;
        } else {
          kind = Tok::Minus;
        }
        break;
      case '=':
        if (two('=')) {
          kind = Tok::Eq;
          len = 2;
        } else {
          kind = Tok::Assign;
        }
        break;
      case '!':
        if (two('=')) {
          kind = Tok::Ne;
          len = 2;
        } else {
          kind = Tok::Bang;
        }
        break;
      case '<':
        if (two('=')) {
          kind = Tok::Le;
          len = 2;
        } else {
          kind = Tok::Lt;
        }
        break;
      case '>':
        if (two('=')) {
          kind = Tok::Ge;
          len = 2;
        } else {
          kind = Tok::Gt;
        }
        break;
      default: {
        std::string shown = (uc >= 0x20 && uc < 0x7f) ? std::string("'") + c + "'" : "byte " + std::to_string(uc);
        throw ParseError("unexpected character " + shown, line, i - line_start + 1, i);
      }
    }
    push(kind, i, len);
    i += len;
  }
  Token end;
  end.kind = Tok::End;
  end.line = line;
  end.column = i - line_start + 1;
  end.offset = i;
  out.push_back(end);
  return out;
}

}  // namespace tracecheck::detail
