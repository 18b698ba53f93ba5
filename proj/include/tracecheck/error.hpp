#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tracecheck {

enum class ErrorKind {
  Parse,           // syntax or lexical error in some input text
  Model,           // semantically invalid model or model evaluation failure
  Template,        // unresolved tag, malformed template
  StateExplosion,  // state budget exceeded during graph construction
  InvalidArgument, // out-of-range index, inconsistent inputs
  NotFound,        // unknown hash or liability id
  WrongStatus,     // illegal liability transition
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Positioned syntax error. line/column are 1-based; offset is a byte offset
// into the source text.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column, std::size_t offset)
      : Error(ErrorKind::Parse, std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        message_(msg),
        line_(line),
        column_(column),
        offset_(offset) {}

  const std::string& message() const noexcept { return message_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::string message_;
  std::size_t line_;
  std::size_t column_;
  std::size_t offset_;
};

}  // namespace tracecheck
