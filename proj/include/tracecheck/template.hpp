#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tracecheck/model.hpp"

namespace tracecheck {

using Scalar = std::variant<std::int64_t, std::string>;

// Settings file: a two-section subset of YAML.
//
//   parameters:
//     width: 5
//   defaults:
//     turn_left: "false"   # comment
struct Settings {
  std::map<std::string, Scalar> parameters;
  std::map<std::string, std::string> defaults;
};

using Bindings = std::map<std::string, std::string>;

bool is_tag_identifier(std::string_view s);
std::string scalar_text(const Scalar& s);

Settings parse_settings(std::string_view text);
std::string print_settings(const Settings& s);

// Bindings file: one flat JSON object with string values.
Bindings parse_bindings(std::string_view json_text);
std::string print_bindings(const Bindings& b);

// Tags in order of first appearance. Throws Error(Template) on a stray '@'.
std::vector<std::string> template_tags(std::string_view tmpl);

struct Rendered {
  std::string text;
  // Tag name for each substituted span of `text`, for error provenance.
  struct Span {
    std::size_t begin;
    std::size_t end;
    std::string tag;
  };
  std::vector<Span> spans;
};

// Single-pass substitution of `@tag@` (bindings, then parameters, then
// defaults) and `@@` -> `@`. Throws Error(Template) on an unresolved tag.
Rendered render_text(std::string_view tmpl, const Bindings& bindings, const Settings& settings);

// render_text followed by parse_model; parse errors are rethrown as
// ParseError with the enclosing tag named in the message.
SystemModel render(std::string_view tmpl, const Bindings& bindings, const Settings& settings,
                   std::string* text_out = nullptr);

}  // namespace tracecheck
