#include "tracecheck/template.hpp"

#include <cctype>
#include <charconv>
#include <algorithm>
#include <optional>

#include "json.hpp"

#include "tracecheck/error.hpp"
#include "tracecheck/lang.hpp"

namespace tracecheck {

bool is_tag_identifier(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

std::string scalar_text(const Scalar& s) {
  if (const auto* i = std::get_if<std::int64_t>(&s)) return std::to_string(*i);
  return std::get<std::string>(s);
}

namespace {

struct Line {
  std::size_t number;
  std::size_t offset;
  std::size_t indent;
  std::string body;  // comment stripped, right-trimmed, indentation removed
};

[[noreturn]] void settings_error(const Line& l, const std::string& msg, std::size_t col = 0) {
  throw ParseError(msg, l.number, l.indent + col + 1, l.offset + l.indent + col);
}

// Removes a `#` comment that is not inside quotes.
std::string strip_comment(std::string_view s) {
  char quote = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (quote == '"' && c == '\\') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#' && (i == 0 || s[i - 1] == ' ' || s[i - 1] == '\t')) {
      return std::string(s.substr(0, i));
    }
  }
  return std::string(s);
}

std::string rtrim(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
  return s;
}

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> out;
  std::size_t start = 0;
  std::size_t number = 1;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(start, end - start);
    std::string body = rtrim(strip_comment(raw));
    std::size_t indent = 0;
    while (indent < body.size() && body[indent] == ' ') ++indent;
    if (indent < body.size() && body[indent] == '\t') {
      throw ParseError("tab characters are not allowed in indentation", number, indent + 1, start + indent);
    }
    if (indent < body.size()) out.push_back(Line{number, start, indent, body.substr(indent)});
    if (end == text.size()) break;
    start = end + 1;
    ++number;
  }
  return out;
}

// Parses a scalar value. Returns the decoded string and whether it was quoted.
std::pair<std::string, bool> parse_scalar(const Line& l, std::size_t col) {
  std::string_view v = std::string_view(l.body).substr(col);
  if (v.empty()) settings_error(l, "missing value", col);
  const char first = v.front();
  if (first == '[' || first == '{' || first == '|' || first == '>' || first == '&' || first == '*' ||
      (first == '-' && (v.size() == 1 || v[1] == ' '))) {
    settings_error(l, "non-scalar value", col);
  }
  if (first == '"' || first == '\'') {
    std::string out;
    std::size_t i = 1;
    for (; i < v.size(); ++i) {
      const char c = v[i];
      if (first == '"' && c == '\\' && i + 1 < v.size()) {
        const char e = v[++i];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: settings_error(l, std::string("unsupported escape '\\") + e + "'", col + i);
        }
      } else if (c == first) {
        if (first == '\'' && i + 1 < v.size() && v[i + 1] == '\'') {
          out += '\'';
          ++i;
        } else {
          break;
        }
      } else {
        out += c;
      }
    }
    if (i >= v.size()) settings_error(l, "unterminated quoted string", col);
    if (i + 1 != v.size()) settings_error(l, "unexpected text after quoted value", col + i + 1);
    return {out, true};
  }
  return {std::string(v), false};
}

std::optional<std::int64_t> as_integer(std::string_view s) {
  std::int64_t value = 0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || begin == end) return std::nullopt;
  return value;
}

}  // namespace

Settings parse_settings(std::string_view text) {
  Settings settings;
  const std::vector<Line> lines = split_lines(text);
  enum class Section { None, Parameters, Defaults } section = Section::None;
  bool seen_parameters = false;
  bool seen_defaults = false;
  std::size_t entry_indent = 0;

  for (std::size_t li = 0; li < lines.size(); ++li) {
    const Line& l = lines[li];
    const std::size_t colon = l.body.find(':');
    if (l.indent == 0) {
      if (colon == std::string::npos) settings_error(l, "expected 'parameters:' or 'defaults:'");
      const std::string key = l.body.substr(0, colon);
      if (colon + 1 != l.body.size()) settings_error(l, "section '" + key + "' must be a mapping", colon + 1);
      if (key == "parameters") {
        if (seen_parameters) settings_error(l, "duplicate key 'parameters'");
        seen_parameters = true;
        section = Section::Parameters;
      } else if (key == "defaults") {
        if (seen_defaults) settings_error(l, "duplicate key 'defaults'");
        seen_defaults = true;
        section = Section::Defaults;
      } else {
        settings_error(l, "unknown top-level key '" + key + "'");
      }
      entry_indent = 0;
      continue;
    }
    if (section == Section::None) settings_error(l, "indented entry outside a section");
    if (entry_indent == 0) entry_indent = l.indent;
    if (l.indent > entry_indent) settings_error(l, "nesting too deep");
    if (l.indent < entry_indent) settings_error(l, "inconsistent indentation");
    if (l.body.front() == '-') settings_error(l, "non-scalar value");
    if (colon == std::string::npos) settings_error(l, "expected 'key: value'");
    const std::string key = rtrim(l.body.substr(0, colon));
    if (!is_tag_identifier(key)) settings_error(l, "invalid key '" + key + "' (letters and '_' only)");
    std::size_t vcol = colon + 1;
    while (vcol < l.body.size() && l.body[vcol] == ' ') ++vcol;
    if (vcol == l.body.size()) {
      if (li + 1 < lines.size() && lines[li + 1].indent > l.indent) settings_error(lines[li + 1], "nesting too deep");
      settings_error(l, "non-scalar value for key '" + key + "'");
    }
    auto [value, quoted] = parse_scalar(l, vcol);
    if (section == Section::Parameters) {
      if (settings.parameters.count(key)) settings_error(l, "duplicate key '" + key + "'");
      auto as_int = quoted ? std::nullopt : as_integer(value);
      settings.parameters.emplace(key, as_int ? Scalar{*as_int} : Scalar{value});
    } else {
      if (settings.defaults.count(key)) settings_error(l, "duplicate key '" + key + "'");
      settings.defaults.emplace(key, value);
    }
  }
  return settings;
}

namespace {

std::string quote_yaml(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string print_settings(const Settings& s) {
  std::string out;
  if (!s.parameters.empty()) {
    out += "parameters:\n";
    for (const auto& [key, value] : s.parameters) {
      out += "  " + key + ": ";
      out += std::holds_alternative<std::int64_t>(value) ? scalar_text(value) : quote_yaml(scalar_text(value));
      out += "\n";
    }
  }
  if (!s.defaults.empty()) {
    out += "defaults:\n";
    for (const auto& [key, value] : s.defaults) out += "  " + key + ": " + quote_yaml(value) + "\n";
  }
  return out;
}

Bindings parse_bindings(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::Parse, std::string("bindings: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::Parse, "bindings: expected a JSON object");
  Bindings out;
  for (const auto& [key, value] : j.items()) {
    if (!is_tag_identifier(key)) throw Error(ErrorKind::Parse, "bindings: invalid tag name '" + key + "'");
    if (!value.is_string()) throw Error(ErrorKind::Parse, "bindings: value of '" + key + "' must be a string");
    out.emplace(key, value.get<std::string>());
  }
  return out;
}

std::string print_bindings(const Bindings& b) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, value] : b) j[key] = value;
  return j.dump(2) + "\n";
}

namespace {

struct TemplatePiece {
  bool is_tag;
  std::string text;  // literal text or tag name
};

std::vector<TemplatePiece> split_template(std::string_view tmpl) {
  std::vector<TemplatePiece> out;
  std::string literal;
  std::size_t line = 1;
  std::size_t line_start = 0;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    const char c = tmpl[i];
    if (c == '\n') {
      ++line;
      line_start = i + 1;
    }
    if (c != '@') {
      literal += c;
      continue;
    }
    if (i + 1 < tmpl.size() && tmpl[i + 1] == '@') {
      literal += '@';
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < tmpl.size() && (std::isalpha(static_cast<unsigned char>(tmpl[j])) || tmpl[j] == '_')) ++j;
    if (j == i + 1 || j >= tmpl.size() || tmpl[j] != '@') {
      throw Error(ErrorKind::Template, "template " + std::to_string(line) + ":" + std::to_string(i - line_start + 1) +
                                           ": stray '@' (tags are @letters_or_underscores@, '@@' for a literal '@')");
    }
    if (!literal.empty()) out.push_back({false, std::move(literal)});
    literal.clear();
    out.push_back({true, std::string(tmpl.substr(i + 1, j - i - 1))});
    i = j;
  }
  if (!literal.empty()) out.push_back({false, std::move(literal)});
  return out;
}

}  // namespace

std::vector<std::string> template_tags(std::string_view tmpl) {
  std::vector<std::string> out;
  for (const auto& piece : split_template(tmpl)) {
    if (piece.is_tag && std::find(out.begin(), out.end(), piece.text) == out.end()) out.push_back(piece.text);
  }
  return out;
}

Rendered render_text(std::string_view tmpl, const Bindings& bindings, const Settings& settings) {
  Rendered out;
  for (const auto& piece : split_template(tmpl)) {
    if (!piece.is_tag) {
      out.text += piece.text;
      continue;
    }
    std::string value;
    if (auto b = bindings.find(piece.text); b != bindings.end()) {
      value = b->second;
    } else if (auto p = settings.parameters.find(piece.text); p != settings.parameters.end()) {
      value = scalar_text(p->second);
    } else if (auto d = settings.defaults.find(piece.text); d != settings.defaults.end()) {
      value = d->second;
    } else {
      throw Error(ErrorKind::Template, "unresolved tag " + piece.text);
    }
    const std::size_t begin = out.text.size();
    out.text += value;
    out.spans.push_back({begin, out.text.size(), piece.text});
  }
  return out;
}

SystemModel render(std::string_view tmpl, const Bindings& bindings, const Settings& settings, std::string* text_out) {
  Rendered r = render_text(tmpl, bindings, settings);
  if (text_out) *text_out = r.text;
  try {
    return parse_model(r.text);
  } catch (const ParseError& e) {
    std::string where;
    for (const auto& span : r.spans) {
      if (e.offset() >= span.begin && e.offset() < span.end) {
        where = " (inside substitution of @" + span.tag + "@)";
        break;
      }
      // An incomplete fragment surfaces at the next token after it.
      if (e.offset() >= span.end && e.offset() <= r.text.size() &&
          r.text.find_first_not_of(" \t\r\n", span.end) >= e.offset()) {
        where = " (after substitution of @" + span.tag + "@)";
      }
    }
    throw ParseError("rendered model: " + e.message() + where, e.line(), e.column(), e.offset());
  }
}

}  // namespace tracecheck
