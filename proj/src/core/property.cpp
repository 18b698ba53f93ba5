#include "tracecheck/property.hpp"

#include <charconv>
#include <set>
#include <sstream>

#include "tracecheck/error.hpp"

namespace tracecheck {

namespace {

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

ExecutionLog parse_log(std::string_view text) {
  ExecutionLog log;
  std::size_t start = 0;
  std::size_t line_no = 0;
  bool header_done = false;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    const std::size_t offset = start;
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() && start >= text.size()) break;  // trailing newline
    if (line.empty()) throw ParseError("empty line", line_no, 1, offset);

    auto cells = split_commas(line);
    if (!header_done) {
      std::set<std::string_view> seen;
      for (auto cell : cells) {
        cell = trim(cell);
        if (!is_identifier(cell)) throw ParseError("invalid column name '" + std::string(cell) + "'", line_no, 1, offset);
        if (!seen.insert(cell).second) {
          throw ParseError("duplicate header name '" + std::string(cell) + "'", line_no, 1, offset);
        }
        log.variables.emplace_back(cell);
      }
      header_done = true;
      continue;
    }
    if (cells.size() != log.variables.size()) {
      throw ParseError("ragged row at line " + std::to_string(line_no) + ": expected " +
                           std::to_string(log.variables.size()) + " values, found " + std::to_string(cells.size()),
                       line_no, 1, offset);
    }
    std::vector<std::int64_t> row;
    row.reserve(cells.size());
    std::size_t col = 1;
    for (auto cell : cells) {
      const std::string_view raw = cell;
      cell = trim(cell);
      std::int64_t value = 0;
      const char* b = cell.data();
      const char* e = cell.data() + cell.size();
      auto [ptr, ec] = std::from_chars(b, e, value);
      if (cell.empty() || ec != std::errc() || ptr != e) {
        throw ParseError("non-integer cell '" + std::string(cell) + "' at line " + std::to_string(line_no), line_no, col,
                         offset + col - 1);
      }
      row.push_back(value);
      col += raw.size() + 1;
    }
    log.rows.push_back(std::move(row));
  }
  if (!header_done) throw ParseError("empty log", 1, 1, 0);
  if (log.rows.size() < 2) {
    throw ParseError("fewer than 2 rows (found " + std::to_string(log.rows.size()) + ")", line_no == 0 ? 1 : line_no, 1,
                     text.size());
  }
  return log;
}

std::string print_log(const ExecutionLog& log) {
  std::ostringstream out;
  for (std::size_t j = 0; j < log.variables.size(); ++j) out << (j ? "," : "") << log.variables[j];
  out << '\n';
  for (const auto& row : log.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
    out << '\n';
  }
  return out.str();
}

FormulaPtr row_conjunction(const ExecutionLog& log, std::size_t i) {
  if (i < 1 || i > log.rows.size()) {
    throw Error(ErrorKind::InvalidArgument,
                "row index " + std::to_string(i) + " out of range 1.." + std::to_string(log.rows.size()));
  }
  const auto& row = log.rows[i - 1];
  FormulaPtr out;
  for (std::size_t j = 0; j < log.variables.size(); ++j) {
    FormulaPtr atom = ctl_atom(log.variables[j], Comparator::Eq, row[j]);
    out = out ? ctl_and(out, atom) : atom;
  }
  if (!out) throw Error(ErrorKind::InvalidArgument, "log has no columns");
  return out;
}

namespace {

FormulaPtr unroll(const ExecutionLog& log, Formula::Op step_op, BaseMode base) {
  const std::size_t n = log.rows.size();
  const std::size_t min_rows = base == BaseMode::Faithful ? 2 : 1;
  if (n < min_rows) {
    throw Error(ErrorKind::InvalidArgument, "property needs at least " + std::to_string(min_rows) + " log rows");
  }
  auto c = [&](std::size_t i) { return row_conjunction(log, i); };
  // S(i) covers rows n-i+1 .. n; build bottom-up from the base case.
  std::size_t i = base == BaseMode::Faithful ? 2 : 1;
  FormulaPtr s = ctl_and(c(n - i + 1), ctl_unary(Formula::Op::AG, c(n)));
  for (++i; i <= n; ++i) s = ctl_and(c(n - i + 1), ctl_unary(step_op, s));
  return s;
}

}  // namespace

FormulaPtr strong_property(const ExecutionLog& log, BaseMode base) { return unroll(log, Formula::Op::EX, base); }

FormulaPtr weak_property(const ExecutionLog& log, BaseMode base) { return unroll(log, Formula::Op::EF, base); }

FormulaPtr log_property(const ExecutionLog& log, PropertyType type, BaseMode base) {
  return type == PropertyType::Strong ? strong_property(log, base) : weak_property(log, base);
}

std::string faithful_base_warning(const ExecutionLog& log) {
  const std::size_t n = log.rows.size();
  if (n < 2 || log.rows[n - 2] == log.rows[n - 1]) return {};
  return "rows " + std::to_string(n - 1) + " and " + std::to_string(n) +
         " differ; the faithful base case c(n-1) & AG(c(n)) cannot be satisfied";
}

}  // namespace tracecheck
