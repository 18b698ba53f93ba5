#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tracecheck/ctl.hpp"

namespace tracecheck {

// Execution log: header of m variable names, n rows of m integers.
struct ExecutionLog {
  std::vector<std::string> variables;
  std::vector<std::vector<std::int64_t>> rows;

  std::size_t row_count() const { return rows.size(); }
  std::size_t column_count() const { return variables.size(); }
};

// CSV: identifier header, integer rows, LF or CRLF, no quoting. Requires at
// least two data rows. Throws ParseError.
ExecutionLog parse_log(std::string_view text);
std::string print_log(const ExecutionLog& log);

enum class PropertyType { Strong, Weak };

// Faithful keeps the published base case c(n-1) & AG(c(n)) at i = 2;
// Corrected bottoms out at c(n) & AG(c(n)) with the recursion running down
// to i = 1.
enum class BaseMode { Faithful, Corrected };

// Conjunction over all columns of row i (1-based): v_1==r(i,1) & ... .
FormulaPtr row_conjunction(const ExecutionLog& log, std::size_t i);

FormulaPtr strong_property(const ExecutionLog& log, BaseMode base = BaseMode::Faithful);
FormulaPtr weak_property(const ExecutionLog& log, BaseMode base = BaseMode::Faithful);
FormulaPtr log_property(const ExecutionLog& log, PropertyType type, BaseMode base = BaseMode::Faithful);

// Non-empty when the faithful base case is unsatisfiable because the last
// two rows differ.
std::string faithful_base_warning(const ExecutionLog& log);

}  // namespace tracecheck
