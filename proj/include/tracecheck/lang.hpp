#pragma once

#include <string>
#include <string_view>

#include "tracecheck/ctl.hpp"
#include "tracecheck/model.hpp"

namespace tracecheck {

// Guarded-command model language (.gcm):
//
//   model   := const* var+ initc? command*
//   const   := "const" IDENT "=" INT ";"
//   var     := "var" IDENT ":" INT ".." INT "init" INT ";"
//   initc   := "init" boolexpr ";"
//   command := "[" IDENT? "]" boolexpr "->" update ";"
//   update  := "skip" | IDENT "'" "=" arithexpr ("&" IDENT "'" "=" arithexpr)*
//
// `//` starts a comment running to end of line. Throws ParseError.
SystemModel parse_model(std::string_view text);
std::string print_model(const SystemModel& model);
std::string print_expr(const Expr& expr);

// CTL properties (.ctl). Atoms are `IDENT op INT`; `!` and the temporal
// operators bind tighter than `&`, which binds tighter than `|`.
FormulaPtr parse_formula(std::string_view text);
std::string print_formula(const Formula& f);

}  // namespace tracecheck
