#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "dedalus/ast.hpp"

namespace dedalus {

struct ParseError : std::runtime_error {
  ParseError(std::string msg, int line, int col);
  int line;
  int col;
};

/// Head annotation in rule text: none, `@next`, or `@Var`.
enum class HeadAnnotation { None, Next, Async };

struct ParsedRule {
  Rule rule;
  HeadAnnotation annotation = HeadAnnotation::None;
  std::string addressee;  // variable name when annotation == Async
  int line = 0;           // where the rule starts, for diagnostics
  int col = 0;
};

/// Parses rule text: `head <- lit, not atom, ... .`, `%` line comments,
/// lowercase relation names, capitalized variables, lowercase identifiers
/// and numbers as constants. Head atoms may carry `@next` / `@Var`.
std::vector<ParsedRule> parse_rule_text(const std::string& text);

/// Pure-Datalog entry point; rejects head annotations.
Program parse_program(const std::string& text);

std::string print_program(const Program& p);

}  // namespace dedalus
