#pragma once

#include <functional>
#include <string>

namespace nrrd {

// Compiled arithmetic expression in the node coordinates x and y.
using Expr = std::function<double(double, double)>;

// Recursive-descent parser for initial-condition expressions. Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := unary ('^' factor)?            (right associative)
//   unary  := ('+'|'-') unary | primary
//   primary:= number | ident | ident '(' args ')' | '(' expr ')'
// Identifiers: x, y, pi, e; functions: sin, cos, tan, exp, log, sqrt, abs
// (one argument), pow, min, max (two arguments).
// Malformed input throws DomainError with the offending position.
Expr parse_expression(const std::string& text);

}  // namespace nrrd
