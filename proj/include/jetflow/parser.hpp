#ifndef JETFLOW_PARSER_HPP
#define JETFLOW_PARSER_HPP

#include <string>

#include "jetflow/expr.hpp"

namespace jetflow {

// Parses the expression grammar used by scenario files:
//
//   expr    := term (('+'|'-') term)*
//   term    := unary (('*'|'/') unary)*
//   unary   := '-' unary | power
//   power   := atom ('^' unary)?          // right associative, binds above unary -
//   atom    := number | variable | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | log | sqrt | atan
//
// Variables are t, q1..qm, v1..vm (and xdot0 for fields on the tangent
// bundle). Whitespace is insignificant. Throws ParseError with line/column,
// or UnknownSymbol for a variable index outside the chart dimension.
ScalarField parse_field(const std::string& text, int dim);

}  // namespace jetflow

#endif
