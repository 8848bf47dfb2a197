#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "matid/poly.hpp"

namespace matid {

/// Syntax tree of the polynomial text grammar.
///
///   poly   := ['+'|'-'] term (('+'|'-') term)*
///   term   := item (['*'] item)*
///   item   := coeff | atom ['^' INT]
///   atom   := var | '(' poly ')' | '[' poly (',' poly)+ ']'
///   var    := 'x'INT | 'z'INT | 'e'INT'_'INT'_'INT
///   coeff  := INT ['/' INT]
///
/// Juxtaposed items multiply left to right, so "x1x2" is x1*x2 while "x12"
/// is the single variable x12. Brackets are left-nested commutators.
struct Expr {
  enum class Kind { Var, Const, Sum, Product, Commutator, Power };

  Kind kind = Kind::Const;
  VarRef var;
  Rational value;
  std::vector<Expr> children;
  std::vector<bool> negated;  // Sum only: sign of each child
  unsigned exponent = 1;      // Power only
  std::size_t offset = 0;     // byte position in the source text
};

/// Throws ParseError carrying the byte offset of the first bad token.
Expr parse_expr(std::string_view text);

NcPoly expr_to_poly(const Expr& e, Field field = Field::rationals());
NcPoly parse_poly(std::string_view text, Field field = Field::rationals());

}  // namespace matid
