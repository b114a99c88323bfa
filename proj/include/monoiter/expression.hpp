#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "monoiter/errors.hpp"
#include "monoiter/field.hpp"

namespace monoiter {

class ParseError : public InputError {
 public:
  ParseError(std::size_t position, const std::string& what)
      : InputError("parse error at position " + std::to_string(position) + ": " + what),
        position_(position) {}
  /// 0-based character offset into the expression.
  [[nodiscard]] std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Arithmetic over the vertex coordinates x, y, z.
///
///   precedence  operators        associativity
///   1 (lowest)  + -   (binary)   left
///   2           * /              left
///   3           + -   (unary)    prefix
///   4 (highest) ^                right, binds tighter than unary minus
///
/// so -x^2 = -(x^2) and 2^3^2 = 2^9. Atoms are real literals (with optional
/// exponent), x, y, z, parenthesized expressions and sin(e), cos(e), exp(e),
/// abs(e).
class Expression {
 public:
  static Expression parse(std::string_view text);

  [[nodiscard]] double evaluate(double x, double y, double z) const;
  [[nodiscard]] const std::string& text() const { return text_; }

  enum class Op { constant, var_x, var_y, var_z, add, sub, mul, div, pow, neg, sin, cos, exp, abs };
  struct Node {
    Op op;
    double value = 0.0;
    int lhs = -1;
    int rhs = -1;
  };

 private:
  friend class ExpressionParser;
  [[nodiscard]] double eval(int node, double x, double y, double z) const;

  std::string text_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

/// Evaluates the expression at every vertex coordinate. A non-finite value at
/// any vertex is an InputError naming the vertex.
Field parse_coefficient(std::string_view expr, const DomainPtr& domain);

}  // namespace monoiter
