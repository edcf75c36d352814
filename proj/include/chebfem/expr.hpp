#ifndef CHEBFEM_EXPR_HPP
#define CHEBFEM_EXPR_HPP

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace chebfem {

/// Parse failure; `offset` is the byte position of the offending token.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// Domain failure during evaluation (log of a non-positive value, division by
/// zero, fractional power of a negative base).
class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExprOp : int {
  constant,
  var_x,
  var_y,
  neg,
  add,
  sub,
  mul,
  div,
  pow,
  call,
};

enum class ExprFunc : int { exp, sin, cos, sqrt, log };

struct ExprNode;
/// Immutable expression tree; shareable across threads.
using ExprAst = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprOp op;
  double value = 0.0;                 // constant
  ExprFunc func = ExprFunc::exp;      // call
  ExprAst lhs;
  ExprAst rhs;
};

/// Recursive-descent parse of a scalar coefficient expression in x and y.
/// Precedence ^ > unary - > * / > + -, with left-associative + - * / and a
/// constant (optionally signed) exponent after ^. Implicit multiplication is
/// not supported.
ExprAst parse_expr(std::string_view text);

double eval_expr(const ExprAst& ast, double x, double y);

/// Fully parenthesized rendering; reparses to a structurally identical tree.
std::string to_string(const ExprAst& ast);

bool structurally_equal(const ExprAst& a, const ExprAst& b);

}  // namespace chebfem

#endif
