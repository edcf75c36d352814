#include "chebfem/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace chebfem {

namespace {

ExprAst make_node(ExprNode n) { return std::make_shared<const ExprNode>(std::move(n)); }

ExprAst constant(double v) { return make_node({ExprOp::constant, v, ExprFunc::exp, nullptr, nullptr}); }

ExprAst unary(ExprOp op, ExprAst a) {
  return make_node({op, 0.0, ExprFunc::exp, std::move(a), nullptr});
}

ExprAst binary(ExprOp op, ExprAst a, ExprAst b) {
  return make_node({op, 0.0, ExprFunc::exp, std::move(a), std::move(b)});
}

ExprAst call(ExprFunc f, ExprAst a) {
  return make_node({ExprOp::call, 0.0, f, std::move(a), nullptr});
}

struct Parser {
  std::string_view text;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool consume(char c) {
    if (peek() == c) {
      ++pos;
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) { throw SyntaxError(what, pos); }

  double read_number() {
    skip_ws();
    const char* begin = text.data() + pos;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("expected number");
    pos += static_cast<std::size_t>(end - begin);
    return v;
  }

  std::string read_ident() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
      ++pos;
    }
    return std::string(text.substr(start, pos - start));
  }

  ExprAst parse_expression() {
    ExprAst lhs = parse_term();
    for (;;) {
      if (consume('+')) {
        lhs = binary(ExprOp::add, lhs, parse_term());
      } else if (consume('-')) {
        lhs = binary(ExprOp::sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  ExprAst parse_term() {
    ExprAst lhs = parse_unary();
    for (;;) {
      if (consume('*')) {
        lhs = binary(ExprOp::mul, lhs, parse_unary());
      } else if (consume('/')) {
        lhs = binary(ExprOp::div, lhs, parse_unary());
      } else {
        return lhs;
      }
    }
  }

  ExprAst parse_unary() {
    if (consume('-')) return unary(ExprOp::neg, parse_unary());
    return parse_power();
  }

  ExprAst parse_power() {
    ExprAst base = parse_primary();
    if (consume('^')) {
      skip_ws();
      double sign = 1.0;
      if (consume('-')) sign = -1.0;
      const char c = peek();
      if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '.')) {
        fail("exponent must be a numeric constant");
      }
      return binary(ExprOp::pow, base, constant(sign * read_number()));
    }
    return base;
  }

  ExprAst parse_primary() {
    const char c = peek();
    if (c == '(') {
      ++pos;
      ExprAst inner = parse_expression();
      if (!consume(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return constant(read_number());
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t at = pos;
      const std::string id = read_ident();
      if (id == "x") return make_node({ExprOp::var_x, 0, ExprFunc::exp, nullptr, nullptr});
      if (id == "y") return make_node({ExprOp::var_y, 0, ExprFunc::exp, nullptr, nullptr});
      ExprFunc f;
      if (id == "exp") f = ExprFunc::exp;
      else if (id == "sin") f = ExprFunc::sin;
      else if (id == "cos") f = ExprFunc::cos;
      else if (id == "sqrt") f = ExprFunc::sqrt;
      else if (id == "log") f = ExprFunc::log;
      else throw SyntaxError("unknown identifier '" + id + "'", at);
      if (!consume('(')) fail("expected '(' after function name");
      ExprAst arg = parse_expression();
      if (!consume(')')) fail("expected ')'");
      return call(f, arg);
    }
    fail(c == '\0' ? "unexpected end of input" : std::string("unexpected character '") + c + "'");
  }
};

bool is_integral(double v) { return std::isfinite(v) && v == std::floor(v) && std::fabs(v) < 1e15; }

double integer_power(double base, long long n) {
  if (n < 0) {
    if (base == 0.0) throw EvalError("division by zero in negative power");
    return 1.0 / integer_power(base, -n);
  }
  double result = 1.0;
  double b = base;
  while (n > 0) {
    if (n & 1) result *= b;
    b *= b;
    n >>= 1;
  }
  return result;
}

}  // namespace

ExprAst parse_expr(std::string_view text) {
  Parser p{text};
  ExprAst ast = p.parse_expression();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing input");
  return ast;
}

double eval_expr(const ExprAst& ast, double x, double y) {
  if (!ast) throw EvalError("null expression");
  switch (ast->op) {
    case ExprOp::constant: return ast->value;
    case ExprOp::var_x: return x;
    case ExprOp::var_y: return y;
    case ExprOp::neg: return -eval_expr(ast->lhs, x, y);
    case ExprOp::add: return eval_expr(ast->lhs, x, y) + eval_expr(ast->rhs, x, y);
    case ExprOp::sub: return eval_expr(ast->lhs, x, y) - eval_expr(ast->rhs, x, y);
    case ExprOp::mul: return eval_expr(ast->lhs, x, y) * eval_expr(ast->rhs, x, y);
    case ExprOp::div: {
      const double den = eval_expr(ast->rhs, x, y);
      if (den == 0.0) throw EvalError("division by zero");
      return eval_expr(ast->lhs, x, y) / den;
    }
    case ExprOp::pow: {
      const double base = eval_expr(ast->lhs, x, y);
      const double e = ast->rhs->value;
      if (is_integral(e)) return integer_power(base, static_cast<long long>(e));
      if (base < 0.0) throw EvalError("fractional power of negative base");
      if (base == 0.0) return e > 0.0 ? 0.0 : throw EvalError("zero base with non-positive exponent");
      return std::exp(e * std::log(base));
    }
    case ExprOp::call: {
      const double a = eval_expr(ast->lhs, x, y);
      switch (ast->func) {
        case ExprFunc::exp: return std::exp(a);
        case ExprFunc::sin: return std::sin(a);
        case ExprFunc::cos: return std::cos(a);
        case ExprFunc::sqrt:
          if (a < 0.0) throw EvalError("sqrt of negative value");
          return std::sqrt(a);
        case ExprFunc::log:
          if (a <= 0.0) throw EvalError("log of non-positive value");
          return std::log(a);
      }
      throw EvalError("bad function");
    }
  }
  throw EvalError("bad node");
}

namespace {

const char* func_name(ExprFunc f) {
  switch (f) {
    case ExprFunc::exp: return "exp";
    case ExprFunc::sin: return "sin";
    case ExprFunc::cos: return "cos";
    case ExprFunc::sqrt: return "sqrt";
    case ExprFunc::log: return "log";
  }
  return "?";
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(const ExprAst& ast) {
  if (!ast) return "";
  switch (ast->op) {
    case ExprOp::constant: return format_number(ast->value);
    case ExprOp::var_x: return "x";
    case ExprOp::var_y: return "y";
    case ExprOp::neg: return "(-" + to_string(ast->lhs) + ")";
    case ExprOp::add: return "(" + to_string(ast->lhs) + "+" + to_string(ast->rhs) + ")";
    case ExprOp::sub: return "(" + to_string(ast->lhs) + "-" + to_string(ast->rhs) + ")";
    case ExprOp::mul: return "(" + to_string(ast->lhs) + "*" + to_string(ast->rhs) + ")";
    case ExprOp::div: return "(" + to_string(ast->lhs) + "/" + to_string(ast->rhs) + ")";
    case ExprOp::pow: return "(" + to_string(ast->lhs) + "^" + format_number(ast->rhs->value) + ")";
    case ExprOp::call: return std::string(func_name(ast->func)) + "(" + to_string(ast->lhs) + ")";
  }
  return "";
}

bool structurally_equal(const ExprAst& a, const ExprAst& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op != b->op) return false;
  if (a->op == ExprOp::constant && a->value != b->value) return false;
  if (a->op == ExprOp::call && a->func != b->func) return false;
  return structurally_equal(a->lhs, b->lhs) && structurally_equal(a->rhs, b->rhs);
}

}  // namespace chebfem
