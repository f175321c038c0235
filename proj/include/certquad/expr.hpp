#pragma once

/**
 * @file expr.hpp
 * @brief Minimal arithmetic-expression parser and evaluator, so integrands
 *        can be given as text.
 *
 * Grammar (whitespace insignificant, no implicit multiplication):
 *
 *     sum     := product (('+' | '-') product)*
 *     product := factor (('*' | '/') factor)*
 *     factor  := '-' factor | primary ('^' factor)?
 *     primary := number | 't' | 'pi' | 'e' | fn '(' sum ')' | '(' sum ')'
 *     fn      := 'sin' | 'cos' | 'exp' | 'log' | 'sqrt' | 'abs'
 *
 * '^' is right-associative and binds tighter than unary minus, so "-t^2"
 * parses as -(t^2). Parse failures carry the byte offset and the expected
 * token set; evaluation rejects domain violations (log of a non-positive
 * value, division by zero, ...) instead of returning NaN.
 */

#include <charconv>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "certquad/core.hpp"

namespace certquad {

/// Syntax error with the byte offset it occurred at.
struct ParseError : Error {
  std::size_t offset;
  std::string expected;

  ParseError(std::size_t offset_, std::string expected_,
             const std::string& found)
      : Error("syntax error at offset " + std::to_string(offset_) +
              ": expected " + expected_ + ", found " + found),
        offset(offset_),
        expected(std::move(expected_)) {}
};

/// Domain violation during evaluation, naming the offending operation.
struct EvalError : Error {
  using Error::Error;
};

enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class CallFn { Sin, Cos, Exp, Log, Sqrt, Abs };
enum class NamedConst { Pi, E };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Number {
  double value;
};
struct Var {};  // the integration variable t
struct Constant {
  NamedConst name;
};
struct Negate {
  ExprPtr operand;
};
struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct Call {
  CallFn fn;
  ExprPtr arg;
};

/// Immutable expression tree over the single variable t; shareable across
/// threads.
struct Expr {
  std::variant<Number, Var, Constant, Negate, Binary, Call> node;
};

namespace detail {

inline ExprPtr expr_node(decltype(Expr::node) node) {
  return std::make_shared<const Expr>(Expr{std::move(node)});
}

inline const char* fn_name(CallFn fn) {
  switch (fn) {
    case CallFn::Sin: return "sin";
    case CallFn::Cos: return "cos";
    case CallFn::Exp: return "exp";
    case CallFn::Log: return "log";
    case CallFn::Sqrt: return "sqrt";
    case CallFn::Abs: return "abs";
  }
  return "?";
}

class ExprParser {
 public:
  explicit ExprParser(std::string_view src) : src_(src) {}

  ExprPtr parse() {
    ExprPtr e = parse_sum();
    skip_ws();
    if (pos_ != src_.size())
      throw ParseError(pos_, "end of input or an operator", found_here());
    return e;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
            src_[pos_] == '\r'))
      ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string found_here() const {
    if (pos_ >= src_.size()) return "end of input";
    return std::string("'") + src_[pos_] + "'";
  }

  ExprPtr parse_sum() {
    ExprPtr lhs = parse_product();
    for (;;) {
      if (eat('+'))
        lhs = expr_node(Binary{BinaryOp::Add, lhs, parse_product()});
      else if (eat('-'))
        lhs = expr_node(Binary{BinaryOp::Sub, lhs, parse_product()});
      else
        return lhs;
    }
  }

  ExprPtr parse_product() {
    ExprPtr lhs = parse_factor();
    for (;;) {
      if (eat('*'))
        lhs = expr_node(Binary{BinaryOp::Mul, lhs, parse_factor()});
      else if (eat('/'))
        lhs = expr_node(Binary{BinaryOp::Div, lhs, parse_factor()});
      else
        return lhs;
    }
  }

  ExprPtr parse_factor() {
    if (eat('-')) return expr_node(Negate{parse_factor()});
    ExprPtr base = parse_primary();
    if (eat('^'))
      return expr_node(Binary{BinaryOp::Pow, base, parse_factor()});
    return base;
  }

  ExprPtr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size())
      throw ParseError(pos_, "a number, 't', a constant, a function call or '('",
                       "end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr inner = parse_sum();
      if (!eat(')'))
        throw ParseError(pos_, "')'", found_here());
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return parse_name();
    throw ParseError(pos_, "a number, 't', a constant, a function call or '('",
                     found_here());
  }

  ExprPtr parse_number() {
    double value = 0.0;
    const char* begin = src_.data() + pos_;
    const char* end = src_.data() + src_.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin)
      throw ParseError(pos_, "a number", found_here());
    pos_ += static_cast<std::size_t>(ptr - begin);
    return expr_node(Number{value});
  }

  ExprPtr parse_name() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           ((src_[pos_] >= 'a' && src_[pos_] <= 'z') ||
            (src_[pos_] >= 'A' && src_[pos_] <= 'Z')))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);
    if (name == "t") return expr_node(Var{});
    if (name == "pi") return expr_node(Constant{NamedConst::Pi});
    if (name == "e") return expr_node(Constant{NamedConst::E});
    const CallFn fn = name == "sin"    ? CallFn::Sin
                      : name == "cos"  ? CallFn::Cos
                      : name == "exp"  ? CallFn::Exp
                      : name == "log"  ? CallFn::Log
                      : name == "sqrt" ? CallFn::Sqrt
                      : name == "abs"  ? CallFn::Abs
                                       : static_cast<CallFn>(-1);
    if (static_cast<int>(fn) == -1)
      throw ParseError(start, "one of t, pi, e, sin, cos, exp, log, sqrt, abs",
                       "'" + std::string(name) + "'");
    if (!eat('('))
      throw ParseError(pos_, "'(' after '" + std::string(name) + "'",
                       found_here());
    ExprPtr arg = parse_sum();
    if (!eat(')'))
      throw ParseError(pos_, "')'", found_here());
    return expr_node(Call{fn, arg});
  }
};

inline double eval_node(const Expr& e, double t);

inline double checked_result(double v, const char* op) {
  if (!std::isfinite(v))
    throw EvalError(std::string(op) + ": non-finite result");
  return v;
}

struct EvalVisitor {
  double t;

  double operator()(const Number& n) const { return n.value; }
  double operator()(const Var&) const { return t; }
  double operator()(const Constant& c) const {
    return c.name == NamedConst::Pi ? 3.14159265358979323846
                                    : 2.71828182845904523536;
  }
  double operator()(const Negate& n) const { return -eval_node(*n.operand, t); }
  double operator()(const Binary& b) const {
    const double lhs = eval_node(*b.lhs, t);
    const double rhs = eval_node(*b.rhs, t);
    switch (b.op) {
      case BinaryOp::Add: return checked_result(lhs + rhs, "'+'");
      case BinaryOp::Sub: return checked_result(lhs - rhs, "'-'");
      case BinaryOp::Mul: return checked_result(lhs * rhs, "'*'");
      case BinaryOp::Div:
        if (rhs == 0.0) throw EvalError("'/': division by zero");
        return checked_result(lhs / rhs, "'/'");
      case BinaryOp::Pow: {
        if (lhs < 0.0 && rhs != std::floor(rhs))
          throw EvalError("'^': negative base with non-integer exponent");
        if (lhs == 0.0 && rhs < 0.0)
          throw EvalError("'^': zero base with negative exponent");
        return checked_result(std::pow(lhs, rhs), "'^'");
      }
    }
    throw EvalError("unknown binary operator");
  }
  double operator()(const Call& c) const {
    const double arg = eval_node(*c.arg, t);
    switch (c.fn) {
      case CallFn::Sin: return std::sin(arg);
      case CallFn::Cos: return std::cos(arg);
      case CallFn::Exp: return checked_result(std::exp(arg), "exp");
      case CallFn::Log:
        if (arg <= 0.0) throw EvalError("log: non-positive argument");
        return std::log(arg);
      case CallFn::Sqrt:
        if (arg < 0.0) throw EvalError("sqrt: negative argument");
        return std::sqrt(arg);
      case CallFn::Abs: return std::fabs(arg);
    }
    throw EvalError("unknown function");
  }
};

inline double eval_node(const Expr& e, double t) {
  return std::visit(EvalVisitor{t}, e.node);
}

struct PrintVisitor {
  std::string operator()(const Number& n) const { return num(n.value); }
  std::string operator()(const Var&) const { return "t"; }
  std::string operator()(const Constant& c) const {
    return c.name == NamedConst::Pi ? "pi" : "e";
  }
  std::string operator()(const Negate& n) const;
  std::string operator()(const Binary& b) const;
  std::string operator()(const Call& c) const;
};

inline std::string print_node(const Expr& e) {
  return std::visit(PrintVisitor{}, e.node);
}

inline std::string PrintVisitor::operator()(const Negate& n) const {
  return "(-" + print_node(*n.operand) + ")";
}
inline std::string PrintVisitor::operator()(const Binary& b) const {
  const char* op = b.op == BinaryOp::Add   ? "+"
                   : b.op == BinaryOp::Sub ? "-"
                   : b.op == BinaryOp::Mul ? "*"
                   : b.op == BinaryOp::Div ? "/"
                                           : "^";
  return "(" + print_node(*b.lhs) + op + print_node(*b.rhs) + ")";
}
inline std::string PrintVisitor::operator()(const Call& c) const {
  return std::string(fn_name(c.fn)) + "(" + print_node(*c.arg) + ")";
}

}  // namespace detail

/// Parses the grammar above; throws ParseError on malformed input.
inline ExprPtr parse(std::string_view src) {
  return detail::ExprParser(src).parse();
}

/// Evaluates the tree at t; throws EvalError on domain violations.
inline double eval(const Expr& e, double t) {
  return detail::eval_node(e, t);
}

/// Canonical fully-parenthesized rendering. Parsing it back yields a
/// structurally identical tree for any tree the parser can produce
/// (literals in parsed trees are never negative; negation is a node).
inline std::string print(const Expr& e) { return detail::print_node(e); }

/// Structural equality.
inline bool equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* n = std::get_if<Number>(&a.node))
    return n->value == std::get<Number>(b.node).value;
  if (std::holds_alternative<Var>(a.node)) return true;
  if (const auto* c = std::get_if<Constant>(&a.node))
    return c->name == std::get<Constant>(b.node).name;
  if (const auto* n = std::get_if<Negate>(&a.node))
    return equal(*n->operand, *std::get<Negate>(b.node).operand);
  if (const auto* x = std::get_if<Binary>(&a.node)) {
    const auto& y = std::get<Binary>(b.node);
    return x->op == y.op && equal(*x->lhs, *y.lhs) && equal(*x->rhs, *y.rhs);
  }
  const auto& x = std::get<Call>(a.node);
  const auto& y = std::get<Call>(b.node);
  return x.fn == y.fn && equal(*x.arg, *y.arg);
}

/// Wraps a shared tree as an Integrand.
inline Integrand to_integrand(ExprPtr e) {
  return [e = std::move(e)](double t) { return eval(*e, t); };
}

}  // namespace certquad
