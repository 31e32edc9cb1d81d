#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fsde {

/// Node kinds of the closed expression language used for diffusion
/// coefficients. The set is closed under differentiation.
enum class Op : std::uint8_t {
  Const,
  Var,
  Neg,
  Add,   // n-ary, flattened
  Mul,   // n-ary, flattened
  Div,
  Pow,   // integer exponent
  Sin,
  Cos,
  Exp,
  Tanh,
};

const char* op_name(Op op) noexcept;

/// Immutable expression tree in the single variable `x`.
///
/// Nodes are shared between expressions, so copies are cheap and derived
/// expressions (derivatives, D-operator iterates) reuse subtrees. The
/// arithmetic helpers below are smart constructors: they fold constants,
/// absorb zeros and ones and flatten nested sums and products, but never
/// reorder non-constant operands.
class Expression {
 public:
  /// The constant zero.
  Expression();

  static Expression constant(double value);
  static Expression variable();

  Op op() const noexcept;
  /// Constant value; only meaningful for `Op::Const`.
  double value() const noexcept;
  /// Integer exponent; only meaningful for `Op::Pow`.
  int exponent() const noexcept;
  std::span<const Expression> args() const noexcept;
  std::size_t hash() const noexcept;

  bool is_constant() const noexcept { return op() == Op::Const; }
  bool is_zero() const noexcept { return is_constant() && value() == 0.0; }
  bool is_one() const noexcept { return is_constant() && value() == 1.0; }
  /// True when the expression contains no occurrence of `x`.
  bool is_variable_free() const noexcept;

  /// Tree-walking evaluation. Prefer `CompiledExpression` in hot loops.
  double evaluate(double x) const;

  /// Structural equality (same tree shape, same constants bit for bit).
  bool equals(const Expression& other) const noexcept;
  friend bool operator==(const Expression& a, const Expression& b) noexcept {
    return a.equals(b);
  }

  /// Number of nodes, counting shared subtrees once per occurrence.
  std::size_t tree_size() const noexcept;

  /// Infix rendering that `parse_expression` maps back onto the same tree.
  std::string to_string() const;

  struct Node;

 private:
  explicit Expression(std::shared_ptr<const Node> node);
  friend Expression make_node(Op, double, int, std::vector<Expression>);

  std::shared_ptr<const Node> node_;
};

Expression operator-(const Expression& e);
Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression operator*(double c, const Expression& e);

Expression sum(std::vector<Expression> terms);
Expression product(std::vector<Expression> factors);
Expression pow(const Expression& base, int exponent);
Expression sin(const Expression& e);
Expression cos(const Expression& e);
Expression exp(const Expression& e);
Expression tanh(const Expression& e);

/// Rebuilds the tree bottom-up through the smart constructors.
Expression simplify(const Expression& e);

/// Exact symbolic derivative of the given order (order 0 returns `e`).
Expression differentiate(const Expression& e, int order = 1);

/// Parse failure. `offset()` is the byte offset into the input.
class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, UnknownIdentifier };

  ParseError(Kind kind, std::size_t offset, const std::string& message);

  Kind kind() const noexcept { return kind_; }
  std::size_t offset() const noexcept { return offset_; }

 private:
  Kind kind_;
  std::size_t offset_;
};

/// Parses an infix expression in `x`. See docs/expression-grammar.md.
Expression parse_expression(std::string_view text);

/// Parses a diffusion coefficient. Same grammar as `parse_expression`.
inline Expression parse_sigma(std::string_view text) {
  return parse_expression(text);
}

/// Flat evaluation tape with common subexpressions merged. Immutable and
/// safe to share between threads; evaluation uses a small per-call buffer.
class CompiledExpression {
 public:
  CompiledExpression();
  explicit CompiledExpression(const Expression& e);

  double operator()(double x) const;

  std::size_t instruction_count() const noexcept { return code_.size(); }
  bool is_constant() const noexcept { return constant_; }

 private:
  struct Instr {
    Op op;
    int exponent;
    double value;
    std::uint32_t first;  // index into operands_
    std::uint32_t count;
  };

  std::vector<Instr> code_;
  std::vector<std::uint32_t> operands_;
  bool constant_ = true;
};

}  // namespace fsde
