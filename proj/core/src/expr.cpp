#include "fsde/expr.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <functional>
#include <unordered_map>
#include <utility>

namespace fsde {

struct Expression::Node {
  Op op;
  double value;
  int exponent;
  std::vector<Expression> args;
  std::size_t hash;
  bool has_var;
};

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

double ipow(double base, int k) {
  if (k < 0) return 1.0 / ipow(base, -k);
  double result = 1.0;
  while (k > 0) {
    if (k & 1) result *= base;
    base *= base;
    k >>= 1;
  }
  return result;
}

double apply_function(Op op, double v) {
  switch (op) {
    case Op::Sin: return std::sin(v);
    case Op::Cos: return std::cos(v);
    case Op::Exp: return std::exp(v);
    case Op::Tanh: return std::tanh(v);
    default: break;
  }
  throw std::logic_error("apply_function: not a unary function");
}

}  // namespace

const char* op_name(Op op) noexcept {
  switch (op) {
    case Op::Const: return "const";
    case Op::Var: return "x";
    case Op::Neg: return "neg";
    case Op::Add: return "add";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Pow: return "pow";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Exp: return "exp";
    case Op::Tanh: return "tanh";
  }
  return "?";
}

Expression make_node(Op op, double value, int exponent, std::vector<Expression> args) {
  std::size_t h = mix(static_cast<std::size_t>(op), std::bit_cast<std::uint64_t>(value));
  h = mix(h, static_cast<std::size_t>(exponent));
  bool has_var = op == Op::Var;
  for (const auto& a : args) {
    h = mix(h, a.hash());
    has_var = has_var || !a.is_variable_free();
  }
  auto node = std::make_shared<const Expression::Node>(
      Expression::Node{op, value, exponent, std::move(args), h, has_var});
  return Expression(std::move(node));
}

Expression::Expression() : Expression(constant(0.0)) {}

Expression::Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expression Expression::constant(double value) { return make_node(Op::Const, value, 0, {}); }

Expression Expression::variable() {
  static const Expression x = make_node(Op::Var, 0.0, 0, {});
  return x;
}

Op Expression::op() const noexcept { return node_->op; }
double Expression::value() const noexcept { return node_->value; }
int Expression::exponent() const noexcept { return node_->exponent; }
std::span<const Expression> Expression::args() const noexcept { return node_->args; }
std::size_t Expression::hash() const noexcept { return node_->hash; }
bool Expression::is_variable_free() const noexcept { return !node_->has_var; }

double Expression::evaluate(double x) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return x;
    case Op::Neg: return -n.args[0].evaluate(x);
    case Op::Add: {
      double s = 0.0;
      for (const auto& a : n.args) s += a.evaluate(x);
      return s;
    }
    case Op::Mul: {
      double p = 1.0;
      for (const auto& a : n.args) p *= a.evaluate(x);
      return p;
    }
    case Op::Div: return n.args[0].evaluate(x) / n.args[1].evaluate(x);
    case Op::Pow: return ipow(n.args[0].evaluate(x), n.exponent);
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Tanh: return apply_function(n.op, n.args[0].evaluate(x));
  }
  return 0.0;
}

bool Expression::equals(const Expression& other) const noexcept {
  if (node_ == other.node_) return true;
  const Node& a = *node_;
  const Node& b = *other.node_;
  if (a.hash != b.hash || a.op != b.op || a.exponent != b.exponent ||
      std::bit_cast<std::uint64_t>(a.value) != std::bit_cast<std::uint64_t>(b.value) ||
      a.args.size() != b.args.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!a.args[i].equals(b.args[i])) return false;
  }
  return true;
}

std::size_t Expression::tree_size() const noexcept {
  std::size_t size = 1;
  for (const auto& a : node_->args) size += a.tree_size();
  return size;
}

// ---------------------------------------------------------------------------
// Smart constructors

Expression operator-(const Expression& e) {
  if (e.is_constant()) return Expression::constant(-e.value());
  if (e.op() == Op::Neg) return e.args()[0];
  return make_node(Op::Neg, 0.0, 0, {e});
}

Expression sum(std::vector<Expression> terms) {
  double c = 0.0;
  bool has_constant = false;
  std::vector<Expression> rest;
  rest.reserve(terms.size());
  std::function<void(const Expression&)> absorb = [&](const Expression& t) {
    if (t.op() == Op::Add) {
      for (const auto& inner : t.args()) absorb(inner);
    } else if (t.is_constant()) {
      c += t.value();
      has_constant = true;
    } else {
      rest.push_back(t);
    }
  };
  for (const auto& t : terms) absorb(t);
  if (rest.empty()) return Expression::constant(has_constant ? c : 0.0);
  if (c != 0.0) rest.insert(rest.begin(), Expression::constant(c));
  if (rest.size() == 1) return rest.front();
  return make_node(Op::Add, 0.0, 0, std::move(rest));
}

Expression product(std::vector<Expression> factors) {
  double c = 1.0;
  std::vector<Expression> rest;
  rest.reserve(factors.size());
  bool zero = false;
  std::function<void(const Expression&)> absorb = [&](const Expression& f) {
    if (f.op() == Op::Mul) {
      for (const auto& inner : f.args()) absorb(inner);
    } else if (f.is_constant()) {
      if (f.value() == 0.0) zero = true;
      c *= f.value();
    } else {
      rest.push_back(f);
    }
  };
  for (const auto& f : factors) absorb(f);
  if (zero) return Expression::constant(0.0);
  if (rest.empty()) return Expression::constant(c);
  if (c != 1.0) rest.insert(rest.begin(), Expression::constant(c));
  if (rest.size() == 1) return rest.front();
  return make_node(Op::Mul, 0.0, 0, std::move(rest));
}

Expression operator+(const Expression& a, const Expression& b) { return sum({a, b}); }
Expression operator-(const Expression& a, const Expression& b) { return sum({a, -b}); }
Expression operator*(const Expression& a, const Expression& b) { return product({a, b}); }
Expression operator*(double c, const Expression& e) {
  return product({Expression::constant(c), e});
}

Expression operator/(const Expression& a, const Expression& b) {
  if (a.is_constant() && b.is_constant()) return Expression::constant(a.value() / b.value());
  if (b.is_one()) return a;
  if (a.is_zero()) return a;
  return make_node(Op::Div, 0.0, 0, {a, b});
}

Expression pow(const Expression& base, int exponent) {
  if (exponent == 0) return Expression::constant(1.0);
  if (exponent == 1) return base;
  if (base.is_constant()) return Expression::constant(ipow(base.value(), exponent));
  return make_node(Op::Pow, 0.0, exponent, {base});
}

namespace {
Expression unary_function(Op op, const Expression& e) {
  if (e.is_constant()) return Expression::constant(apply_function(op, e.value()));
  return make_node(op, 0.0, 0, {e});
}
}  // namespace

Expression sin(const Expression& e) { return unary_function(Op::Sin, e); }
Expression cos(const Expression& e) { return unary_function(Op::Cos, e); }
Expression exp(const Expression& e) { return unary_function(Op::Exp, e); }
Expression tanh(const Expression& e) { return unary_function(Op::Tanh, e); }

Expression simplify(const Expression& e) {
  std::vector<Expression> args;
  args.reserve(e.args().size());
  for (const auto& a : e.args()) args.push_back(simplify(a));
  switch (e.op()) {
    case Op::Const:
    case Op::Var: return e;
    case Op::Neg: return -args[0];
    case Op::Add: return sum(std::move(args));
    case Op::Mul: return product(std::move(args));
    case Op::Div: return args[0] / args[1];
    case Op::Pow: return pow(args[0], e.exponent());
    case Op::Sin: return sin(args[0]);
    case Op::Cos: return cos(args[0]);
    case Op::Exp: return exp(args[0]);
    case Op::Tanh: return tanh(args[0]);
  }
  return e;
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

Expression derivative_once(const Expression& e) {
  if (e.is_variable_free()) return Expression::constant(0.0);
  const auto args = e.args();
  switch (e.op()) {
    case Op::Const: return Expression::constant(0.0);
    case Op::Var: return Expression::constant(1.0);
    case Op::Neg: return -derivative_once(args[0]);
    case Op::Add: {
      std::vector<Expression> terms;
      terms.reserve(args.size());
      for (const auto& a : args) terms.push_back(derivative_once(a));
      return sum(std::move(terms));
    }
    case Op::Mul: {
      std::vector<Expression> terms;
      for (std::size_t i = 0; i < args.size(); ++i) {
        Expression di = derivative_once(args[i]);
        if (di.is_zero()) continue;
        std::vector<Expression> factors(args.begin(), args.end());
        factors[i] = di;
        terms.push_back(product(std::move(factors)));
      }
      return sum(std::move(terms));
    }
    case Op::Div: {
      const Expression& u = args[0];
      const Expression& v = args[1];
      Expression du = derivative_once(u);
      if (v.is_variable_free()) return du / v;
      Expression dv = derivative_once(v);
      return (du * v - u * dv) / pow(v, 2);
    }
    case Op::Pow: {
      const int k = e.exponent();
      return product({Expression::constant(static_cast<double>(k)), pow(args[0], k - 1),
                      derivative_once(args[0])});
    }
    case Op::Sin: return cos(args[0]) * derivative_once(args[0]);
    case Op::Cos:
      return product({Expression::constant(-1.0), sin(args[0]), derivative_once(args[0])});
    case Op::Exp: return e * derivative_once(args[0]);
    case Op::Tanh:
      return (Expression::constant(1.0) - pow(e, 2)) * derivative_once(args[0]);
  }
  return Expression::constant(0.0);
}

}  // namespace

Expression differentiate(const Expression& e, int order) {
  if (order < 0) throw std::invalid_argument("differentiate: negative order");
  Expression result = e;
  for (int i = 0; i < order; ++i) result = derivative_once(result);
  return result;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(const Expression& e) {
  switch (e.op()) {
    case Op::Add: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Const: return std::signbit(e.value()) ? 3 : 5;
    case Op::Pow: return 4;
    default: return 5;
  }
}

void render(const Expression& e, std::string& out);

void render_wrapped(const Expression& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  render(e, out);
  if (wrap) out += ')';
}

void render(const Expression& e, std::string& out) {
  const auto args = e.args();
  switch (e.op()) {
    case Op::Const: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", e.value());
      out += buf;
      return;
    }
    case Op::Var: out += 'x'; return;
    case Op::Neg:
      out += '-';
      render_wrapped(args[0], precedence(args[0]) < 4, out);
      return;
    case Op::Add:
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += " + ";
        render_wrapped(args[i], precedence(args[i]) < 2, out);
      }
      return;
    case Op::Mul:
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) out += " * ";
        render_wrapped(args[i], precedence(args[i]) < 3 || args[i].op() == Op::Div, out);
      }
      return;
    case Op::Div:
      render_wrapped(args[0], precedence(args[0]) < 2, out);
      out += " / ";
      render_wrapped(args[1], precedence(args[1]) < 3, out);
      return;
    case Op::Pow:
      render_wrapped(args[0], precedence(args[0]) < 5, out);
      out += '^';
      out += std::to_string(e.exponent());
      return;
    case Op::Sin:
    case Op::Cos:
    case Op::Exp:
    case Op::Tanh:
      out += op_name(e.op());
      out += '(';
      render(args[0], out);
      out += ')';
      return;
  }
}

}  // namespace

std::string Expression::to_string() const {
  std::string out;
  render(*this, out);
  return out;
}

ParseError::ParseError(Kind kind, std::size_t offset, const std::string& message)
    : std::runtime_error(message + " at offset " + std::to_string(offset)),
      kind_(kind),
      offset_(offset) {}

// ---------------------------------------------------------------------------
// Compiled tape

CompiledExpression::CompiledExpression() : CompiledExpression(Expression::constant(0.0)) {}

CompiledExpression::CompiledExpression(const Expression& root) {
  constant_ = root.is_variable_free();
  std::unordered_map<std::size_t, std::vector<std::pair<Expression, std::uint32_t>>> seen;

  std::function<std::uint32_t(const Expression&)> emit = [&](const Expression& e) {
    auto& bucket = seen[e.hash()];
    for (const auto& [expr, slot] : bucket) {
      if (expr.equals(e)) return slot;
    }
    std::vector<std::uint32_t> operand_slots;
    operand_slots.reserve(e.args().size());
    for (const auto& a : e.args()) operand_slots.push_back(emit(a));
    Instr instr{e.op(), e.exponent(), e.value(), static_cast<std::uint32_t>(operands_.size()),
                static_cast<std::uint32_t>(operand_slots.size())};
    operands_.insert(operands_.end(), operand_slots.begin(), operand_slots.end());
    code_.push_back(instr);
    const auto slot = static_cast<std::uint32_t>(code_.size() - 1);
    seen[e.hash()].emplace_back(e, slot);
    return slot;
  };
  emit(root);
}

double CompiledExpression::operator()(double x) const {
  constexpr std::size_t kStack = 128;
  double stack_buf[kStack];
  std::vector<double> heap_buf;
  double* reg = stack_buf;
  if (code_.size() > kStack) {
    heap_buf.resize(code_.size());
    reg = heap_buf.data();
  }
  const std::uint32_t* ops = operands_.data();
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Instr& in = code_[i];
    const std::uint32_t* a = ops + in.first;
    double r = 0.0;
    switch (in.op) {
      case Op::Const: r = in.value; break;
      case Op::Var: r = x; break;
      case Op::Neg: r = -reg[a[0]]; break;
      case Op::Add:
        r = 0.0;
        for (std::uint32_t k = 0; k < in.count; ++k) r += reg[a[k]];
        break;
      case Op::Mul:
        r = 1.0;
        for (std::uint32_t k = 0; k < in.count; ++k) r *= reg[a[k]];
        break;
      case Op::Div: r = reg[a[0]] / reg[a[1]]; break;
      case Op::Pow: r = ipow(reg[a[0]], in.exponent); break;
      case Op::Sin: r = std::sin(reg[a[0]]); break;
      case Op::Cos: r = std::cos(reg[a[0]]); break;
      case Op::Exp: r = std::exp(reg[a[0]]); break;
      case Op::Tanh: r = std::tanh(reg[a[0]]); break;
    }
    reg[i] = r;
  }
  return reg[code_.size() - 1];
}

}  // namespace fsde
