#include <cctype>
#include <charconv>
#include <numbers>
#include <string>

#include "fsde/expr.hpp"

namespace fsde {
namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expression parse() {
    Expression e = parse_sum();
    skip_space();
    if (pos_ < text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(ParseError::Kind::Syntax, pos_, message);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ >= text_.size()) fail(std::string("expected '") + c + "' before end of input");
      fail(std::string("expected '") + c + "'");
    }
  }

  // sum := product (('+' | '-') product)*
  Expression parse_sum() {
    Expression acc = parse_product();
    while (true) {
      if (accept('+')) {
        acc = acc + parse_product();
      } else if (accept('-')) {
        acc = acc - parse_product();
      } else {
        return acc;
      }
    }
  }

  // product := unary (('*' | '/') unary)*
  Expression parse_product() {
    Expression acc = parse_unary();
    while (true) {
      if (accept('*')) {
        acc = acc * parse_unary();
      } else if (accept('/')) {
        acc = acc / parse_unary();
      } else {
        return acc;
      }
    }
  }

  // unary := ('-' | '+') unary | power
  Expression parse_unary() {
    if (accept('-')) return -parse_unary();
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  // power := primary ('^' integer)?
  Expression parse_power() {
    Expression base = parse_primary();
    if (!accept('^')) return base;
    skip_space();
    const std::size_t start = pos_;
    bool negative = false;
    if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) {
      negative = text_[pos_] == '-';
      ++pos_;
    }
    const std::size_t digits = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == digits) {
      pos_ = digits;
      fail("expected integer exponent");
    }
    if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
      fail("exponent must be an integer");
    }
    int k = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + digits, text_.data() + pos_, k);
    if (ec != std::errc() || k > 64) {
      pos_ = start;
      fail("exponent out of range");
    }
    return pow(base, negative ? -k : k);
  }

  Expression parse_primary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expression inner = parse_sum();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail(std::string("unexpected '") + c + "'");
  }

  Expression parse_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
      ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    return Expression::constant(value);
  }

  Expression parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    if (name == "x") return Expression::variable();
    if (name == "pi") return Expression::constant(std::numbers::pi);

    Expression (*fn)(const Expression&) = nullptr;
    if (name == "sin") fn = &fsde::sin;
    else if (name == "cos") fn = &fsde::cos;
    else if (name == "exp") fn = &fsde::exp;
    else if (name == "tanh") fn = &fsde::tanh;
    if (fn == nullptr) {
      throw ParseError(ParseError::Kind::UnknownIdentifier, start,
                       "unknown identifier '" + std::string(name) + "'");
    }
    expect('(');
    Expression arg = parse_sum();
    expect(')');
    return fn(arg);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse_expression(std::string_view text) { return Parser(text).parse(); }

}  // namespace fsde
