#include "monoiter/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace monoiter {

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view text) : text_(text) {}

  Expression run() {
    Expression e;
    e.text_ = std::string(text_);
    out_ = &e;
    skip_space();
    if (pos_ >= text_.size()) throw ParseError(pos_, "empty expression");
    e.root_ = parse_sum();
    skip_space();
    if (pos_ < text_.size())
      throw ParseError(pos_, std::string("unexpected '") + text_[pos_] + "'");
    return e;
  }

 private:
  using Op = Expression::Op;

  int emit(Op op, int lhs = -1, int rhs = -1, double value = 0.0) {
    out_->nodes_.push_back({op, value, lhs, rhs});
    return static_cast<int>(out_->nodes_.size()) - 1;
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
      if (pos_ >= text_.size())
        throw ParseError(pos_, std::string("expected '") + c + "' before end of input");
      throw ParseError(pos_, std::string("expected '") + c + "', found '" + text_[pos_] + "'");
    }
  }

  int parse_sum() {
    int lhs = parse_product();
    for (;;) {
      if (accept('+'))
        lhs = emit(Op::add, lhs, parse_product());
      else if (accept('-'))
        lhs = emit(Op::sub, lhs, parse_product());
      else
        return lhs;
    }
  }

  int parse_product() {
    int lhs = parse_unary();
    for (;;) {
      if (accept('*'))
        lhs = emit(Op::mul, lhs, parse_unary());
      else if (accept('/'))
        lhs = emit(Op::div, lhs, parse_unary());
      else
        return lhs;
    }
  }

  int parse_unary() {
    if (accept('-')) return emit(Op::neg, parse_unary());
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  int parse_power() {
    const int base = parse_atom();
    if (accept('^')) return emit(Op::pow, base, parse_unary());
    return base;
  }

  int parse_atom() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError(pos_, "unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      const int inner = parse_sum();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string_view name = text_.substr(start, pos_ - start);
      if (name == "x") return emit(Op::var_x);
      if (name == "y") return emit(Op::var_y);
      if (name == "z") return emit(Op::var_z);
      Op fn;
      if (name == "sin")
        fn = Op::sin;
      else if (name == "cos")
        fn = Op::cos;
      else if (name == "exp")
        fn = Op::exp;
      else if (name == "abs")
        fn = Op::abs;
      else
        throw ParseError(start, "unknown identifier '" + std::string(name) + "'");
      expect('(');
      const int arg = parse_sum();
      expect(')');
      return emit(fn, arg);
    }
    throw ParseError(pos_, std::string("unexpected '") + c + "'");
  }

  int parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      const std::size_t s = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return pos_ - s;
    };
    std::size_t count = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      count += digits();
    }
    if (count == 0) throw ParseError(start, "malformed number");
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      const std::size_t mark = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw ParseError(mark, "malformed exponent");
    }
    double value = 0.0;
    const auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
    if (res.ec != std::errc() || res.ptr != text_.data() + pos_)
      throw ParseError(start, "malformed number");
    return emit(Op::constant, -1, -1, value);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Expression* out_ = nullptr;
};

Expression Expression::parse(std::string_view text) { return ExpressionParser(text).run(); }

double Expression::evaluate(double x, double y, double z) const { return eval(root_, x, y, z); }

double Expression::eval(int node, double x, double y, double z) const {
  const Node& n = nodes_[node];
  switch (n.op) {
    case Op::constant: return n.value;
    case Op::var_x: return x;
    case Op::var_y: return y;
    case Op::var_z: return z;
    case Op::add: return eval(n.lhs, x, y, z) + eval(n.rhs, x, y, z);
    case Op::sub: return eval(n.lhs, x, y, z) - eval(n.rhs, x, y, z);
    case Op::mul: return eval(n.lhs, x, y, z) * eval(n.rhs, x, y, z);
    case Op::div: return eval(n.lhs, x, y, z) / eval(n.rhs, x, y, z);
    case Op::pow: return std::pow(eval(n.lhs, x, y, z), eval(n.rhs, x, y, z));
    case Op::neg: return -eval(n.lhs, x, y, z);
    case Op::sin: return std::sin(eval(n.lhs, x, y, z));
    case Op::cos: return std::cos(eval(n.lhs, x, y, z));
    case Op::exp: return std::exp(eval(n.lhs, x, y, z));
    case Op::abs: return std::abs(eval(n.lhs, x, y, z));
  }
  return 0.0;
}

Field parse_coefficient(std::string_view expr, const DomainPtr& domain) {
  const Expression e = Expression::parse(expr);
  const auto& coords = domain->coordinates();
  Eigen::VectorXd values(domain->vertex_count());
  for (int i = 0; i < domain->vertex_count(); ++i) {
    const double v = e.evaluate(coords[i][0], coords[i][1], coords[i][2]);
    if (!std::isfinite(v))
      throw InputError("expression '" + std::string(expr) + "' is not finite at vertex " +
                       std::to_string(i));
    values[i] = v;
  }
  return Field(domain, std::move(values));
}

}  // namespace monoiter
