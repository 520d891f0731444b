#include "ihf/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

namespace ihf {

struct Expression::Node {
  enum class Op { Number, Coord, Neg, Add, Sub, Mul, Div, Abs, Norm, Sin, Cos, Atan2 };
  Op op;
  double number = 0.0;
  int coord = 0;
  std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Op op, std::vector<NodePtr> args = {}) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args = std::move(args);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  NodePtr parse() {
    auto e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ExprParseError(pos_ + 1, msg); }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(Node::Op::Add, {lhs, term()});
      else if (accept('-')) lhs = make(Node::Op::Sub, {lhs, term()});
      else return lhs;
    }
  }

  NodePtr term() {
    auto lhs = factor();
    for (;;) {
      if (accept('*')) lhs = make(Node::Op::Mul, {lhs, factor()});
      else if (accept('/')) lhs = make(Node::Op::Div, {lhs, factor()});
      else return lhs;
    }
  }

  NodePtr factor() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (accept('-')) return make(Node::Op::Neg, {factor()});
    if (accept('(')) {
      auto e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return word();
    fail(std::string("unexpected '") + c + "'");
  }

  NodePtr number() {
    const char* first = s_.data() + pos_;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), v);
    if (ec != std::errc()) fail("malformed number");
    pos_ += static_cast<std::size_t>(ptr - first);
    auto n = std::make_shared<Node>();
    n->op = Node::Op::Number;
    n->number = v;
    return n;
  }

  NodePtr word() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string_view w = s_.substr(start, pos_ - start);
    if (w.size() == 2 && w[0] == 'x' && w[1] >= '1' && w[1] <= '3') {
      auto n = std::make_shared<Node>();
      n->op = Node::Op::Coord;
      n->coord = w[1] - '1';
      return n;
    }
    Node::Op op;
    if (w == "abs") op = Node::Op::Abs;
    else if (w == "norm") op = Node::Op::Norm;
    else if (w == "sin") op = Node::Op::Sin;
    else if (w == "cos") op = Node::Op::Cos;
    else if (w == "atan2") op = Node::Op::Atan2;
    else {
      pos_ = start;
      fail("unknown name '" + std::string(w) + "'");
    }
    expect('(');
    if (op == Node::Op::Norm) {
      // The argument only documents the implicit point.
      skip();
      if (accept(')')) return make(op);
      if (pos_ < s_.size() && s_[pos_] == 'x' &&
          (pos_ + 1 == s_.size() || !std::isalnum(static_cast<unsigned char>(s_[pos_ + 1])))) {
        ++pos_;
      } else {
        expr();
      }
      expect(')');
      return make(op);
    }
    std::vector<NodePtr> args{expr()};
    if (op == Node::Op::Atan2) {
      expect(',');
      args.push_back(expr());
    }
    expect(')');
    return make(op, std::move(args));
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

double eval(const Node& n, const Point& x) {
  using Op = Node::Op;
  switch (n.op) {
    case Op::Number:
      return n.number;
    case Op::Coord:
      return x[n.coord];
    case Op::Neg:
      return -eval(*n.args[0], x);
    case Op::Add:
      return eval(*n.args[0], x) + eval(*n.args[1], x);
    case Op::Sub:
      return eval(*n.args[0], x) - eval(*n.args[1], x);
    case Op::Mul:
      return eval(*n.args[0], x) * eval(*n.args[1], x);
    case Op::Div: {
      const double den = eval(*n.args[1], x);
      if (den == 0.0) throw DivisionByZero(x);
      return eval(*n.args[0], x) / den;
    }
    case Op::Abs:
      return std::abs(eval(*n.args[0], x));
    case Op::Norm:
      return norm(x);
    case Op::Sin:
      return std::sin(eval(*n.args[0], x));
    case Op::Cos:
      return std::cos(eval(*n.args[0], x));
    case Op::Atan2:
      return std::atan2(eval(*n.args[0], x), eval(*n.args[1], x));
  }
  return 0.0;
}

}  // namespace

ExprParseError::ExprParseError(std::size_t column, const std::string& message)
    : Error("column " + std::to_string(column) + ": " + message), column_(column) {}

DivisionByZero::DivisionByZero(const Point& p)
    : Error("division by zero at (" + std::to_string(p[0]) + ", " + std::to_string(p[1]) + ", " +
            std::to_string(p[2]) + ")"),
      point_(p) {}

Expression Expression::parse(std::string_view text) {
  Expression e;
  e.root_ = Parser(text).parse();
  e.source_ = std::string(text);
  return e;
}

double Expression::operator()(const Point& x) const {
  if (!root_) throw InvalidArgument("empty expression");
  return eval(*root_, x);
}

double eval_boundary_expr(const Expression& e, const Point& x) { return e(x); }

}  // namespace ihf
