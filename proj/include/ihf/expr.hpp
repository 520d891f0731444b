#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "ihf/common.hpp"

namespace ihf {

// Boundary-data expressions:
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := number | 'x' digit | '(' expr ')' | func '(' args ')' | '-' factor
//   func   := abs | norm | sin | cos | atan2
// atan2 takes two arguments; norm ignores its argument (written norm(),
// norm(x) or norm(<expr>)) and returns |x| of the evaluation point.
class ExprParseError : public Error {
 public:
  ExprParseError(std::size_t column, const std::string& message);
  // 1-based
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

class DivisionByZero : public Error {
 public:
  explicit DivisionByZero(const Point& p);
  const Point& point() const { return point_; }

 private:
  Point point_;
};

class Expression {
 public:
  struct Node;

  Expression() = default;
  static Expression parse(std::string_view text);

  double operator()(const Point& x) const;
  const std::string& source() const { return source_; }
  bool empty() const { return !root_; }

 private:
  std::string source_;
  std::shared_ptr<const Node> root_;
};

double eval_boundary_expr(const Expression& e, const Point& x);

}  // namespace ihf
