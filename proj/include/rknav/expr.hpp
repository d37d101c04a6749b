#pragma once
#include <memory>
#include <string>

#include "rknav/jet.hpp"
#include "rknav/linalg.hpp"

// Scalar coordinate functions for metric coefficients, built either by
// parsing an infix string or programmatically.  Evaluation works on plain
// doubles and on Jet values, so every field carries its own first
// derivatives without finite differencing.
//
// Grammar (whitespace-insensitive):
//   expr    := term (('+'|'-') term)*
//   term    := factor (('*'|'/') factor)*
//   factor  := '-' factor | power
//   power   := primary ('^' factor)?
//   primary := number | coord | func '(' expr (',' expr)* ')' | '(' expr ')'
// Functions: sin cos exp sqrt pow.  Numbers are decimal literals.
// Coordinates: x1..x8, with x,y,z as aliases for x1,x2,x3.

namespace rknav {

enum class ExprOp {
  constant, coordinate,
  add, sub, mul, div, neg,
  fn_sin, fn_cos, fn_exp, fn_sqrt, fn_pow,
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprOp op;
  ExprPtr a, b;      // operands where arity demands
  double value = 0;  // constant payload
  int coord = -1;    // coordinate index payload
};

class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(ExprPtr root, int dim) : root_(std::move(root)), dim_(dim) {}

  // Parses an infix expression over dim coordinates.  Throws ConfigError
  // with the offending column on bad input.
  static ScalarField parse(const std::string& source, int dim);

  static ScalarField constant(double c, int dim);
  static ScalarField coordinate(int index, int dim);

  double eval(const Vec& x) const;
  Jet eval_jet(const Vec& x) const;

  // Gradient by evaluating the jet; convenience for callers that only
  // need the derivative.
  Vec gradient(const Vec& x) const { return eval_jet(x).d; }

  int dim() const { return dim_; }
  bool valid() const { return root_ != nullptr; }
  const ExprPtr& root() const { return root_; }

  std::string to_string() const;

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator-(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator*(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator-(const ScalarField& a);

 private:
  ExprPtr root_;
  int dim_ = 0;
};

}  // namespace rknav
