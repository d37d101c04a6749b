#pragma once
#include <cmath>

#include "rknav/error.hpp"
#include "rknav/linalg.hpp"

// First-order forward-mode value: v carries the scalar, d the gradient
// with respect to the chart coordinates.  Arithmetic follows the usual
// calculus rules; d.n must agree between operands.

namespace rknav {

struct Jet {
  double v = 0.0;
  Vec d;

  Jet() = default;
  Jet(double value, int dim) : v(value), d(dim) {}
  static Jet variable(double value, int dim, int index) {
    Jet j(value, dim);
    j.d[index] = 1.0;
    return j;
  }
};

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r(a.v + b.v, a.d.n);
  for (int i = 0; i < a.d.n; ++i) r.d[i] = a.d[i] + b.d[i];
  return r;
}

inline Jet operator-(const Jet& a, const Jet& b) {
  Jet r(a.v - b.v, a.d.n);
  for (int i = 0; i < a.d.n; ++i) r.d[i] = a.d[i] - b.d[i];
  return r;
}

inline Jet operator-(const Jet& a) {
  Jet r(-a.v, a.d.n);
  for (int i = 0; i < a.d.n; ++i) r.d[i] = -a.d[i];
  return r;
}

inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r(a.v * b.v, a.d.n);
  for (int i = 0; i < a.d.n; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}

inline Jet operator/(const Jet& a, const Jet& b) {
  if (b.v == 0.0) throw NumericalError("division by zero in field expression");
  Jet r(a.v / b.v, a.d.n);
  double inv2 = 1.0 / (b.v * b.v);
  for (int i = 0; i < a.d.n; ++i)
    r.d[i] = (a.d[i] * b.v - a.v * b.d[i]) * inv2;
  return r;
}

inline Jet sin(const Jet& a) {
  Jet r(std::sin(a.v), a.d.n);
  double c = std::cos(a.v);
  for (int i = 0; i < a.d.n; ++i) r.d[i] = c * a.d[i];
  return r;
}

inline Jet cos(const Jet& a) {
  Jet r(std::cos(a.v), a.d.n);
  double s = -std::sin(a.v);
  for (int i = 0; i < a.d.n; ++i) r.d[i] = s * a.d[i];
  return r;
}

inline Jet exp(const Jet& a) {
  Jet r(std::exp(a.v), a.d.n);
  for (int i = 0; i < a.d.n; ++i) r.d[i] = r.v * a.d[i];
  return r;
}

inline Jet sqrt(const Jet& a) {
  if (a.v < 0.0) throw NumericalError("sqrt of negative value in field expression");
  Jet r(std::sqrt(a.v), a.d.n);
  double g = (r.v == 0.0) ? 0.0 : 0.5 / r.v;  // derivative taken one-sided at 0
  for (int i = 0; i < a.d.n; ++i) r.d[i] = g * a.d[i];
  return r;
}

// pow with a constant exponent; supports negative bases for integral p.
inline Jet pow_const(const Jet& a, double p) {
  double val = std::pow(a.v, p);
  if (!std::isfinite(val))
    throw NumericalError("pow produced a non-finite value in field expression");
  Jet r(val, a.d.n);
  double g = (a.v == 0.0 && p > 1.0) ? 0.0 : p * std::pow(a.v, p - 1.0);
  for (int i = 0; i < a.d.n; ++i) r.d[i] = g * a.d[i];
  return r;
}

// General pow: a^b = exp(b log a), requires a > 0.
inline Jet pow(const Jet& a, const Jet& b) {
  if (a.v <= 0.0)
    throw NumericalError("pow with non-constant exponent needs positive base");
  double val = std::pow(a.v, b.v);
  Jet r(val, a.d.n);
  double la = std::log(a.v);
  for (int i = 0; i < a.d.n; ++i)
    r.d[i] = val * (b.d[i] * la + b.v * a.d[i] / a.v);
  return r;
}

}  // namespace rknav
