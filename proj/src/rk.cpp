#include "rknav/rk.hpp"

#include <algorithm>
#include <cmath>

#include "rknav/error.hpp"

namespace rknav {

namespace {

// Dormand-Prince 5(4) tableau; row 7 doubles as the 5th order weights (FSAL).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = b1 - 5179.0 / 57600, e3 = b3 - 7571.0 / 16695,
                 e4 = b4 - 393.0 / 640, e5 = b5 + 92097.0 / 339200,
                 e6 = b6 - 187.0 / 2100, e7 = -1.0 / 40;

}  // namespace

RkOutcome rk_integrate(
    int n, const std::function<void(double, const double*, double*)>& rhs,
    double s0, double s1, const double* y0, const RkOptions& opt,
    const std::function<bool(double, const double*)>& inspect) {
  if (n < 1 || n > kMaxState) throw ParameterError("rk state size out of range");
  if (!(s1 > s0)) throw ParameterError("rk integration span must be positive");

  RkOutcome out;
  const double span = s1 - s0;
  const double h_max = (opt.h_max > 0.0) ? opt.h_max : span / 16.0;
  const double h_min = 1e-13 * span;

  std::array<double, kMaxState> y{}, ynew{}, k1{}, k2{}, k3{}, k4{}, k5{},
      k6{}, k7{}, ytmp{};
  std::copy(y0, y0 + n, y.begin());

  RkStep first;
  first.s = s0;
  first.y = y;
  out.steps.push_back(first);
  if (inspect && !inspect(s0, y.data())) {
    out.reason = "stopped by monitor";
    return out;
  }

  double s = s0;
  double h = std::min(h_max, span / 100.0);
  double err_prev = 1.0;
  rhs(s, y.data(), k1.data());

  for (long step = 0; step < opt.max_steps; ++step) {
    if (s >= s1 - 1e-14 * span) {
      out.completed = true;
      return out;
    }
    h = std::min(h, s1 - s);
    if (h < h_min) {
      out.reason = "step size underflow";
      return out;
    }

    auto stage = [&](const double* yy, double cs, double* kk) {
      rhs(s + cs * h, yy, kk);
    };
    for (int i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    stage(ytmp.data(), c2, k2.data());
    for (int i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    stage(ytmp.data(), c3, k3.data());
    for (int i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    stage(ytmp.data(), c4, k4.data());
    for (int i = 0; i < n; ++i)
      ytmp[i] =
          y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    stage(ytmp.data(), c5, k5.data());
    for (int i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                            a64 * k4[i] + a65 * k5[i]);
    stage(ytmp.data(), 1.0, k6.data());
    for (int i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                            b6 * k6[i]);
    stage(ynew.data(), 1.0, k7.data());

    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                       e6 * k6[i] + e7 * k7[i]);
      double sc = opt.atol + opt.rtol * std::max(std::fabs(y[i]), std::fabs(ynew[i]));
      double r = ei / sc;
      err += r * r;
    }
    err = std::sqrt(err / n);

    if (err <= 1.0) {
      s += h;
      y = ynew;
      k1 = k7;  // FSAL
      RkStep rec;
      rec.s = s;
      rec.y = y;
      out.steps.push_back(rec);
      if (inspect && !inspect(s, y.data())) {
        out.reason = "stopped by monitor";
        return out;
      }
      double e = std::max(err, 1e-10);
      double fac = 0.9 * std::pow(e, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
      err_prev = e;
      h = std::min(h_max, h * std::clamp(fac, 0.2, 5.0));
    } else {
      double fac = std::max(0.2, 0.9 * std::pow(err, -0.2));
      h *= std::min(fac, 1.0);
    }
  }
  out.reason = "step budget exhausted";
  return out;
}

}  // namespace rknav
