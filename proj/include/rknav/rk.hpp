#pragma once
#include <array>
#include <functional>
#include <string>
#include <vector>

// Adaptive Dormand-Prince 5(4) with a PI step controller.  State lives in a
// fixed-capacity array; n is the live size.  The per-step error estimate is
// measured against atol + rtol * max(|y0|, |y1|) componentwise.

namespace rknav {

constexpr int kMaxState = 20;

struct RkStep {
  double s;
  std::array<double, kMaxState> y;
};

struct RkOptions {
  double rtol = 1e-9;
  double atol = 1e-9;
  double h_max = 0.0;  // 0: span / 16 (also guarantees sample density)
  long max_steps = 200000;
};

struct RkOutcome {
  bool completed = false;
  std::string reason;           // set when not completed
  std::vector<RkStep> steps;    // accepted steps, including the initial state
};

// rhs(s, y, dy) fills dy[0..n-1].
// inspect (optional) runs after each accepted step; returning false stops
// integration with completed = false and reason = "stopped by monitor"
// (callers overwrite the reason with something meaningful).
RkOutcome rk_integrate(
    int n, const std::function<void(double, const double*, double*)>& rhs,
    double s0, double s1, const double* y0, const RkOptions& opt,
    const std::function<bool(double, const double*)>& inspect = nullptr);

}  // namespace rknav
