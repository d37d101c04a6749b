#pragma once

// Affine control system attached to the wind form on a singular chart:
//   sigma' = xi^2 X0 + xi * sum_i alpha_i X_i,
// where X0 = -omega#/|omega| is the unit downwind drift and the X_i are a
// g0-orthonormal frame of ker(omega).  Every admissible signal produces a
// curve with omega(sigma') = -xi^2 |omega| <= 0, so the curve is causal for
// the singular metric wherever xi > 0.  The bracket pair (Y1, Y2) is chosen
// with d_omega(Y1, Y2) > 0 at the chart center; its infimum over the box
// feeds the control-amplitude constant C^2 = 5 (m+3) Omega / lambda_pre,
// which makes lambda = C^2 lambda_pre exceed 4 (m+3) Omega automatically.

#include <random>
#include <string>
#include <vector>

#include "rknav/linalg.hpp"
#include "rknav/manifold.hpp"
#include "rknav/path.hpp"

namespace rknav {

struct ControlFrame {
  const ChartManifold* manifold = nullptr;
  int drop_axis = -1;            // coordinate axis omitted from the kernel frame
  int bracket_i = 0;             // indices into the kernel frame: Y1 = X[bracket_i]
  int bracket_j = 1;             // Y2 = X[bracket_j], oriented so d_omega(Y1,Y2) > 0
  double omega_sup = 0.0;        // Omega: sup |omega|_g0 over the sampled box
  double omega_inf = 0.0;        // delta floor: inf |omega|_g0 over the sampled box
  double lambda_pre = 0.0;       // inf d_omega(Y1, Y2) over the sampled box
  double c2 = 0.0;               // control amplitude bound C^2
  double lambda = 0.0;           // C^2 * lambda_pre
  std::string note;              // non-fatal observations (e.g. boundary growth)

  int controls() const { return manifold ? manifold->dim - 1 : 0; }
};

// Builds the frame and its constants, sampling a lattice_n^m lattice.
// Throws ParameterError (dim < 3), HypothesisViolation (vanishing omega or
// integrable kernel), NumericalError (frame degenerates inside the box).
ControlFrame build_frame(const ChartManifold& m, int lattice_n = 9);

// Pointwise frame evaluation.  x0 is the drift field; fields[i] spans ker(omega).
struct FramePoint {
  Vec x0;
  std::vector<Vec> fields;
};
FramePoint eval_frame(const ControlFrame& f, const Vec& x);

// Piecewise-constant control signal on [breakpoints.front(), breakpoints.back()].
struct ControlSignal {
  std::vector<double> breakpoints;  // size N+1, strictly increasing
  std::vector<double> xi;           // size N, xi >= 0
  std::vector<Vec> alpha;           // size N, each of size controls()

  int intervals() const { return static_cast<int>(xi.size()); }
  double span() const {
    return breakpoints.empty() ? 0.0 : breakpoints.back() - breakpoints.front();
  }
};

// Validates shape, monotone breakpoints, xi >= 0 and sum alpha^2 <= C^2.
void check_admissible(const ControlFrame& f, const ControlSignal& u);

// Integrates the control flow from x0.  Samples carry conserved = omega(sigma')
// (nonpositive for admissible signals) and residual = 0.  Leaving the domain
// box truncates the path instead of throwing.
GeodesicPath integrate_control(const ControlFrame& f, const ControlSignal& u,
                               const Vec& x0, double tol = 1e-9);

// Endpoint of the integrated flow; throws DomainError if the flow truncates.
Vec control_endpoint(const ControlFrame& f, const ControlSignal& u,
                     const Vec& x0, double tol = 1e-9);

// Honest audit of the singular-metric energy against the a-priori bound
//   E <= 1 + (2/delta^2) (int u0^2 ds + C^4 * span),  u0 = xi^2,
// with delta = min |omega|_g0 along the integrated path.  The energy is
// recomputed from the path by quadrature, one interval at a time.
struct EnergyBoundCheck {
  double energy = 0.0;
  double bound = 0.0;
  double delta = 0.0;
  double u0_sq_integral = 0.0;
  double c4 = 0.0;
  double span = 0.0;
  bool ok = false;
};
EnergyBoundCheck energy_bound_check(const ControlFrame& f,
                                    const ControlSignal& u, const Vec& x0,
                                    double tol = 1e-9);

// Uniform random admissible signal on a uniform grid of `intervals` pieces
// over [0, 1]: xi ~ U[0, xi_max], alpha uniform in the ball of radius
// min(C, alpha_max) (alpha_max <= 0 means C).  Capping alpha below C keeps
// sampled flows inside a desk-scale box; the signals remain admissible.
ControlSignal random_signal(const ControlFrame& f, int intervals,
                            double xi_max, std::mt19937& rng,
                            double alpha_max = 0.0);

// Derivative-free search for a signal steering x0 to the target point.
struct ReachOptions {
  int intervals = 4;
  int budget = 12000;        // objective evaluations across all restarts
  unsigned seed = 1;
  double search_tol = 1e-7;  // integrator tolerance during the search
  double verify_tol = 1e-10; // integrator tolerance for the final answer
  double target_tol = 1e-4;  // required g0 distance to the target
};

struct ReachResult {
  bool ok = false;
  ControlSignal signal;
  GeodesicPath path;
  Vec end;
  double distance = 0.0;
  int evals = 0;
  std::string note;
};

ReachResult reach(const ControlFrame& f, const Vec& x0, const Vec& target,
                  const ReachOptions& opt = {});

}  // namespace rknav
