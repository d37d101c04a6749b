#pragma once
#include <string>

#include "rknav/manifold.hpp"

// The stationary Lorentzian lift on (chart) x R: in the adapted frame the
// coefficient matrix is [[g0, omega], [omega^T, -(lambda+eps)]], with the
// clock coordinate t stored last.  It is Lorentzian exactly when
// lambda + eps + |omega|^2 > 0, which holds for every eps >= 0 under the
// standing assumptions.  All coefficients are t-independent.

namespace rknav {

enum class CausalKind { timelike, lightlike, spacelike };
enum class TimeOrientation { future, past, none };

std::string causal_kind_name(CausalKind k);
std::string orientation_name(TimeOrientation o);

struct CausalClass {
  CausalKind kind = CausalKind::spacelike;
  TimeOrientation orientation = TimeOrientation::none;
  double value = 0.0;  // g_eps on the product-normalized vector
};

// Coefficient matrix of the eps-lift at x; (m+1) x (m+1), t last.  eps >= 0.
Mat g_eps_matrix(const ChartManifold& m, const Vec& x, double eps);

// g_eps((u, tau_u), (w, tau_w)) at the spatial point x.
double eval_g_eps(const ChartManifold& m, const Vec& x, const Vec& u,
                  double tau_u, const Vec& w, double tau_w, double eps);

// Causal character of (w, tau), judged after normalizing by the auxiliary
// product metric g0 + dt^2; |g_eps| below the band counts as lightlike.
// Throws ParameterError on the zero vector.
CausalClass classify(const ChartManifold& m, const Vec& x, const Vec& w,
                     double tau, double eps, double band = 1e-10);

// The quantity g_eps(gamma', K) for the stationary direction K = d/dt,
// conserved along affine geodesics of the lift.
double conserved_C(const ChartManifold& m, const Vec& x, const Vec& u,
                   double tau, double eps);

// Levi-Civita symbols of the eps-lift; dimension m+1, t last, smooth in
// eps down to 0.  Throws NumericalError if the lift degenerates.
Christoffel christoffel_g_eps(const ChartManifold& m, const Vec& x,
                              double eps);

}  // namespace rknav
