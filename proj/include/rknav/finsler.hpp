#pragma once
#include <optional>
#include <string>

#include "rknav/manifold.hpp"
#include "rknav/path.hpp"

// The direction-dependent speed metric F and its regularizations F_eps.
// F(v) is finite on the admissible set: everywhere when lambda > 0, and only
// on omega(v) < 0 over the singular set lambda = 0.  F_eps replaces lambda
// by lambda + eps and is a genuine Randers metric for every eps > 0.

namespace rknav {

enum class FinslerBranch { randers, kropina, zero_vector };

std::string branch_name(FinslerBranch b);

struct FinslerValue {
  bool defined = false;
  double value = 0.0;
  FinslerBranch branch = FinslerBranch::randers;
};

// Singular metric.  Undefined exactly for v outside the admissible set:
// lambda(x) <= tol with omega(v) >= 0, and for v = 0 over the singular set
// (the quadrature convention below never leaks out of curve integration).
FinslerValue eval_F(const ChartManifold& m, const Vec& x, const Vec& v);

// Regularized metric; requires eps > 0.
double eval_F_eps(const ChartManifold& m, const Vec& x, const Vec& v,
                  double eps);

// Independent oracle: the positive root tau of
//   g0(v,v) + 2 omega(v) tau - (lambda+eps) tau^2 = 0,
// i.e. the unique tau making (v, tau) lightlike for the eps-lift.
// Returns nothing when no positive root exists.  eps >= 0.
std::optional<double> lightlike_root(const ChartManifold& m, const Vec& x,
                                     const Vec& v, double eps);

// The Riemannian companion h_eps = (lambda+eps) g0 + omega (x) omega.
double eval_h_eps(const ChartManifold& m, const Vec& x, const Vec& u,
                  const Vec& w, double eps);

struct LengthEnergy {
  double length = 0.0;
  double energy = 0.0;
};

// Quadrature of F (eps = 0) or F_eps (eps > 0) and of F^2/2 over a sampled
// spatial path.  At eps = 0 every sampled velocity must be admissible; the
// only exception is v = 0 over the singular set, which contributes the
// conventional integrand value 1.  Throws AdmissibilityError naming the
// first offending sample.
LengthEnergy curve_length_energy(const ChartManifold& m,
                                 const GeodesicPath& path, double eps);

struct ProbeResult {
  double d_forward = 0.0;     // grid distance x0 -> x1
  double d_backward = 0.0;    // grid distance x1 -> x0
  bool contained = false;     // forward/backward ball intersection stays inside
  bool inconclusive = false;  // resolution or boundary contact undermines it
  std::string note;
  int grid_n = 0;
};

// Discrete forward/backward distance probe: Dijkstra over an axis lattice
// (8 neighbors in dim 2, 26 in dim 3) with F_eps_bar edge weights, midpoint
// evaluation.  Checks whether the intersection of the forward ball around
// x0 and the backward ball around x1 of radius r avoids the domain walls.
// grid_n = 0 picks 101 (dim 2) or 41 (dim 3) nodes per axis.
ProbeResult ball_compactness_probe(const ChartManifold& m, const Vec& x0,
                                   const Vec& x1, double r, double eps_bar,
                                   int grid_n = 0);

}  // namespace rknav
