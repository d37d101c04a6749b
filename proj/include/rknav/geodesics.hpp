#pragma once
#include <vector>

#include "rknav/manifold.hpp"
#include "rknav/path.hpp"

// Geodesics of the eps-lift and the correspondence between lightlike
// future-pointing lifted geodesics and unit-speed navigation paths:
// sigma is an F_eps-unit geodesic exactly when its graph (sigma(t), t)
// is a future-pointing lightlike pregeodesic of the lift.

namespace rknav {

// Cumulative drift allowance for conservation monitors, as a multiple of
// the integration tolerance (roughly one tolerance-sized error per step
// over a generic run).
constexpr double kMonitorFactor = 100.0;

// Affine geodesic of the eps-lift from (x0, t0) with initial velocity
// (u0, tau0), integrated over s in [0, s_max].  Accepted steps become
// samples; conserved_C and g_eps(gamma', gamma') are monitored and the
// integration aborts with AccuracyError if either drifts beyond
// kMonitorFactor * tol * (1 + |initial|).  Leaving the chart box truncates
// the path instead (truncated flag + reason).
GeodesicPath integrate_geodesic(const ChartManifold& m, const Vec& x0,
                                double t0, const Vec& u0, double tau0,
                                double eps, double s_max, double tol = 1e-9);

// The same flow parametrized by the clock: sigma'' = -Gamma_sp((v,1),(v,1))
//   + Gamma_t((v,1),(v,1)) v, the projection of a lightlike lifted geodesic
// onto the chart.  v0 must be F_eps-unit (then F_eps(sigma') = 1 is a
// conserved quantity and is monitored).  Returns a spatial path sampled on
// [t0, t0 + span] with at least min_samples steps (default 64): finite
// differences of the sampled velocities, as used by pregeodesic_residual,
// need the density.  eps >= 0.
GeodesicPath integrate_fermat_graph(const ChartManifold& m, const Vec& x0,
                                    double t0, const Vec& v0, double eps,
                                    double span, double tol = 1e-9,
                                    int min_samples = 0);

// Graph lift of a unit-speed spatial path: samples become ((x, t0+s), (v, 1)).
// Every sampled velocity must satisfy |F_eps(v) - 1| <= unit_tol.
GeodesicPath fermat_lift(const ChartManifold& m, const GeodesicPath& sigma,
                         double eps, double t0, double unit_tol = 1e-6);

// Inverse of the lift: reparametrize a future-pointing lifted path by its
// clock coordinate and drop to the chart.  Requires dt/ds > 0 at every
// sample.
GeodesicPath project_graph(const ChartManifold& m, const GeodesicPath& gamma);

// max over interior samples of | (gamma'' + Gamma(gamma',gamma'))_perp |,
// the component orthogonal to gamma' in the auxiliary product metric
// g0 + dt^2; second derivatives by finite differences of the sampled
// velocities.  Needs >= 5 samples and a lifted path.
double pregeodesic_residual(const ChartManifold& m, const GeodesicPath& gamma,
                            double eps);

struct CertificateRow {
  double delta = 0.0;
  double eps = 0.0;
  double min_eig = 0.0;  // worst eigenvalue over the lattice
  long points = 0;
  bool in_domain = true;
};

struct ConvexityCertificate {
  bool found = false;
  double delta = 0.0;  // largest verified delta
  std::vector<CertificateRow> rows;
};

// Uniform convexity certificate for the lifted metrics around the lifted
// point (p0, 0): in coordinates centered there, checks that
//   B_ij = delta_ij - sum_k x^k Gamma^k_ij(x, eps)
// stays positive definite over a lattice sample of {sum (x^k)^2 < delta},
// simultaneously for eps in {0, eps0/2, eps0}.  Scans delta_grid in
// ascending order and reports the largest delta that verifies.
ConvexityCertificate convexity_certificate(
    const ChartManifold& m, const Vec& p0, double eps0,
    const std::vector<double>& delta_grid, long lattice_cap = 35937);

}  // namespace rknav
