#pragma once
#include <optional>
#include <string>
#include <vector>

#include "rknav/manifold.hpp"
#include "rknav/path.hpp"

// Two-point connection by shooting on the clock-parametrized lightlike
// flow.  Unknowns: the initial F_eps-unit direction (dim-1 angles) and the
// arrival time; the endpoint map is differentiated by finite differences
// and solved with a damped Newton iteration.  Homotopy classes on
// identified charts are handled by targeting translates of x1 in the
// universal cover; eps-continuation warm-starts each solve from the
// previous one.

namespace rknav {

struct BvpProblem {
  ChartManifold manifold;
  Vec x0, x1;
  double t0 = 0.0;
  double tol = 1e-6;            // endpoint tolerance, g0 distance
  double integrator_tol = 1e-9;
  double e_cap = 1e3;           // energy ceiling for continuation
  int max_newton = 60;
};

struct ShootResult {
  bool ok = false;
  std::string reason;
  double eps = 0.0;
  GeodesicPath path;         // spatial, F_eps-unit, sampled on [t0, t0+T]
  double arrival_time = 0.0; // total clock span T
  double length = 0.0;       // F_eps length (= T up to quadrature)
  double energy = 0.0;       // F_eps energy of the unit-interval
                             // reparametrization (T^2/2 for unit paths)
  double endpoint_error = 0.0;
  std::vector<int> winding;  // cover translate per axis (0 on free axes)
  Vec theta;                 // shooting angles, for warm starts
  int newton_iters = 0;
};

// Solve toward the cover translate x1 + winding * period.  Optional warm
// start (angles + arrival time); otherwise a straight-cover guess is built.
ShootResult shoot(const BvpProblem& p, double eps,
                  const std::vector<int>& winding,
                  const Vec* theta_guess = nullptr,
                  const double* time_guess = nullptr);

struct MultiStartOutcome {
  std::vector<ShootResult> solutions;  // sorted by length
  std::vector<std::pair<std::vector<int>, std::string>> failures;
};

// One shot per homotopy class with winding coefficients up to k_max on
// every identified axis.
MultiStartOutcome multi_start(const BvpProblem& p, double eps, int k_max);

struct ContinuationRecord {
  double eps = 0.0;
  double length = 0.0;
  double energy = 0.0;
  double arrival_time = 0.0;
  double endpoint_error = 0.0;
  double step_sup_dist = 0.0;  // sup distance to the previous path
};

struct ContinuationTrace {
  bool converged = false;   // Cauchy increments below tol before schedule end
  bool diverged = false;    // energy cap exceeded
  bool completed = false;   // ran the whole schedule
  std::string note;
  std::vector<ContinuationRecord> records;
  std::vector<int> winding;
  GeodesicPath limit;          // path at the smallest reached eps
  double limit_residual = 0.0; // pregeodesic residual of its lift at eps = 0
  int cauchy_index = -1;       // first schedule index meeting the tol
};

// Warm-started continuation along a strictly decreasing positive schedule,
// starting from an existing solution at schedule.front().
ContinuationTrace continue_eps(const BvpProblem& p,
                               const std::vector<double>& schedule,
                               const ShootResult& start);

// shoot at schedule.front() for the given class, then continue.
ContinuationTrace connect_class(const BvpProblem& p,
                                const std::vector<double>& schedule,
                                const std::vector<int>& winding);

// Geometric schedule from 'from' down to 'to' (ratio in (0,1)); 'to' is
// appended exactly.
std::vector<double> eps_schedule(double from = 1e-1, double to = 1e-6,
                                 double ratio = 0.5);

// Refuses coincident endpoints over the singular set when d(lambda)
// vanishes on ker(omega): a connecting geodesic may fail to exist there.
// Throws HypothesisViolation.
void require_connectable(const ChartManifold& m, const Vec& x0, const Vec& x1);

// t0 + F-length of an admissible unit-speed path: the clock reading at
// arrival.
double arrival_time(const ChartManifold& m, const GeodesicPath& sigma,
                    double t0);

}  // namespace rknav
