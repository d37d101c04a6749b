#pragma once
#include <string>
#include <vector>

#include "rknav/expr.hpp"
#include "rknav/linalg.hpp"

// Chart-based navigation data: a Riemannian metric g0, a one-form omega and
// a nonnegative function lambda on a coordinate box, with optional periodic
// identifications.  Together they define the (possibly singular) direction-
// dependent speed metric and its Lorentzian lift; everything downstream
// consumes this struct.

namespace rknav {

// lambda below this threshold counts as zero (singular set).
constexpr double kLambdaTol = 1e-12;

// Period of identified coordinates.
constexpr double kPeriod = 6.283185307179586476925286766559;  // 2*pi

enum class Topology { plane, cylinder, torus, bounded_box };

std::string topology_name(Topology t);
Topology topology_from_name(const std::string& name);

struct ChartManifold {
  int dim = 0;
  Topology topology = Topology::plane;
  Vec lo, hi;                      // coordinate box
  std::vector<ScalarField> g0;     // row-major dim x dim, symmetric
  std::vector<ScalarField> omega;  // dim covector components
  ScalarField lambda;
  std::string name = "inline";

  const ScalarField& g0_at(int i, int j) const { return g0[i * dim + j]; }

  bool identified(int axis) const {
    if (topology == Topology::cylinder) return axis == 0;
    if (topology == Topology::torus) return axis == 0 || axis == 1;
    return false;
  }
};

// Values and first coordinate derivatives of every coefficient at a point.
struct MetricJets {
  Mat g0;       // g0_ij
  Mat dg0[kMaxDim];  // dg0[k](i,j) = d_k g0_ij
  Vec omega;    // omega_i
  Mat domega;   // domega(i,j) = d_i omega_j
  double lam = 0.0;
  Vec dlam;     // d_i lambda
};

// Christoffel symbols, gamma(k,i,j) = Gamma^k_ij, symmetric in (i,j).
struct Christoffel {
  int n = 0;
  std::array<double, kMaxDim * kMaxDim * kMaxDim> c{};
  double& at(int k, int i, int j) { return c[(k * n + i) * n + j]; }
  double at(int k, int i, int j) const { return c[(k * n + i) * n + j]; }
};

//------------------------------------------------------------ evaluation

// Throws DomainError when topology is bounded_box and x lies outside.
void require_in_domain(const ChartManifold& m, const Vec& x);

bool in_domain(const ChartManifold& m, const Vec& x, double margin = 0.0);

// Canonical representative: identified axes reduced into [lo, lo + period).
Vec wrap_point(const ChartManifold& m, Vec x);

// Shortest coordinate displacement from -> to; identified axes reduced
// into (-period/2, period/2].
Vec coord_delta(const ChartManifold& m, const Vec& from, const Vec& to);

MetricJets metric_jets(const ChartManifold& m, const Vec& x);

Mat metric_matrix(const ChartManifold& m, const Vec& x);

double inner_g0(const ChartManifold& m, const Vec& x, const Vec& u,
                const Vec& w);

double eval_lambda(const ChartManifold& m, const Vec& x);

Vec omega_covector(const ChartManifold& m, const Vec& x);

double eval_omega(const ChartManifold& m, const Vec& x, const Vec& v);

// Index raising: the vector metrically equivalent to a covector alpha.
Vec sharp(const ChartManifold& m, const Vec& x, const Vec& alpha);

// omega's metric dual and squared norm |omega|^2 = g0(omega#, omega#).
Vec omega_sharp(const ChartManifold& m, const Vec& x);
double omega_norm2(const ChartManifold& m, const Vec& x);

// Exterior derivative two-form d(omega) evaluated on a pair of vectors.
double d_omega(const ChartManifold& m, const Vec& x, const Vec& u,
               const Vec& w);

// Gradient vector of lambda (sharp of its differential).
Vec grad_lambda(const ChartManifold& m, const Vec& x);

// Levi-Civita symbols of g0 alone.
Christoffel christoffel_g0(const ChartManifold& m, const Vec& x);

// Riemannian distance surrogate between nearby points: g0 length of the
// shortest coordinate segment, metric frozen at the midpoint.
double dist_g0(const ChartManifold& m, const Vec& a, const Vec& b);

//------------------------------------------------------------ assumptions

struct AssumptionCheck {
  std::string name;
  bool pass = false;
  bool required = true;  // informational checks leave overall ok untouched
  double worst = 0.0;    // extremal witnessed value
  Vec where;             // sample realizing it
  std::string note;
};

struct AssumptionReport {
  bool ok = false;
  std::vector<AssumptionCheck> checks;
  const AssumptionCheck* find(const std::string& name) const;
};

// Samples a lattice plus seeded random interior points and checks that g0
// is positive definite, lambda >= 0 and lambda + |omega|^2 > 0 everywhere
// sampled.  omega != 0 and nonintegrability (dim >= 3) are reported but not
// required: they only gate the control constructions.
AssumptionReport check_assumptions(const ChartManifold& m, int lattice_n = 7,
                                   int random_n = 64, unsigned seed = 1);

//--------------------------------------------------------------- catalog

// Built-in desk-scale charts:
//   euclidean-plane           no wind, lambda = 1
//   constant-wind-plane(w)    uniform wind of strength w along +x
//   flat-cylinder-wind(w)     same wind on the flat cylinder (x ~ x + 2pi)
//   kropina-plane             critical wind w = 1 (lambda = 0 everywhere)
//   heisenberg                contact form on R^3, lambda = 0
std::vector<std::string> catalog_names();

ChartManifold catalog(const std::string& name, double wind = 0.5);

//--------------------------------------------------------------- zermelo

struct ZermeloData {
  int dim = 0;
  Topology topology = Topology::plane;
  Vec lo, hi;
  std::vector<ScalarField> g0;    // row-major dim x dim
  std::vector<ScalarField> wind;  // vector components W^i
  std::string name = "zermelo";
};

// Navigation-data conversion omega = -g0(., W), lambda = 1 - g0(W, W).
// Requires g0(W, W) <= 1 at every sampled point; a strong wind throws
// HypothesisViolation.
ChartManifold from_zermelo(const ZermeloData& z, int lattice_n = 9,
                           int random_n = 128, unsigned seed = 1);

// Sample points of the coordinate box: full lattice plus seeded uniform
// draws, all inside the closed box.
std::vector<Vec> sample_box(const ChartManifold& m, int lattice_n,
                            int random_n, unsigned seed);

}  // namespace rknav
