#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rknav/control.hpp"
#include "rknav/error.hpp"
#include "rknav/finsler.hpp"
#include "rknav/manifold.hpp"

using namespace rknav;

namespace {

ControlSignal drift_signal(const ControlFrame& f, double xi) {
  ControlSignal u;
  u.breakpoints = {0.0, 1.0};
  u.xi = {xi};
  u.alpha = {Vec(f.controls())};
  return u;
}

// sign flips the circulation: the second component pattern reverses
// (negating everything would only rotate the loop, not reorient it)
ControlSignal square_loop(const ControlFrame& f, double xi, double a,
                          double sign) {
  ControlSignal u;
  u.breakpoints = {0.0, 0.25, 0.5, 0.75, 1.0};
  u.xi = {xi, xi, xi, xi};
  const double pat[4][2] = {{a, 0.0}, {0.0, a}, {-a, 0.0}, {0.0, -a}};
  for (int j = 0; j < 4; ++j) {
    Vec al(f.controls());
    al[0] = pat[j][0];
    al[1] = sign * pat[j][1];
    u.alpha.push_back(al);
  }
  return u;
}

}  // namespace

TEST_CASE("heisenberg frame constants") {
  ChartManifold m = catalog("heisenberg");
  ControlFrame f = build_frame(m);
  // |omega|^2 = 1 + (x^2 + y^2)/4 peaks at the corners: 1 + 4.5/4
  CHECK(f.omega_sup == doctest::Approx(std::sqrt(2.125)).epsilon(1e-12));
  CHECK(f.omega_inf == doctest::Approx(1.0).epsilon(1e-12));
  // the bracket pairing contributes exactly 1/|omega|
  CHECK(f.lambda_pre == doctest::Approx(1.0 / std::sqrt(2.125)).epsilon(1e-9));
  CHECK(f.c2 == doctest::Approx(30.0 * 2.125).epsilon(1e-9));
  // the stated inequality holds with margin: lambda > 4 (m+3) Omega
  CHECK(f.lambda > 4.0 * (m.dim + 3) * f.omega_sup);
  CHECK(f.controls() == 2);
}

TEST_CASE("frame fields satisfy the defining relations") {
  ChartManifold m = catalog("heisenberg");
  ControlFrame f = build_frame(m);
  for (const Vec& x : sample_box(m, 3, 24, 9)) {
    FramePoint fp = eval_frame(f, x);
    double on = std::sqrt(omega_norm2(m, x));
    CHECK(eval_omega(m, x, fp.x0) == doctest::Approx(-on).epsilon(1e-10));
    CHECK(inner_g0(m, x, fp.x0, fp.x0) == doctest::Approx(1.0).epsilon(1e-10));
    for (size_t i = 0; i < fp.fields.size(); ++i) {
      CHECK(eval_omega(m, x, fp.fields[i]) == doctest::Approx(0.0));
      CHECK(inner_g0(m, x, fp.x0, fp.fields[i]) == doctest::Approx(0.0));
      for (size_t j = 0; j < fp.fields.size(); ++j)
        CHECK(inner_g0(m, x, fp.fields[i], fp.fields[j]) ==
              doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
    }
    CHECK(d_omega(m, x, fp.fields[f.bracket_i], fp.fields[f.bracket_j]) > 0.0);
  }
}

TEST_CASE("frame construction guards") {
  ChartManifold flat = catalog("constant-wind-plane", 0.5);
  CHECK_THROWS_AS(build_frame(flat), ParameterError);  // dim 2

  // integrable kernel: omega = dz on R^3 has d(omega) = 0
  ChartManifold m;
  m.dim = 3;
  m.topology = Topology::bounded_box;
  m.lo = Vec{-1.0, -1.0, -1.0};
  m.hi = Vec{1.0, 1.0, 1.0};
  m.g0.assign(9, ScalarField::parse("0", 3));
  for (int i = 0; i < 3; ++i) m.g0[i * 3 + i] = ScalarField::parse("1", 3);
  m.omega = {ScalarField::parse("0", 3), ScalarField::parse("0", 3),
             ScalarField::parse("1", 3)};
  m.lambda = ScalarField::parse("0", 3);
  CHECK_THROWS_AS(build_frame(m), HypothesisViolation);
}

TEST_CASE("admissibility validation") {
  ChartManifold m = catalog("heisenberg");
  ControlFrame f = build_frame(m);
  ControlSignal u = drift_signal(f, 0.5);
  CHECK_NOTHROW(check_admissible(f, u));

  ControlSignal bad = u;
  bad.xi[0] = -0.1;
  CHECK_THROWS_AS(check_admissible(f, bad), ParameterError);

  bad = u;
  bad.alpha[0][0] = std::sqrt(f.c2) * 1.01;
  CHECK_THROWS_AS(check_admissible(f, bad), ParameterError);

  bad = u;
  bad.breakpoints = {0.0, 0.0};
  CHECK_THROWS_AS(check_admissible(f, bad), ParameterError);
}

TEST_CASE("pure drift descends the contact axis") {
  ChartManifold m = catalog("heisenberg");
  ControlFrame f = build_frame(m);
  ControlSignal u = drift_signal(f, 0.5);
  GeodesicPath p = integrate_control(f, u, Vec{0.0, 0.0, 0.0}, 1e-10);
  REQUIRE_FALSE(p.truncated);
  Vec end = p.samples.back().x;
  CHECK(end[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(end[1] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(end[2] == doctest::Approx(-0.25).epsilon(1e-9));
  for (const PathSample& ps : p.samples)
    CHECK(ps.conserved == doctest::Approx(-0.25).epsilon(1e-9));
}

TEST_CASE("wind alignment is negative wherever xi > 0") {
  ChartManifold m = catalog("heisenberg");
  ControlFrame f = build_frame(m);
  std::mt19937 rng(23);
  for (int trial = 0; trial < 25; ++trial) {
    ControlSignal u = random_signal(f, 4, 0.8, rng);
    GeodesicPath p = integrate_control(f, u, Vec{0.0, 0.0, 0.0}, 1e-8);
    size_t k = 0;
    for (const PathSample& ps : p.samples) {
      while (k + 1 < u.breakpoints.size() && u.breakpoints[k + 1] < ps.s) ++k;
      double xi = u.xi[std::min(k, u.xi.size() - 1)];
      if (xi > 1e-6) CHECK(ps.conserved < 0.0);
    }
  }
}

TEST_CASE("bracket loops move transversally to the kernel") {
  ChartManifold m = catalog("heisenberg");
  ControlFrame f = build_frame(m);
  Vec x0{0.0, 0.0, 0.0};
  double drift_z =
      integrate_control(f, drift_signal(f, 0.3), x0).samples.back().x[2];
  double up = integrate_control(f, square_loop(f, 0.3, 4.4, 1.0), x0)
                  .samples.back()
                  .x[2];
  double dn = integrate_control(f, square_loop(f, 0.3, 4.4, -1.0), x0)
                  .samples.back()
                  .x[2];
  // one orientation climbs well above the bare drift, the other does not
  CHECK(std::max(up, dn) > drift_z + 0.05);
  CHECK(std::min(up, dn) < drift_z + 0.05);
}

TEST_CASE("energy never exceeds the a-priori bound") {
  ChartManifold m = catalog("heisenberg");
  ControlFrame f = build_frame(m);
  std::mt19937 rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    // amplitudes capped so the flow stays inside the box; see random_signal
    ControlSignal u = random_signal(f, 4, 0.5, rng, 1.5);
    EnergyBoundCheck chk = energy_bound_check(f, u, Vec{0.0, 0.0, 0.0}, 1e-8);
    CHECK(chk.ok);
    CHECK(chk.energy >= 0.0);
    CHECK(chk.delta >= 1.0 - 1e-9);  // |omega| >= 1 on this chart
    double recompute = 1.0 + (2.0 / (chk.delta * chk.delta)) *
                                 (chk.u0_sq_integral + chk.c4 * chk.span);
    CHECK(chk.bound == doctest::Approx(recompute).epsilon(1e-12));
  }
}

TEST_CASE("random signals are admissible and reproducible") {
  ChartManifold m = catalog("heisenberg");
  ControlFrame f = build_frame(m);
  std::mt19937 a(5), b(5);
  for (int trial = 0; trial < 100; ++trial) {
    ControlSignal u = random_signal(f, 4, 1.0, a);
    CHECK_NOTHROW(check_admissible(f, u));
    ControlSignal v = random_signal(f, 4, 1.0, b);
    for (int j = 0; j < 4; ++j) {
      CHECK(u.xi[j] == v.xi[j]);
      for (int i = 0; i < f.controls(); ++i)
        CHECK(u.alpha[j][i] == v.alpha[j][i]);
    }
  }
}

TEST_CASE("reach steers to a drift-reachable target") {
  ChartManifold m = catalog("heisenberg");
  ControlFrame f = build_frame(m);
  ReachOptions opt;
  opt.budget = 4000;
  ReachResult r = reach(f, Vec{0.0, 0.0, 0.0}, Vec{0.0, 0.0, -0.2}, opt);
  CHECK(r.ok);
  CHECK(r.distance <= opt.target_tol);
  CHECK_NOTHROW(check_admissible(f, r.signal));
}
