#include "rknav/geodesics.hpp"

#include <cmath>
#include <sstream>

#include "rknav/error.hpp"
#include "rknav/finsler.hpp"
#include "rknav/rk.hpp"
#include "rknav/spacetime.hpp"

namespace rknav {

namespace {

constexpr double kDomainMargin = 0.05;  // integration may overshoot the box a little

Vec spatial_of(const double* y, int m) {
  Vec x(m);
  for (int i = 0; i < m; ++i) x[i] = y[i];
  return x;
}

}  // namespace

GeodesicPath integrate_geodesic(const ChartManifold& m, const Vec& x0,
                                double t0, const Vec& u0, double tau0,
                                double eps, double s_max, double tol) {
  if (eps < 0.0) throw ParameterError("integrate_geodesic requires eps >= 0");
  if (!(s_max > 0.0)) throw ParameterError("integration span must be positive");
  if (!(tol > 0.0)) throw ParameterError("integration tolerance must be positive");
  const int n = m.dim;
  const int N = n + 1;

  auto rhs = [&](double, const double* y, double* dy) {
    Vec x = spatial_of(y, n);
    Christoffel ga = christoffel_g_eps(m, x, eps);
    const double* q = y + N;
    for (int a = 0; a < N; ++a) dy[a] = q[a];
    for (int k = 0; k < N; ++k) {
      double acc = 0.0;
      for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) acc += ga.at(k, a, b) * q[a] * q[b];
      dy[N + k] = -acc;
    }
  };

  std::array<double, kMaxState> y0{};
  for (int i = 0; i < n; ++i) y0[i] = x0[i];
  y0[n] = t0;
  for (int i = 0; i < n; ++i) y0[N + i] = u0[i];
  y0[N + n] = tau0;

  const double c_init = conserved_C(m, x0, u0, tau0, eps);
  const double q_init = eval_g_eps(m, x0, u0, tau0, u0, tau0, eps);
  const double c_cap = kMonitorFactor * tol * (1.0 + std::fabs(c_init));
  double qn2 = inner_g0(m, x0, u0, u0) + tau0 * tau0;
  const double q_cap = kMonitorFactor * tol * (1.0 + qn2);

  bool left_domain = false;
  auto inspect = [&](double, const double* y) -> bool {
    Vec x = spatial_of(y, n);
    if (!in_domain(m, x, kDomainMargin)) {
      left_domain = true;
      return false;
    }
    Vec u(n);
    for (int i = 0; i < n; ++i) u[i] = y[N + i];
    double tau = y[N + n];
    double c = conserved_C(m, x, u, tau, eps);
    double q = eval_g_eps(m, x, u, tau, u, tau, eps);
    if (std::fabs(c - c_init) > c_cap || std::fabs(q - q_init) > q_cap) {
      std::ostringstream os;
      os << "conservation monitor breach: |dC| = " << std::fabs(c - c_init)
         << ", |d g(gamma',gamma')| = " << std::fabs(q - q_init)
         << " at tolerance " << tol;
      throw AccuracyError(os.str());
    }
    return true;
  };

  RkOptions opt;
  opt.rtol = tol;
  opt.atol = tol;
  RkOutcome rk = rk_integrate(2 * N, rhs, 0.0, s_max, y0.data(), opt, inspect);

  GeodesicPath path;
  path.parametrization = Parametrization::affine;
  path.lifted = true;
  path.eps = eps;
  for (const auto& st : rk.steps) {
    PathSample ps;
    ps.s = st.s;
    ps.x = Vec(N);
    ps.v = Vec(N);
    for (int i = 0; i < N; ++i) {
      ps.x[i] = st.y[i];
      ps.v[i] = st.y[N + i];
    }
    Vec xs = spatial_of(st.y.data(), n);
    Vec us(n);
    for (int i = 0; i < n; ++i) us[i] = st.y[N + i];
    double tau = st.y[N + n];
    ps.conserved = conserved_C(m, xs, us, tau, eps);
    ps.residual = eval_g_eps(m, xs, us, tau, us, tau, eps);
    path.samples.push_back(ps);
  }
  if (!rk.completed) {
    path.truncated = true;
    path.truncation_reason = left_domain ? "left the domain box" : rk.reason;
  }
  return path;
}

GeodesicPath integrate_fermat_graph(const ChartManifold& m, const Vec& x0,
                                    double t0, const Vec& v0, double eps,
                                    double span, double tol, int min_samples) {
  if (eps < 0.0) throw ParameterError("integrate_fermat_graph requires eps >= 0");
  if (!(span > 0.0)) throw ParameterError("integration span must be positive");
  const int n = m.dim;

  auto unit_value = [&](const Vec& x, const Vec& v) -> double {
    if (eps > 0.0) return eval_F_eps(m, x, v, eps);
    FinslerValue f = eval_F(m, x, v);
    if (!f.defined)
      throw AdmissibilityError(
          "graph velocity left the admissible set during integration");
    return f.value;
  };
  {
    double f0 = unit_value(x0, v0);
    if (std::fabs(f0 - 1.0) > 1e-8)
      throw ParametrizationError(
          "integrate_fermat_graph needs an F_eps-unit initial velocity");
  }

  auto rhs = [&](double, const double* y, double* dy) {
    Vec x = spatial_of(y, n);
    Christoffel ga = christoffel_g_eps(m, x, eps);
    // lifted tangent (v, 1)
    std::array<double, kMaxDim + 1> u{};
    for (int i = 0; i < n; ++i) u[i] = y[n + i];
    u[n] = 1.0;
    double gt = 0.0;  // Gamma^t((v,1),(v,1))
    for (int a = 0; a <= n; ++a)
      for (int b = 0; b <= n; ++b) gt += ga.at(n, a, b) * u[a] * u[b];
    for (int i = 0; i < n; ++i) dy[i] = y[n + i];
    for (int k = 0; k < n; ++k) {
      double acc = 0.0;
      for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= n; ++b) acc += ga.at(k, a, b) * u[a] * u[b];
      dy[n + k] = -acc + gt * y[n + k];
    }
  };

  std::array<double, kMaxState> y0{};
  for (int i = 0; i < n; ++i) y0[i] = x0[i];
  for (int i = 0; i < n; ++i) y0[n + i] = v0[i];

  const double unit_cap = kMonitorFactor * tol * 2.0;
  bool left_domain = false;
  auto inspect = [&](double, const double* y) -> bool {
    Vec x = spatial_of(y, n);
    if (!in_domain(m, x, kDomainMargin)) {
      left_domain = true;
      return false;
    }
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = y[n + i];
    double f = unit_value(x, v);
    if (std::fabs(f - 1.0) > unit_cap) {
      std::ostringstream os;
      os << "unit-speed monitor breach: |F_eps - 1| = " << std::fabs(f - 1.0)
         << " at tolerance " << tol;
      throw AccuracyError(os.str());
    }
    return true;
  };

  RkOptions opt;
  opt.rtol = tol;
  opt.atol = tol;
  opt.h_max = span / std::max(64, min_samples);
  RkOutcome rk = rk_integrate(2 * n, rhs, t0, t0 + span, y0.data(), opt, inspect);

  GeodesicPath path;
  path.parametrization = Parametrization::feps_unit;
  path.lifted = false;
  path.eps = eps;
  double lam_like = 0.0;
  for (const auto& st : rk.steps) {
    PathSample ps;
    ps.s = st.s;
    ps.x = Vec(n);
    ps.v = Vec(n);
    for (int i = 0; i < n; ++i) {
      ps.x[i] = st.y[i];
      ps.v[i] = st.y[n + i];
    }
    lam_like = eval_lambda(m, ps.x) + eps;
    ps.conserved = eval_omega(m, ps.x, ps.v) - lam_like;  // g_eps((v,1), dt)
    ps.residual = unit_value(ps.x, ps.v) - 1.0;
    path.samples.push_back(ps);
  }
  if (!rk.completed) {
    path.truncated = true;
    path.truncation_reason = left_domain ? "left the domain box" : rk.reason;
  }
  return path;
}

GeodesicPath fermat_lift(const ChartManifold& m, const GeodesicPath& sigma,
                         double eps, double t0, double unit_tol) {
  if (eps < 0.0) throw ParameterError("fermat_lift requires eps >= 0");
  if (sigma.lifted)
    throw ParametrizationError("fermat_lift expects a spatial path");
  const int n = m.dim;

  GeodesicPath out;
  out.parametrization = Parametrization::t_graph;
  out.lifted = true;
  out.eps = eps;
  out.truncated = sigma.truncated;
  out.truncation_reason = sigma.truncation_reason;
  out.length_F = sigma.length_F;
  out.length_Feps = sigma.length_Feps;
  out.energy_Feps = sigma.energy_Feps;

  for (size_t i = 0; i < sigma.samples.size(); ++i) {
    const auto& ps = sigma.samples[i];
    double f;
    if (eps > 0.0) {
      f = eval_F_eps(m, ps.x, ps.v, eps);
    } else {
      FinslerValue fv = eval_F(m, ps.x, ps.v);
      if (!fv.defined) {
        std::ostringstream os;
        os << "sample " << i << " has an inadmissible velocity; cannot lift";
        throw AdmissibilityError(os.str(), static_cast<long>(i));
      }
      f = fv.value;
    }
    if (std::fabs(f - 1.0) > unit_tol) {
      std::ostringstream os;
      os << "fermat_lift needs a unit-speed path: |F_eps(v) - 1| = "
         << std::fabs(f - 1.0) << " at sample " << i;
      throw ParametrizationError(os.str());
    }
    PathSample lifted;
    lifted.s = ps.s;
    lifted.x = Vec(n + 1);
    lifted.v = Vec(n + 1);
    for (int k = 0; k < n; ++k) {
      lifted.x[k] = ps.x[k];
      lifted.v[k] = ps.v[k];
    }
    lifted.x[n] = t0 + (ps.s - sigma.samples.front().s);
    lifted.v[n] = 1.0;
    lifted.conserved = conserved_C(m, ps.x, ps.v, 1.0, eps);
    lifted.residual = eval_g_eps(m, ps.x, ps.v, 1.0, ps.v, 1.0, eps);
    out.samples.push_back(lifted);
  }
  return out;
}

GeodesicPath project_graph(const ChartManifold& m, const GeodesicPath& gamma) {
  if (!gamma.lifted)
    throw ParametrizationError("project_graph expects a lifted path");
  const int n = m.dim;
  if (gamma.samples.empty()) throw InsufficientData("empty path");

  GeodesicPath out;
  out.parametrization = Parametrization::feps_unit;
  out.lifted = false;
  out.eps = gamma.eps;
  out.truncated = gamma.truncated;
  out.truncation_reason = gamma.truncation_reason;

  double t_first = gamma.samples.front().x[n];
  for (size_t i = 0; i < gamma.samples.size(); ++i) {
    const auto& ps = gamma.samples[i];
    double tdot = ps.v[n];
    if (!(tdot > 0.0)) {
      std::ostringstream os;
      os << "sample " << i << " is not future-pointing (dt/ds = " << tdot
         << "); cannot reparametrize by the clock";
      throw ParametrizationError(os.str());
    }
    PathSample sp;
    sp.s = ps.x[n] - t_first;
    sp.x = Vec(n);
    sp.v = Vec(n);
    for (int k = 0; k < n; ++k) {
      sp.x[k] = ps.x[k];
      sp.v[k] = ps.v[k] / tdot;
    }
    sp.conserved = conserved_C(m, sp.x, sp.v, 1.0, gamma.eps);
    if (gamma.eps > 0.0) {
      sp.residual = eval_F_eps(m, sp.x, sp.v, gamma.eps) - 1.0;
    } else {
      FinslerValue fv = eval_F(m, sp.x, sp.v);
      sp.residual = fv.defined ? fv.value - 1.0
                               : std::numeric_limits<double>::quiet_NaN();
    }
    out.samples.push_back(sp);
  }
  return out;
}

double pregeodesic_residual(const ChartManifold& m, const GeodesicPath& gamma,
                            double eps) {
  if (eps < 0.0) throw ParameterError("pregeodesic_residual requires eps >= 0");
  if (!gamma.lifted)
    throw ParametrizationError("pregeodesic_residual expects a lifted path");
  const auto& ss = gamma.samples;
  if (ss.size() < 5)
    throw InsufficientData("pregeodesic_residual needs at least 5 samples");
  const int n = m.dim;
  const int N = n + 1;

  double worst = 0.0;
  for (size_t i = 1; i + 1 < ss.size(); ++i) {
    double h1 = ss[i].s - ss[i - 1].s;
    double h2 = ss[i + 1].s - ss[i].s;
    if (!(h1 > 0.0) || !(h2 > 0.0))
      throw ParametrizationError("path parameter must be strictly increasing");
    // second derivative: 3-point first derivative of the sampled velocities
    double w0 = -h2 / (h1 * (h1 + h2));
    double w1 = (h2 - h1) / (h1 * h2);
    double w2 = h1 / (h2 * (h1 + h2));
    Vec acc(N);
    for (int k = 0; k < N; ++k)
      acc[k] = w0 * ss[i - 1].v[k] + w1 * ss[i].v[k] + w2 * ss[i + 1].v[k];

    Vec xs(n);
    for (int k = 0; k < n; ++k) xs[k] = ss[i].x[k];
    Christoffel ga = christoffel_g_eps(m, xs, eps);
    Vec r(N);
    for (int k = 0; k < N; ++k) {
      double s = 0.0;
      for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) s += ga.at(k, a, b) * ss[i].v[a] * ss[i].v[b];
      r[k] = acc[k] + s;
    }
    // auxiliary product metric g0 + dt^2
    Mat g0 = metric_matrix(m, xs);
    Mat aux(N, N);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) aux(a, b) = g0(a, b);
    aux(n, n) = 1.0;
    const Vec& vel = ss[i].v;
    double vv = quad(aux, vel, vel);
    if (vv <= 0.0) throw ParametrizationError("zero velocity sample");
    double rv = quad(aux, r, vel);
    Vec r_perp = r - (rv / vv) * vel;
    double norm = std::sqrt(std::max(0.0, quad(aux, r_perp, r_perp)));
    worst = std::max(worst, norm);
  }
  return worst;
}

//---------------------------------------------------- convexity certificate

ConvexityCertificate convexity_certificate(const ChartManifold& m,
                                           const Vec& p0, double eps0,
                                           const std::vector<double>& delta_grid,
                                           long lattice_cap) {
  if (eps0 < 0.0) throw ParameterError("convexity_certificate requires eps0 >= 0");
  if (delta_grid.empty()) throw ParameterError("empty delta grid");
  const int n = m.dim;
  const int N = n + 1;

  std::vector<double> eps_grid = {0.0};
  if (eps0 > 0.0) {
    eps_grid.push_back(0.5 * eps0);
    eps_grid.push_back(eps0);
  }

  // per-axis lattice count: odd, in [5, 33], total <= lattice_cap
  int q = 33;
  while (q > 5) {
    double total = std::pow(double(q), N);
    if (total <= double(lattice_cap)) break;
    q -= 2;
  }

  ConvexityCertificate cert;
  double prev_delta = 0.0;
  for (double delta : delta_grid) {
    if (!(delta > prev_delta))
      throw ParameterError("delta grid must be positive and ascending");
    prev_delta = delta;
    double rad = std::sqrt(delta);

    bool inside = true;
    for (int a = 0; a < n; ++a) {
      if (m.identified(a)) {
        if (rad >= 0.5 * kPeriod) inside = false;
        continue;
      }
      if (p0[a] - rad < m.lo[a] || p0[a] + rad > m.hi[a]) inside = false;
    }

    bool all_positive = true;
    for (double eps : eps_grid) {
      CertificateRow row;
      row.delta = delta;
      row.eps = eps;
      row.in_domain = inside;
      row.min_eig = std::numeric_limits<double>::infinity();
      if (!inside) {
        row.min_eig = std::numeric_limits<double>::quiet_NaN();
        cert.rows.push_back(row);
        all_positive = false;
        continue;
      }
      long spatial_total = 1;
      for (int a = 0; a < n; ++a) spatial_total *= q;
      for (long sidx = 0; sidx < spatial_total; ++sidx) {
        long rem = sidx;
        Vec xi(n);
        double nsp = 0.0;
        for (int a = 0; a < n; ++a) {
          int c = rem % q;
          rem /= q;
          xi[a] = -rad + 2.0 * rad * c / double(q - 1);
          nsp += xi[a] * xi[a];
        }
        if (nsp >= delta) continue;
        Christoffel ga = christoffel_g_eps(m, p0 + xi, eps);
        for (int ct = 0; ct < q; ++ct) {
          double xt = -rad + 2.0 * rad * ct / double(q - 1);
          if (nsp + xt * xt >= delta) continue;
          Mat B = Mat::identity(N);
          for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) {
              double s = 0.0;
              for (int k = 0; k < n; ++k) s += xi[k] * ga.at(k, i, j);
              s += xt * ga.at(n, i, j);
              B(i, j) -= s;
            }
          Vec ev = sym_eigenvalues(B);
          row.min_eig = std::min(row.min_eig, ev[0]);
          ++row.points;
        }
      }
      if (!(row.min_eig > 0.0)) all_positive = false;
      cert.rows.push_back(row);
    }
    if (all_positive) {
      cert.found = true;
      cert.delta = delta;
    }
  }
  return cert;
}

}  // namespace rknav
