#include "rknav/control.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rknav/error.hpp"
#include "rknav/finsler.hpp"
#include "rknav/rk.hpp"

namespace rknav {

namespace {

// Kernel frame at x with a fixed dropped axis: project the remaining
// coordinate vectors onto ker(omega) and g0-orthonormalize in axis order.
// Fixing the dropped axis over the whole box keeps the frame smooth.
FramePoint frame_at(const ChartManifold& m, const Vec& x, int drop_axis) {
  MetricJets j = metric_jets(m, x);
  Vec osharp = solve(j.g0, j.omega);
  double n2 = dot(j.omega, osharp);
  if (!(n2 > 1e-20))
    throw HypothesisViolation("omega vanishes inside the control box");
  FramePoint fp;
  fp.x0 = (-1.0 / std::sqrt(n2)) * osharp;
  for (int a = 0; a < m.dim; ++a) {
    if (a == drop_axis) continue;
    Vec w(m.dim);
    w[a] = 1.0;
    w = w - (j.omega[a] / n2) * osharp;
    for (const Vec& prev : fp.fields) {
      Vec gp = mul(j.g0, prev);
      w = w - dot(gp, w) * prev;
    }
    double wn2 = quad(j.g0, w, w);
    if (!(wn2 > 1e-16))
      throw NumericalError("kernel frame degenerates inside the control box");
    fp.fields.push_back((1.0 / std::sqrt(wn2)) * w);
  }
  return fp;
}

Vec signal_velocity(const FramePoint& fp, double xi, const Vec& alpha) {
  Vec v = (xi * xi) * fp.x0;
  for (size_t i = 0; i < fp.fields.size(); ++i)
    v = v + (xi * alpha[static_cast<int>(i)]) * fp.fields[i];
  return v;
}

}  // namespace

ControlFrame build_frame(const ChartManifold& m, int lattice_n) {
  if (m.dim < 3)
    throw ParameterError("the control construction needs dimension >= 3");
  if (lattice_n < 2) throw ParameterError("lattice_n must be >= 2");

  ControlFrame f;
  f.manifold = &m;

  Vec center(m.dim);
  for (int a = 0; a < m.dim; ++a) center[a] = 0.5 * (m.lo[a] + m.hi[a]);
  Vec oc = omega_covector(m, center);
  f.drop_axis = 0;
  for (int a = 1; a < m.dim; ++a)
    if (std::fabs(oc[a]) > std::fabs(oc[f.drop_axis])) f.drop_axis = a;

  // bracket pair: the kernel-field pair with the largest two-form value at
  // the center, oriented positively
  FramePoint fc = frame_at(m, center, f.drop_axis);
  const int nk = static_cast<int>(fc.fields.size());
  double best = 0.0;
  for (int i = 0; i < nk; ++i)
    for (int j = i + 1; j < nk; ++j) {
      double d = d_omega(m, center, fc.fields[i], fc.fields[j]);
      if (std::fabs(d) > std::fabs(best)) {
        best = d;
        f.bracket_i = i;
        f.bracket_j = j;
      }
    }
  if (std::fabs(best) <= 1e-10)
    throw HypothesisViolation(
        "kernel distribution looks integrable at the chart center: "
        "the bracket term vanishes");
  if (best < 0.0) std::swap(f.bracket_i, f.bracket_j);

  // lattice sweep for the box constants
  double omega_sup = 0.0;
  double omega_inf = std::numeric_limits<double>::infinity();
  double lambda_pre = std::numeric_limits<double>::infinity();
  double boundary_sup = 0.0;
  double interior_sup = 0.0;
  std::vector<int> idx(m.dim, 0);
  const long total = [&] {
    long t = 1;
    for (int a = 0; a < m.dim; ++a) t *= lattice_n;
    return t;
  }();
  for (long flat = 0; flat < total; ++flat) {
    long rem = flat;
    bool on_wall = false;
    Vec x(m.dim);
    for (int a = 0; a < m.dim; ++a) {
      int i = static_cast<int>(rem % lattice_n);
      rem /= lattice_n;
      if (i == 0 || i == lattice_n - 1) on_wall = true;
      x[a] = m.lo[a] + (m.hi[a] - m.lo[a]) * double(i) / (lattice_n - 1);
    }
    double on = std::sqrt(omega_norm2(m, x));
    omega_sup = std::max(omega_sup, on);
    omega_inf = std::min(omega_inf, on);
    (on_wall ? boundary_sup : interior_sup) =
        std::max(on_wall ? boundary_sup : interior_sup, on);
    FramePoint fp = frame_at(m, x, f.drop_axis);
    double d = d_omega(m, x, fp.fields[f.bracket_i], fp.fields[f.bracket_j]);
    lambda_pre = std::min(lambda_pre, d);
  }
  if (!(lambda_pre > 1e-10))
    throw HypothesisViolation(
        "bracket term is not bounded away from zero on the box");
  f.omega_sup = omega_sup;
  f.omega_inf = omega_inf;
  f.lambda_pre = lambda_pre;
  f.c2 = 5.0 * (m.dim + 3) * omega_sup / lambda_pre;
  f.lambda = f.c2 * lambda_pre;
  if (boundary_sup > 1.02 * interior_sup) {
    std::ostringstream os;
    os << "omega keeps growing toward the box walls (wall sup " << boundary_sup
       << " vs interior sup " << interior_sup
       << "); the constants certify the sampled box only";
    f.note = os.str();
  }
  return f;
}

FramePoint eval_frame(const ControlFrame& f, const Vec& x) {
  return frame_at(*f.manifold, wrap_point(*f.manifold, x), f.drop_axis);
}

void check_admissible(const ControlFrame& f, const ControlSignal& u) {
  const int n = u.intervals();
  if (n < 1) throw ParameterError("control signal has no intervals");
  if (static_cast<int>(u.breakpoints.size()) != n + 1)
    throw ParameterError("control signal needs intervals+1 breakpoints");
  if (static_cast<int>(u.alpha.size()) != n)
    throw ParameterError("control signal alpha count mismatch");
  for (int j = 0; j < n; ++j) {
    if (!(u.breakpoints[j + 1] > u.breakpoints[j]))
      throw ParameterError("control breakpoints must be strictly increasing");
    if (!(u.xi[j] >= 0.0))
      throw ParameterError("control xi must be nonnegative");
    if (u.alpha[j].n != f.controls())
      throw ParameterError("control alpha dimension mismatch");
    double a2 = dot(u.alpha[j], u.alpha[j]);
    if (a2 > f.c2 * (1.0 + 1e-12)) {
      std::ostringstream os;
      os << "control amplitude " << a2 << " exceeds C^2 = " << f.c2
         << " on interval " << j;
      throw ParameterError(os.str());
    }
  }
}

GeodesicPath integrate_control(const ControlFrame& f, const ControlSignal& u,
                               const Vec& x0, double tol) {
  check_admissible(f, u);
  const ChartManifold& m = *f.manifold;
  require_in_domain(m, x0);

  GeodesicPath path;
  path.parametrization = Parametrization::affine;
  path.lifted = false;
  path.eps = 0.0;

  Vec x = wrap_point(m, x0);
  bool truncated = false;
  for (int j = 0; j < u.intervals() && !truncated; ++j) {
    const double xi = u.xi[j];
    const Vec& alpha = u.alpha[j];
    auto rhs = [&](double, const double* y, double* dy) {
      Vec p(m.dim);
      for (int a = 0; a < m.dim; ++a) p[a] = y[a];
      FramePoint fp = frame_at(m, wrap_point(m, p), f.drop_axis);
      Vec v = signal_velocity(fp, xi, alpha);
      for (int a = 0; a < m.dim; ++a) dy[a] = v[a];
    };
    std::vector<RkStep> raw;
    auto inspect = [&](double s, const double* y) {
      Vec p(m.dim);
      for (int a = 0; a < m.dim; ++a) p[a] = y[a];
      if (!in_domain(m, p, 0.05)) return false;
      RkStep st;
      st.s = s;
      for (int a = 0; a < m.dim; ++a) st.y[a] = y[a];
      raw.push_back(st);
      return true;
    };
    RkOptions opt;
    opt.rtol = tol;
    opt.atol = tol;
    double y[kMaxState];
    for (int a = 0; a < m.dim; ++a) y[a] = x[a];
    RkOutcome oc = rk_integrate(m.dim, rhs, u.breakpoints[j],
                                u.breakpoints[j + 1], y, opt, inspect);
    if (!oc.completed && oc.reason != "stopped by monitor")
      throw NumericalError("control flow integration failed: " + oc.reason);
    if (!oc.completed) {
      truncated = true;
      path.truncated = true;
      path.truncation_reason = "left the domain box";
    }
    for (size_t k = 0; k < raw.size(); ++k) {
      if (j > 0 && k == 0) continue;  // interval seam: already recorded
      Vec p(m.dim);
      for (int a = 0; a < m.dim; ++a) p[a] = raw[k].y[a];
      Vec pw = wrap_point(m, p);
      FramePoint fp = frame_at(m, pw, f.drop_axis);
      Vec v = signal_velocity(fp, xi, alpha);
      PathSample ps;
      ps.s = raw[k].s;
      ps.x = pw;
      ps.v = v;
      ps.conserved = eval_omega(m, pw, v);
      ps.residual = 0.0;
      path.samples.push_back(ps);
    }
    if (!raw.empty())
      for (int a = 0; a < m.dim; ++a) x[a] = raw.back().y[a];
    x = wrap_point(m, x);
  }
  if (path.samples.size() < 2)
    throw NumericalError("control flow produced fewer than 2 samples");
  return path;
}

Vec control_endpoint(const ControlFrame& f, const ControlSignal& u,
                     const Vec& x0, double tol) {
  GeodesicPath p = integrate_control(f, u, x0, tol);
  if (p.truncated)
    throw DomainError("control flow left the domain box before the endpoint");
  return p.samples.back().x;
}

EnergyBoundCheck energy_bound_check(const ControlFrame& f,
                                    const ControlSignal& u, const Vec& x0,
                                    double tol) {
  const ChartManifold& m = *f.manifold;
  GeodesicPath whole = integrate_control(f, u, x0, tol);
  if (whole.truncated)
    throw DomainError("energy audit needs the flow to stay inside the box");

  EnergyBoundCheck out;
  out.span = u.span();
  out.c4 = f.c2 * f.c2;
  for (int j = 0; j < u.intervals(); ++j) {
    double ds = u.breakpoints[j + 1] - u.breakpoints[j];
    out.u0_sq_integral += std::pow(u.xi[j], 4) * ds;
  }

  // quadrature interval-by-interval so the kinks at breakpoints do not sit
  // inside a quadratic quadrature triple
  double delta = std::numeric_limits<double>::infinity();
  size_t lo = 0;
  for (int j = 0; j < u.intervals(); ++j) {
    double s_hi = u.breakpoints[j + 1];
    size_t hi = lo;
    while (hi + 1 < whole.samples.size() &&
           whole.samples[hi].s < s_hi - 1e-12)
      ++hi;
    GeodesicPath piece;
    piece.parametrization = Parametrization::affine;
    piece.eps = 0.0;
    piece.samples.assign(whole.samples.begin() + lo,
                         whole.samples.begin() + hi + 1);
    if (piece.samples.size() >= 2) {
      LengthEnergy le = curve_length_energy(m, piece, 0.0);
      out.energy += le.energy;
    }
    lo = hi;
  }
  for (const PathSample& ps : whole.samples)
    delta = std::min(delta, std::sqrt(omega_norm2(m, ps.x)));
  out.delta = delta;
  out.bound =
      1.0 + (2.0 / (delta * delta)) * (out.u0_sq_integral + out.c4 * out.span);
  out.ok = out.energy <= out.bound;
  return out;
}

ControlSignal random_signal(const ControlFrame& f, int intervals,
                            double xi_max, std::mt19937& rng,
                            double alpha_max) {
  if (intervals < 1) throw ParameterError("intervals must be >= 1");
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  double c = std::sqrt(f.c2);
  if (alpha_max > 0.0) c = std::min(c, alpha_max);
  ControlSignal u;
  for (int j = 0; j <= intervals; ++j)
    u.breakpoints.push_back(double(j) / intervals);
  for (int j = 0; j < intervals; ++j) {
    u.xi.push_back(xi_max * unit(rng));
    Vec a(f.controls());
    for (;;) {  // rejection-sample the unit ball, then scale to radius C
      double n2 = 0.0;
      for (int i = 0; i < a.n; ++i) {
        a[i] = sym(rng);
        n2 += a[i] * a[i];
      }
      if (n2 <= 1.0) break;
    }
    u.alpha.push_back(c * a);
  }
  return u;
}

namespace {

struct SearchSpace {
  const ControlFrame* frame;
  int intervals;
  double xi_cap;

  int dims() const { return intervals * (1 + frame->controls()); }

  ControlSignal decode(const std::vector<double>& p) const {
    const int nc = frame->controls();
    ControlSignal u;
    for (int j = 0; j <= intervals; ++j)
      u.breakpoints.push_back(double(j) / intervals);
    for (int j = 0; j < intervals; ++j) {
      u.xi.push_back(p[j * (1 + nc)]);
      Vec a(nc);
      for (int i = 0; i < nc; ++i) a[i] = p[j * (1 + nc) + 1 + i];
      u.alpha.push_back(a);
    }
    return u;
  }

  void project(std::vector<double>& p) const {
    const int nc = frame->controls();
    const double cmax = std::sqrt(frame->c2) * (1.0 - 1e-9);
    for (int j = 0; j < intervals; ++j) {
      double& xi = p[j * (1 + nc)];
      xi = std::clamp(xi, 0.0, xi_cap);
      double n2 = 0.0;
      for (int i = 0; i < nc; ++i) {
        double v = p[j * (1 + nc) + 1 + i];
        n2 += v * v;
      }
      if (n2 > cmax * cmax) {
        double scale = cmax / std::sqrt(n2);
        for (int i = 0; i < nc; ++i) p[j * (1 + nc) + 1 + i] *= scale;
      }
    }
  }
};

}  // namespace

ReachResult reach(const ControlFrame& f, const Vec& x0, const Vec& target,
                  const ReachOptions& opt) {
  const ChartManifold& m = *f.manifold;
  require_in_domain(m, x0);
  require_in_domain(m, target);

  SearchSpace sp{&f, opt.intervals, 3.0};
  ReachResult res;

  auto objective = [&](const std::vector<double>& p) {
    ++res.evals;
    ControlSignal u = sp.decode(p);
    try {
      GeodesicPath path = integrate_control(f, u, x0, opt.search_tol);
      Vec end = path.samples.back().x;
      double d = dist_g0(m, end, target);
      if (path.truncated) return 1e3 + d;
      return d;
    } catch (const Error&) {
      return 1e6;
    }
  };

  // structured restarts: pure drift at a few strengths, plus bracket loops
  // of both orientations (square alpha cycles generate motion transverse to
  // the kernel distribution)
  std::vector<std::vector<double>> inits;
  const int nc = f.controls();
  for (double xi0 : {0.1, 0.3, 0.6}) {
    std::vector<double> p(sp.dims(), 0.0);
    for (int j = 0; j < opt.intervals; ++j) p[j * (1 + nc)] = xi0;
    inits.push_back(p);
  }
  if (opt.intervals >= 4 && nc >= 2) {
    // square bracket loops of both circulations (the sign flips only one
    // component: negating the whole pattern would keep the orientation)
    const double a = 0.7 * std::sqrt(f.c2);
    for (double sign : {1.0, -1.0}) {
      std::vector<double> p(sp.dims(), 0.0);
      const double pat[4][2] = {{a, 0.0}, {0.0, a}, {-a, 0.0}, {0.0, -a}};
      for (int j = 0; j < opt.intervals; ++j) {
        p[j * (1 + nc)] = 0.3;
        p[j * (1 + nc) + 1] = pat[j % 4][0];
        p[j * (1 + nc) + 2] = sign * pat[j % 4][1];
      }
      inits.push_back(p);
    }
  }

  std::mt19937 rng(opt.seed);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  const int slice = std::max(200, opt.budget / static_cast<int>(inits.size()));

  std::vector<double> best_p;
  double best_f = std::numeric_limits<double>::infinity();
  for (auto& p0 : inits) {
    std::vector<double> p = p0;
    for (double& v : p) v += jitter(rng);  // break symmetric stalls, seeded
    sp.project(p);
    double fv = objective(p);
    std::vector<double> step(sp.dims());
    for (int j = 0; j < opt.intervals; ++j) {
      step[j * (1 + nc)] = 0.1;
      for (int i = 0; i < nc; ++i) step[j * (1 + nc) + 1 + i] = 0.5;
    }
    int spent = 1;
    while (spent < slice) {
      bool improved = false;
      for (int d = 0; d < sp.dims() && spent < slice; ++d) {
        for (double s : {step[d], -step[d]}) {
          std::vector<double> q = p;
          q[d] += s;
          sp.project(q);
          double fq = objective(q);
          ++spent;
          if (fq < fv - 1e-15) {
            p = q;
            fv = fq;
            improved = true;
            break;
          }
          if (spent >= slice) break;
        }
      }
      if (!improved) {
        bool alive = false;
        for (double& s : step) {
          s *= 0.5;
          if (s > 1e-5) alive = true;
        }
        if (!alive) break;
      }
    }
    if (fv < best_f) {
      best_f = fv;
      best_p = p;
    }
  }

  if (best_p.empty()) {
    res.note = "search produced no evaluable signal";
    return res;
  }
  res.signal = sp.decode(best_p);
  res.path = integrate_control(f, res.signal, x0, opt.verify_tol);
  res.end = res.path.samples.back().x;
  res.distance = dist_g0(m, res.end, target);
  res.ok = !res.path.truncated && res.distance <= opt.target_tol;
  if (!res.ok) {
    std::ostringstream os;
    os << "best signal misses the target by " << res.distance;
    res.note = os.str();
  }
  return res;
}

}  // namespace rknav
