#include "rknav/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rknav/error.hpp"
#include "rknav/finsler.hpp"
#include "rknav/geodesics.hpp"

namespace rknav {

namespace {

// Hyperspherical direction from dim-1 angles; dim 2 gives (cos, sin).
Vec direction(const Vec& theta, int dim) {
  Vec v(dim);
  double prod = 1.0;
  for (int i = 0; i < dim - 1; ++i) {
    v[i] = prod * std::cos(theta[i]);
    prod *= std::sin(theta[i]);
  }
  v[dim - 1] = prod;
  return v;
}

Vec angles_of(const Vec& v) {
  const int dim = v.n;
  Vec theta(dim - 1);
  for (int i = 0; i < dim - 1; ++i) {
    double tail = 0.0;
    for (int j = i + 1; j < dim; ++j) tail += v[j] * v[j];
    if (i < dim - 2) {
      theta[i] = std::atan2(std::sqrt(tail), v[i]);
    } else {
      theta[i] = std::atan2(v[dim - 1], v[dim - 2]);
    }
  }
  return theta;
}

// Target point in the universal cover: nearest representative of x1 shifted
// by the winding translate on identified axes.
Vec cover_target(const ChartManifold& m, const Vec& x0, const Vec& x1,
                 const std::vector<int>& winding) {
  Vec t = x0 + coord_delta(m, x0, x1);
  for (int a = 0; a < m.dim; ++a)
    if (m.identified(a)) t[a] += winding[a] * kPeriod;
  return t;
}

double unit_speed(const ChartManifold& m, const Vec& x, const Vec& v,
                  double eps) {
  if (eps > 0.0) return eval_F_eps(m, x, v, eps);
  FinslerValue f = eval_F(m, x, v);
  if (!f.defined) return -1.0;
  return f.value;
}

// F_eps length of the straight cover segment x0 -> x1c (Simpson, 33 nodes).
double straight_length(const ChartManifold& m, const Vec& x0, const Vec& x1c,
                       double eps) {
  const int n = 32;
  Vec d = x1c - x0;
  double sum = 0.0;
  for (int i = 0; i <= n; ++i) {
    double s = double(i) / n;
    double f = unit_speed(m, x0 + s * d, d, eps);
    if (f < 0.0) return -1.0;
    double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * f;
  }
  return sum / (3.0 * n);
}

struct FlowTrial {
  bool ok = false;
  GeodesicPath path;
  Vec end;
};

FlowTrial run_flow(const BvpProblem& p, double eps, const Vec& theta, double T,
                   int min_samples = 0) {
  FlowTrial out;
  if (!(T > 0.0)) return out;
  const ChartManifold& m = p.manifold;
  Vec dir = direction(theta, m.dim);
  double f = unit_speed(m, p.x0, dir, eps);
  if (!(f > 0.0)) return out;  // direction outside the admissible cone
  Vec v0 = (1.0 / f) * dir;
  try {
    GeodesicPath path = integrate_fermat_graph(m, p.x0, p.t0, v0, eps, T,
                                               p.integrator_tol, min_samples);
    if (path.truncated) return out;
    out.end = path.samples.back().x;
    out.path = std::move(path);
    out.ok = true;
  } catch (const Error&) {
    out.ok = false;
  }
  return out;
}

}  // namespace

void require_connectable(const ChartManifold& m, const Vec& x0, const Vec& x1) {
  Vec d = coord_delta(m, x0, x1);
  if (norm_inf(d) > 1e-12) return;
  double lam = eval_lambda(m, x0);
  if (lam > kLambdaTol) return;
  // coincident endpoints over the singular set: need d(lambda) != 0 on ker(omega)
  MetricJets j = metric_jets(m, x0);
  Vec osharp = solve(j.g0, j.omega);
  double on2 = dot(j.omega, osharp);
  if (on2 <= 0.0)
    throw HypothesisViolation("omega vanishes at a singular point");
  for (int a = 0; a < m.dim; ++a) {
    Vec e(m.dim);
    e[a] = 1.0;
    Vec proj = e - (j.omega[a] / on2) * osharp;
    if (std::fabs(dot(j.dlam, proj)) > 1e-10) return;
  }
  throw HypothesisViolation(
      "coincident endpoints over the singular set with d(lambda) vanishing "
      "on ker(omega): a connecting geodesic may not exist; refusing");
}

double arrival_time(const ChartManifold& m, const GeodesicPath& sigma,
                    double t0) {
  return t0 + curve_length_energy(m, sigma, 0.0).length;
}

std::vector<double> eps_schedule(double from, double to, double ratio) {
  if (!(from > to) || !(to > 0.0) || !(ratio > 0.0) || !(ratio < 1.0))
    throw ParameterError("eps schedule needs from > to > 0 and ratio in (0,1)");
  std::vector<double> s;
  for (double e = from; e > to * (1.0 + 1e-12); e *= ratio) s.push_back(e);
  s.push_back(to);
  return s;
}

ShootResult shoot(const BvpProblem& p, double eps,
                  const std::vector<int>& winding, const Vec* theta_guess,
                  const double* time_guess) {
  const ChartManifold& m = p.manifold;
  const int dim = m.dim;
  ShootResult res;
  res.eps = eps;
  res.winding = winding;
  if (static_cast<int>(winding.size()) != dim) {
    res.reason = "winding vector size mismatch";
    return res;
  }

  Vec x1c = cover_target(m, p.x0, p.x1, winding);
  Vec span = x1c - p.x0;
  if (norm2(span) < 1e-12) {
    res.reason = "coincident endpoints in this class";
    return res;
  }

  Vec theta;
  double T;
  if (theta_guess && time_guess) {
    theta = *theta_guess;
    T = *time_guess;
  } else {
    theta = angles_of(span);
    T = straight_length(m, p.x0, x1c, eps);
    if (T <= 0.0) {
      res.reason = "straight guess leaves the admissible cone";
      return res;
    }
  }

  Mat g_end = metric_matrix(m, wrap_point(m, p.x1));
  auto err_norm = [&](const Vec& r) { return std::sqrt(quad(g_end, r, r)); };

  FlowTrial base = run_flow(p, eps, theta, T);
  if (!base.ok) {
    res.reason = "initial trajectory failed (left domain or inadmissible)";
    return res;
  }
  Vec R = base.end - x1c;

  for (int iter = 0; iter < p.max_newton; ++iter) {
    double err = err_norm(R);
    if (err <= p.tol) {
      // re-run once with dense sampling: the returned path feeds velocity
      // finite differences downstream, the Newton trials do not
      FlowTrial dense = run_flow(p, eps, theta, T, 256);
      if (!dense.ok) {
        res.reason = "dense re-run of the converged trajectory failed";
        return res;
      }
      Vec Rd = dense.end - x1c;
      if (err_norm(Rd) > p.tol) {  // step-size-dependent drift; keep polishing
        base = std::move(dense);
        R = Rd;
        continue;
      }
      res.ok = true;
      res.newton_iters = iter;
      res.path = dense.path;
      res.theta = theta;
      res.arrival_time = T;
      res.endpoint_error = err_norm(Rd);
      LengthEnergy le = curve_length_energy(m, res.path, eps);
      res.length = le.length;
      // energy of the unit-interval reparametrization: comparable across
      // eps and the quantity capped during continuation
      res.energy = T * le.energy;
      res.path.length_Feps = le.length;
      res.path.energy_Feps = le.energy;
      try {
        res.path.length_F = curve_length_energy(m, res.path, 0.0).length;
      } catch (const Error&) {
        // inadmissible at eps = 0; leave NaN
      }
      return res;
    }

    // finite-difference jacobian in (theta, T)
    Mat J(dim, dim);
    const double h_th = 1e-6;
    const double h_T = 1e-6 * std::max(1.0, std::fabs(T));
    bool jac_ok = true;
    for (int j = 0; j < dim - 1; ++j) {
      Vec th = theta;
      th[j] += h_th;
      FlowTrial trial = run_flow(p, eps, th, T);
      if (!trial.ok) {
        jac_ok = false;
        break;
      }
      for (int i = 0; i < dim; ++i)
        J(i, j) = (trial.end[i] - base.end[i]) / h_th;
    }
    if (jac_ok) {
      FlowTrial trial = run_flow(p, eps, theta, T + h_T);
      if (!trial.ok) {
        jac_ok = false;
      } else {
        for (int i = 0; i < dim; ++i)
          J(i, dim - 1) = (trial.end[i] - base.end[i]) / h_T;
      }
    }
    if (!jac_ok) {
      res.reason = "endpoint map not evaluable near the current iterate";
      return res;
    }

    Vec step;
    try {
      step = solve(J, -1.0 * R);
    } catch (const NumericalError&) {
      res.reason = "conjugate-like degeneracy: singular shooting jacobian";
      return res;
    }

    bool advanced = false;
    for (double damp = 1.0; damp >= 1.0 / 256; damp *= 0.5) {
      Vec th = theta;
      for (int j = 0; j < dim - 1; ++j) th[j] += damp * step[j];
      double Tn = T + damp * step[dim - 1];
      if (!(Tn > 1e-10)) continue;
      FlowTrial trial = run_flow(p, eps, th, Tn);
      if (!trial.ok) continue;
      Vec Rn = trial.end - x1c;
      if (err_norm(Rn) < err) {
        theta = th;
        T = Tn;
        base = std::move(trial);
        R = Rn;
        advanced = true;
        break;
      }
    }
    if (!advanced) {
      res.reason = "newton stalled: no descent direction";
      return res;
    }
  }
  res.reason = "newton iteration limit reached";
  return res;
}

MultiStartOutcome multi_start(const BvpProblem& p, double eps, int k_max) {
  const ChartManifold& m = p.manifold;
  if (k_max < 0) throw ParameterError("k_max must be >= 0");

  std::vector<int> axes;
  for (int a = 0; a < m.dim; ++a)
    if (m.identified(a)) axes.push_back(a);

  // enumerate winding classes: 0, 1, -1, 2, -2, ... per identified axis
  std::vector<int> ks = {0};
  for (int k = 1; k <= k_max; ++k) {
    ks.push_back(k);
    ks.push_back(-k);
  }
  std::vector<std::vector<int>> classes;
  if (axes.empty()) {
    classes.push_back(std::vector<int>(m.dim, 0));
  } else if (axes.size() == 1) {
    for (int k : ks) {
      std::vector<int> w(m.dim, 0);
      w[axes[0]] = k;
      classes.push_back(w);
    }
  } else {
    for (int k1 : ks)
      for (int k2 : ks) {
        std::vector<int> w(m.dim, 0);
        w[axes[0]] = k1;
        w[axes[1]] = k2;
        classes.push_back(w);
      }
  }

  MultiStartOutcome out;
  for (const auto& w : classes) {
    ShootResult r = shoot(p, eps, w);
    if (r.ok) {
      out.solutions.push_back(std::move(r));
    } else {
      out.failures.emplace_back(w, r.reason);
    }
  }
  std::sort(out.solutions.begin(), out.solutions.end(),
            [](const ShootResult& a, const ShootResult& b) {
              if (a.length != b.length) return a.length < b.length;
              return a.winding < b.winding;
            });
  return out;
}

ContinuationTrace continue_eps(const BvpProblem& p,
                               const std::vector<double>& schedule,
                               const ShootResult& start) {
  require_connectable(p.manifold, p.x0, p.x1);
  if (schedule.size() < 2)
    throw ParameterError("continuation schedule needs at least 2 entries");
  for (size_t i = 0; i + 1 < schedule.size(); ++i)
    if (!(schedule[i] > schedule[i + 1]) || !(schedule[i + 1] > 0.0))
      throw ParameterError("continuation schedule must be strictly decreasing and positive");

  ContinuationTrace trace;
  trace.winding = start.winding;
  if (!start.ok) {
    trace.note = "no starting solution: " + start.reason;
    return trace;
  }

  ShootResult prev = start;
  trace.records.push_back({start.eps, start.length, start.energy,
                           start.arrival_time, start.endpoint_error, 0.0});
  if (start.energy > p.e_cap) {
    trace.diverged = true;
    std::ostringstream os;
    os << "energy " << start.energy << " already above the ceiling " << p.e_cap;
    trace.note = os.str();
    trace.limit = prev.path;
    return trace;
  }

  bool aborted = false;
  for (size_t i = 1; i < schedule.size(); ++i) {
    double eps = schedule[i];
    ShootResult cur = shoot(p, eps, prev.winding, &prev.theta,
                            &prev.arrival_time);
    if (!cur.ok) {
      std::ostringstream os;
      os << "continuation stalled at eps = " << eps << ": " << cur.reason;
      trace.note = os.str();
      aborted = true;
      break;
    }
    // geometric sup distance between consecutive paths at equal fractions
    double sup = 0.0;
    for (int q = 0; q <= 64; ++q) {
      double f = double(q) / 64;
      Vec a = path_at(prev.path, prev.path.s_front() +
                                     f * (prev.path.s_back() - prev.path.s_front()))
                  .x;
      Vec b = path_at(cur.path, cur.path.s_front() +
                                    f * (cur.path.s_back() - cur.path.s_front()))
                  .x;
      sup = std::max(sup, dist_g0(p.manifold, a, b));
    }
    trace.records.push_back({eps, cur.length, cur.energy, cur.arrival_time,
                             cur.endpoint_error, sup});
    if (cur.energy > p.e_cap) {
      trace.diverged = true;
      std::ostringstream os;
      os << "energy " << cur.energy << " exceeded the ceiling " << p.e_cap
         << " at eps = " << eps << "; lengths grow without bound";
      trace.note = os.str();
      prev = std::move(cur);
      aborted = true;
      break;
    }
    prev = std::move(cur);
  }
  trace.completed = !aborted;
  trace.limit = prev.path;

  // Cauchy scan: first index from which both increments stay below tol
  for (size_t i = 1; i < trace.records.size(); ++i) {
    double dl = std::fabs(trace.records[i].length - trace.records[i - 1].length);
    if (dl < p.tol && trace.records[i].step_sup_dist < p.tol) {
      trace.cauchy_index = static_cast<int>(i);
      break;
    }
  }
  if (trace.completed && !trace.diverged && trace.records.size() >= 2) {
    const auto& last = trace.records.back();
    const auto& prevrec = trace.records[trace.records.size() - 2];
    double dl = std::fabs(last.length - prevrec.length);
    trace.converged = dl < p.tol && last.step_sup_dist < p.tol;
  }

  trace.limit_residual = std::numeric_limits<double>::quiet_NaN();
  if (!trace.diverged && !trace.limit.samples.empty()) {
    double eps_min = trace.records.back().eps;
    double unit_tol = std::max(1e-6, 5.0 * eps_min);
    try {
      GeodesicPath lift =
          fermat_lift(p.manifold, trace.limit, 0.0, p.t0, unit_tol);
      trace.limit_residual = pregeodesic_residual(p.manifold, lift, 0.0);
    } catch (const Error& e) {
      if (!trace.note.empty()) trace.note += "; ";
      trace.note += std::string("limit validation unavailable: ") + e.what();
    }
  }
  return trace;
}

ContinuationTrace connect_class(const BvpProblem& p,
                                const std::vector<double>& schedule,
                                const std::vector<int>& winding) {
  require_connectable(p.manifold, p.x0, p.x1);
  if (schedule.empty()) throw ParameterError("empty continuation schedule");
  ShootResult start = shoot(p, schedule.front(), winding);
  if (schedule.size() == 1) {
    ContinuationTrace trace;
    trace.winding = winding;
    if (!start.ok) {
      trace.note = "no starting solution: " + start.reason;
      return trace;
    }
    trace.completed = true;
    trace.records.push_back({start.eps, start.length, start.energy,
                             start.arrival_time, start.endpoint_error, 0.0});
    trace.limit = start.path;
    return trace;
  }
  return continue_eps(p, schedule, start);
}

}  // namespace rknav
