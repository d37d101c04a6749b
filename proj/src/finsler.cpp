#include "rknav/finsler.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

#include "rknav/error.hpp"

namespace rknav {

std::string branch_name(FinslerBranch b) {
  switch (b) {
    case FinslerBranch::randers: return "randers";
    case FinslerBranch::kropina: return "kropina";
    case FinslerBranch::zero_vector: return "zero-vector";
  }
  return "?";
}

namespace {

// Positive root of lam_eff t^2 - 2 om t - gvv = 0 without cancellation:
// the two algebraic forms trade the subtraction depending on sign(om).
double positive_root(double lam_eff, double gvv, double om) {
  double disc = std::sqrt(lam_eff * gvv + om * om);
  if (om >= 0.0) return (disc + om) / lam_eff;
  return gvv / (disc - om);
}

bool is_zero_vector(const Vec& v) { return norm_inf(v) == 0.0; }

}  // namespace

FinslerValue eval_F(const ChartManifold& m, const Vec& x, const Vec& v) {
  double lam = eval_lambda(m, x);
  FinslerValue out;
  if (is_zero_vector(v)) {
    out.branch = FinslerBranch::zero_vector;
    out.defined = lam > kLambdaTol;  // F(x, 0) = 0 only off the singular set
    out.value = 0.0;
    return out;
  }
  double gvv = inner_g0(m, x, v, v);
  double om = eval_omega(m, x, v);
  if (lam > kLambdaTol) {
    out.branch = FinslerBranch::randers;
    out.defined = true;
    out.value = positive_root(lam, gvv, om);
    return out;
  }
  out.branch = FinslerBranch::kropina;
  if (om < 0.0) {
    out.defined = true;
    out.value = gvv / (-2.0 * om);
  }
  return out;
}

double eval_F_eps(const ChartManifold& m, const Vec& x, const Vec& v,
                  double eps) {
  if (!(eps > 0.0))
    throw ParameterError("eval_F_eps requires eps > 0");
  if (is_zero_vector(v)) return 0.0;
  double lam = eval_lambda(m, x);
  double gvv = inner_g0(m, x, v, v);
  double om = eval_omega(m, x, v);
  return positive_root(lam + eps, gvv, om);
}

std::optional<double> lightlike_root(const ChartManifold& m, const Vec& x,
                                     const Vec& v, double eps) {
  if (eps < 0.0) throw ParameterError("lightlike_root requires eps >= 0");
  double lam_eff = eval_lambda(m, x) + eps;
  double gvv = inner_g0(m, x, v, v);
  double om = eval_omega(m, x, v);

  if (is_zero_vector(v)) {
    if (lam_eff > kLambdaTol) return 0.0;
    return std::nullopt;  // the quadratic degenerates to 0 = 0
  }
  double t;
  if (lam_eff > kLambdaTol) {
    // stable quadratic root, then polished against the actual polynomial
    double disc = std::sqrt(om * om + lam_eff * gvv);
    t = (om >= 0.0) ? (om + disc) / lam_eff : gvv / (disc - om);
  } else {
    if (om >= 0.0) return std::nullopt;  // linear case with no positive root
    t = gvv / (-2.0 * om);
  }
  for (int it = 0; it < 2; ++it) {
    double q = gvv + 2.0 * om * t - lam_eff * t * t;
    double dq = 2.0 * om - 2.0 * lam_eff * t;
    if (dq != 0.0) t -= q / dq;
  }
  return t;
}

double eval_h_eps(const ChartManifold& m, const Vec& x, const Vec& u,
                  const Vec& w, double eps) {
  if (eps < 0.0) throw ParameterError("eval_h_eps requires eps >= 0");
  double lam = eval_lambda(m, x);
  return (lam + eps) * inner_g0(m, x, u, w) +
         eval_omega(m, x, u) * eval_omega(m, x, w);
}

//----------------------------------------------------------- quadrature

namespace {

// Integral over [a, b] of the quadratic through (s0,f0), (s1,f1), (s2,f2).
double quad3_integral(double s0, double s1, double s2, double f0, double f1,
                      double f2, double a, double b) {
  auto basis = [&](double p, double q, double den) {
    // integral of (x-p)(x-q)/den over [a, b]
    auto anti = [&](double x) {
      return x * x * x / 3.0 - (p + q) * x * x / 2.0 + p * q * x;
    };
    return (anti(b) - anti(a)) / den;
  };
  return f0 * basis(s1, s2, (s0 - s1) * (s0 - s2)) +
         f1 * basis(s0, s2, (s1 - s0) * (s1 - s2)) +
         f2 * basis(s0, s1, (s2 - s0) * (s2 - s1));
}

double integrate_samples(const std::vector<double>& s,
                         const std::vector<double>& f) {
  const size_t n = s.size();
  if (n < 2) throw InsufficientData("quadrature needs at least 2 samples");
  if (n == 2) return 0.5 * (f[0] + f[1]) * (s[1] - s[0]);
  double total = 0.0;
  size_t i = 0;
  while (i + 2 < n) {
    total += quad3_integral(s[i], s[i + 1], s[i + 2], f[i], f[i + 1], f[i + 2],
                            s[i], s[i + 2]);
    i += 2;
  }
  if (i + 2 == n) {
    // one interval left: reuse the final triple over the last interval only
    total += quad3_integral(s[n - 3], s[n - 2], s[n - 1], f[n - 3], f[n - 2],
                            f[n - 1], s[n - 2], s[n - 1]);
  }
  return total;
}

}  // namespace

LengthEnergy curve_length_energy(const ChartManifold& m,
                                 const GeodesicPath& path, double eps) {
  if (eps < 0.0) throw ParameterError("curve_length_energy requires eps >= 0");
  if (path.lifted)
    throw ParametrizationError("curve_length_energy expects a spatial path");
  const auto& ss = path.samples;
  if (ss.size() < 2)
    throw InsufficientData("curve_length_energy needs at least 2 samples");

  std::vector<double> s(ss.size()), f(ss.size());
  for (size_t i = 0; i < ss.size(); ++i) {
    s[i] = ss[i].s;
    double fi;
    if (eps > 0.0) {
      fi = eval_F_eps(m, ss[i].x, ss[i].v, eps);
    } else {
      FinslerValue fv = eval_F(m, ss[i].x, ss[i].v);
      if (fv.defined) {
        fi = fv.value;
      } else if (fv.branch == FinslerBranch::zero_vector) {
        fi = 1.0;  // resting over the singular set: conventional integrand
      } else {
        std::ostringstream os;
        os << "sample " << i << " has an inadmissible velocity (omega(v) = "
           << eval_omega(m, ss[i].x, ss[i].v) << " >= 0 on the singular set)";
        throw AdmissibilityError(os.str(), static_cast<long>(i));
      }
    }
    f[i] = fi;
  }
  LengthEnergy out;
  out.length = integrate_samples(s, f);
  for (auto& fi : f) fi = 0.5 * fi * fi;
  out.energy = integrate_samples(s, f);
  return out;
}

//---------------------------------------------------------------- probe

namespace {

struct Grid {
  const ChartManifold* m;
  int dim;
  int n[3] = {1, 1, 1};     // nodes per axis
  double step[3] = {0, 0, 0};
  bool wraps[3] = {false, false, false};
  long total = 1;

  long index(const int* c) const {
    long idx = 0;
    for (int a = dim - 1; a >= 0; --a) idx = idx * n[a] + c[a];
    return idx;
  }
  void coords(long idx, int* c) const {
    for (int a = 0; a < dim; ++a) {
      c[a] = idx % n[a];
      idx /= n[a];
    }
  }
  Vec point(const int* c) const {
    Vec x(dim);
    for (int a = 0; a < dim; ++a) x[a] = m->lo[a] + c[a] * step[a];
    return x;
  }
  bool boundary(const int* c) const {
    for (int a = 0; a < dim; ++a)
      if (!wraps[a] && (c[a] == 0 || c[a] == n[a] - 1)) return true;
    return false;
  }
  long snap(const Vec& x) const {
    Vec w = wrap_point(*m, x);
    int c[3];
    for (int a = 0; a < dim; ++a) {
      int k = static_cast<int>(std::lround((w[a] - m->lo[a]) / step[a]));
      if (wraps[a]) {
        k = ((k % n[a]) + n[a]) % n[a];
      } else {
        k = std::clamp(k, 0, n[a] - 1);
      }
      c[a] = k;
    }
    return index(c);
  }
};

// One-to-all Dijkstra; reversed = true measures cost of travelling b -> a
// along each edge, i.e. distances TO the source.
std::vector<double> dijkstra(const Grid& g, long source, double eps_bar,
                             bool reversed, std::vector<long>* parent) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(g.total, inf);
  if (parent) parent->assign(g.total, -1);
  using Item = std::pair<double, long>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  dist[source] = 0.0;
  heap.push({0.0, source});

  // neighbor offsets: all of {-1,0,1}^dim minus the origin
  std::vector<std::array<int, 3>> offs;
  int lim = 1;
  for (int a = 0; a < g.dim; ++a) lim *= 3;
  for (int code = 0; code < lim; ++code) {
    std::array<int, 3> o{0, 0, 0};
    int rem = code;
    bool zero = true;
    for (int a = 0; a < g.dim; ++a) {
      o[a] = rem % 3 - 1;
      rem /= 3;
      if (o[a] != 0) zero = false;
    }
    if (!zero) offs.push_back(o);
  }

  int c[3], cn[3];
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    g.coords(u, c);
    Vec xu = g.point(c);
    for (const auto& o : offs) {
      bool ok = true;
      Vec delta(g.dim);
      for (int a = 0; a < g.dim; ++a) {
        int k = c[a] + o[a];
        if (g.wraps[a]) {
          k = (k + g.n[a]) % g.n[a];
        } else if (k < 0 || k >= g.n[a]) {
          ok = false;
          break;
        }
        cn[a] = k;
        delta[a] = o[a] * g.step[a];
      }
      if (!ok) continue;
      Vec mid = xu + 0.5 * delta;
      double w;
      try {
        w = reversed ? eval_F_eps(*g.m, mid, -delta, eps_bar)
                     : eval_F_eps(*g.m, mid, delta, eps_bar);
      } catch (const Error&) {
        continue;  // inaccessible edge (field blew up); skip it
      }
      long v = g.index(cn);
      if (dist[u] + w < dist[v]) {
        dist[v] = dist[u] + w;
        if (parent) (*parent)[v] = u;
        heap.push({dist[v], v});
      }
    }
  }
  return dist;
}

}  // namespace

ProbeResult ball_compactness_probe(const ChartManifold& m, const Vec& x0,
                                   const Vec& x1, double r, double eps_bar,
                                   int grid_n) {
  if (!(eps_bar > 0.0))
    throw ParameterError("ball_compactness_probe requires eps_bar > 0");
  if (m.dim != 2 && m.dim != 3)
    throw ParameterError("grid probe supports dimension 2 or 3");
  if (!(r > 0.0)) throw ParameterError("probe radius must be positive");

  Grid g;
  g.m = &m;
  g.dim = m.dim;
  if (grid_n == 0) grid_n = (m.dim == 2) ? 101 : 41;
  if (grid_n < 5) throw ParameterError("probe grid too coarse");
  g.total = 1;
  for (int a = 0; a < m.dim; ++a) {
    g.wraps[a] = m.identified(a);
    if (g.wraps[a]) {
      g.n[a] = grid_n;
      g.step[a] = kPeriod / grid_n;
    } else {
      g.n[a] = grid_n;
      g.step[a] = (m.hi[a] - m.lo[a]) / (grid_n - 1);
    }
    g.total *= g.n[a];
  }

  ProbeResult out;
  out.grid_n = grid_n;
  long s0 = g.snap(x0), s1 = g.snap(x1);

  std::vector<long> parent;
  std::vector<double> d_from_x0 = dijkstra(g, s0, eps_bar, false, &parent);
  std::vector<double> d_to_x1 = dijkstra(g, s1, eps_bar, true, nullptr);
  std::vector<double> d_from_x1 = dijkstra(g, s1, eps_bar, false, nullptr);

  out.d_forward = d_from_x0[s1];
  out.d_backward = d_from_x1[s0];

  // forward ball around x0 meets backward ball around x1: every node in the
  // intersection must avoid the domain walls for the proxy to be conclusive.
  bool touches_wall = false;
  int c[3];
  for (long idx = 0; idx < g.total; ++idx) {
    if (d_from_x0[idx] < r && d_to_x1[idx] < r) {
      g.coords(idx, c);
      if (g.boundary(c)) {
        touches_wall = true;
        break;
      }
    }
  }
  out.contained = !touches_wall;
  if (touches_wall) {
    out.inconclusive = true;
    out.note = "ball intersection reaches the domain walls";
  }

  if (!std::isfinite(out.d_forward)) {
    out.inconclusive = true;
    out.note = "x1 unreachable on the grid";
  } else {
    // walk the optimal x0 -> x1 lattice path; wall contact means the grid
    // may be clipping the true geodesic
    for (long v = s1; v != -1 && v != s0; v = parent[v]) {
      g.coords(v, c);
      if (g.boundary(c)) {
        out.inconclusive = true;
        if (out.note.empty()) out.note = "optimal grid path touches the domain walls";
        break;
      }
    }
  }
  return out;
}

}  // namespace rknav
