#include "rknav/manifold.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "rknav/error.hpp"

namespace rknav {

std::string topology_name(Topology t) {
  switch (t) {
    case Topology::plane: return "plane";
    case Topology::cylinder: return "cylinder";
    case Topology::torus: return "torus";
    case Topology::bounded_box: return "bounded-box";
  }
  return "?";
}

Topology topology_from_name(const std::string& name) {
  if (name == "plane") return Topology::plane;
  if (name == "cylinder") return Topology::cylinder;
  if (name == "torus") return Topology::torus;
  if (name == "bounded-box") return Topology::bounded_box;
  throw ConfigError("unknown topology '" + name +
                    "' (plane, cylinder, torus, bounded-box)");
}

//------------------------------------------------------------ domain

bool in_domain(const ChartManifold& m, const Vec& x, double margin) {
  for (int i = 0; i < m.dim; ++i) {
    if (m.identified(i)) continue;
    double span = m.hi[i] - m.lo[i];
    if (x[i] < m.lo[i] - margin * span || x[i] > m.hi[i] + margin * span)
      return false;
  }
  return true;
}

namespace {

void fail_domain(const ChartManifold& m, const Vec& x) {
  std::ostringstream os;
  os << "point (";
  for (int i = 0; i < m.dim; ++i) os << (i ? ", " : "") << x[i];
  os << ") outside the domain box of '" << m.name << "'";
  throw DomainError(os.str());
}

// Integrators truncate trajectories 5% beyond the box, and adaptive steps may
// probe a little further still before the monitor rejects them.  The chart
// fields are smooth formulas, so evaluation tolerates a strip twice that wide.
constexpr double kEvalMargin = 0.1;

void require_evaluable(const ChartManifold& m, const Vec& x) {
  if (m.topology != Topology::bounded_box) return;
  if (!in_domain(m, x, kEvalMargin)) fail_domain(m, x);
}

}  // namespace

void require_in_domain(const ChartManifold& m, const Vec& x) {
  if (m.topology != Topology::bounded_box) return;
  if (!in_domain(m, x, 1e-9)) fail_domain(m, x);
}

Vec wrap_point(const ChartManifold& m, Vec x) {
  for (int i = 0; i < m.dim; ++i) {
    if (!m.identified(i)) continue;
    double r = std::fmod(x[i] - m.lo[i], kPeriod);
    if (r < 0) r += kPeriod;
    x[i] = m.lo[i] + r;
  }
  return x;
}

Vec coord_delta(const ChartManifold& m, const Vec& from, const Vec& to) {
  Vec d(m.dim);
  for (int i = 0; i < m.dim; ++i) {
    d[i] = to[i] - from[i];
    if (m.identified(i)) {
      d[i] = std::remainder(d[i], kPeriod);  // into (-period/2, period/2]
    }
  }
  return d;
}

//------------------------------------------------------------ evaluation

MetricJets metric_jets(const ChartManifold& m, const Vec& x) {
  require_evaluable(m, x);
  MetricJets out;
  const int n = m.dim;
  out.g0 = Mat(n, n);
  for (int k = 0; k < n; ++k) out.dg0[k] = Mat(n, n);
  out.domega = Mat(n, n);
  out.omega = Vec(n);
  out.dlam = Vec(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Jet v = m.g0_at(i, j).eval_jet(x);
      out.g0(i, j) = out.g0(j, i) = v.v;
      for (int k = 0; k < n; ++k) out.dg0[k](i, j) = out.dg0[k](j, i) = v.d[k];
    }
  }
  for (int j = 0; j < n; ++j) {
    Jet v = m.omega[j].eval_jet(x);
    out.omega[j] = v.v;
    for (int i = 0; i < n; ++i) out.domega(i, j) = v.d[i];
  }
  Jet lv = m.lambda.eval_jet(x);
  out.lam = lv.v;
  out.dlam = lv.d;
  return out;
}

Mat metric_matrix(const ChartManifold& m, const Vec& x) {
  require_evaluable(m, x);
  Mat g(m.dim, m.dim);
  for (int i = 0; i < m.dim; ++i)
    for (int j = i; j < m.dim; ++j)
      g(i, j) = g(j, i) = m.g0_at(i, j).eval(x);
  return g;
}

double inner_g0(const ChartManifold& m, const Vec& x, const Vec& u,
                const Vec& w) {
  return quad(metric_matrix(m, x), u, w);
}

double eval_lambda(const ChartManifold& m, const Vec& x) {
  require_evaluable(m, x);
  return m.lambda.eval(x);
}

Vec omega_covector(const ChartManifold& m, const Vec& x) {
  require_evaluable(m, x);
  Vec w(m.dim);
  for (int i = 0; i < m.dim; ++i) w[i] = m.omega[i].eval(x);
  return w;
}

double eval_omega(const ChartManifold& m, const Vec& x, const Vec& v) {
  return dot(omega_covector(m, x), v);
}

Vec sharp(const ChartManifold& m, const Vec& x, const Vec& alpha) {
  return solve(metric_matrix(m, x), alpha);
}

Vec omega_sharp(const ChartManifold& m, const Vec& x) {
  return sharp(m, x, omega_covector(m, x));
}

double omega_norm2(const ChartManifold& m, const Vec& x) {
  Vec w = omega_covector(m, x);
  return dot(w, solve(metric_matrix(m, x), w));
}

double d_omega(const ChartManifold& m, const Vec& x, const Vec& u,
               const Vec& w) {
  MetricJets j = metric_jets(m, x);
  double s = 0.0;
  for (int a = 0; a < m.dim; ++a)
    for (int b = 0; b < m.dim; ++b)
      s += j.domega(a, b) * (u[a] * w[b] - w[a] * u[b]);
  return s;
}

Vec grad_lambda(const ChartManifold& m, const Vec& x) {
  MetricJets j = metric_jets(m, x);
  return solve(j.g0, j.dlam);
}

Christoffel christoffel_g0(const ChartManifold& m, const Vec& x) {
  MetricJets j = metric_jets(m, x);
  const int n = m.dim;
  Mat ginv = inverse(j.g0);
  Christoffel gamma;
  gamma.n = n;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int jj = i; jj < n; ++jj) {
        double s = 0.0;
        for (int l = 0; l < n; ++l)
          s += ginv(k, l) *
               (j.dg0[i](l, jj) + j.dg0[jj](l, i) - j.dg0[l](i, jj));
        gamma.at(k, i, jj) = 0.5 * s;
        gamma.at(k, jj, i) = 0.5 * s;
      }
  return gamma;
}

double dist_g0(const ChartManifold& m, const Vec& a, const Vec& b) {
  Vec d = coord_delta(m, a, b);
  Vec mid = a + 0.5 * d;
  return std::sqrt(std::max(0.0, quad(metric_matrix(m, mid), d, d)));
}

//------------------------------------------------------------ sampling

std::vector<Vec> sample_box(const ChartManifold& m, int lattice_n,
                            int random_n, unsigned seed) {
  std::vector<Vec> pts;
  const int n = m.dim;
  if (lattice_n > 1) {
    long total = 1;
    for (int i = 0; i < n; ++i) total *= lattice_n;
    for (long idx = 0; idx < total; ++idx) {
      long rem = idx;
      Vec x(n);
      for (int i = 0; i < n; ++i) {
        int c = rem % lattice_n;
        rem /= lattice_n;
        x[i] = m.lo[i] + (m.hi[i] - m.lo[i]) * c / double(lattice_n - 1);
      }
      pts.push_back(x);
    }
  }
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (int r = 0; r < random_n; ++r) {
    Vec x(n);
    for (int i = 0; i < n; ++i)
      x[i] = m.lo[i] + (m.hi[i] - m.lo[i]) * u01(rng);
    pts.push_back(x);
  }
  return pts;
}

//------------------------------------------------------------ assumptions

const AssumptionCheck* AssumptionReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

AssumptionReport check_assumptions(const ChartManifold& m, int lattice_n,
                                   int random_n, unsigned seed) {
  AssumptionReport rep;
  auto pts = sample_box(m, lattice_n, random_n, seed);

  AssumptionCheck pd{"g0-positive-definite", true, true, 1.0, Vec(m.dim), ""};
  AssumptionCheck ln{"lambda-nonnegative", true, true, 1e300, Vec(m.dim), ""};
  AssumptionCheck lz{"lorentz-condition", true, true, 1e300, Vec(m.dim),
                     "lambda + |omega|^2 > 0"};
  AssumptionCheck on{"omega-nonvanishing", true, false, 1e300, Vec(m.dim),
                     "needed only by the control constructions"};
  AssumptionCheck ni{"nonintegrable-kernel", true, false, 1e300, Vec(m.dim),
                     "omega ^ d(omega) != 0"};
  if (m.dim < 3) {
    ni.pass = false;
    ni.worst = 0.0;
    ni.note = "not applicable in dimension " + std::to_string(m.dim);
  }

  for (const auto& x : pts) {
    MetricJets j = metric_jets(m, x);
    if (!is_positive_definite(j.g0)) {
      pd.pass = false;
      pd.where = x;
    }
    if (j.lam < ln.worst) {
      ln.worst = j.lam;
      ln.where = x;
    }
    double on2 = 0.0;
    bool have_inv = is_positive_definite(j.g0);
    if (have_inv) on2 = dot(j.omega, solve(j.g0, j.omega));
    double lorentz = j.lam + on2;
    if (lorentz < lz.worst) {
      lz.worst = lorentz;
      lz.where = x;
    }
    if (on2 < on.worst) {
      on.worst = on2;
      on.where = x;
    }
    if (m.dim >= 3) {
      // max over coordinate triples of |omega ^ domega| components
      double best = 0.0;
      for (int a = 0; a < m.dim; ++a)
        for (int b = a + 1; b < m.dim; ++b)
          for (int c = b + 1; c < m.dim; ++c) {
            double dab = j.domega(a, b) - j.domega(b, a);
            double dac = j.domega(a, c) - j.domega(c, a);
            double dbc = j.domega(b, c) - j.domega(c, b);
            double v = j.omega[a] * dbc - j.omega[b] * dac + j.omega[c] * dab;
            best = std::max(best, std::fabs(v));
          }
      if (best < ni.worst) {
        ni.worst = best;
        ni.where = x;
      }
    }
  }
  ln.pass = ln.worst >= -kLambdaTol;
  lz.pass = lz.worst > kLambdaTol;
  on.pass = on.worst > 1e-10;
  if (m.dim >= 3) ni.pass = ni.worst > 1e-10;

  rep.checks = {pd, ln, lz, on, ni};
  rep.ok = true;
  for (const auto& c : rep.checks)
    if (c.required && !c.pass) rep.ok = false;
  return rep;
}

namespace {

void require_valid(const ChartManifold& m) {
  AssumptionReport rep = check_assumptions(m, 5, 32, 1);
  if (rep.ok) return;
  std::string bad;
  for (const auto& c : rep.checks)
    if (c.required && !c.pass) bad += (bad.empty() ? "" : ", ") + c.name;
  throw DomainError("manifold '" + m.name + "' fails: " + bad);
}

std::vector<ScalarField> identity_fields(int n) {
  std::vector<ScalarField> g;
  g.reserve(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g.push_back(ScalarField::constant(i == j ? 1.0 : 0.0, n));
  return g;
}

ChartManifold constant_wind(double w, Topology topo, const std::string& name) {
  if (!(w >= 0.0) || w > 1.0)
    throw HypothesisViolation(
        "wind strength must lie in [0, 1]; |W| > 1 is out of scope");
  ChartManifold m;
  m.dim = 2;
  m.topology = topo;
  m.name = name;
  if (topo == Topology::cylinder) {
    m.lo = {0.0, -2.0};
    m.hi = {kPeriod, 2.0};
  } else {
    m.lo = {-2.0, -2.0};
    m.hi = {2.0, 2.0};
  }
  m.g0 = identity_fields(2);
  m.omega = {ScalarField::constant(-w, 2), ScalarField::constant(0.0, 2)};
  m.lambda = ScalarField::constant(1.0 - w * w, 2);
  return m;
}

}  // namespace

//--------------------------------------------------------------- catalog

std::vector<std::string> catalog_names() {
  return {"euclidean-plane", "constant-wind-plane", "flat-cylinder-wind",
          "kropina-plane", "heisenberg"};
}

ChartManifold catalog(const std::string& name, double wind) {
  ChartManifold m;
  if (name == "euclidean-plane") {
    m = constant_wind(0.0, Topology::plane, name);
  } else if (name == "constant-wind-plane") {
    m = constant_wind(wind, Topology::plane, name);
  } else if (name == "flat-cylinder-wind") {
    m = constant_wind(wind, Topology::cylinder, name);
  } else if (name == "kropina-plane") {
    m = constant_wind(1.0, Topology::plane, name);
  } else if (name == "heisenberg") {
    m.dim = 3;
    m.topology = Topology::bounded_box;
    m.name = name;
    m.lo = {-1.5, -1.5, -1.5};
    m.hi = {1.5, 1.5, 1.5};
    m.g0 = identity_fields(3);
    // contact form dz - (x dy - y dx)/2
    ScalarField half = ScalarField::constant(0.5, 3);
    m.omega = {half * ScalarField::coordinate(1, 3),
               -(half * ScalarField::coordinate(0, 3)),
               ScalarField::constant(1.0, 3)};
    m.lambda = ScalarField::constant(0.0, 3);
  } else {
    throw ConfigError("unknown catalog manifold '" + name + "'");
  }
  require_valid(m);
  return m;
}

//--------------------------------------------------------------- zermelo

ChartManifold from_zermelo(const ZermeloData& z, int lattice_n, int random_n,
                           unsigned seed) {
  const int n = z.dim;
  if (n < 2) throw ConfigError("zermelo data needs dimension >= 2");
  if (static_cast<int>(z.g0.size()) != n * n ||
      static_cast<int>(z.wind.size()) != n)
    throw ConfigError("zermelo data has wrong coefficient counts");

  ChartManifold m;
  m.dim = n;
  m.topology = z.topology;
  m.lo = z.lo;
  m.hi = z.hi;
  m.g0 = z.g0;
  m.name = z.name;

  // omega_i = -sum_j g0_ij W^j, lambda = 1 - g0(W, W), built symbolically
  // so derivatives stay exact.
  m.omega.clear();
  for (int i = 0; i < n; ++i) {
    ScalarField s = z.g0[i * n + 0] * z.wind[0];
    for (int j = 1; j < n; ++j) s = s + z.g0[i * n + j] * z.wind[j];
    m.omega.push_back(-s);
  }
  ScalarField w2;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      ScalarField term = z.g0[i * n + j] * z.wind[i] * z.wind[j];
      w2 = w2.valid() ? w2 + term : term;
    }
  m.lambda = ScalarField::constant(1.0, n) - w2;

  // strong wind rejection: g0(W, W) <= 1 wherever sampled
  for (const auto& x : sample_box(m, lattice_n, random_n, seed)) {
    double v = w2.eval(x);
    if (v > 1.0 + 1e-12) {
      std::ostringstream os;
      os << "unsupported wind: g0(W, W) = " << v << " > 1 at (";
      for (int i = 0; i < n; ++i) os << (i ? ", " : "") << x[i];
      os << "); strong wind is out of scope";
      throw HypothesisViolation(os.str());
    }
  }
  require_valid(m);
  return m;
}

}  // namespace rknav
