#include "rknav/verify.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rknav/control.hpp"
#include "rknav/error.hpp"
#include "rknav/finsler.hpp"
#include "rknav/geodesics.hpp"
#include "rknav/spacetime.hpp"

namespace rknav {

namespace {

using nlohmann::json;

// Defect accounting: beyond max(tol, floor) it is a hard failure; between
// tol and the floor it is attributed to the floor.
struct Meter {
  PropertyResult* r;
  double tol;

  void defect(double d, const std::string& witness) {
    ++r->checked;
    r->worst = std::max(r->worst, d);
    double effective = std::max(tol, r->floor_used);
    if (d > effective) {
      if (r->failures == 0) r->counterexample = witness;
      ++r->failures;
    } else if (d > tol) {
      ++r->tolerance_bound;
    }
  }
};

json vec_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.n; ++i) a.push_back(v[i]);
  return a;
}

std::string witness(std::initializer_list<std::pair<const char*, json>> kv) {
  json j;
  for (const auto& e : kv) j[e.first] = e.second;
  return j.dump();
}

Vec random_vector(std::mt19937& rng, int dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    Vec v(dim);
    double n2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      v[i] = u(rng);
      n2 += v[i] * v[i];
    }
    if (n2 > 0.09) return v;
  }
}

// Negative-control hook: the perturbed fixture scales the regularized
// metric by an eps-oscillation, which must break strict monotonicity.
double feps_fixture(const ChartManifold& m, const Vec& x, const Vec& v,
                    double eps, const std::string& fixture) {
  double f = eval_F_eps(m, x, v, eps);
  if (fixture == "perturbed-monotonicity")
    f *= 1.0 + 0.05 * std::sin(200.0 * eps);
  return f;
}

void check_homogeneity(const ChartManifold& m, const VerifyOptions& opt,
                       const std::vector<Vec>& pts, std::mt19937& rng,
                       PropertyResult& r) {
  r.name = "homogeneity";
  r.floor_used = 1e-10;
  Meter meter{&r, std::max(opt.tol, 0.0)};
  std::uniform_real_distribution<double> ueps(1e-3, 1.0);
  const double scales[2] = {0.7, 2.3};
  for (int i = 0; i < opt.samples; ++i) {
    const Vec& x = pts[i % pts.size()];
    Vec v = random_vector(rng, m.dim);
    double eps = ueps(rng);
    double c = scales[i % 2];
    double a = eval_F_eps(m, x, c * v, eps);
    double b = c * eval_F_eps(m, x, v, eps);
    double d = std::fabs(a - b) / std::max(1e-300, std::fabs(b));
    meter.defect(d, witness({{"x", vec_json(x)},
                             {"v", vec_json(v)},
                             {"eps", eps},
                             {"scale", c},
                             {"F_eps(cv)", a},
                             {"c*F_eps(v)", b}}));
    FinslerValue fv = eval_F(m, x, v);
    if (fv.defined && fv.value > 0.0) {
      FinslerValue fc = eval_F(m, x, c * v);
      double d0 = std::fabs(fc.value - c * fv.value) / (c * fv.value);
      meter.defect(d0, witness({{"x", vec_json(x)},
                                {"v", vec_json(v)},
                                {"scale", c},
                                {"F(cv)", fc.value},
                                {"c*F(v)", c * fv.value}}));
    }
  }
}

void check_monotonicity(const ChartManifold& m, const VerifyOptions& opt,
                        const std::vector<Vec>& pts, std::mt19937& rng,
                        PropertyResult& r) {
  r.name = "monotonicity";
  r.floor_used = 0.0;  // strict inequality, no numerical floor
  Meter meter{&r, 0.0};
  std::uniform_real_distribution<double> ueps(1e-3, 0.6);
  for (int i = 0; i < opt.samples; ++i) {
    const Vec& x = pts[i % pts.size()];
    Vec v = random_vector(rng, m.dim);
    double e1 = ueps(rng);
    double e2 = 1.5 * e1 + 1e-3;
    double f1 = feps_fixture(m, x, v, e1, opt.fixture);
    double f2 = feps_fixture(m, x, v, e2, opt.fixture);
    // decreasing in eps: F_{e2} < F_{e1}
    meter.defect(f2 - f1 >= 0.0 ? 1.0 : 0.0,
                 witness({{"x", vec_json(x)},
                          {"v", vec_json(v)},
                          {"eps1", e1},
                          {"eps2", e2},
                          {"F_eps1", f1},
                          {"F_eps2", f2}}));
    FinslerValue f = eval_F(m, x, v);
    if (f.defined && f.value > 0.0) {
      meter.defect(f1 - f.value >= 0.0 ? 1.0 : 0.0,
                   witness({{"x", vec_json(x)},
                            {"v", vec_json(v)},
                            {"eps", e1},
                            {"F_eps", f1},
                            {"F", f.value}}));
    }
  }
}

void check_conservation(const ChartManifold& m, const VerifyOptions& opt,
                        const std::vector<Vec>& pts, std::mt19937& rng,
                        PropertyResult& r) {
  r.name = "conservation";
  r.floor_used = 1e-7;  // monitor cap at integrator tolerance 1e-9
  Meter meter{&r, opt.tol};
  const double eps_cycle[3] = {0.0, 0.1, 0.5};
  double span = m.hi[0] - m.lo[0];
  for (int i = 1; i < m.dim; ++i) span = std::min(span, m.hi[i] - m.lo[i]);
  int wanted = std::max<long>(20, opt.samples / 8);
  int produced = 0;
  for (int i = 0; produced < wanted && i < 20 * wanted; ++i) {
    const Vec& x = pts[i % pts.size()];
    double eps = eps_cycle[i % 3];
    Vec u = random_vector(rng, m.dim);
    double n = std::sqrt(inner_g0(m, x, u, u));
    u = (1.0 / n) * u;
    std::optional<double> tau = lightlike_root(m, x, u, eps);
    if (!tau) continue;  // inadmissible over the singular set
    try {
      GeodesicPath g =
          integrate_geodesic(m, x, 0.0, u, *tau, eps, 0.3 * span, 1e-9);
      if (g.samples.size() < 2) continue;
      double drift =
          std::max(max_conserved_drift(g), max_residual_drift(g));
      ++produced;
      meter.defect(drift, witness({{"x", vec_json(x)},
                                   {"u", vec_json(u)},
                                   {"eps", eps},
                                   {"drift", drift}}));
    } catch (const AccuracyError& e) {
      ++produced;
      meter.defect(1.0, witness({{"x", vec_json(x)},
                                 {"u", vec_json(u)},
                                 {"eps", eps},
                                 {"error", e.what()}}));
    } catch (const Error&) {
      // domain exit before enough samples: not a conservation statement
    }
  }
}

void check_round_trip(const ChartManifold& m, const VerifyOptions& opt,
                      const std::vector<Vec>& pts, std::mt19937& rng,
                      PropertyResult& r) {
  r.name = "fermat-round-trip";
  r.floor_used = 1e-9;
  Meter meter{&r, opt.tol};
  double span = m.hi[0] - m.lo[0];
  for (int i = 1; i < m.dim; ++i) span = std::min(span, m.hi[i] - m.lo[i]);
  const double eps_cycle[2] = {0.05, 0.3};
  int wanted = std::max<long>(5, opt.samples / 50);
  int produced = 0;
  for (int i = 0; produced < wanted && i < 20 * wanted; ++i) {
    const Vec& x = pts[i % pts.size()];
    double eps = eps_cycle[i % 2];
    Vec u = random_vector(rng, m.dim);
    double f = eval_F_eps(m, x, u, eps);
    Vec v0 = (1.0 / f) * u;
    try {
      GeodesicPath sigma =
          integrate_fermat_graph(m, x, 0.0, v0, eps, 0.1 * span, 1e-10);
      if (sigma.samples.size() < 5) continue;
      GeodesicPath lift = fermat_lift(m, sigma, eps, 0.0);
      GeodesicPath back = project_graph(m, lift);
      double d = 0.0;
      for (size_t k = 0; k < sigma.samples.size(); ++k) {
        for (int a = 0; a < m.dim; ++a) {
          d = std::max(d, std::fabs(back.samples[k].x[a] -
                                    sigma.samples[k].x[a]));
          d = std::max(d, std::fabs(back.samples[k].v[a] -
                                    sigma.samples[k].v[a]));
        }
      }
      ++produced;
      meter.defect(d, witness({{"x", vec_json(x)},
                               {"v0", vec_json(v0)},
                               {"eps", eps},
                               {"defect", d}}));
    } catch (const Error&) {
      // flow left the box; nothing to round-trip
    }
  }
}

void check_energy_bound(const ChartManifold& m, const VerifyOptions& opt,
                        std::mt19937& rng, PropertyResult& r) {
  r.name = "energy-bound";
  r.floor_used = 0.0;
  Meter meter{&r, opt.tol};
  ControlFrame f;
  try {
    f = build_frame(m);
  } catch (const Error& e) {
    r.skipped = true;
    r.note = e.what();
    return;
  }
  Vec x0(m.dim);
  for (int i = 0; i < m.dim; ++i) x0[i] = 0.5 * (m.lo[i] + m.hi[i]);
  int wanted = std::max<long>(20, opt.samples / 8);
  int produced = 0;
  for (int i = 0; produced < wanted && i < 20 * wanted; ++i) {
    ControlSignal u = random_signal(f, 4, 0.5, rng, 1.5);
    try {
      EnergyBoundCheck c = energy_bound_check(f, u, x0);
      ++produced;
      meter.defect(c.energy - c.bound,
                   witness({{"energy", c.energy},
                            {"bound", c.bound},
                            {"delta", c.delta}}));
    } catch (const DomainError&) {
      // flow escaped the box; the bound presumes containment
    }
  }
}

void check_convexity(const ChartManifold& m, PropertyResult& r) {
  r.name = "convexity-certificate";
  r.checked = 1;
  Vec p0(m.dim);
  for (int i = 0; i < m.dim; ++i) p0[i] = 0.5 * (m.lo[i] + m.hi[i]);
  std::vector<double> grid = {0.02, 0.05, 0.1, 0.2, 0.4};
  ConvexityCertificate c = convexity_certificate(m, p0, 1.0, grid);
  if (!c.found) {
    r.failures = 1;
    r.counterexample = witness({{"p0", vec_json(p0)},
                                {"note", "no delta in the grid certifies"}});
  } else {
    std::ostringstream os;
    os << "delta = " << c.delta;
    r.note = os.str();
  }
}

void check_battery(const ChartManifold& m, const VerifyOptions& opt,
                   PropertyResult& r) {
  r.name = "assumption-battery";
  AssumptionReport rep = check_assumptions(m, 7, 64, opt.seed);
  for (const AssumptionCheck& c : rep.checks) {
    ++r.checked;
    if (c.required && !c.pass) {
      if (r.failures == 0)
        r.counterexample = witness({{"check", c.name},
                                    {"worst", c.worst},
                                    {"where", vec_json(c.where)},
                                    {"note", c.note}});
      ++r.failures;
    }
  }
}

}  // namespace

VerifyReport run_verify(const ChartManifold& m, const VerifyOptions& opt) {
  if (opt.samples < 1) throw ParameterError("verify needs samples >= 1");
  if (!(opt.tol > 0.0)) throw ParameterError("verify needs tol > 0");
  if (!opt.fixture.empty() && opt.fixture != "perturbed-monotonicity")
    throw ConfigError("unknown verify fixture '" + opt.fixture + "'");

  VerifyReport rep;
  std::mt19937 rng(opt.seed);
  std::vector<Vec> pts = sample_box(m, 3, std::max(16, opt.samples / 4),
                                    opt.seed);

  rep.properties.resize(7);
  check_homogeneity(m, opt, pts, rng, rep.properties[0]);
  check_monotonicity(m, opt, pts, rng, rep.properties[1]);
  check_conservation(m, opt, pts, rng, rep.properties[2]);
  check_round_trip(m, opt, pts, rng, rep.properties[3]);
  check_energy_bound(m, opt, rng, rep.properties[4]);
  check_convexity(m, rep.properties[5]);
  check_battery(m, opt, rep.properties[6]);

  rep.ok = true;
  for (const PropertyResult& p : rep.properties)
    if (!p.pass()) rep.ok = false;
  return rep;
}

std::string verify_document(const VerifyReport& r) {
  json j;
  j["format"] = "rknav.verify.v1";
  j["ok"] = r.ok;
  json rows = json::array();
  std::string first;
  for (const PropertyResult& p : r.properties) {
    json e;
    e["name"] = p.name;
    e["checked"] = p.checked;
    e["failures"] = p.failures;
    e["tolerance_bound"] = p.tolerance_bound;
    e["worst"] = p.worst;
    e["floor"] = p.floor_used;
    e["skipped"] = p.skipped;
    e["pass"] = p.pass();
    e["note"] = p.note;
    if (!p.counterexample.empty())
      e["counterexample"] = json::parse(p.counterexample);
    if (first.empty() && !p.pass() && !p.counterexample.empty())
      first = p.counterexample;
    rows.push_back(std::move(e));
  }
  j["properties"] = std::move(rows);
  if (!first.empty()) j["first_counterexample"] = json::parse(first);
  return j.dump(2) + "\n";
}

}  // namespace rknav
