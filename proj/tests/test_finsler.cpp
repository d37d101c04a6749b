#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "rknav/error.hpp"
#include "rknav/finsler.hpp"
#include "rknav/manifold.hpp"

using namespace rknav;

namespace {

GeodesicPath sampled_path(const std::vector<double>& s,
                          const std::vector<Vec>& x,
                          const std::vector<Vec>& v) {
  GeodesicPath p;
  for (size_t i = 0; i < s.size(); ++i) {
    PathSample ps;
    ps.s = s[i];
    ps.x = x[i];
    ps.v = v[i];
    p.samples.push_back(ps);
  }
  return p;
}

}  // namespace

TEST_CASE("constant wind speeds: closed forms") {
  ChartManifold m = catalog("constant-wind-plane", 0.5);
  Vec x{0.0, 0.0};
  FinslerValue down = eval_F(m, x, Vec{1.0, 0.0});
  REQUIRE(down.defined);
  CHECK(down.value == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(down.branch == FinslerBranch::randers);

  FinslerValue up = eval_F(m, x, Vec{-1.0, 0.0});
  REQUIRE(up.defined);
  CHECK(up.value == doctest::Approx(2.0).epsilon(1e-15));

  FinslerValue cross = eval_F(m, x, Vec{0.0, 1.0});
  REQUIRE(cross.defined);
  CHECK(cross.value == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-15));
}

TEST_CASE("critical wind: kropina branch") {
  ChartManifold m = catalog("kropina-plane");
  Vec x{0.0, 0.0};
  FinslerValue f = eval_F(m, x, Vec{1.0, 1.0});
  REQUIRE(f.defined);
  CHECK(f.value == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(f.branch == FinslerBranch::kropina);

  CHECK(eval_F(m, x, Vec{1.0, 0.0}).value == doctest::Approx(0.5));
  CHECK_FALSE(eval_F(m, x, Vec{-1.0, 0.0}).defined);  // upwind
  CHECK_FALSE(eval_F(m, x, Vec{0.0, 1.0}).defined);   // crosswind boundary
  CHECK_FALSE(eval_F(m, x, Vec{0.0, 0.0}).defined);   // rest is inadmissible

  // regularized: sqrt(2) - 1 for the unit downwind vector at eps = 1
  CHECK(eval_F_eps(m, x, Vec{1.0, 0.0}, 1.0) ==
        doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-15));
}

TEST_CASE("zero vector conventions") {
  ChartManifold reg = catalog("constant-wind-plane", 0.5);
  FinslerValue f = eval_F(reg, Vec{0.0, 0.0}, Vec{0.0, 0.0});
  REQUIRE(f.defined);
  CHECK(f.value == doctest::Approx(0.0));
  CHECK(f.branch == FinslerBranch::zero_vector);
  CHECK(eval_F_eps(reg, Vec{0.0, 0.0}, Vec{0.0, 0.0}, 0.3) ==
        doctest::Approx(0.0));
  CHECK_THROWS_AS(eval_F_eps(reg, Vec{0.0, 0.0}, Vec{1.0, 0.0}, 0.0),
                  ParameterError);
}

TEST_CASE("F equals the lightlike root across the catalog") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const std::string& name : catalog_names()) {
    ChartManifold m = catalog(name);
    auto pts = sample_box(m, 3, 20, 5);
    for (const Vec& x : pts) {
      for (int trial = 0; trial < 10; ++trial) {
        Vec v(m.dim);
        for (int i = 0; i < m.dim; ++i) v[i] = u(rng);
        if (norm2(v) < 1e-3) continue;
        FinslerValue f = eval_F(m, x, v);
        auto root = lightlike_root(m, x, v, 0.0);
        if (!f.defined || f.branch == FinslerBranch::zero_vector) {
          if (f.defined) continue;
          CHECK_FALSE(root.has_value());
          continue;
        }
        REQUIRE(root.has_value());
        CHECK(std::fabs(f.value - *root) <= 1e-12 * (1.0 + f.value));
      }
    }
  }
}

TEST_CASE("positive homogeneity") {
  ChartManifold m = catalog("constant-wind-plane", 0.3);
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> c(0.1, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    Vec x{u(rng), u(rng)};
    Vec v{u(rng), u(rng)};
    if (norm2(v) < 1e-3) continue;
    double k = c(rng);
    double f1 = eval_F(m, x, v).value;
    double fk = eval_F(m, x, k * v).value;
    CHECK(std::fabs(fk - k * f1) <= 1e-12 * (1.0 + fk));
    double g1 = eval_F_eps(m, x, v, 0.2);
    double gk = eval_F_eps(m, x, k * v, 0.2);
    CHECK(std::fabs(gk - k * g1) <= 1e-12 * (1.0 + gk));
  }
}

TEST_CASE("regularization is strictly monotone in eps") {
  ChartManifold m = catalog("kropina-plane");
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    Vec x{u(rng), u(rng)};
    Vec v{u(rng), u(rng)};
    if (norm2(v) < 1e-3) continue;
    double e1 = 0.01 + 0.4 * (u(rng) + 1.0);
    double e2 = e1 + 0.05;
    double f1 = eval_F_eps(m, x, v, e1);
    double f2 = eval_F_eps(m, x, v, e2);
    CHECK(f2 < f1);
    FinslerValue f0 = eval_F(m, x, v);
    if (f0.defined) CHECK(f1 < f0.value);
  }
}

TEST_CASE("F_eps converges to F on the admissible set") {
  ChartManifold m = catalog("kropina-plane");
  Vec x{0.2, -0.3};
  Vec v{1.0, 0.7};  // omega(v) = -1 < 0
  double f0 = eval_F(m, x, v).value;
  double prev_gap = 1e300;
  for (double eps = 1e-2; eps > 1e-11; eps *= 1e-3) {
    double gap = std::fabs(eval_F_eps(m, x, v, eps) - f0);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap <= 1e-9 * (1.0 + f0));
}

TEST_CASE("companion metric h_eps") {
  ChartManifold m = catalog("constant-wind-plane", 0.5);
  Vec x{0.0, 0.0};
  CHECK(eval_h_eps(m, x, Vec{1.0, 0.0}, Vec{1.0, 0.0}, 0.0) ==
        doctest::Approx(1.0).epsilon(1e-15));
  CHECK(eval_h_eps(m, x, Vec{0.0, 1.0}, Vec{0.0, 1.0}, 0.0) ==
        doctest::Approx(0.75).epsilon(1e-15));
  CHECK(eval_h_eps(m, x, Vec{1.0, 0.0}, Vec{0.0, 1.0}, 0.0) ==
        doctest::Approx(0.0));
  // eps shifts the g0 part only
  CHECK(eval_h_eps(m, x, Vec{0.0, 1.0}, Vec{0.0, 1.0}, 0.1) ==
        doctest::Approx(0.85).epsilon(1e-15));
}

TEST_CASE("length and energy of a straight downwind run") {
  ChartManifold m = catalog("constant-wind-plane", 0.5);
  std::vector<double> s;
  std::vector<Vec> x, v;
  const int n = 33;
  for (int i = 0; i < n; ++i) {
    double t = double(i) / (n - 1);
    s.push_back(t);
    x.push_back(Vec{t, 0.0});
    v.push_back(Vec{1.0, 0.0});
  }
  GeodesicPath p = sampled_path(s, x, v);
  LengthEnergy le = curve_length_energy(m, p, 0.0);
  CHECK(le.length == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
  CHECK(le.energy == doctest::Approx(2.0 / 9.0).epsilon(1e-13));
}

TEST_CASE("quadrature against a dense Simpson oracle") {
  // length of s -> (s, sin s) on the euclidean plane
  ChartManifold m = catalog("euclidean-plane");
  auto speed = [](double t) { return std::sqrt(1.0 + std::cos(t) * std::cos(t)); };
  // Simpson oracle with 20001 nodes
  double oracle = 0.0;
  {
    const int n = 20000;
    for (int i = 0; i <= n; ++i) {
      double t = double(i) / n;
      double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      oracle += w * speed(t);
    }
    oracle /= 3.0 * n;
  }
  std::vector<double> s;
  std::vector<Vec> x, v;
  const int n = 101;
  for (int i = 0; i < n; ++i) {
    double t = double(i) / (n - 1);
    s.push_back(t);
    x.push_back(Vec{t, std::sin(t)});
    v.push_back(Vec{1.0, std::cos(t)});
  }
  LengthEnergy le = curve_length_energy(m, sampled_path(s, x, v), 0.0);
  CHECK(le.length == doctest::Approx(oracle).epsilon(1e-8));
}

TEST_CASE("quadrature handles non-uniform sample spacing") {
  ChartManifold m = catalog("euclidean-plane");
  // same curve, geometrically stretched parameter grid
  std::vector<double> s;
  std::vector<Vec> x, v;
  double t = 0.0, h = 0.002;
  while (t < 1.0) {
    s.push_back(t);
    x.push_back(Vec{t, std::sin(t)});
    v.push_back(Vec{1.0, std::cos(t)});
    t += h;
    h *= 1.05;
  }
  s.push_back(1.0);
  x.push_back(Vec{1.0, std::sin(1.0)});
  v.push_back(Vec{1.0, std::cos(1.0)});
  LengthEnergy le = curve_length_energy(m, sampled_path(s, x, v), 0.0);
  double oracle = 1.3114424982155595;  // dense Simpson value, frozen
  CHECK(le.length == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("inadmissible samples are reported with their index") {
  ChartManifold m = catalog("kropina-plane");
  std::vector<double> s{0.0, 0.5, 1.0};
  std::vector<Vec> x{Vec{0.0, 0.0}, Vec{-0.5, 0.0}, Vec{-1.0, 0.0}};
  std::vector<Vec> v{Vec{-1.0, 0.0}, Vec{-1.0, 0.0}, Vec{-1.0, 0.0}};
  try {
    curve_length_energy(m, sampled_path(s, x, v), 0.0);
    CHECK(false);
  } catch (const AdmissibilityError& e) {
    std::string msg = e.what();
    CHECK(msg.find("sample") != std::string::npos);
  }
}

TEST_CASE("momentary rest over the singular set uses the unit convention") {
  ChartManifold m = catalog("kropina-plane");
  std::vector<double> s{0.0, 1.0, 2.0};
  std::vector<Vec> x{Vec{0.3, 0.4}, Vec{0.3, 0.4}, Vec{0.3, 0.4}};
  std::vector<Vec> v{Vec{0.0, 0.0}, Vec{0.0, 0.0}, Vec{0.0, 0.0}};
  LengthEnergy le = curve_length_energy(m, sampled_path(s, x, v), 0.0);
  CHECK(le.length == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(le.energy == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("ball probe: asymmetric distances under constant wind") {
  ChartManifold m = catalog("constant-wind-plane", 0.5);
  ProbeResult pr =
      ball_compactness_probe(m, Vec{-0.5, 0.0}, Vec{0.5, 0.0}, 0.8, 0.05);
  CHECK(pr.d_forward == doctest::Approx(2.0 / 3.0).epsilon(0.08));
  CHECK(pr.d_backward == doctest::Approx(2.0).epsilon(0.08));
  CHECK(pr.contained);
  CHECK_FALSE(pr.inconclusive);
}

TEST_CASE("ball probe: oversize radius is inconclusive") {
  ChartManifold m = catalog("constant-wind-plane", 0.5);
  ProbeResult pr =
      ball_compactness_probe(m, Vec{-0.5, 0.0}, Vec{0.5, 0.0}, 6.0, 0.05);
  CHECK(pr.inconclusive);
  CHECK_FALSE(pr.note.empty());
}

TEST_CASE("probe input validation") {
  ChartManifold m = catalog("constant-wind-plane", 0.5);
  CHECK_THROWS_AS(
      ball_compactness_probe(m, Vec{0.0, 0.0}, Vec{1.0, 0.0}, 1.0, 0.0),
      ParameterError);
  CHECK_THROWS_AS(
      ball_compactness_probe(m, Vec{0.0, 0.0}, Vec{1.0, 0.0}, -1.0, 0.1),
      ParameterError);
}
