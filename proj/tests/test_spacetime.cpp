#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rknav/error.hpp"
#include "rknav/finsler.hpp"
#include "rknav/manifold.hpp"
#include "rknav/spacetime.hpp"

using namespace rknav;

namespace {

// curved chart with wind: exercises every Christoffel term
ChartManifold bumpy_chart() {
  ChartManifold m;
  m.dim = 2;
  m.topology = Topology::plane;
  m.lo = Vec{-0.5, -0.5};
  m.hi = Vec{0.5, 0.5};
  m.g0 = {ScalarField::parse("1 + 0.3*x*x", 2), ScalarField::parse("0.1*x*y", 2),
          ScalarField::parse("0.1*x*y", 2), ScalarField::parse("1 + 0.2*y*y", 2)};
  m.omega = {ScalarField::parse("0.3*y", 2), ScalarField::parse("-0.2*x", 2)};
  m.lambda = ScalarField::parse("1 + 0.1*x", 2);
  m.name = "bumpy";
  return m;
}

// independent oracle: Christoffels from central differences of the lift
Christoffel fd_christoffel(const ChartManifold& m, const Vec& x, double eps,
                           double h = 1e-5) {
  const int N = m.dim + 1;
  Mat G = g_eps_matrix(m, x, eps);
  Mat dG[kMaxDim + 1];
  for (int k = 0; k < m.dim; ++k) {
    Vec a = x, b = x;
    a[k] -= h;
    b[k] += h;
    Mat Ga = g_eps_matrix(m, a, eps), Gb = g_eps_matrix(m, b, eps);
    dG[k] = Mat(N, N);
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) dG[k](i, j) = (Gb(i, j) - Ga(i, j)) / (2 * h);
  }
  dG[m.dim] = Mat(N, N);  // stationary: no t-derivatives
  Mat Ginv = inverse(G);
  Christoffel c;
  c.n = N;
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) {
        double sum = 0.0;
        for (int l = 0; l < N; ++l)
          sum += Ginv(k, l) *
                 (dG[i](l, j) + dG[j](l, i) - dG[l](i, j));
        c.at(k, i, j) = 0.5 * sum;
      }
  return c;
}

}  // namespace

TEST_CASE("lift matrix layout, clock last") {
  ChartManifold m = catalog("constant-wind-plane", 0.5);
  Mat G = g_eps_matrix(m, Vec{0.0, 0.0}, 0.0);
  REQUIRE(G.rows == 3);
  CHECK(G(0, 0) == doctest::Approx(1.0));
  CHECK(G(1, 1) == doctest::Approx(1.0));
  CHECK(G(0, 2) == doctest::Approx(-0.5));
  CHECK(G(2, 0) == doctest::Approx(-0.5));
  CHECK(G(1, 2) == doctest::Approx(0.0));
  CHECK(G(2, 2) == doctest::Approx(-0.75));
  Mat G1 = g_eps_matrix(m, Vec{0.0, 0.0}, 0.25);
  CHECK(G1(2, 2) == doctest::Approx(-1.0));
}

TEST_CASE("the graph of F is lightlike") {
  ChartManifold m = catalog("constant-wind-plane", 0.5);
  Vec x{0.3, 0.1};
  Vec v{1.0, 0.4};
  double f = eval_F(m, x, v).value;
  CHECK(eval_g_eps(m, x, v, f, v, f, 0.0) == doctest::Approx(0.0).epsilon(1e-14));
  double fe = eval_F_eps(m, x, v, 0.2);
  CHECK(eval_g_eps(m, x, v, fe, v, fe, 0.2) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("causal classification") {
  ChartManifold m = catalog("euclidean-plane");
  Vec x{0.0, 0.0};
  CausalClass sp = classify(m, x, Vec{1.0, 0.0}, 0.0, 0.0);
  CHECK(sp.kind == CausalKind::spacelike);
  CHECK(sp.orientation == TimeOrientation::none);

  CausalClass tl = classify(m, x, Vec{1.0, 0.0}, 2.0, 0.0);
  CHECK(tl.kind == CausalKind::timelike);
  CHECK(tl.orientation == TimeOrientation::future);

  CausalClass pa = classify(m, x, Vec{1.0, 0.0}, -2.0, 0.0);
  CHECK(pa.kind == CausalKind::timelike);
  CHECK(pa.orientation == TimeOrientation::past);

  CausalClass ll = classify(m, x, Vec{1.0, 0.0}, 1.0, 0.0);
  CHECK(ll.kind == CausalKind::lightlike);
  CHECK(ll.orientation == TimeOrientation::future);

  CHECK_THROWS_AS(classify(m, x, Vec{0.0, 0.0}, 0.0, 0.0), ParameterError);
}

TEST_CASE("kropina clock direction is lightlike") {
  // over the singular set the stationary direction itself is lightlike:
  // g((0, tau), (0, tau)) = -lambda tau^2 = 0
  ChartManifold m = catalog("kropina-plane");
  Vec x{0.0, 0.0};
  CausalClass c = classify(m, x, Vec{0.0, 0.0}, 1.0, 0.0);
  CHECK(c.kind == CausalKind::lightlike);
  CHECK(c.orientation == TimeOrientation::future);
}

TEST_CASE("conserved quantity closed form") {
  ChartManifold m = catalog("constant-wind-plane", 0.5);
  Vec x{0.1, 0.2};
  CHECK(conserved_C(m, x, Vec{1.0, 0.0}, 1.0, 0.0) ==
        doctest::Approx(-1.25).epsilon(1e-15));
  CHECK(conserved_C(m, x, Vec{1.0, 0.0}, 1.0, 0.25) ==
        doctest::Approx(-1.5).epsilon(1e-15));
}

TEST_CASE("flat charts have vanishing lift symbols") {
  ChartManifold m = catalog("constant-wind-plane", 0.5);
  Christoffel c = christoffel_g_eps(m, Vec{0.4, -0.3}, 0.1);
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) CHECK(c.at(k, i, j) == doctest::Approx(0.0));
}

TEST_CASE("lift symbols match the finite-difference oracle") {
  ChartManifold m = bumpy_chart();
  for (double eps : {0.0, 0.3}) {
    for (Vec x : {Vec{0.1, 0.2}, Vec{-0.3, 0.4}, Vec{0.0, 0.0}}) {
      Christoffel a = christoffel_g_eps(m, x, eps);
      Christoffel b = fd_christoffel(m, x, eps);
      for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            CHECK(a.at(k, i, j) ==
                  doctest::Approx(b.at(k, i, j)).epsilon(1e-6));
    }
  }
}

TEST_CASE("lift symbols are smooth down to eps = 0 on the singular chart") {
  ChartManifold m = catalog("heisenberg");
  Vec x{0.2, -0.1, 0.5};
  Christoffel c0 = christoffel_g_eps(m, x, 0.0);
  Christoffel c1 = christoffel_g_eps(m, x, 1e-8);
  for (int k = 0; k < 4; ++k)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        CHECK(c0.at(k, i, j) == doctest::Approx(c1.at(k, i, j)).epsilon(1e-5));
}

TEST_CASE("degenerate lift is refused") {
  ChartManifold m;
  m.dim = 2;
  m.topology = Topology::plane;
  m.lo = Vec{-1.0, -1.0};
  m.hi = Vec{1.0, 1.0};
  m.g0 = {ScalarField::parse("1", 2), ScalarField::parse("0", 2),
          ScalarField::parse("0", 2), ScalarField::parse("1", 2)};
  m.omega = {ScalarField::parse("0", 2), ScalarField::parse("0", 2)};
  m.lambda = ScalarField::parse("0", 2);
  CHECK_THROWS_AS(christoffel_g_eps(m, Vec{0.0, 0.0}, 0.0), NumericalError);
}

TEST_CASE("polar lift keeps the spatial symbols and no clock mixing") {
  ChartManifold m;
  m.dim = 2;
  m.topology = Topology::plane;
  m.lo = Vec{0.5, 0.0};
  m.hi = Vec{3.0, 6.28};
  m.g0 = {ScalarField::parse("1", 2), ScalarField::parse("0", 2),
          ScalarField::parse("0", 2), ScalarField::parse("x1*x1", 2)};
  m.omega = {ScalarField::parse("0", 2), ScalarField::parse("0", 2)};
  m.lambda = ScalarField::parse("1", 2);
  Christoffel c = christoffel_g_eps(m, Vec{2.0, 1.0}, 0.0);
  CHECK(c.at(0, 1, 1) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(c.at(1, 0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(c.at(2, i, j) == doctest::Approx(0.0));
}
