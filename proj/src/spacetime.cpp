#include "rknav/spacetime.hpp"

#include <cmath>

#include "rknav/error.hpp"

namespace rknav {

std::string causal_kind_name(CausalKind k) {
  switch (k) {
    case CausalKind::timelike: return "timelike";
    case CausalKind::lightlike: return "lightlike";
    case CausalKind::spacelike: return "spacelike";
  }
  return "?";
}

std::string orientation_name(TimeOrientation o) {
  switch (o) {
    case TimeOrientation::future: return "future";
    case TimeOrientation::past: return "past";
    case TimeOrientation::none: return "none";
  }
  return "?";
}

Mat g_eps_matrix(const ChartManifold& m, const Vec& x, double eps) {
  if (eps < 0.0) throw ParameterError("g_eps requires eps >= 0");
  const int n = m.dim;
  MetricJets j = metric_jets(m, x);
  Mat g(n + 1, n + 1);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) g(i, k) = j.g0(i, k);
  for (int i = 0; i < n; ++i) g(i, n) = g(n, i) = j.omega[i];
  g(n, n) = -(j.lam + eps);
  return g;
}

double eval_g_eps(const ChartManifold& m, const Vec& x, const Vec& u,
                  double tau_u, const Vec& w, double tau_w, double eps) {
  if (eps < 0.0) throw ParameterError("g_eps requires eps >= 0");
  double lam = eval_lambda(m, x);
  return inner_g0(m, x, u, w) + eval_omega(m, x, u) * tau_w +
         eval_omega(m, x, w) * tau_u - (lam + eps) * tau_u * tau_w;
}

CausalClass classify(const ChartManifold& m, const Vec& x, const Vec& w,
                     double tau, double eps, double band) {
  double n2 = inner_g0(m, x, w, w) + tau * tau;
  if (n2 <= 0.0)
    throw ParameterError("cannot classify the zero vector");
  double scale = 1.0 / std::sqrt(n2);
  Vec wn = scale * w;
  double taun = scale * tau;
  CausalClass out;
  out.value = eval_g_eps(m, x, wn, taun, wn, taun, eps);
  if (out.value < -band) {
    out.kind = CausalKind::timelike;
  } else if (out.value <= band) {
    out.kind = CausalKind::lightlike;
  } else {
    out.kind = CausalKind::spacelike;
  }
  if (out.kind == CausalKind::spacelike || tau == 0.0) {
    out.orientation = TimeOrientation::none;
  } else {
    out.orientation = (tau > 0.0) ? TimeOrientation::future
                                  : TimeOrientation::past;
  }
  return out;
}

double conserved_C(const ChartManifold& m, const Vec& x, const Vec& u,
                   double tau, double eps) {
  if (eps < 0.0) throw ParameterError("conserved_C requires eps >= 0");
  double lam = eval_lambda(m, x);
  return eval_omega(m, x, u) - (lam + eps) * tau;
}

Christoffel christoffel_g_eps(const ChartManifold& m, const Vec& x,
                              double eps) {
  if (eps < 0.0) throw ParameterError("christoffel_g_eps requires eps >= 0");
  const int n = m.dim;
  const int N = n + 1;
  MetricJets j = metric_jets(m, x);

  // lift coefficients and their spatial derivatives; t-derivatives vanish
  Mat G(N, N);
  Mat dG[kMaxDim];  // dG[k] for spatial k only
  for (int k = 0; k < n; ++k) dG[k] = Mat(N, N);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) {
      G(i, l) = j.g0(i, l);
      for (int k = 0; k < n; ++k) dG[k](i, l) = j.dg0[k](i, l);
    }
  for (int i = 0; i < n; ++i) {
    G(i, n) = G(n, i) = j.omega[i];
    for (int k = 0; k < n; ++k) dG[k](i, n) = dG[k](n, i) = j.domega(k, i);
  }
  G(n, n) = -(j.lam + eps);
  for (int k = 0; k < n; ++k) dG[k](n, n) = -j.dlam[k];

  // degeneracy guard: in the adapted frame det G = -(lam+eps+|omega|^2) det g0
  double scale = 0.0;
  for (int i = 0; i < N * N; ++i) scale = std::max(scale, std::fabs(G.a[i]));
  double dG_det = det(G);
  if (std::fabs(dG_det) < 1e-14 * std::pow(scale, N))
    throw NumericalError("lift metric is degenerate at this point");

  Mat Ginv = inverse(G);
  auto dpart = [&](int k, int i, int l) -> double {
    return (k < n) ? dG[k](i, l) : 0.0;
  };
  Christoffel gamma;
  gamma.n = N;
  for (int k = 0; k < N; ++k)
    for (int i = 0; i < N; ++i)
      for (int jj = i; jj < N; ++jj) {
        double s = 0.0;
        for (int l = 0; l < N; ++l)
          s += Ginv(k, l) * (dpart(i, l, jj) + dpart(jj, l, i) - dpart(l, i, jj));
        gamma.at(k, i, jj) = 0.5 * s;
        gamma.at(k, jj, i) = 0.5 * s;
      }
  return gamma;
}

}  // namespace rknav
