#include "rknav/path.hpp"

#include <algorithm>
#include <cmath>

#include "rknav/error.hpp"

namespace rknav {

std::string parametrization_name(Parametrization p) {
  switch (p) {
    case Parametrization::feps_unit: return "feps-unit";
    case Parametrization::t_graph: return "t-graph";
    case Parametrization::affine: return "affine";
  }
  return "?";
}

Parametrization parametrization_from_name(const std::string& s) {
  if (s == "feps-unit") return Parametrization::feps_unit;
  if (s == "t-graph") return Parametrization::t_graph;
  if (s == "affine") return Parametrization::affine;
  throw ConfigError("unknown parametrization '" + s + "'");
}

PathSample path_at(const GeodesicPath& p, double s) {
  if (p.samples.empty()) throw InsufficientData("path has no samples");
  const auto& ss = p.samples;
  if (s <= ss.front().s) return ss.front();
  if (s >= ss.back().s) return ss.back();
  auto it = std::lower_bound(
      ss.begin(), ss.end(), s,
      [](const PathSample& a, double val) { return a.s < val; });
  const PathSample& hi = *it;
  const PathSample& lo = *(it - 1);
  double h = hi.s - lo.s;
  double w = (h > 0.0) ? (s - lo.s) / h : 0.0;
  PathSample out = lo;
  out.s = s;
  for (int i = 0; i < lo.x.n; ++i) {
    out.x[i] = lo.x[i] + w * (hi.x[i] - lo.x[i]);
    out.v[i] = lo.v[i] + w * (hi.v[i] - lo.v[i]);
  }
  out.conserved = lo.conserved + w * (hi.conserved - lo.conserved);
  out.residual = lo.residual + w * (hi.residual - lo.residual);
  return out;
}

double max_conserved_drift(const GeodesicPath& p) {
  if (p.samples.empty()) return 0.0;
  double c0 = p.samples.front().conserved, m = 0.0;
  for (const auto& s : p.samples) m = std::max(m, std::fabs(s.conserved - c0));
  return m;
}

double max_residual_drift(const GeodesicPath& p) {
  if (p.samples.empty()) return 0.0;
  double r0 = p.samples.front().residual, m = 0.0;
  for (const auto& s : p.samples) m = std::max(m, std::fabs(s.residual - r0));
  return m;
}

}  // namespace rknav
