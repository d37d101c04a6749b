#pragma once
#include <limits>
#include <string>
#include <vector>

#include "rknav/linalg.hpp"

// Sampled curves.  Spatial paths carry dim-m points; lifted paths carry
// dim-(m+1) points with the clock coordinate t stored last.  The diagnostic
// columns depend on the parametrization:
//   feps_unit : conserved = g_eps((v,1), dt-direction), residual = F_eps(v) - 1
//   t_graph   : same quantities on the lifted samples
//   affine    : conserved = g_eps(gamma', dt-direction), residual = g_eps(gamma', gamma')

namespace rknav {

enum class Parametrization { feps_unit, t_graph, affine };

std::string parametrization_name(Parametrization p);
Parametrization parametrization_from_name(const std::string& s);

struct PathSample {
  double s = 0.0;
  Vec x;
  Vec v;
  double conserved = 0.0;
  double residual = 0.0;
};

struct GeodesicPath {
  Parametrization parametrization = Parametrization::feps_unit;
  bool lifted = false;
  double eps = 0.0;
  double length_F = std::numeric_limits<double>::quiet_NaN();
  double length_Feps = std::numeric_limits<double>::quiet_NaN();
  double energy_Feps = std::numeric_limits<double>::quiet_NaN();
  std::vector<PathSample> samples;
  bool truncated = false;
  std::string truncation_reason;

  bool empty() const { return samples.empty(); }
  double s_front() const { return samples.front().s; }
  double s_back() const { return samples.back().s; }
};

// Linear interpolation of position/velocity at parameter s (clamped to the
// sampled range).
PathSample path_at(const GeodesicPath& p, double s);

// Largest |conserved(s) - conserved(0)| over the samples.
double max_conserved_drift(const GeodesicPath& p);

// Largest |residual(s) - residual(0)| over the samples.
double max_residual_drift(const GeodesicPath& p);

}  // namespace rknav
