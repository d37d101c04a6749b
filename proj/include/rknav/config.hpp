#pragma once
#include <optional>
#include <string>
#include <vector>

#include "rknav/manifold.hpp"

// Run configuration parsed from a JSON document.  One config drives every
// command; fields a command does not use are ignored.  Parse errors carry
// line/column context and throw ConfigError.
//
// Schema sketch:
//   {
//     "manifold": {"catalog": "flat-cylinder-wind", "wind": 0.5}
//                 | {"dim", "topology", "lo", "hi", "g0", "omega",
//                    "lambda", "name"}                     (expression strings)
//                 | {"zermelo": {"dim", "topology", "lo", "hi", "g0",
//                    "wind"}},                             (wind = vector field)
//     "seed": 1, "tol": 1e-6, "integrator_tol": 1e-9, "e_cap": 1e3,
//     "x0": [..], "x1": [..], "t0": 0,
//     "eps_schedule": [0.1, 0.05, ...] | {"from", "to", "ratio"},
//     "k_max": 2, "grid": 0, "samples": 10000, "out": "dir",
//     "fixture": "",                                 (verify negative control)
//     "geodesic": {"u0": [..], "tau0": .., "eps": .., "s_max": ..},
//     "reach": {"target": [..], "intervals": 4, "budget": 12000}
//   }

namespace rknav {

struct RunConfig {
  ChartManifold manifold;
  unsigned seed = 1;
  double tol = 1e-6;
  double integrator_tol = 1e-9;
  double e_cap = 1e3;
  double t0 = 0.0;
  int k_max = 1;
  int grid = 0;       // 0 lets the distance probe pick its resolution
  int samples = 256;  // sample count for property sweeps
  std::optional<Vec> x0, x1;
  std::vector<double> schedule;  // strictly decreasing, never empty
  std::string out;               // output directory, "" writes nothing
  std::string fixture;           // verify negative-control fixture name

  // geodesic command: initial data for the affine flow
  std::optional<Vec> u0;
  std::optional<double> tau0;  // absent: the lightlike root over u0
  double eps = 0.01;
  double s_max = 1.0;

  // reach command
  std::optional<Vec> target;
  int intervals = 4;
  int budget = 12000;
};

// Parses a JSON document.  source_name labels error messages.
RunConfig parse_config(const std::string& text,
                       const std::string& source_name = "config");

// Reads and parses a config file.
RunConfig load_config(const std::string& path);

// Parses a comma-separated float list ("0.1,0.05,0.025") into a schedule;
// validates positivity and strict decrease.
std::vector<double> parse_schedule_flag(const std::string& text);

}  // namespace rknav
