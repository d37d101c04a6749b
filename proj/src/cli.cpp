#include "rknav/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "rknav/bvp.hpp"
#include "rknav/config.hpp"
#include "rknav/control.hpp"
#include "rknav/error.hpp"
#include "rknav/finsler.hpp"
#include "rknav/geodesics.hpp"
#include "rknav/io.hpp"
#include "rknav/verify.hpp"

namespace rknav {

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitHypothesis = 3;
constexpr int kExitSolver = 4;
constexpr int kExitProperty = 5;

// Flag overrides layered over the config file.
struct Flags {
  std::string config;
  std::string out;
  std::string schedule;
  unsigned seed = 0;
  double tol = 0.0;
  int k_max = 0;
  int grid = 0;
  bool has_out = false, has_schedule = false, has_seed = false;
  bool has_tol = false, has_k_max = false, has_grid = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "config file (JSON)")->required();
  cmd->add_option("--seed", f.seed, "override the config seed");
  cmd->add_option("--out", f.out, "output directory for path tables");
  cmd->add_option("--tol", f.tol, "override the endpoint/property tolerance");
  cmd->add_option("--eps-schedule", f.schedule,
                  "override the continuation schedule (comma list)");
  cmd->add_option("--k-max", f.k_max, "override the winding bound");
  cmd->add_option("--grid", f.grid, "override the probe grid resolution");
}

RunConfig load_with_overrides(const CLI::App* cmd, const Flags& f) {
  RunConfig c = load_config(f.config);
  if (cmd->count("--seed")) c.seed = f.seed;
  if (cmd->count("--out")) c.out = f.out;
  if (cmd->count("--tol")) {
    if (!(f.tol > 0.0)) throw ConfigError("--tol must be positive");
    c.tol = f.tol;
  }
  if (cmd->count("--eps-schedule")) c.schedule = parse_schedule_flag(f.schedule);
  if (cmd->count("--k-max")) {
    if (f.k_max < 0) throw ConfigError("--k-max must be nonnegative");
    c.k_max = f.k_max;
  }
  if (cmd->count("--grid")) c.grid = f.grid;
  return c;
}

Vec box_center(const ChartManifold& m) {
  Vec c(m.dim);
  for (int i = 0; i < m.dim; ++i) c[i] = 0.5 * (m.lo[i] + m.hi[i]);
  return c;
}

const Vec& need_point(const std::optional<Vec>& p, const char* key) {
  if (!p) throw ConfigError(std::string("config is missing '") + key + "'");
  return *p;
}

std::string index_name(const char* stem, size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s-%03zu.%s", stem, i, ext);
  return buf;
}

//--------------------------------------------------------------- describe

int cmd_describe(const RunConfig& c) {
  const ChartManifold& m = c.manifold;
  std::ostringstream os;
  os << "manifold: " << m.name << "\n"
     << "dim:      " << m.dim << "\n"
     << "topology: " << topology_name(m.topology) << "\n"
     << "box:     ";
  for (int i = 0; i < m.dim; ++i)
    os << " [" << format_float(m.lo[i]) << ", " << format_float(m.hi[i])
       << "]";
  os << "\n\n";

  AssumptionReport rep = check_assumptions(m, 7, 64, c.seed);
  os << "assumption checks (lattice + " << 64 << " random points):\n";
  for (const AssumptionCheck& ch : rep.checks) {
    os << "  [" << (ch.pass ? "pass" : "FAIL") << "] " << ch.name;
    if (!ch.required) os << " (informational)";
    os << "  worst = " << format_float(ch.worst);
    if (!ch.note.empty()) os << "  " << ch.note;
    os << "\n";
  }
  os << "overall: " << (rep.ok ? "pass" : "FAIL") << "\n";

  if (m.dim >= 3) {
    os << "\ncontrol frame:\n";
    try {
      ControlFrame f = build_frame(m);
      os << "  Omega (sup |omega|)   = " << format_float(f.omega_sup) << "\n"
         << "  inf |omega|           = " << format_float(f.omega_inf) << "\n"
         << "  lambda_pre            = " << format_float(f.lambda_pre) << "\n"
         << "  C^2                   = " << format_float(f.c2) << "\n"
         << "  lambda = C^2*lambda_pre = " << format_float(f.lambda)
         << "  (needs > " << format_float(4.0 * (m.dim + 3) * f.omega_sup)
         << ")\n";
      if (!f.note.empty()) os << "  note: " << f.note << "\n";
    } catch (const Error& e) {
      os << "  unavailable: " << e.what() << "\n";
    }
  } else {
    os << "\ncontrol frame: needs dim >= 3 (nonintegrability)\n";
  }

  std::cout << os.str();
  if (!c.out.empty())
    write_file(c.out + "/assumptions.json", assumption_document(rep));
  return kExitOk;
}

//---------------------------------------------------------------- connect

int run_connect(const RunConfig& c, std::string* travel_summary) {
  BvpProblem p;
  p.manifold = c.manifold;
  p.x0 = need_point(c.x0, "x0");
  p.x1 = need_point(c.x1, "x1");
  p.t0 = c.t0;
  p.tol = c.tol;
  p.integrator_tol = c.integrator_tol;
  p.e_cap = c.e_cap;

  require_connectable(p.manifold, p.x0, p.x1);

  double eps0 = c.schedule.front();
  MultiStartOutcome out = multi_start(p, eps0, c.k_max);
  std::vector<ContinuationTrace> traces;
  traces.reserve(out.solutions.size());
  for (const ShootResult& r : out.solutions)
    traces.push_back(continue_eps(p, c.schedule, r));

  std::string doc = solution_document(out, traces, c.manifold.name, eps0);
  // zermelo mode prints the summary instead; stdout carries one document
  if (!travel_summary) std::cout << doc;
  if (!c.out.empty()) {
    write_file(c.out + "/solutions.json", doc);
    for (size_t i = 0; i < traces.size(); ++i) {
      if (traces[i].limit.empty()) continue;
      write_file(c.out + "/" + index_name("path", i, "tsv"),
                 path_table(traces[i].limit));
      write_file(c.out + "/" + index_name("trace", i, "json"),
                 trace_document(traces[i]));
    }
  }

  if (travel_summary) {
    // zermelo wrapper: report the best continued travel time
    json j;
    j["format"] = "rknav.zermelo.v1";
    j["solutions"] = static_cast<long>(out.solutions.size());
    if (!traces.empty() && !traces.front().records.empty()) {
      const ContinuationTrace& best = traces.front();
      j["travel_time"] = best.records.back().length;
      j["eps_last"] = best.records.back().eps;
      j["converged"] = best.converged;
      j["diverged"] = best.diverged;
      if (!best.note.empty()) j["note"] = best.note;
    }
    *travel_summary = j.dump(2) + "\n";
  }
  return out.solutions.empty() ? kExitSolver : kExitOk;
}

int cmd_connect(const RunConfig& c) { return run_connect(c, nullptr); }

// Same pipeline; the headline number is the arrival time of the fastest
// crossing, reported after continuation toward eps = 0.
int cmd_zermelo(const RunConfig& c) {
  std::string summary;
  int code = run_connect(c, &summary);
  std::cout << summary;
  if (!c.out.empty()) write_file(c.out + "/zermelo.json", summary);
  return code;
}

//----------------------------------------------------------------- verify

int cmd_verify(const RunConfig& c) {
  VerifyOptions opt;
  opt.seed = c.seed;
  opt.samples = c.samples;
  opt.tol = c.tol;
  opt.fixture = c.fixture;
  VerifyReport rep = run_verify(c.manifold, opt);
  std::string doc = verify_document(rep);
  std::cout << doc;
  if (!c.out.empty()) write_file(c.out + "/verify.json", doc);
  return rep.ok ? kExitOk : kExitProperty;
}

//------------------------------------------------------------------ reach

int cmd_reach(const RunConfig& c) {
  ControlFrame f = build_frame(c.manifold);
  Vec x0 = c.x0 ? *c.x0 : box_center(c.manifold);
  const Vec& target = need_point(c.target, "reach.target");

  ReachOptions opt;
  opt.intervals = c.intervals;
  opt.budget = c.budget;
  opt.seed = c.seed;
  ReachResult r = reach(f, x0, target, opt);

  json j;
  j["format"] = "rknav.reach.v1";
  j["ok"] = r.ok;
  j["distance"] = r.distance;
  j["evals"] = r.evals;
  j["note"] = r.note;
  json end = json::array();
  for (int i = 0; i < r.end.n; ++i) end.push_back(r.end[i]);
  j["end"] = std::move(end);
  j["signal"] = json::parse(signal_document(r.signal));
  std::string doc = j.dump(2) + "\n";
  std::cout << doc;
  if (!c.out.empty()) {
    write_file(c.out + "/reach.json", doc);
    if (!r.path.empty())
      write_file(c.out + "/path.tsv", path_table(r.path));
  }
  return r.ok ? kExitOk : kExitSolver;
}

//--------------------------------------------------------------- geodesic

int cmd_geodesic(const RunConfig& c) {
  const ChartManifold& m = c.manifold;
  const Vec& x0 = need_point(c.x0, "x0");
  const Vec& u0 = need_point(c.u0, "geodesic.u0");
  double tau0;
  if (c.tau0) {
    tau0 = *c.tau0;
  } else {
    std::optional<double> root = lightlike_root(m, x0, u0, c.eps);
    if (!root)
      throw AdmissibilityError(
          "no lightlike clock rate over u0: the direction is inadmissible");
    tau0 = *root;
  }
  GeodesicPath g = integrate_geodesic(m, x0, c.t0, u0, tau0, c.eps, c.s_max,
                                      c.integrator_tol);
  std::string doc = path_document(g);
  std::cout << doc;
  if (!c.out.empty()) {
    write_file(c.out + "/path.json", doc);
    write_file(c.out + "/path.tsv", path_table(g));
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{
      "geodesics of singular direction-dependent navigation metrics"};
  app.require_subcommand(1);

  Flags f;
  CLI::App* describe = app.add_subcommand(
      "describe", "manifold summary and assumption checks");
  CLI::App* connect = app.add_subcommand(
      "connect", "multi-start boundary solve with eps-continuation");
  CLI::App* verify = app.add_subcommand(
      "verify", "property suite with per-property counts");
  CLI::App* reach = app.add_subcommand(
      "reach", "steer the control system to a target point");
  CLI::App* geodesic = app.add_subcommand(
      "geodesic", "integrate one lifted geodesic from initial data");
  CLI::App* zermelo = app.add_subcommand(
      "zermelo", "travel time of a navigation problem");
  for (CLI::App* cmd : {describe, connect, verify, reach, geodesic, zermelo})
    add_common(cmd, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  CLI::App* cmd = app.get_subcommands().front();
  try {
    RunConfig c = load_with_overrides(cmd, f);
    if (cmd == describe) return cmd_describe(c);
    if (cmd == connect) return cmd_connect(c);
    if (cmd == verify) return cmd_verify(c);
    if (cmd == reach) return cmd_reach(c);
    if (cmd == geodesic) return cmd_geodesic(c);
    return cmd_zermelo(c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const HypothesisViolation& e) {
    std::cerr << "hypothesis violation: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const Error& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kExitSolver;
  }
}

}  // namespace rknav
