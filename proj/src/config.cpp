#include "rknav/config.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <sstream>

#include "rknav/bvp.hpp"
#include "rknav/error.hpp"

namespace rknav {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& source, const std::string& what) {
  throw ConfigError(source + ": " + what);
}

double number_at(const json& j, const std::string& source,
                 const std::string& key) {
  if (!j.is_number()) fail(source, "'" + key + "' must be a number");
  return j.get<double>();
}

Vec vec_at(const json& j, const std::string& source, const std::string& key) {
  if (!j.is_array() || j.empty())
    fail(source, "'" + key + "' must be a nonempty array of numbers");
  Vec v(static_cast<int>(j.size()));
  for (size_t i = 0; i < j.size(); ++i)
    v[static_cast<int>(i)] = number_at(j[i], source, key);
  return v;
}

// Coefficient entries may be expression strings or plain numbers.
ScalarField field_at(const json& j, int dim, const std::string& source,
                     const std::string& key) {
  if (j.is_number()) return ScalarField::constant(j.get<double>(), dim);
  if (j.is_string()) return ScalarField::parse(j.get<std::string>(), dim);
  fail(source, "'" + key + "' entries must be numbers or expression strings");
}

std::vector<ScalarField> field_list(const json& j, int dim, size_t want,
                                    const std::string& source,
                                    const std::string& key) {
  if (!j.is_array() || j.size() != want) {
    std::ostringstream os;
    os << "'" << key << "' must be an array of " << want << " entries";
    fail(source, os.str());
  }
  std::vector<ScalarField> out;
  out.reserve(want);
  for (const auto& e : j) out.push_back(field_at(e, dim, source, key));
  return out;
}

void require_valid_chart(const ChartManifold& m) {
  AssumptionReport rep = check_assumptions(m, 5, 32, 1);
  if (rep.ok) return;
  std::string bad;
  for (const auto& c : rep.checks)
    if (c.required && !c.pass) bad += (bad.empty() ? "" : ", ") + c.name;
  throw HypothesisViolation("manifold '" + m.name + "' fails: " + bad);
}

ChartManifold inline_chart(const json& j, const std::string& source) {
  if (!j.contains("dim")) fail(source, "inline manifold needs 'dim'");
  int dim = j["dim"].get<int>();
  if (dim < 1 || dim > kMaxDim) fail(source, "manifold 'dim' out of range");
  ChartManifold m;
  m.dim = dim;
  m.topology = topology_from_name(j.value("topology", std::string("plane")));
  m.name = j.value("name", std::string("inline"));
  if (!j.contains("lo") || !j.contains("hi"))
    fail(source, "inline manifold needs 'lo' and 'hi' bounds");
  m.lo = vec_at(j["lo"], source, "lo");
  m.hi = vec_at(j["hi"], source, "hi");
  if (m.lo.n != dim || m.hi.n != dim)
    fail(source, "'lo'/'hi' must have 'dim' entries");
  for (int i = 0; i < dim; ++i)
    if (!(m.lo[i] < m.hi[i])) fail(source, "'lo' must be below 'hi'");
  if (!j.contains("g0")) fail(source, "inline manifold needs 'g0'");
  m.g0 = field_list(j["g0"], dim, static_cast<size_t>(dim) * dim, source, "g0");
  if (j.contains("omega"))
    m.omega = field_list(j["omega"], dim, dim, source, "omega");
  else
    m.omega.assign(dim, ScalarField::constant(0.0, dim));
  m.lambda = j.contains("lambda") ? field_at(j["lambda"], dim, source, "lambda")
                                  : ScalarField::constant(1.0, dim);
  require_valid_chart(m);
  return m;
}

ChartManifold zermelo_chart(const json& j, const std::string& source,
                            unsigned seed) {
  if (!j.contains("dim")) fail(source, "zermelo block needs 'dim'");
  ZermeloData z;
  z.dim = j["dim"].get<int>();
  if (z.dim < 1 || z.dim > kMaxDim) fail(source, "zermelo 'dim' out of range");
  z.topology = topology_from_name(j.value("topology", std::string("plane")));
  z.name = j.value("name", std::string("zermelo"));
  if (!j.contains("lo") || !j.contains("hi"))
    fail(source, "zermelo block needs 'lo' and 'hi' bounds");
  z.lo = vec_at(j["lo"], source, "lo");
  z.hi = vec_at(j["hi"], source, "hi");
  if (z.lo.n != z.dim || z.hi.n != z.dim)
    fail(source, "'lo'/'hi' must have 'dim' entries");
  if (j.contains("g0")) {
    z.g0 = field_list(j["g0"], z.dim, static_cast<size_t>(z.dim) * z.dim,
                      source, "g0");
  } else {
    for (int i = 0; i < z.dim; ++i)
      for (int k = 0; k < z.dim; ++k)
        z.g0.push_back(ScalarField::constant(i == k ? 1.0 : 0.0, z.dim));
  }
  if (!j.contains("wind")) fail(source, "zermelo block needs 'wind'");
  z.wind = field_list(j["wind"], z.dim, z.dim, source, "wind");
  return from_zermelo(z, 9, 128, seed);
}

ChartManifold manifold_block(const json& j, const std::string& source,
                             unsigned seed) {
  if (!j.is_object()) fail(source, "'manifold' must be an object");
  if (j.contains("catalog")) {
    double wind = j.value("wind", 0.5);
    return catalog(j["catalog"].get<std::string>(), wind);
  }
  if (j.contains("zermelo")) return zermelo_chart(j["zermelo"], source, seed);
  return inline_chart(j, source);
}

std::vector<double> schedule_block(const json& j, const std::string& source) {
  if (j.is_array()) {
    std::vector<double> s;
    for (const auto& e : j) s.push_back(number_at(e, source, "eps_schedule"));
    if (s.empty()) fail(source, "'eps_schedule' must not be empty");
    for (size_t i = 0; i < s.size(); ++i) {
      if (!(s[i] > 0.0)) fail(source, "'eps_schedule' must be positive");
      if (i && !(s[i] < s[i - 1]))
        fail(source, "'eps_schedule' must be strictly decreasing");
    }
    return s;
  }
  if (j.is_object()) {
    double from = j.value("from", 1e-1);
    double to = j.value("to", 1e-6);
    double ratio = j.value("ratio", 0.5);
    try {
      return eps_schedule(from, to, ratio);
    } catch (const ParameterError& e) {
      fail(source, e.what());
    }
  }
  fail(source, "'eps_schedule' must be an array or {from, to, ratio}");
}

}  // namespace

RunConfig parse_config(const std::string& text,
                       const std::string& source_name) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // the message already carries line/column context
    fail(source_name, e.what());
  }
  if (!j.is_object()) fail(source_name, "top-level document must be an object");

  RunConfig c;
  if (j.contains("seed")) c.seed = j["seed"].get<unsigned>();
  if (!j.contains("manifold")) fail(source_name, "missing 'manifold'");
  try {
    c.manifold = manifold_block(j["manifold"], source_name, c.seed);
  } catch (const ConfigError& e) {
    // expression errors keep their column info, prefixed with the source
    if (std::string(e.what()).rfind(source_name, 0) == 0) throw;
    fail(source_name, e.what());
  }

  if (j.contains("tol")) c.tol = number_at(j["tol"], source_name, "tol");
  if (j.contains("integrator_tol"))
    c.integrator_tol = number_at(j["integrator_tol"], source_name,
                                 "integrator_tol");
  if (j.contains("e_cap")) c.e_cap = number_at(j["e_cap"], source_name,
                                               "e_cap");
  if (!(c.tol > 0.0) || !(c.integrator_tol > 0.0) || !(c.e_cap > 0.0))
    fail(source_name, "tolerances and e_cap must be positive");
  if (j.contains("t0")) c.t0 = number_at(j["t0"], source_name, "t0");
  if (j.contains("k_max")) c.k_max = j["k_max"].get<int>();
  if (c.k_max < 0) fail(source_name, "'k_max' must be nonnegative");
  if (j.contains("grid")) c.grid = j["grid"].get<int>();
  if (j.contains("samples")) c.samples = j["samples"].get<int>();
  if (c.samples < 1) fail(source_name, "'samples' must be positive");
  if (j.contains("x0")) c.x0 = vec_at(j["x0"], source_name, "x0");
  if (j.contains("x1")) c.x1 = vec_at(j["x1"], source_name, "x1");
  for (const auto* p : {&c.x0, &c.x1})
    if (*p && (*p)->n != c.manifold.dim)
      fail(source_name, "endpoint dimension does not match the manifold");
  c.schedule = j.contains("eps_schedule")
                   ? schedule_block(j["eps_schedule"], source_name)
                   : eps_schedule();
  if (j.contains("out")) c.out = j["out"].get<std::string>();
  if (j.contains("fixture")) c.fixture = j["fixture"].get<std::string>();

  if (j.contains("geodesic")) {
    const json& g = j["geodesic"];
    if (!g.is_object()) fail(source_name, "'geodesic' must be an object");
    if (g.contains("u0")) c.u0 = vec_at(g["u0"], source_name, "u0");
    if (g.contains("tau0"))
      c.tau0 = number_at(g["tau0"], source_name, "tau0");
    if (g.contains("eps")) c.eps = number_at(g["eps"], source_name, "eps");
    if (g.contains("s_max"))
      c.s_max = number_at(g["s_max"], source_name, "s_max");
    if (c.u0 && c.u0->n != c.manifold.dim)
      fail(source_name, "'u0' dimension does not match the manifold");
  }
  if (j.contains("reach")) {
    const json& r = j["reach"];
    if (!r.is_object()) fail(source_name, "'reach' must be an object");
    if (r.contains("target"))
      c.target = vec_at(r["target"], source_name, "target");
    if (r.contains("intervals")) c.intervals = r["intervals"].get<int>();
    if (r.contains("budget")) c.budget = r["budget"].get<int>();
    if (c.target && c.target->n != c.manifold.dim)
      fail(source_name, "'target' dimension does not match the manifold");
    if (c.intervals < 1 || c.budget < 1)
      fail(source_name, "'intervals' and 'budget' must be positive");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::vector<double> parse_schedule_flag(const std::string& text) {
  std::vector<double> s;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      size_t used = 0;
      double v = std::stod(tok, &used);
      while (used < tok.size() &&
             std::isspace(static_cast<unsigned char>(tok[used])))
        ++used;
      if (used != tok.size()) throw std::invalid_argument(tok);
      s.push_back(v);
    } catch (const std::exception&) {
      throw ConfigError("bad --eps-schedule entry '" + tok + "'");
    }
  }
  if (s.empty()) throw ConfigError("--eps-schedule must not be empty");
  for (size_t i = 0; i < s.size(); ++i) {
    if (!(s[i] > 0.0))
      throw ConfigError("--eps-schedule entries must be positive");
    if (i && !(s[i] < s[i - 1]))
      throw ConfigError("--eps-schedule must be strictly decreasing");
  }
  return s;
}

}  // namespace rknav
