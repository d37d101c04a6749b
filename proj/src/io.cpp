#include "rknav/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "rknav/error.hpp"

namespace rknav {

namespace {

using nlohmann::json;  // std::map-backed: keys serialize in sorted order

// NaN marks "not computed" in path metadata; JSON spells it null.
json num_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double num_from(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.n; ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from(const json& j) {
  Vec v(static_cast<int>(j.size()));
  for (size_t i = 0; i < j.size(); ++i)
    v[static_cast<int>(i)] = j[i].get<double>();
  return v;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json parse(const std::string& text, const char* want_format) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("document parse error: ") + e.what());
  }
  if (!j.is_object() || j.value("format", std::string()) != want_format)
    throw ConfigError(std::string("expected a '") + want_format +
                      "' document");
  return j;
}

json path_json(const GeodesicPath& p) {
  json j;
  j["format"] = "rknav.path.v1";
  j["parametrization"] = parametrization_name(p.parametrization);
  j["lifted"] = p.lifted;
  j["eps"] = p.eps;
  j["length_F"] = num_or_null(p.length_F);
  j["length_Feps"] = num_or_null(p.length_Feps);
  j["energy_Feps"] = num_or_null(p.energy_Feps);
  j["truncated"] = p.truncated;
  j["truncation_reason"] = p.truncation_reason;
  json rows = json::array();
  for (const PathSample& s : p.samples) {
    json r;
    r["s"] = s.s;
    r["x"] = vec_json(s.x);
    r["v"] = vec_json(s.v);
    r["conserved"] = s.conserved;
    r["residual"] = s.residual;
    rows.push_back(std::move(r));
  }
  j["samples"] = std::move(rows);
  return j;
}

json trace_json(const ContinuationTrace& t) {
  json j;
  j["converged"] = t.converged;
  j["diverged"] = t.diverged;
  j["completed"] = t.completed;
  j["note"] = t.note;
  j["winding"] = t.winding;
  j["limit_residual"] = num_or_null(t.limit_residual);
  j["cauchy_index"] = t.cauchy_index;
  json rows = json::array();
  for (const ContinuationRecord& r : t.records) {
    json e;
    e["eps"] = r.eps;
    e["length"] = r.length;
    e["energy"] = r.energy;
    e["arrival_time"] = r.arrival_time;
    e["endpoint_error"] = r.endpoint_error;
    e["step_sup_dist"] = r.step_sup_dist;
    rows.push_back(std::move(e));
  }
  j["records"] = std::move(rows);
  return j;
}

}  // namespace

//------------------------------------------------------------- tabular

std::string format_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string path_table(const GeodesicPath& p) {
  if (p.empty()) throw InsufficientData("cannot tabulate an empty path");
  const int m = p.samples.front().x.n;
  std::ostringstream os;
  os << "s";
  for (int i = 0; i < m; ++i) os << "\tx" << i + 1;
  for (int i = 0; i < m; ++i) os << "\tv" << i + 1;
  os << "\tconserved\tresidual\n";
  for (const PathSample& s : p.samples) {
    os << format_float(s.s);
    for (int i = 0; i < m; ++i) os << '\t' << format_float(s.x[i]);
    for (int i = 0; i < m; ++i) os << '\t' << format_float(s.v[i]);
    os << '\t' << format_float(s.conserved) << '\t'
       << format_float(s.residual) << '\n';
  }
  return os.str();
}

GeodesicPath path_from_table(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError("path table is empty");
  int m = 0;
  {
    std::istringstream hs(line);
    std::string col;
    std::vector<std::string> cols;
    while (std::getline(hs, col, '\t')) cols.push_back(col);
    // s, x1..xm, v1..vm, conserved, residual
    if (cols.size() < 5 || (cols.size() - 3) % 2 != 0)
      throw ConfigError("path table header has unexpected columns");
    m = static_cast<int>((cols.size() - 3) / 2);
  }
  GeodesicPath p;
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ls(line);
    PathSample s;
    s.x = Vec(m);
    s.v = Vec(m);
    auto next = [&]() {
      std::string tok;
      if (!std::getline(ls, tok, '\t')) {
        std::ostringstream os;
        os << "path table row " << row << " is short";
        throw ConfigError(os.str());
      }
      return std::stod(tok);
    };
    s.s = next();
    for (int i = 0; i < m; ++i) s.x[i] = next();
    for (int i = 0; i < m; ++i) s.v[i] = next();
    s.conserved = next();
    s.residual = next();
    p.samples.push_back(std::move(s));
  }
  if (p.samples.size() < 2)
    throw ConfigError("path table needs at least 2 sample rows");
  return p;
}

//------------------------------------------------------------- documents

std::string path_document(const GeodesicPath& p) { return dump(path_json(p)); }

GeodesicPath path_from_document(const std::string& text) {
  json j = parse(text, "rknav.path.v1");
  GeodesicPath p;
  p.parametrization =
      parametrization_from_name(j["parametrization"].get<std::string>());
  p.lifted = j["lifted"].get<bool>();
  p.eps = j["eps"].get<double>();
  p.length_F = num_from(j["length_F"]);
  p.length_Feps = num_from(j["length_Feps"]);
  p.energy_Feps = num_from(j["energy_Feps"]);
  p.truncated = j["truncated"].get<bool>();
  p.truncation_reason = j["truncation_reason"].get<std::string>();
  for (const json& r : j["samples"]) {
    PathSample s;
    s.s = r["s"].get<double>();
    s.x = vec_from(r["x"]);
    s.v = vec_from(r["v"]);
    s.conserved = r["conserved"].get<double>();
    s.residual = r["residual"].get<double>();
    p.samples.push_back(std::move(s));
  }
  return p;
}

std::string signal_document(const ControlSignal& u) {
  json j;
  j["format"] = "rknav.signal.v1";
  j["breakpoints"] = u.breakpoints;
  j["xi"] = u.xi;
  json al = json::array();
  for (const Vec& a : u.alpha) al.push_back(vec_json(a));
  j["alpha"] = std::move(al);
  return dump(j);
}

ControlSignal signal_from_document(const std::string& text) {
  json j = parse(text, "rknav.signal.v1");
  ControlSignal u;
  u.breakpoints = j["breakpoints"].get<std::vector<double>>();
  u.xi = j["xi"].get<std::vector<double>>();
  for (const json& a : j["alpha"]) u.alpha.push_back(vec_from(a));
  return u;
}

std::string solution_document(const MultiStartOutcome& out,
                              const std::vector<ContinuationTrace>& traces,
                              const std::string& manifold_name, double eps0) {
  json j;
  j["format"] = "rknav.solutions.v1";
  j["manifold"] = manifold_name;
  j["eps0"] = eps0;
  json sols = json::array();
  for (const ShootResult& r : out.solutions) {
    json e;
    e["winding"] = r.winding;
    e["eps"] = r.eps;
    e["length"] = r.length;
    e["arrival_time"] = r.arrival_time;
    e["energy"] = r.energy;
    e["endpoint_error"] = r.endpoint_error;
    e["newton_iters"] = r.newton_iters;
    for (const ContinuationTrace& t : traces)
      if (t.winding == r.winding) e["continuation"] = trace_json(t);
    sols.push_back(std::move(e));
  }
  j["solutions"] = std::move(sols);
  json fails = json::array();
  for (const auto& f : out.failures) {
    json e;
    e["winding"] = f.first;
    e["reason"] = f.second;
    fails.push_back(std::move(e));
  }
  j["failures"] = std::move(fails);
  return dump(j);
}

std::string trace_document(const ContinuationTrace& t) {
  json j = trace_json(t);
  j["format"] = "rknav.continuation.v1";
  return dump(j);
}

std::string certificate_document(const ConvexityCertificate& c) {
  json j;
  j["format"] = "rknav.certificate.v1";
  j["found"] = c.found;
  j["delta"] = c.delta;
  json rows = json::array();
  for (const CertificateRow& r : c.rows) {
    json e;
    e["delta"] = r.delta;
    e["eps"] = r.eps;
    e["min_eig"] = num_or_null(r.min_eig);
    e["points"] = r.points;
    e["in_domain"] = r.in_domain;
    rows.push_back(std::move(e));
  }
  j["rows"] = std::move(rows);
  return dump(j);
}

std::string assumption_document(const AssumptionReport& r) {
  json j;
  j["format"] = "rknav.assumptions.v1";
  j["ok"] = r.ok;
  json rows = json::array();
  for (const AssumptionCheck& c : r.checks) {
    json e;
    e["name"] = c.name;
    e["pass"] = c.pass;
    e["required"] = c.required;
    e["worst"] = num_or_null(c.worst);
    e["where"] = vec_json(c.where);
    e["note"] = c.note;
    rows.push_back(std::move(e));
  }
  j["checks"] = std::move(rows);
  return dump(j);
}

//----------------------------------------------------------------- files

void write_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  std::error_code ec;
  if (p.has_parent_path())
    std::filesystem::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write file '" + path + "'");
  out << content;
  if (!out) throw ConfigError("write failed for '" + path + "'");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace rknav
