#include "surfint/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>

namespace surfint {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

const json& need(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key)) throw ConfigError(where + "." + key + " is required");
  return j.at(key);
}

double number(const json& v, const std::string& name) {
  if (!v.is_number()) throw ConfigError(name + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(name + " must be finite");
  return x;
}

double positive(const json& v, const std::string& name) {
  const double x = number(v, name);
  if (!(x > 0.0)) throw ConfigError(name + " must be positive");
  return x;
}

int integer(const json& v, const std::string& name, int lo, int hi) {
  if (!v.is_number_integer()) throw ConfigError(name + " must be an integer");
  const auto x = v.get<long long>();
  if (x < lo || x > hi) {
    throw ConfigError(name + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(x);
}

std::vector<double> numbers(const json& v, const std::string& name) {
  if (!v.is_array()) throw ConfigError(name + " must be an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], name + "[" + std::to_string(i) + "]"));
  return out;
}

InterfaceGeometry parse_geometry(const json& j, double L) {
  const std::string w = "geometry";
  if (!j.is_object()) throw ConfigError("geometry must be an object");
  const auto& kind_v = need(j, w, "kind");
  if (!kind_v.is_string()) throw ConfigError("geometry.kind must be a string");
  const GeometryKind kind = geometry_kind_from_string(kind_v.get<std::string>());
  auto chords = [&] { return j.contains("n_chords") ? integer(j["n_chords"], "geometry.n_chords", 16, 4096) : 64; };
  switch (kind) {
    case GeometryKind::BrokenLine:
      only_keys(j, w, {"kind", "theta"});
      return make_broken_line(number(need(j, w, "theta"), "geometry.theta"), L);
    case GeometryKind::ConeMeridian:
      only_keys(j, w, {"kind", "theta"});
      return make_cone_meridian(number(need(j, w, "theta"), "geometry.theta"), L);
    case GeometryKind::Circle: {
      only_keys(j, w, {"kind", "radius", "center", "n_chords"});
      Point c{};
      if (j.contains("center")) {
        const auto xy = numbers(j["center"], "geometry.center");
        if (xy.size() != 2) throw ConfigError("geometry.center must hold two coordinates");
        c = {xy[0], xy[1]};
      }
      return make_circle(positive(need(j, w, "radius"), "geometry.radius"), c, L, chords());
    }
    case GeometryKind::LinePlusCircle:
      only_keys(j, w, {"kind", "radius", "line_offset", "n_chords"});
      return make_line_plus_circle(number(need(j, w, "line_offset"), "geometry.line_offset"),
                                   positive(need(j, w, "radius"), "geometry.radius"), L, chords());
  }
  throw ConfigError("unsupported geometry kind");
}

double polar_angle(const InterfaceGeometry& g, const InterfaceSegment& s) {
  const Point m = s.midpoint() - g.center;
  double phi = std::atan2(m.y, m.x);
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  return phi;
}

std::vector<double> parse_strength(const json& v, const InterfaceGeometry& g, const std::string& name) {
  const std::size_t n = g.segments.size();
  if (v.is_number()) return std::vector<double>(n, number(v, name));
  if (v.is_array()) {
    auto out = numbers(v, name);
    if (out.size() != n) {
      throw ConfigError(name + " needs " + std::to_string(n) + " per-segment values, got " +
                        std::to_string(out.size()));
    }
    return out;
  }
  only_keys(v, name, {"value", "circle", "arcs"});
  std::vector<double> out(n, number(need(v, name, "value"), name + ".value"));
  if (v.contains("circle")) {
    const double c = number(v["circle"], name + ".circle");
    for (std::size_t i = 0; i < n; ++i) {
      if (g.segments[i].on_circle) out[i] = c;
    }
  }
  if (v.contains("arcs")) {
    if (!v["arcs"].is_array()) throw ConfigError(name + ".arcs must be an array");
    for (std::size_t a = 0; a < v["arcs"].size(); ++a) {
      const auto& arc = v["arcs"][a];
      const std::string an = name + ".arcs[" + std::to_string(a) + "]";
      only_keys(arc, an, {"from", "to", "value"});
      const double from = number(need(arc, an, "from"), an + ".from");
      const double to = number(need(arc, an, "to"), an + ".to");
      const double val = number(need(arc, an, "value"), an + ".value");
      if (!(from >= 0.0 && from < to && to <= 2.0 * std::numbers::pi + 1e-12)) {
        throw ConfigError(an + " must satisfy 0 <= from < to <= 2 pi");
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (!g.segments[i].on_circle) continue;
        const double phi = polar_angle(g, g.segments[i]);
        if (phi >= from && phi < to) out[i] = val;
      }
    }
  }
  return out;
}

OutputOptions parse_outputs(const json& j) {
  only_keys(j, "outputs", {"directory", "formats"});
  OutputOptions o;
  if (j.contains("directory")) {
    if (!j["directory"].is_string()) throw ConfigError("outputs.directory must be a string");
    o.directory = j["directory"].get<std::string>();
  }
  if (j.contains("formats")) {
    if (!j["formats"].is_array()) throw ConfigError("outputs.formats must be an array");
    o.json = o.csv = o.svg = o.mesh = o.matrices = false;
    for (const auto& f : j["formats"]) {
      const std::string s = f.is_string() ? f.get<std::string>() : "";
      if (s == "json") o.json = true;
      else if (s == "csv") o.csv = true;
      else if (s == "svg") o.svg = true;
      else if (s == "mesh") o.mesh = true;
      else if (s == "mtx") o.matrices = true;
      else throw ConfigError("unknown output format '" + f.dump() + "' (json, csv, svg, mesh, mtx)");
    }
  }
  return o;
}

SweepSpec parse_sweep(const json& j) {
  only_keys(j, "sweep", {"parameter", "values"});
  SweepSpec s;
  const auto& p = need(j, "sweep", "parameter");
  const std::string name = p.is_string() ? p.get<std::string>() : "";
  if (name == "theta") s.parameter = SweepParameter::Theta;
  else if (name == "alpha") s.parameter = SweepParameter::Alpha;
  else if (name == "beta") s.parameter = SweepParameter::Beta;
  else throw ConfigError("sweep.parameter must be one of theta, alpha, beta");
  s.values = numbers(need(j, "sweep", "values"), "sweep.values");
  if (s.values.empty()) throw ConfigError("sweep.values must not be empty");
  std::sort(s.values.begin(), s.values.end());
  s.values.erase(std::unique(s.values.begin(), s.values.end()), s.values.end());
  if (s.values.size() < 2) throw ConfigError("sweep needs at least two distinct values");
  return s;
}

OracleSpec parse_oracle(const json& j) {
  only_keys(j, "oracle", {"alpha", "beta", "circle"});
  OracleSpec o;
  auto list = [&](const char* key) {
    std::vector<double> v;
    if (!j.contains(key)) return v;
    v = j[key].is_array() ? numbers(j[key], std::string("oracle.") + key)
                          : std::vector<double>{number(j[key], std::string("oracle.") + key)};
    for (double x : v) {
      if (!(x > 0.0)) throw ConfigError(std::string("oracle.") + key + " values must be positive");
    }
    return v;
  };
  o.alpha = list("alpha");
  o.beta = list("beta");
  if (j.contains("circle")) {
    const auto& c = j["circle"];
    only_keys(c, "oracle.circle", {"radius", "alpha", "beta", "m_max"});
    CircleOracleSpec s;
    if (c.contains("radius")) s.radius = positive(c["radius"], "oracle.circle.radius");
    if (c.contains("alpha")) s.alpha = positive(c["alpha"], "oracle.circle.alpha");
    if (c.contains("beta")) s.beta = positive(c["beta"], "oracle.circle.beta");
    if (c.contains("m_max")) s.m_max = integer(c["m_max"], "oracle.circle.m_max", 0, 50);
    if (!s.alpha && !s.beta) throw ConfigError("oracle.circle needs alpha or beta");
    o.circle = s;
  }
  if (o.alpha.empty() && o.beta.empty() && !o.circle) throw ConfigError("oracle block requests nothing");
  return o;
}

}  // namespace

const char* to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::Theta: return "theta";
    case SweepParameter::Alpha: return "alpha";
    case SweepParameter::Beta: return "beta";
  }
  return "?";
}

RunConfig parse_config(const json& doc) {
  only_keys(doc, "config", {"geometry", "material", "discretization", "solver", "outputs", "sweep", "oracle"});
  RunConfig rc;
  rc.source = doc;
  if (doc.contains("outputs")) rc.outputs = parse_outputs(doc["outputs"]);
  if (doc.contains("oracle")) rc.oracle = parse_oracle(doc["oracle"]);
  if (doc.contains("sweep")) rc.sweep = parse_sweep(doc["sweep"]);

  if (!doc.contains("geometry")) {
    for (const char* k : {"material", "discretization", "solver", "sweep"}) {
      if (doc.contains(k)) throw ConfigError(std::string(k) + " requires a geometry block");
    }
    return rc;
  }
  if (!doc.contains("material")) throw ConfigError("material block is required with a geometry");
  if (!doc.contains("discretization")) throw ConfigError("discretization block is required with a geometry");

  StudyConfig s;
  const auto& d = doc["discretization"];
  only_keys(d, "discretization", {"h", "levels", "box_halfwidths", "snap_to_circle", "min_angle_deg",
                                  "stabilization_tol"});
  s.h = positive(need(d, "discretization", "h"), "discretization.h");
  if (d.contains("levels")) s.levels = integer(d["levels"], "discretization.levels", 3, 6);
  s.box_halfwidths = numbers(need(d, "discretization", "box_halfwidths"), "discretization.box_halfwidths");
  if (s.box_halfwidths.empty()) throw ConfigError("discretization.box_halfwidths must not be empty");
  if (d.contains("min_angle_deg")) s.min_angle_deg = positive(d["min_angle_deg"], "discretization.min_angle_deg");
  if (d.contains("stabilization_tol")) {
    s.stabilization_tol = positive(d["stabilization_tol"], "discretization.stabilization_tol");
  }

  s.geometry = parse_geometry(doc["geometry"], s.box_halfwidths.back());
  s.snap_to_circle = s.geometry.has_compact_part();
  if (d.contains("snap_to_circle")) {
    if (!d["snap_to_circle"].is_boolean()) throw ConfigError("discretization.snap_to_circle must be a boolean");
    s.snap_to_circle = d["snap_to_circle"].get<bool>();
  }

  const auto& m = doc["material"];
  only_keys(m, "material", {"alpha", "beta"});
  s.material.alpha = parse_strength(need(m, "material", "alpha"), s.geometry, "material.alpha");
  s.material.beta = parse_strength(need(m, "material", "beta"), s.geometry, "material.beta");

  if (doc.contains("solver")) {
    const auto& so = doc["solver"];
    only_keys(so, "solver", {"k", "tol", "seed"});
    if (so.contains("k")) s.k = integer(so["k"], "solver.k", 1, 64);
    if (so.contains("tol")) s.tol = positive(so["tol"], "solver.tol");
    if (so.contains("seed")) {
      if (!so["seed"].is_number_unsigned()) throw ConfigError("solver.seed must be a non-negative integer");
      s.seed = so["seed"].get<std::uint64_t>();
    }
  }
  s.validate();
  if (rc.sweep && rc.sweep->parameter == SweepParameter::Theta && s.geometry.kind != GeometryKind::BrokenLine &&
      s.geometry.kind != GeometryKind::ConeMeridian) {
    throw ConfigError("theta sweeps need a broken_line or cone_meridian geometry");
  }
  rc.study = std::move(s);
  return rc;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("malformed JSON in " + file.string() + ": " + e.what());
  }
  return parse_config(doc);
}

json with_parameter(const json& doc, SweepParameter p, double value) {
  json out = doc;
  out.erase("sweep");
  switch (p) {
    case SweepParameter::Theta: out["geometry"]["theta"] = value; break;
    case SweepParameter::Alpha: out["material"]["alpha"] = value; break;
    case SweepParameter::Beta: out["material"]["beta"] = value; break;
  }
  return out;
}

std::optional<std::uint64_t> seed_from_environment() {
  const char* s = std::getenv("SPEC_SEED");
  if (s == nullptr || *s == '\0') return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (*end != '\0' || errno != 0 || *s == '-') {
    throw ConfigError(std::string("SPEC_SEED must be a non-negative integer, got '") + s + "'");
  }
  return static_cast<std::uint64_t>(v);
}

}  // namespace surfint
