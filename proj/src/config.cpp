#include "deltaspec/config.hpp"

#include <cmath>
#include <set>

namespace deltaspec {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw Error("config: field '" + path + "' " + what);
}

void reject_unknown(const json& obj, const std::string& prefix, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) fail(prefix + key, "is not recognised");
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.contains(key)) throw Error("config: missing field '" + path + "'");
  return obj.at(key);
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(path, "must be finite");
  return d;
}

int integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "must be an integer");
  return v.get<int>();
}

std::string string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "must be a string");
  return v.get<std::string>();
}

Strength strength(const json& v, const std::string& name) {
  Strength s;
  if (v.is_number()) {
    s.scalar = number(v, name);
  } else if (v.is_object()) {
    for (const auto& [key, val] : v.items()) {
      std::size_t used = 0;
      int id = 0;
      try {
        id = std::stoi(key, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != key.size()) fail(name + "." + key, "must be keyed by an interface id");
      s.per_interface[id] = number(val, name + "." + key);
    }
  } else {
    fail(name, "must be a number or an object of per-interface numbers");
  }
  return s;
}

MeshSpec mesh_spec(const json& doc) {
  const json& g = doc.at("geometry");
  if (!g.is_object()) fail("geometry", "must be an object");
  reject_unknown(g, "geometry.", {"name", "angle", "bump", "nx", "ny", "sides", "radius"});
  MeshSpec m;
  m.geometry = parse_geometry_name(string(require(g, "name", "geometry.name"), "geometry.name"));
  m.params.box_radius = number(require(doc, "box_radius", "box_radius"), "box_radius");
  if (!(m.params.box_radius > 0.0)) fail("box_radius", "must be positive");
  m.levels = integer(require(doc, "levels", "levels"), "levels");
  if (m.levels < 0) fail("levels", "must be non-negative");
  if (g.contains("angle")) m.params.angle = number(g["angle"], "geometry.angle");
  if (m.geometry == CanonicalGeometry::wedge && !g.contains("angle")) throw Error("config: missing field 'geometry.angle'");
  if (g.contains("nx")) m.params.nx = integer(g["nx"], "geometry.nx");
  if (g.contains("ny")) m.params.ny = integer(g["ny"], "geometry.ny");
  if (g.contains("sides")) m.params.sides = integer(g["sides"], "geometry.sides");
  if (g.contains("radius")) m.params.radius = number(g["radius"], "geometry.radius");
  if (g.contains("bump")) {
    const json& b = g["bump"];
    if (!b.is_array()) fail("geometry.bump", "must be an array of [x, y] pairs");
    for (std::size_t i = 0; i < b.size(); ++i) {
      const std::string path = "geometry.bump[" + std::to_string(i) + "]";
      if (!b[i].is_array() || b[i].size() != 2) fail(path, "must be an [x, y] pair");
      m.params.bump.push_back({number(b[i][0], path + "[0]"), number(b[i][1], path + "[1]")});
    }
  } else if (m.geometry == CanonicalGeometry::line_with_bump) {
    m.params.bump = square_bump({0.0, 2.0}, 2.0);
  }
  return m;
}

SolverOptions solver_options(const json& s) {
  if (!s.is_object()) fail("solver", "must be an object");
  reject_unknown(s, "solver.", {"k", "tol", "max_iter", "seed", "deterministic", "preconditioner", "padding"});
  SolverOptions o;
  if (s.contains("k")) o.k = integer(s["k"], "solver.k");
  if (o.k < 1) fail("solver.k", "must be at least 1");
  if (s.contains("tol")) o.tol = number(s["tol"], "solver.tol");
  if (!(o.tol > 0.0)) fail("solver.tol", "must be positive");
  if (s.contains("max_iter")) o.max_iter = integer(s["max_iter"], "solver.max_iter");
  if (o.max_iter < 1) fail("solver.max_iter", "must be at least 1");
  if (s.contains("seed")) {
    if (!s["seed"].is_number_unsigned()) fail("solver.seed", "must be a non-negative integer");
    o.seed = s["seed"].get<std::uint64_t>();
  }
  if (s.contains("deterministic")) {
    if (!s["deterministic"].is_boolean()) fail("solver.deterministic", "must be a boolean");
    o.deterministic = s["deterministic"].get<bool>();
  }
  if (s.contains("preconditioner"))
    o.preconditioner = parse_preconditioner(string(s["preconditioner"], "solver.preconditioner"));
  if (s.contains("padding")) o.padding = integer(s["padding"], "solver.padding");
  if (o.padding < 0) fail("solver.padding", "must be non-negative");
  return o;
}

void check_beta(const Strength& b) {
  if (b.scalar && !(*b.scalar > 0.0)) throw Error("beta must be strictly positive");
  for (const auto& [id, v] : b.per_interface)
    if (!(v > 0.0)) throw Error("beta must be strictly positive (interface " + std::to_string(id) + ")");
}

}  // namespace

OutputFormat parse_output_format(const std::string& name) {
  if (name == "json") return OutputFormat::json;
  if (name == "text") return OutputFormat::text;
  if (name == "csv") return OutputFormat::csv;
  throw Error("unknown output format '" + name + "'");
}

const MeshSpec& Config::require_mesh() const {
  if (!mesh) throw Error("config: missing field 'geometry'");
  return *mesh;
}

InteractionData Config::interactions(const Partition& p) const {
  InteractionData d = InteractionData::uniform(p, alpha.scalar.value_or(0.0), beta.scalar.value_or(1.0));
  if (!alpha.scalar) d.alpha = alpha.per_interface;
  if (!beta.scalar) d.beta = beta.per_interface;
  d.validate(p);
  return d;
}

double Config::scalar_alpha() const {
  if (!alpha.scalar) throw Error("config: field 'alpha' must be a scalar for this command");
  return *alpha.scalar;
}

double Config::scalar_beta() const {
  if (!beta.scalar) throw Error("config: field 'beta' must be a scalar for this command");
  return *beta.scalar;
}

Config parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("config: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error("config: document must be a JSON object");
  reject_unknown(doc, "", {"geometry", "box_radius", "levels", "boundary", "alpha", "beta", "solver", "format",
                           "experiment"});
  Config c;
  if (doc.contains("geometry")) {
    c.mesh = mesh_spec(doc);
  } else {
    for (const char* key : {"box_radius", "levels"})
      if (doc.contains(key)) throw Error("config: missing field 'geometry'");
  }
  if (doc.contains("boundary")) c.boundary = parse_boundary_policy(string(doc["boundary"], "boundary"));
  if (doc.contains("alpha")) c.alpha = strength(doc["alpha"], "alpha");
  if (doc.contains("beta")) c.beta = strength(doc["beta"], "beta");
  check_beta(c.beta);
  if (doc.contains("solver")) c.solver = solver_options(doc["solver"]);
  if (doc.contains("format")) c.format = parse_output_format(string(doc["format"], "format"));
  if (doc.contains("experiment")) {
    if (!doc["experiment"].is_object()) fail("experiment", "must be an object");
    c.experiment = doc["experiment"];
  }
  if (c.mesh) {
    // Geometry parameters and per-interface maps are checked against the partition itself.
    const Partition p = build_canonical_partition(c.mesh->geometry, c.mesh->params);
    c.interactions(p);
  }
  return c;
}

}  // namespace deltaspec
