#include "fracflow/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fracflow/errors.hpp"

namespace fracflow {

using json = nlohmann::ordered_json;

PenaltyParams PenaltySpec::resolve(int degree, double domain_diameter) const {
  PenaltyParams p;
  p.C_b = C_b.value_or(1.0);
  p.s_b = s_b.value_or(0.0);
  p.C_c = C_c.value_or(1.0);
  p.s_c = s_c.value_or(degree == 0 ? 2.0 : 3.0);
  p.L = L.value_or(domain_diameter);
  p.global_scale = global_scale.value_or(1.0);
  return p;
}

double BoundaryCondition::eval(Vec2 p) const {
  return manufactured ? manufactured_pressure(p) : value;
}

double SourceTerm::eval(Vec2 p) const {
  return kind == Kind::manufactured ? manufactured_source(p) : value;
}

double manufactured_pressure(Vec2 p) {
  return std::sin(std::numbers::pi * p.x) * std::sin(std::numbers::pi * p.y);
}

Vec2 manufactured_velocity(Vec2 p) {
  const double pi = std::numbers::pi;
  // u = -grad p for K_m = 1.
  return {-pi * std::cos(pi * p.x) * std::sin(pi * p.y),
          -pi * std::sin(pi * p.x) * std::cos(pi * p.y)};
}

double manufactured_source(Vec2 p) {
  const double pi = std::numbers::pi;
  return 2.0 * pi * pi * manufactured_pressure(p);
}

double Scenario::matrix_permeability_at(Vec2 p) const {
  double k = matrix_permeability;
  for (const PermeabilityRegion& region : permeability_regions)
    if (region.rect.contains(p)) k = region.value;
  return k;
}

void Scenario::validate() const {
  if (!(domain.width() > 0.0) || !(domain.height() > 0.0))
    throw ConfigError("scenario: domain must have positive width and height");
  if (!(matrix_permeability > 0.0))
    throw ConfigError("scenario: matrix_permeability must be positive");
  for (const PermeabilityRegion& region : permeability_regions) {
    if (!(region.value > 0.0))
      throw ConfigError("scenario: region permeability must be positive");
    if (!(region.rect.width() > 0.0) || !(region.rect.height() > 0.0))
      throw ConfigError("scenario: permeability region must be a proper box");
  }
  for (std::size_t i = 0; i < fractures.size(); ++i) {
    const FractureSpec& f = fractures[i];
    const std::string where = "scenario: fracture " + std::to_string(i);
    if (dist(f.a, f.b) == 0.0)
      throw ConfigError(where + ": endpoints coincide");
    if (!(f.thickness > 0.0))
      throw ConfigError(where + ": thickness must be positive");
    if (!(f.permeability > 0.0))
      throw ConfigError(where + ": permeability must be positive");
  }
  static const char* kSides[] = {"left", "right", "bottom", "top"};
  for (const char* side : kSides)
    if (boundary.find(side) == boundary.end())
      throw ConfigError(std::string("scenario: boundary side '") + side +
                        "' has no condition");
  for (const auto& [tag, bc] : boundary) {
    bool known = false;
    for (const char* side : kSides) known = known || tag == side;
    if (!known)
      throw ConfigError("scenario: unknown boundary tag '" + tag + "'");
    (void)bc;
  }
  bool has_dirichlet = false;
  for (const auto& [tag, bc] : boundary)
    has_dirichlet = has_dirichlet || bc.type == BcType::dirichlet;
  if (!has_dirichlet && !allow_pure_neumann)
    throw ConfigError(
        "scenario: no Dirichlet boundary (set allow_pure_neumann to solve "
        "anyway)");
  if (degree < 0 || degree > 2)
    throw ConfigError("scenario: degree must be 0, 1, or 2");
  if (mesh.nx < 1 || mesh.ny < 1)
    throw ConfigError("scenario: mesh.nx and mesh.ny must be at least 1");
  if (mesh.refine_steps < 0)
    throw ConfigError("scenario: mesh.refine_steps must be nonnegative");
  for (const LineCutSpec& cut : line_cuts) {
    if (cut.samples < 2)
      throw ConfigError("scenario: line cut needs at least 2 samples");
    if (dist(cut.a, cut.b) == 0.0)
      throw ConfigError("scenario: line cut endpoints coincide");
    if (cut.file.empty())
      throw ConfigError("scenario: line cut output file name is empty");
  }
  const auto positive = [](const std::optional<double>& v, const char* name) {
    if (v && !(*v > 0.0))
      throw ConfigError(std::string("scenario: penalties.") + name +
                        " must be positive");
  };
  positive(penalties.C_b, "C_b");
  positive(penalties.C_c, "C_c");
  positive(penalties.L, "L");
  positive(penalties.global_scale, "global_scale");
}

namespace {

[[noreturn]] void bad_field(const std::string& what) {
  throw ConfigError("scenario file: " + what);
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) bad_field(where + " must be a number");
  return j.get<double>();
}

int get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) bad_field(where + " must be an integer");
  return j.get<int>();
}

Vec2 get_point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) bad_field(where + " must be [x, y]");
  return {get_number(j[0], where), get_number(j[1], where)};
}

Rect get_rect(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4)
    bad_field(where + " must be [xmin, ymin, xmax, ymax]");
  Rect r;
  r.xmin = get_number(j[0], where);
  r.ymin = get_number(j[1], where);
  r.xmax = get_number(j[2], where);
  r.ymax = get_number(j[3], where);
  return r;
}

json rect_json(const Rect& r) { return json::array({r.xmin, r.ymin, r.xmax, r.ymax}); }
json point_json(Vec2 p) { return json::array({p.x, p.y}); }

}  // namespace

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario file " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) bad_field("top level must be an object");

  Scenario s;
  if (j.contains("name")) {
    if (!j["name"].is_string()) bad_field("name must be a string");
    s.name = j["name"].get<std::string>();
  }
  if (!j.contains("domain")) bad_field("missing field 'domain'");
  s.domain = get_rect(j["domain"], "domain");

  if (j.contains("matrix_permeability")) {
    const json& mp = j["matrix_permeability"];
    if (mp.is_number()) {
      s.matrix_permeability = mp.get<double>();
    } else if (mp.is_object()) {
      if (mp.contains("default"))
        s.matrix_permeability =
            get_number(mp["default"], "matrix_permeability.default");
      if (mp.contains("regions")) {
        if (!mp["regions"].is_array())
          bad_field("matrix_permeability.regions must be an array");
        for (const json& rj : mp["regions"]) {
          PermeabilityRegion region;
          if (!rj.is_object() || !rj.contains("rect") || !rj.contains("value"))
            bad_field("each permeability region needs 'rect' and 'value'");
          region.rect = get_rect(rj["rect"], "region rect");
          region.value = get_number(rj["value"], "region value");
          s.permeability_regions.push_back(region);
        }
      }
    } else {
      bad_field("matrix_permeability must be a number or an object");
    }
  }

  if (j.contains("fractures")) {
    if (!j["fractures"].is_array()) bad_field("fractures must be an array");
    for (const json& fj : j["fractures"]) {
      if (!fj.is_object()) bad_field("each fracture must be an object");
      FractureSpec f;
      if (!fj.contains("a") || !fj.contains("b"))
        bad_field("each fracture needs endpoints 'a' and 'b'");
      f.a = get_point(fj["a"], "fracture endpoint a");
      f.b = get_point(fj["b"], "fracture endpoint b");
      if (!fj.contains("thickness"))
        bad_field("each fracture needs 'thickness'");
      f.thickness = get_number(fj["thickness"], "fracture thickness");
      if (!fj.contains("permeability"))
        bad_field("each fracture needs 'permeability'");
      f.permeability = get_number(fj["permeability"], "fracture permeability");
      if (!fj.contains("kind") || !fj["kind"].is_string())
        bad_field("each fracture needs kind 'conductive' or 'blocking'");
      const std::string kind = fj["kind"].get<std::string>();
      if (kind == "conductive") {
        f.kind = FractureKind::conductive;
      } else if (kind == "blocking") {
        f.kind = FractureKind::blocking;
      } else {
        bad_field("fracture kind must be 'conductive' or 'blocking', got '" +
                  kind + "'");
      }
      s.fractures.push_back(f);
    }
  }

  if (!j.contains("boundary") || !j["boundary"].is_object())
    bad_field("missing object field 'boundary'");
  for (const auto& [tag, bj] : j["boundary"].items()) {
    if (!bj.is_object() || !bj.contains("type") || !bj["type"].is_string())
      bad_field("boundary '" + tag + "' needs a string field 'type'");
    BoundaryCondition bc;
    const std::string type = bj["type"].get<std::string>();
    if (type == "dirichlet") {
      bc.type = BcType::dirichlet;
    } else if (type == "neumann") {
      bc.type = BcType::neumann;
    } else {
      bad_field("boundary '" + tag +
                "': type must be 'dirichlet' or 'neumann', got '" + type +
                "'");
    }
    if (bj.contains("value")) {
      const json& v = bj["value"];
      if (v.is_string() && v.get<std::string>() == "manufactured") {
        bc.manufactured = true;
      } else if (v.is_number()) {
        bc.value = v.get<double>();
      } else {
        bad_field("boundary '" + tag +
                  "': value must be a number or \"manufactured\"");
      }
    }
    s.boundary[tag] = bc;
  }

  if (j.contains("source")) {
    const json& src = j["source"];
    if (src.is_number()) {
      s.source.kind = SourceTerm::Kind::constant;
      s.source.value = src.get<double>();
    } else if (src.is_string() && src.get<std::string>() == "manufactured") {
      s.source.kind = SourceTerm::Kind::manufactured;
    } else {
      bad_field("source must be a number or \"manufactured\"");
    }
  }

  if (j.contains("penalties")) {
    const json& pj = j["penalties"];
    if (!pj.is_object()) bad_field("penalties must be an object");
    const auto read = [&](const char* key) -> std::optional<double> {
      if (!pj.contains(key)) return std::nullopt;
      return get_number(pj[key], std::string("penalties.") + key);
    };
    s.penalties.C_b = read("C_b");
    s.penalties.s_b = read("s_b");
    s.penalties.C_c = read("C_c");
    s.penalties.s_c = read("s_c");
    s.penalties.L = read("L");
    s.penalties.global_scale = read("global_scale");
  }

  if (j.contains("degree")) s.degree = get_int(j["degree"], "degree");

  if (j.contains("mesh")) {
    const json& mj = j["mesh"];
    if (!mj.is_object()) bad_field("mesh must be an object");
    if (mj.contains("nx")) s.mesh.nx = get_int(mj["nx"], "mesh.nx");
    if (mj.contains("ny")) s.mesh.ny = get_int(mj["ny"], "mesh.ny");
    if (mj.contains("refine_steps"))
      s.mesh.refine_steps = get_int(mj["refine_steps"], "mesh.refine_steps");
  }

  if (j.contains("line_cuts")) {
    if (!j["line_cuts"].is_array()) bad_field("line_cuts must be an array");
    for (const json& cj : j["line_cuts"]) {
      if (!cj.is_object() || !cj.contains("a") || !cj.contains("b"))
        bad_field("each line cut needs endpoints 'a' and 'b'");
      LineCutSpec cut;
      cut.a = get_point(cj["a"], "line cut endpoint a");
      cut.b = get_point(cj["b"], "line cut endpoint b");
      if (cj.contains("samples"))
        cut.samples = get_int(cj["samples"], "line cut samples");
      if (cj.contains("file")) {
        if (!cj["file"].is_string()) bad_field("line cut file must be a string");
        cut.file = cj["file"].get<std::string>();
      }
      s.line_cuts.push_back(cut);
    }
  }

  if (j.contains("allow_pure_neumann")) {
    if (!j["allow_pure_neumann"].is_boolean())
      bad_field("allow_pure_neumann must be a boolean");
    s.allow_pure_neumann = j["allow_pure_neumann"].get<bool>();
  }

  s.validate();
  return s;
}

void save_scenario(const Scenario& s, const std::filesystem::path& path) {
  json j;
  j["name"] = s.name;
  j["domain"] = rect_json(s.domain);
  if (s.permeability_regions.empty()) {
    j["matrix_permeability"] = s.matrix_permeability;
  } else {
    json mp;
    mp["default"] = s.matrix_permeability;
    json regions = json::array();
    for (const PermeabilityRegion& region : s.permeability_regions) {
      json rj;
      rj["rect"] = rect_json(region.rect);
      rj["value"] = region.value;
      regions.push_back(rj);
    }
    mp["regions"] = regions;
    j["matrix_permeability"] = mp;
  }
  json fractures = json::array();
  for (const FractureSpec& f : s.fractures) {
    json fj;
    fj["a"] = point_json(f.a);
    fj["b"] = point_json(f.b);
    fj["thickness"] = f.thickness;
    fj["permeability"] = f.permeability;
    fj["kind"] = f.kind == FractureKind::conductive ? "conductive" : "blocking";
    fractures.push_back(fj);
  }
  j["fractures"] = fractures;
  json boundary;
  for (const auto& [tag, bc] : s.boundary) {
    json bj;
    bj["type"] = bc.type == BcType::dirichlet ? "dirichlet" : "neumann";
    if (bc.manufactured) {
      bj["value"] = "manufactured";
    } else {
      bj["value"] = bc.value;
    }
    boundary[tag] = bj;
  }
  j["boundary"] = boundary;
  if (s.source.kind == SourceTerm::Kind::manufactured) {
    j["source"] = "manufactured";
  } else {
    j["source"] = s.source.value;
  }
  json penalties;
  const auto write = [&](const char* key, const std::optional<double>& v) {
    if (v) penalties[key] = *v;
  };
  write("C_b", s.penalties.C_b);
  write("s_b", s.penalties.s_b);
  write("C_c", s.penalties.C_c);
  write("s_c", s.penalties.s_c);
  write("L", s.penalties.L);
  write("global_scale", s.penalties.global_scale);
  if (!penalties.empty()) j["penalties"] = penalties;
  j["degree"] = s.degree;
  json mesh;
  mesh["nx"] = s.mesh.nx;
  mesh["ny"] = s.mesh.ny;
  mesh["refine_steps"] = s.mesh.refine_steps;
  j["mesh"] = mesh;
  if (!s.line_cuts.empty()) {
    json cuts = json::array();
    for (const LineCutSpec& cut : s.line_cuts) {
      json cj;
      cj["a"] = point_json(cut.a);
      cj["b"] = point_json(cut.b);
      cj["samples"] = cut.samples;
      cj["file"] = cut.file;
      cuts.push_back(cj);
    }
    j["line_cuts"] = cuts;
  }
  if (s.allow_pure_neumann) j["allow_pure_neumann"] = true;

  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write scenario file: " + path.string());
  out << j.dump(2) << "\n";
}

Scenario builtin_example1(const std::string& variant) {
  double fracture_permeability = 0.0;
  FractureKind kind{};
  std::string suffix;
  if (variant == "conductive") {
    fracture_permeability = 1e3;
    kind = FractureKind::conductive;
    suffix = "a";
  } else if (variant == "blocking") {
    fracture_permeability = 1e-3;
    kind = FractureKind::blocking;
    suffix = "b";
  } else {
    throw ConfigError("builtin_example1: variant must be 'conductive' or "
                      "'blocking', got '" +
                      variant + "'");
  }
  Scenario s;
  s.name = "example1" + suffix;
  s.domain = {0.0, 0.0, 1.0, 1.0};
  s.matrix_permeability = 1.0;
  s.fractures.push_back(
      {{0.25, 0.5}, {0.75, 0.5}, 1e-3, fracture_permeability, kind});
  s.fractures.push_back(
      {{0.5, 0.25}, {0.5, 0.75}, 1e-3, fracture_permeability, kind});
  s.boundary["left"] = {BcType::dirichlet, 1.0, false};
  s.boundary["right"] = {BcType::dirichlet, 0.0, false};
  s.boundary["bottom"] = {BcType::neumann, 0.0, false};
  s.boundary["top"] = {BcType::neumann, 0.0, false};
  s.source = {SourceTerm::Kind::constant, 0.0};
  s.penalties.L = 1.0;
  s.degree = 1;
  s.mesh = {10, 10, 3};
  s.line_cuts.push_back({{0.5, 0.0}, {0.5, 1.0}, 200, "line_cut_x05.csv"});
  return s;
}

Scenario builtin_manufactured(int n, int degree) {
  Scenario s;
  s.name = "manufactured";
  s.domain = {0.0, 0.0, 1.0, 1.0};
  s.matrix_permeability = 1.0;
  BoundaryCondition bc;
  bc.type = BcType::dirichlet;
  bc.manufactured = true;
  for (const char* side : {"left", "right", "bottom", "top"})
    s.boundary[side] = bc;
  s.source.kind = SourceTerm::Kind::manufactured;
  s.degree = degree;
  s.mesh = {n, n, 0};
  return s;
}

Scenario builtin_scenario(const std::string& name) {
  if (name == "example1a") return builtin_example1("conductive");
  if (name == "example1b") return builtin_example1("blocking");
  throw ConfigError("unknown builtin scenario '" + name +
                    "' (available: example1a, example1b)");
}

double solution_scale(const Scenario& s) {
  double scale = 1.0;
  const double area = s.domain.area();
  if (s.source.kind == SourceTerm::Kind::manufactured) {
    // ||2 pi^2 sin sin||_{L^2} on the unit square.
    const double pi = std::numbers::pi;
    scale = std::max(scale, pi * pi);
  } else {
    scale = std::max(scale, std::abs(s.source.value) * std::sqrt(area));
  }
  for (const auto& [tag, bc] : s.boundary) {
    (void)tag;
    scale = std::max(scale, bc.manufactured ? 1.0 : std::abs(bc.value));
  }
  return scale;
}

}  // namespace fracflow
