#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fracflow/geometry2d.hpp"
#include "fracflow/levelset.hpp"

namespace fracflow {

/// Resolved stabilization parameters. alpha_h on a cell of diameter h is
///   regular:     K_m
///   blocking:    C_b (h/L)^{s_b} K_m
///   conductive:  C_c (h/L)^{-s_c} K_m
/// all multiplied by global_scale.
struct PenaltyParams {
  double C_b = 1.0;
  double s_b = 0.0;
  double C_c = 1.0;
  double s_c = 3.0;
  double L = 1.0;
  double global_scale = 1.0;
};

/// Penalty fields as given by the scenario; unset fields fall back to the
/// defaults (s_c depends on the polynomial degree, L on the domain).
struct PenaltySpec {
  std::optional<double> C_b, s_b, C_c, s_c, L, global_scale;

  PenaltyParams resolve(int degree, double domain_diameter) const;
};

enum class BcType { dirichlet, neumann };

/// Boundary datum on one named side: a constant, or the manufactured exact
/// pressure (used by the convergence harness).
struct BoundaryCondition {
  BcType type = BcType::dirichlet;
  double value = 0.0;
  bool manufactured = false;

  double eval(Vec2 p) const;
};

/// Volume source f: constant or the manufactured load 2 pi^2 sin(pi x) sin(pi y).
struct SourceTerm {
  enum class Kind { constant, manufactured };
  Kind kind = Kind::constant;
  double value = 0.0;

  double eval(Vec2 p) const;
};

/// Manufactured reference fields (exact solution of the fracture-free
/// problem with K_m = 1 on the unit square).
double manufactured_pressure(Vec2 p);
Vec2 manufactured_velocity(Vec2 p);
double manufactured_source(Vec2 p);

struct PermeabilityRegion {
  Rect rect;
  double value = 1.0;
};

struct MeshParams {
  int nx = 10;
  int ny = 10;
  int refine_steps = 0;
};

struct LineCutSpec {
  Vec2 a;
  Vec2 b;
  int samples = 200;
  std::string file = "line_cut.csv";
};

struct Scenario {
  std::string name = "unnamed";
  Rect domain;
  double matrix_permeability = 1.0;
  std::vector<PermeabilityRegion> permeability_regions;
  std::vector<FractureSpec> fractures;
  std::map<std::string, BoundaryCondition> boundary;  // by boundary tag
  SourceTerm source;
  PenaltySpec penalties;
  int degree = 1;
  MeshParams mesh;
  std::vector<LineCutSpec> line_cuts;
  bool allow_pure_neumann = false;

  /// Cell permeability: the last region containing the point wins,
  /// matrix_permeability otherwise.
  double matrix_permeability_at(Vec2 p) const;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// JSON scenario file I/O. load(save(s)) reproduces s field for field.
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

/// The crossed-fracture benchmark on the unit square: two fractures of
/// thickness 1e-3 (horizontal (0.25,0.5)-(0.75,0.5), vertical
/// (0.5,0.25)-(0.5,0.75)), K_m = 1, pressure 1 on the left and 0 on the
/// right boundary, no-flow top and bottom, f = 0. variant "conductive"
/// sets fracture permeability 1e3, "blocking" 1e-3.
Scenario builtin_example1(const std::string& variant);

/// Fracture-free manufactured problem on the unit square (all-Dirichlet,
/// exact pressure sin(pi x) sin(pi y)).
Scenario builtin_manufactured(int n, int degree);

/// Scenario by builtin name ("example1a", "example1b"); throws ConfigError
/// for unknown names.
Scenario builtin_scenario(const std::string& name);

/// max(1, L2 norm of f, max boundary datum magnitude): the scale entering
/// the residual tolerances.
double solution_scale(const Scenario& s);

}  // namespace fracflow
