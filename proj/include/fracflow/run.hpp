#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "fracflow/assembly.hpp"
#include "fracflow/postprocess.hpp"
#include "fracflow/scenario.hpp"
#include "fracflow/solution.hpp"

namespace fracflow {

struct RunOptions {
  std::string out_dir;        // empty: no files written
  double tol = 1e-12;         // linear solver tolerance
  bool write_line_cuts = true;
  bool write_vtk = true;
  bool write_diagnostics = true;
};

struct Diagnostics {
  std::string scenario;
  int degree = 0;
  int cells = 0;
  int facets = 0;
  int cells_regular = 0;
  int cells_blocking = 0;
  int cells_conductive = 0;
  int dofs_total = 0;
  int dofs_free = 0;
  int solve_iterations = 0;
  double solve_residual = 0.0;
  double energy = 0.0;
  double energy_residual = 0.0;
  double max_conservation_residual = 0.0;
  double symmetry_defect_rel = 0.0;
  bool spd_check = false;
  std::vector<std::pair<std::string, double>> boundary_fluxes;
  double wall_time_s = 0.0;
};

/// Owns the mesh/classification/scenario the solution points into, so the
/// result can be moved around safely.
struct RunResult {
  std::unique_ptr<Scenario> scenario;
  std::unique_ptr<Mesh> mesh;
  std::unique_ptr<CellClassification> classes;
  HDGSolution sol;
  Diagnostics diag;
};

/// Full pipeline: validate, mesh (+ local refinement near fractures),
/// classify, assemble, solve, recover, postprocess, diagnostics, and
/// optionally write line-cut CSVs / VTK / diagnostics to out_dir.
/// Output files are byte-identical across runs on identical input.
RunResult run_scenario(const Scenario& scenario, const RunOptions& opts = {});

void write_diagnostics(const Diagnostics& d, std::ostream& out);

struct ConvergenceRow {
  int n = 0;            // cells per side
  double err_u = 0.0;   // L2 error of u
  double err_p = 0.0;   // L2 error of p
  double err_ps = 0.0;  // L2 error of p*
};

struct ConvergenceTable {
  int degree = 0;
  std::vector<ConvergenceRow> rows;

  /// log2(err(n)/err(2n)) between the last two rows.
  double order_u() const;
  double order_p_star() const;
};

/// Manufactured-solution study on meshes n in sizes (default 8,16,32,64).
ConvergenceTable run_convergence(int degree,
                                 const std::vector<int>& sizes = {8, 16, 32,
                                                                  64},
                                 double tol = 1e-12);

void print_convergence(const ConvergenceTable& t, std::ostream& out);

}  // namespace fracflow
