#include "fracflow/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "fracflow/errors.hpp"
#include "fracflow/levelset.hpp"
#include "fracflow/solve.hpp"
#include "fracflow/vtk.hpp"

namespace fracflow {

namespace {

void write_line_cut_csv(const std::vector<LineSample>& samples,
                        const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write line cut file: " + path.string());
  out << "s,x,y,p_star\n";
  for (const LineSample& s : samples) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", s.s, s.point.x,
                  s.point.y, s.value);
    out << buf;
  }
}

}  // namespace

RunResult run_scenario(const Scenario& scenario_in, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  scenario_in.validate();

  RunResult result;
  result.scenario = std::make_unique<Scenario>(scenario_in);
  const Scenario& scenario = *result.scenario;

  Mesh base = build_uniform_triangulation(scenario.mesh.nx, scenario.mesh.ny,
                                          scenario.domain);
  result.mesh = std::make_unique<Mesh>(refine_near_fractures(
      base, scenario.fractures, scenario.mesh.refine_steps));
  const Mesh& mesh = *result.mesh;

  std::vector<DiscreteFracture> discrete;
  std::vector<FractureKind> kinds;
  for (const FractureSpec& f : scenario.fractures) {
    discrete.push_back(discretize_fracture(f, mesh));
    kinds.push_back(f.kind);
  }
  result.classes = std::make_unique<CellClassification>(
      classify_cells(mesh, discrete, kinds));
  const CellClassification& classes = *result.classes;

  const PenaltyParams params =
      scenario.penalties.resolve(scenario.degree, scenario.domain.diameter());
  CondensedSystem sys =
      assemble(mesh, classes, scenario, params, scenario.degree);

  SolveReport report;
  const std::vector<double> facet_solution =
      solve_spd(sys.A, sys.b, opts.tol, -1, &report);
  result.sol = recover(sys, facet_solution);
  postprocess_pressure(result.sol);

  Diagnostics& d = result.diag;
  d.scenario = scenario.name;
  d.degree = scenario.degree;
  d.cells = mesh.n_cells();
  d.facets = mesh.n_facets();
  d.cells_regular = classes.n_of(CellClass::regular);
  d.cells_blocking = classes.n_of(CellClass::blocking);
  d.cells_conductive = classes.n_of(CellClass::conductive);
  d.dofs_total = sys.ndof_total;
  d.dofs_free = sys.ndof_free;
  d.solve_iterations = report.iterations;
  d.solve_residual = report.residual;
  d.energy = energy(result.sol);
  d.energy_residual = energy_residual(result.sol);
  const std::vector<double> conservation = conservation_residuals(result.sol);
  for (double r : conservation)
    d.max_conservation_residual =
        std::max(d.max_conservation_residual, std::abs(r));
  const SpdCheck spd = verify_spd(sys.A);
  d.symmetry_defect_rel = spd.symmetry_defect_rel;
  d.spd_check = spd.passed;
  for (const std::string& name : mesh.boundary_names)
    d.boundary_fluxes.emplace_back(name, boundary_flux(result.sol, name));
  d.wall_time_s = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();

  if (!opts.out_dir.empty()) {
    const std::filesystem::path dir(opts.out_dir);
    std::filesystem::create_directories(dir);
    if (opts.write_line_cuts) {
      for (const LineCutSpec& cut : scenario.line_cuts) {
        const std::vector<LineSample> samples =
            sample_line(result.sol, cut.a, cut.b, cut.samples);
        write_line_cut_csv(samples, dir / cut.file);
      }
    }
    if (opts.write_vtk) {
      std::ofstream out(dir / "fields.vtk");
      if (!out)
        throw ConfigError("cannot write VTK file in directory " +
                          opts.out_dir);
      write_fields_vtk(result.sol, out);
    }
    if (opts.write_diagnostics) {
      std::ofstream out(dir / "diagnostics.txt");
      if (!out)
        throw ConfigError("cannot write diagnostics in directory " +
                          opts.out_dir);
      write_diagnostics(d, out);
    }
  }
  return result;
}

void write_diagnostics(const Diagnostics& d, std::ostream& out) {
  const auto num = [&out](const char* key, double v) {
    char buf[80];
    std::snprintf(buf, sizeof buf, "%s: %.17g\n", key, v);
    out << buf;
  };
  out << "scenario: " << d.scenario << "\n";
  out << "degree: " << d.degree << "\n";
  out << "cells: " << d.cells << "\n";
  out << "facets: " << d.facets << "\n";
  out << "cells_regular: " << d.cells_regular << "\n";
  out << "cells_blocking: " << d.cells_blocking << "\n";
  out << "cells_conductive: " << d.cells_conductive << "\n";
  out << "dofs_total: " << d.dofs_total << "\n";
  out << "dofs_free: " << d.dofs_free << "\n";
  out << "solve_iterations: " << d.solve_iterations << "\n";
  num("solve_residual", d.solve_residual);
  num("energy", d.energy);
  num("energy_residual", d.energy_residual);
  num("max_conservation_residual", d.max_conservation_residual);
  num("symmetry_defect_rel", d.symmetry_defect_rel);
  out << "spd_check: " << (d.spd_check ? "pass" : "fail") << "\n";
  for (const auto& [name, flux] : d.boundary_fluxes)
    num(("flux_" + name).c_str(), flux);
  num("wall_time_s", d.wall_time_s);
}

double ConvergenceTable::order_u() const {
  if (rows.size() < 2) return 0.0;
  const ConvergenceRow& a = rows[rows.size() - 2];
  const ConvergenceRow& b = rows.back();
  return std::log2(a.err_u / b.err_u);
}

double ConvergenceTable::order_p_star() const {
  if (rows.size() < 2) return 0.0;
  const ConvergenceRow& a = rows[rows.size() - 2];
  const ConvergenceRow& b = rows.back();
  return std::log2(a.err_ps / b.err_ps);
}

ConvergenceTable run_convergence(int degree, const std::vector<int>& sizes,
                                 double tol) {
  ConvergenceTable table;
  table.degree = degree;
  for (int n : sizes) {
    RunOptions opts;
    opts.tol = tol;
    const RunResult result = run_scenario(builtin_manufactured(n, degree), opts);
    ConvergenceRow row;
    row.n = n;
    row.err_u = l2_error_u(result.sol, manufactured_velocity);
    row.err_p = l2_error_p(result.sol, manufactured_pressure);
    row.err_ps = l2_error_p_star(result.sol, manufactured_pressure);
    table.rows.push_back(row);
  }
  return table;
}

void print_convergence(const ConvergenceTable& t, std::ostream& out) {
  out << "degree " << t.degree << "\n";
  out << "   n        err_u        err_p       err_p*  order_u order_p*\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const ConvergenceRow& r = t.rows[i];
    char buf[160];
    if (i == 0) {
      std::snprintf(buf, sizeof buf, "%4d %12.4e %12.4e %12.4e        -        -\n",
                    r.n, r.err_u, r.err_p, r.err_ps);
    } else {
      const ConvergenceRow& prev = t.rows[i - 1];
      std::snprintf(buf, sizeof buf,
                    "%4d %12.4e %12.4e %12.4e %8.2f %8.2f\n", r.n, r.err_u,
                    r.err_p, r.err_ps, std::log2(prev.err_u / r.err_u),
                    std::log2(prev.err_ps / r.err_ps));
    }
    out << buf;
  }
}

}  // namespace fracflow
