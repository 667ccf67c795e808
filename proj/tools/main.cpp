#include <cstddef>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fracflow/errors.hpp"
#include "fracflow/kernels.hpp"
#include "fracflow/run.hpp"
#include "fracflow/scenario.hpp"

namespace {

// "C_b,s_b,C_c,s_c" with an optional fifth value L.
fracflow::PenaltySpec parse_penalties(const std::string& text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string field =
        text.substr(start, comma == std::string::npos ? std::string::npos
                                                      : comma - start);
    try {
      std::size_t used = 0;
      values.push_back(std::stod(field, &used));
      if (used != field.size()) throw std::invalid_argument(field);
    } catch (const std::exception&) {
      throw fracflow::ConfigError("--penalties: cannot parse '" + field +
                                  "' as a number");
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (values.size() != 4 && values.size() != 5)
    throw fracflow::ConfigError(
        "--penalties expects C_b,s_b,C_c,s_c with an optional ,L");
  fracflow::PenaltySpec spec;
  spec.C_b = values[0];
  spec.s_b = values[1];
  spec.C_c = values[2];
  spec.s_c = values[3];
  if (values.size() == 5) spec.L = values[4];
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybridizable DG solver for Darcy flow with thin fractures"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "solve one scenario");
  std::string scenario_path;
  std::string builtin;
  std::string out_dir = "out";
  std::string penalties_text;
  std::string save_scenario_path;
  int degree = -1;
  int refine_steps = -1;
  int nx = -1;
  int ny = -1;
  double tol = 1e-12;
  bool convergence = false;
  run->add_option("--scenario", scenario_path, "scenario JSON file");
  run->add_option("--builtin", builtin,
                  "builtin scenario name (example1a, example1b)");
  run->add_option("--degree", degree, "polynomial degree 0..2")
      ->check(CLI::Range(0, 2));
  run->add_option("--refine-steps", refine_steps,
                  "rounds of refinement near the fractures");
  run->add_option("--nx", nx, "cells per row of the base mesh");
  run->add_option("--ny", ny, "cells per column of the base mesh");
  run->add_option("--out", out_dir, "output directory")
      ->capture_default_str();
  run->add_option("--tol", tol, "linear solver relative tolerance")
      ->capture_default_str();
  run->add_option("--penalties", penalties_text,
                  "stabilization constants C_b,s_b,C_c,s_c[,L]");
  run->add_option("--save-scenario", save_scenario_path,
                  "write the effective scenario as JSON and continue");
  run->add_flag("--convergence", convergence,
                "run the fracture-free manufactured convergence study "
                "instead of a scenario");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (convergence) {
      const fracflow::ConvergenceTable table = fracflow::run_convergence(
          degree < 0 ? 1 : degree, {8, 16, 32, 64}, tol);
      fracflow::print_convergence(table, std::cout);
      return 0;
    }
    if (scenario_path.empty() == builtin.empty())
      throw fracflow::ConfigError(
          "provide exactly one of --scenario and --builtin");
    fracflow::Scenario scenario = builtin.empty()
                                      ? fracflow::load_scenario(scenario_path)
                                      : fracflow::builtin_scenario(builtin);
    if (degree >= 0) scenario.degree = degree;
    if (refine_steps >= 0) scenario.mesh.refine_steps = refine_steps;
    if (nx > 0) scenario.mesh.nx = nx;
    if (ny > 0) scenario.mesh.ny = ny;
    if (!penalties_text.empty())
      scenario.penalties = parse_penalties(penalties_text);
    if (!save_scenario_path.empty())
      fracflow::save_scenario(scenario, save_scenario_path);

    fracflow::RunOptions opts;
    opts.out_dir = out_dir;
    opts.tol = tol;
    const fracflow::RunResult result = fracflow::run_scenario(scenario, opts);
    fracflow::write_diagnostics(result.diag, std::cout);
    std::cout << "kernels: " << fracflow::kernels::active_isa() << "\n";
    return 0;
  } catch (const fracflow::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const fracflow::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
