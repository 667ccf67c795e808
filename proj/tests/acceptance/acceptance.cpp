// Acceptance suite for the fracture-flow solver. Each numbered criterion
// prints exactly one [PASS]/[FAIL] line with the measured quantity; the
// process exits with the number of failed criteria. Tolerances are pinned
// here, not configurable.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "fracflow/assembly.hpp"
#include "fracflow/errors.hpp"
#include "fracflow/levelset.hpp"
#include "fracflow/mesh.hpp"
#include "fracflow/postprocess.hpp"
#include "fracflow/run.hpp"
#include "fracflow/scenario.hpp"
#include "fracflow/solve.hpp"

using namespace fracflow;

namespace {

struct RunRecord {
  std::string name;
  double energy_residual = 0.0;
  double scale = 1.0;
  bool spd = false;
};

std::vector<RunRecord> g_records;

RunResult tracked_run(const std::string& name, const Scenario& scn) {
  RunResult rr = run_scenario(scn);
  g_records.push_back(
      {name, rr.diag.energy_residual, solution_scale(scn), rr.diag.spd_check});
  return rr;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double rms_diff(const std::vector<LineSample>& a,
                const std::vector<LineSample>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i].value - b[i].value;
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(a.size()));
}

Scenario example1_with(const std::string& variant, int degree, int refine) {
  Scenario s = builtin_example1(variant);
  s.degree = degree;
  s.mesh.refine_steps = refine;
  return s;
}

Scenario patch_scenario(int degree) {
  Scenario s;
  s.name = "patch";
  s.domain = {0.0, 0.0, 1.0, 1.0};
  s.matrix_permeability = 1.0;
  s.boundary["left"] = {BcType::dirichlet, 1.0, false};
  s.boundary["right"] = {BcType::dirichlet, 0.0, false};
  s.boundary["bottom"] = {BcType::neumann, 0.0, false};
  s.boundary["top"] = {BcType::neumann, 0.0, false};
  s.degree = degree;
  s.mesh = {8, 8, 0};
  return s;
}

double left_flux_mag(const RunResult& rr) {
  return std::abs(boundary_flux(rr.sol, "left"));
}

// Rebuilds the condensed facet system of a scenario exactly as the run
// pipeline does, then solves it with both CG and the dense Cholesky oracle.
struct OracleCase {
  int n = 0;
  double rel = 0.0;
};

OracleCase solver_oracle(const Scenario& scn) {
  scn.validate();
  Mesh mesh = build_uniform_triangulation(scn.mesh.nx, scn.mesh.ny, scn.domain);
  mesh = refine_near_fractures(mesh, scn.fractures, scn.mesh.refine_steps);
  std::vector<DiscreteFracture> discrete;
  std::vector<FractureKind> kinds;
  for (const FractureSpec& f : scn.fractures) {
    discrete.push_back(discretize_fracture(f, mesh));
    kinds.push_back(f.kind);
  }
  const CellClassification classes = classify_cells(mesh, discrete, kinds);
  const PenaltyParams params =
      scn.penalties.resolve(scn.degree, scn.domain.diameter());
  const CondensedSystem sys = assemble(mesh, classes, scn, params, scn.degree);
  if (sys.ndof_free > 500)
    throw NumericalError("oracle system larger than intended: " +
                         std::to_string(sys.ndof_free));
  const std::vector<double> x_cg = solve_spd(sys.A, sys.b, 1e-13);
  const std::vector<double> x_ch = solve_dense_cholesky(sys.A, sys.b);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x_ch.size(); ++i) {
    num = std::max(num, std::abs(x_cg[i] - x_ch[i]));
    den = std::max(den, std::abs(x_ch[i]));
  }
  return {sys.ndof_free, num / std::max(den, 1e-300)};
}

}  // namespace

int main() {
  struct Line {
    bool ok = false;
    std::string text;
  };
  std::vector<Line> lines(10);
  char buf[256];
  const auto set = [&](int idx, bool ok, const char* text) {
    lines[static_cast<std::size_t>(idx - 1)] = {ok, text};
  };
  const auto fail_note = [&](int idx, const char* what, const std::string& e) {
    std::snprintf(buf, sizeof buf, "C%d %s (aborted: %s)", idx, what,
                  e.c_str());
    set(idx, false, buf);
  };

  // Shared expensive runs, filled by criterion 3 and reused afterwards.
  std::optional<RunResult> e1a_k1, e1b_k1;
  const auto need = [](const std::optional<RunResult>& r) -> const RunResult& {
    if (!r) throw NumericalError("prerequisite run unavailable");
    return *r;
  };

  // C1: zero source and homogeneous Dirichlet data on the fractured geometry
  // admit only the zero solution.
  try {
    double worst = 0.0;
    for (const char* variant : {"conductive", "blocking"})
      for (int k = 0; k <= 2; ++k) {
        Scenario s = example1_with(variant, k, 1);
        for (const char* side : {"left", "right", "bottom", "top"})
          s.boundary[side] = {BcType::dirichlet, 0.0, false};
        const RunResult rr = tracked_run(
            std::string("zero-data ") + variant + " k" + std::to_string(k), s);
        worst = std::max({worst, max_abs(rr.sol.u), max_abs(rr.sol.u_tilde),
                          max_abs(rr.sol.p), max_abs(rr.sol.p_hat)});
      }
    std::snprintf(buf, sizeof buf,
                  "C1 homogeneous data produce the zero solution "
                  "(max |coeff| = %.2e, tol 1e-10)",
                  worst);
    set(1, worst < 1e-10, buf);
  } catch (const std::exception& e) {
    fail_note(1, "zero-solution check", e.what());
  }

  // C3: per-cell flux balance on the crossed-fracture benchmark, both
  // variants, k = 0,1,2, locally refined mesh.
  try {
    double worst = 0.0;
    for (const char* variant : {"conductive", "blocking"})
      for (int k = 0; k <= 2; ++k) {
        RunResult rr = tracked_run(
            std::string("example1 ") + variant + " k" + std::to_string(k),
            example1_with(variant, k, 3));
        worst = std::max(worst, rr.diag.max_conservation_residual);
        if (k == 1 && std::string(variant) == "conductive")
          e1a_k1 = std::move(rr);
        else if (k == 1 && std::string(variant) == "blocking")
          e1b_k1 = std::move(rr);
      }
    std::snprintf(buf, sizeof buf,
                  "C3 local conservation on the fractured benchmark "
                  "(max residual = %.2e, tol 1e-9)",
                  worst);
    set(3, worst < 1e-9, buf);
  } catch (const std::exception& e) {
    fail_note(3, "local conservation", e.what());
  }

  // C4: the discrete spaces reproduce p = 1 - x, u = (1, 0) exactly.
  try {
    double worst = 0.0;
    for (int k : {1, 2}) {
      const RunResult rr =
          tracked_run("patch k" + std::to_string(k), patch_scenario(k));
      worst = std::max(
          {worst, l2_error_p(rr.sol, [](Vec2 x) { return 1.0 - x.x; }),
           l2_error_u(rr.sol, [](Vec2) { return Vec2{1.0, 0.0}; })});
    }
    std::snprintf(buf, sizeof buf,
                  "C4 linear pressure is exact at k = 1, 2 "
                  "(max L2 error = %.2e, tol 1e-10)",
                  worst);
    set(4, worst < 1e-10, buf);
  } catch (const std::exception& e) {
    fail_note(4, "patch test", e.what());
  }

  // C5: manufactured-solution convergence orders from the last refinement
  // step: velocity order >= k + 0.8 for k = 0,1,2 and postprocessed-pressure
  // order >= k + 1.8 at k = 1.
  try {
    const ConvergenceTable t0 = run_convergence(0);
    const ConvergenceTable t1 = run_convergence(1);
    const ConvergenceTable t2 = run_convergence(2);
    const bool ok = t0.order_u() >= 0.8 && t1.order_u() >= 1.8 &&
                    t2.order_u() >= 2.8 && t1.order_p_star() >= 2.8;
    std::snprintf(buf, sizeof buf,
                  "C5 manufactured convergence orders "
                  "(u: %.2f, %.2f, %.2f for k = 0,1,2; p*: %.2f at k = 1)",
                  t0.order_u(), t1.order_u(), t2.order_u(), t1.order_p_star());
    set(5, ok, buf);
  } catch (const std::exception& e) {
    fail_note(5, "convergence study", e.what());
  }

  // C6 and C7 compare left-boundary inflow against the fracture-free
  // baseline; C6 additionally runs the weak stabilization exponent.
  double flux_cond = 0.0, flux_none = 0.0;
  try {
    const double f3 = left_flux_mag(need(e1a_k1));
    Scenario none = example1_with("conductive", 1, 3);
    none.fractures.clear();
    none.line_cuts.clear();
    const double f0 = left_flux_mag(tracked_run("no fractures k1", none));
    flux_cond = f3;
    flux_none = f0;
    Scenario weak = example1_with("conductive", 1, 3);
    weak.penalties.s_c = 1.0;
    const double f1 = left_flux_mag(tracked_run("weak penalty k1", weak));
    const bool ok = f3 > 1.05 * f0 && std::abs(f1 - f0) <= 0.02 * f0;
    std::snprintf(buf, sizeof buf,
                  "C6 penalty exponent controls fracture capture "
                  "(flux %.4f with s_c=3, %.4f without fractures, %.4f with "
                  "s_c=1)",
                  f3, f0, f1);
    set(6, ok, buf);
  } catch (const std::exception& e) {
    fail_note(6, "stabilization sensitivity", e.what());
  }

  try {
    const double fb = left_flux_mag(need(e1b_k1));
    const bool ok = flux_cond > (1.0 + 0.02) * flux_none &&
                    flux_none > (1.0 + 0.02) * fb;
    std::snprintf(buf, sizeof buf,
                  "C7 inflow ordering conductive > none > blocking "
                  "(%.4f > %.4f > %.4f, gaps > 2%%)",
                  flux_cond, flux_none, fb);
    set(7, ok, buf);
  } catch (const std::exception& e) {
    fail_note(7, "flux ordering", e.what());
  }

  // C8: the data are symmetric under (x, y) -> (1 - x, y), p -> 1 - p; the
  // sampled postprocessed pressure along y = 0.25 must match its mirror.
  try {
    const RunResult& rr = need(e1a_k1);
    const auto s = sample_line(rr.sol, {0.0, 0.25}, {1.0, 0.25}, 201);
    double worst = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
      worst = std::max(
          worst, std::abs(s[i].value + s[s.size() - 1 - i].value - 1.0));
    std::snprintf(buf, sizeof buf,
                  "C8 left-right antisymmetry along y = 0.25 "
                  "(max defect = %.2e, tol 5e-3)",
                  worst);
    set(8, worst < 5e-3, buf);
  } catch (const std::exception& e) {
    fail_note(8, "pressure symmetry", e.what());
  }

  // C9: the x = 0.5 line cut converges under local refinement: the distance
  // between refinement levels 2 and 4 must be at most half the distance
  // between levels 0 and 2.
  try {
    const Vec2 a{0.5, 0.0};
    const Vec2 b{0.5, 1.0};
    std::vector<std::vector<LineSample>> cuts;
    for (int r : {0, 2, 4}) {
      const RunResult rr = tracked_run("line-cut refine " + std::to_string(r),
                                       example1_with("conductive", 1, r));
      cuts.push_back(sample_line(rr.sol, a, b, 200));
    }
    const double d02 = rms_diff(cuts[0], cuts[1]);
    const double d24 = rms_diff(cuts[1], cuts[2]);
    std::snprintf(buf, sizeof buf,
                  "C9 line-cut self-convergence "
                  "(d(r2,r4)/d(r0,r2) = %.3f, needs <= 0.5)",
                  d24 / d02);
    set(9, d24 <= 0.5 * d02, buf);
  } catch (const std::exception& e) {
    fail_note(9, "line-cut self-convergence", e.what());
  }

  // C10: on systems small enough for the dense oracle, CG matches Cholesky;
  // every benchmark system passed the SPD verification.
  try {
    Scenario small_frac = example1_with("conductive", 0, 0);
    small_frac.line_cuts.clear();
    const OracleCase o1 = solver_oracle(small_frac);
    const OracleCase o2 = solver_oracle(builtin_manufactured(8, 0));
    const OracleCase o3 = solver_oracle(builtin_manufactured(4, 1));
    const double rel = std::max({o1.rel, o2.rel, o3.rel});
    bool all_spd = true;
    for (const RunRecord& r : g_records) all_spd = all_spd && r.spd;
    std::snprintf(buf, sizeof buf,
                  "C10 CG matches dense Cholesky (n = %d, %d, %d; max rel "
                  "diff = %.2e, tol 1e-9; SPD checks %s)",
                  o1.n, o2.n, o3.n, rel, all_spd ? "pass" : "FAIL");
    set(10, rel <= 1e-9 && all_spd, buf);
  } catch (const std::exception& e) {
    fail_note(10, "solver oracle", e.what());
  }

  // C2 is evaluated last so it covers every run made above.
  {
    double worst = 0.0;
    for (const RunRecord& r : g_records)
      worst = std::max(worst, std::abs(r.energy_residual) / r.scale);
    std::snprintf(buf, sizeof buf,
                  "C2 energy identity on all %d runs "
                  "(max |residual|/scale = %.2e, tol 1e-9)",
                  static_cast<int>(g_records.size()), worst);
    set(2, !g_records.empty() && worst < 1e-9, buf);
  }

  int failures = 0;
  for (const Line& l : lines) {
    std::printf("[%s] %s\n", l.ok ? "PASS" : "FAIL", l.text.c_str());
    if (!l.ok) ++failures;
  }
  std::printf("acceptance: %d/10 criteria passed\n",
              10 - failures);
  return failures;
}
