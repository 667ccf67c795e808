#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "fracflow/assembly.hpp"
#include "fracflow/errors.hpp"
#include "fracflow/run.hpp"

using namespace fracflow;

namespace {

Scenario base_scenario() {
  Scenario s;
  s.name = "test";
  s.domain = {0, 0, 1, 1};
  s.matrix_permeability = 1.0;
  s.boundary["left"] = {BcType::dirichlet, 1.0, false};
  s.boundary["right"] = {BcType::dirichlet, 0.0, false};
  s.boundary["bottom"] = {BcType::neumann, 0.0, false};
  s.boundary["top"] = {BcType::neumann, 0.0, false};
  s.source = {SourceTerm::Kind::constant, 0.0};
  s.degree = 1;
  s.mesh = {4, 4, 0};
  return s;
}

struct Classified {
  Mesh mesh;
  CellClassification classes;
};

Classified classified_mesh(const Scenario& s) {
  Classified r;
  r.mesh = build_uniform_triangulation(s.mesh.nx, s.mesh.ny, s.domain);
  tag_boundary_by_rect(r.mesh);
  std::vector<DiscreteFracture> discrete;
  std::vector<FractureKind> kinds;
  for (const FractureSpec& f : s.fractures) {
    discrete.push_back(discretize_fracture(f, r.mesh));
    kinds.push_back(f.kind);
  }
  r.classes = classify_cells(r.mesh, discrete, kinds);
  return r;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("stabilization: per-class values match the penalty formulas") {
  PenaltyParams p;  // C_b=1, s_b=0, C_c=1, s_c=3, L=1, global_scale=1
  CHECK(stabilization(CellClass::regular, 0.1, p, 1.0) ==
        doctest::Approx(1.0));
  CHECK(stabilization(CellClass::conductive, 0.1, p, 1.0) ==
        doctest::Approx(1000.0));
  CHECK(stabilization(CellClass::blocking, 0.1, p, 1.0) ==
        doctest::Approx(1.0));  // s_b = 0: same as regular

  p.s_b = 2.0;
  CHECK(stabilization(CellClass::blocking, 0.1, p, 1.0) ==
        doctest::Approx(0.01));

  p.global_scale = 2.0;
  CHECK(stabilization(CellClass::blocking, 0.1, p, 1.0) ==
        doctest::Approx(0.02));
  CHECK(stabilization(CellClass::regular, 0.1, p, 3.0) ==
        doctest::Approx(6.0));

  CHECK_THROWS_AS(stabilization(CellClass::regular, 0.0, p, 1.0), ConfigError);
  CHECK_THROWS_AS(stabilization(CellClass::regular, 0.1, p, -1.0),
                  NumericalError);
}

TEST_CASE("build_local: vanishing blocking fracture reduces to a regular cell") {
  Scenario plain = base_scenario();
  const Classified reg = classified_mesh(plain);

  Scenario with = plain;
  with.fractures.push_back(
      {{-1.0, 0.35}, {2.0, 0.35}, 1e-300, 1.0, FractureKind::blocking});
  const Classified cut = classified_mesh(with);

  const PenaltyParams params;  // s_b = 0: same alpha for blocking and regular
  bool compared = false;
  for (int c = 0; c < cut.mesh.n_cells(); ++c) {
    if (cut.classes.class_of[static_cast<std::size_t>(c)] !=
        CellClass::blocking)
      continue;
    const LocalSystem a = build_local(cut.mesh, c, cut.classes, with, params,
                                      /*degree=*/1);
    const LocalSystem b = build_local(reg.mesh, c, reg.classes, plain, params,
                                      /*degree=*/1);
    const auto close = [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
      return (x - y).cwiseAbs().maxCoeff() <
             1e-12 * (1.0 + y.cwiseAbs().maxCoeff());
    };
    CHECK(close(a.Auu, b.Auu));
    CHECK(close(a.Auut, b.Auut));
    CHECK(close(a.Autut, b.Autut));
    CHECK(close(a.Bup, b.Bup));
    CHECK(close(a.Buf, b.Buf));
    CHECK(close(a.Cpu, b.Cpu));
    CHECK(close(a.Cpp, b.Cpp));
    CHECK(close(a.Cpf, b.Cpf));
    CHECK(close(a.Du, b.Du));
    CHECK(close(a.Dp, b.Dp));
    CHECK(close(a.Df, b.Df));
    compared = true;
  }
  CHECK(compared);
}

TEST_CASE("build_local: horizontal conductive fracture only couples "
          "tangential velocity components") {
  Scenario s = base_scenario();
  s.fractures.push_back(
      {{-1.0, 0.35}, {2.0, 0.35}, 1e-3, 1e2, FractureKind::conductive});
  const Classified cm = classified_mesh(s);

  Scenario plain = base_scenario();
  const Classified reg = classified_mesh(plain);

  const PenaltyParams params;
  bool checked = false;
  for (int c = 0; c < cm.mesh.n_cells(); ++c) {
    if (cm.classes.class_of[static_cast<std::size_t>(c)] !=
        CellClass::conductive)
      continue;
    const LocalSystem a =
        build_local(cm.mesh, c, cm.classes, s, params, /*degree=*/1);
    const LocalSystem b =
        build_local(reg.mesh, c, reg.classes, plain, params, /*degree=*/1);
    // the fracture enters the velocity rows through the difference of the
    // two velocity blocks; with normal (0,1) the tangential projector keeps
    // only x-x coupling
    const Eigen::MatrixXd C = -(a.Auut + a.Autut);
    const int m = a.m;
    CHECK(C.block(0, 0, m, m).cwiseAbs().maxCoeff() > 1e-12);
    CHECK(C.block(0, m, m, m).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(C.block(m, 0, m, m).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(C.block(m, m, m, m).cwiseAbs().maxCoeff() < 1e-14);
    // the pure mass parts are untouched by the tangential term
    CHECK((a.Autut - b.Autut).cwiseAbs().maxCoeff() < 1e-13);
    checked = true;
  }
  CHECK(checked);
}

TEST_CASE("condense: Schur block symmetric positive semidefinite, recovery "
          "solves the local rows") {
  Scenario s = base_scenario();
  s.fractures.push_back(
      {{-1.0, 0.35}, {2.0, 0.35}, 1e-3, 1e2, FractureKind::conductive});
  const Classified cm = classified_mesh(s);
  const PenaltyParams params = s.penalties.resolve(1, s.domain.diameter());

  std::mt19937 rng(99);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  // exercise both regular and fractured cells
  std::vector<int> cells;
  int taken_regular = 0, taken_cut = 0;
  for (int c = 0; c < cm.mesh.n_cells(); ++c) {
    const CellClass cls = cm.classes.class_of[static_cast<std::size_t>(c)];
    if (cls == CellClass::regular && taken_regular < 3)
      cells.push_back(c), ++taken_regular;
    if (cls == CellClass::conductive && taken_cut < 3)
      cells.push_back(c), ++taken_cut;
  }
  REQUIRE(taken_cut == 3);
  int tested = 0;
  for (int c : cells) {
    const CellClass cls = cm.classes.class_of[static_cast<std::size_t>(c)];
    const LocalSystem local =
        build_local(cm.mesh, c, cm.classes, s, params, /*degree=*/1);
    const CondensedCell cell = condense(local);

    const double snorm = cell.S.cwiseAbs().maxCoeff();
    CHECK((cell.S - cell.S.transpose()).cwiseAbs().maxCoeff() <
          1e-12 * snorm);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cell.S);
    CHECK(eig.eigenvalues().minCoeff() > -1e-10 * snorm);

    // recovery reproduces the eliminated unknowns: plug them back into the
    // three local equation rows
    Eigen::VectorXd phat(local.nf);
    for (int i = 0; i < local.nf; ++i) phat(i) = dist(rng);
    const Eigen::VectorXd p = cell.recovery.Rp * phat + cell.recovery.sp;
    const Eigen::VectorXd ut = cell.recovery.Tp * p + cell.recovery.Tf * phat;
    const Eigen::VectorXd u = cell.recovery.Wp * p + cell.recovery.Wf * phat;

    const Eigen::VectorXd ra = local.Auu * u + local.Auut * ut;
    const Eigen::VectorXd rb =
        local.Autut * ut + local.Bup * p + local.Buf * phat;
    const Eigen::VectorXd rc =
        local.Cpu * u + local.Cpp * p + local.Cpf * phat - local.load;
    const double scale =
        1.0 + u.cwiseAbs().maxCoeff() + ut.cwiseAbs().maxCoeff() +
        p.cwiseAbs().maxCoeff() +
        stabilization(cls, cm.mesh.cell_diameter(c), params, 1.0);
    CHECK(ra.cwiseAbs().maxCoeff() < 1e-11 * scale);
    CHECK(rb.cwiseAbs().maxCoeff() < 1e-11 * scale);
    CHECK(rc.cwiseAbs().maxCoeff() < 1e-11 * scale);
    ++tested;
  }
  CHECK(tested == 6);
}

TEST_CASE("assemble: facet DOF bookkeeping on the two-fracture benchmark") {
  const Scenario s = builtin_example1("conductive");
  Scenario coarse = s;
  coarse.mesh.refine_steps = 0;
  const Classified cm = classified_mesh(coarse);
  const PenaltyParams params =
      coarse.penalties.resolve(coarse.degree, coarse.domain.diameter());
  const CondensedSystem sys =
      assemble(cm.mesh, cm.classes, coarse, params, coarse.degree);

  // 10x10 grid: 320 facets, 20 of them on the Dirichlet sides; two DOFs per
  // facet at degree 1
  CHECK(cm.mesh.n_facets() == 320);
  CHECK(sys.ndof_total == 640);
  CHECK(sys.ndof_free == 600);
  CHECK(sys.A.n == 600);

  int dirichlet_dofs = 0;
  for (int d : sys.dof_map)
    if (d < 0) ++dirichlet_dofs;
  CHECK(dirichlet_dofs == 40);
}

TEST_CASE("pipeline: zero data produce the zero solution, with and without "
          "fractures") {
  Scenario s = base_scenario();
  s.boundary["left"].value = 0.0;  // homogeneous everywhere
  SUBCASE("no fractures") {}
  SUBCASE("with fractures") {
    s.fractures.push_back(
        {{0.2, 0.35}, {0.8, 0.35}, 1e-3, 1e3, FractureKind::conductive});
    s.fractures.push_back(
        {{0.5, 0.2}, {0.5, 0.8}, 1e-3, 1e-3, FractureKind::blocking});
  }
  const RunResult r = run_scenario(s);
  CHECK(max_abs(r.sol.u) < 1e-10);
  CHECK(max_abs(r.sol.u_tilde) < 1e-10);
  CHECK(max_abs(r.sol.p) < 1e-10);
  CHECK(max_abs(r.sol.p_hat) < 1e-10);
}

TEST_CASE("pipeline: regular cells carry identical velocity fields") {
  const Scenario s = base_scenario();
  const RunResult r = run_scenario(s);
  REQUIRE(r.sol.u.size() == r.sol.u_tilde.size());
  double diff = 0.0;
  for (std::size_t i = 0; i < r.sol.u.size(); ++i)
    diff = std::max(diff, std::abs(r.sol.u[i] - r.sol.u_tilde[i]));
  CHECK(diff < 1e-11);
}

TEST_CASE("pipeline: solution is linear in the data") {
  Scenario s = base_scenario();
  s.fractures.push_back(
      {{0.2, 0.4}, {0.8, 0.6}, 1e-3, 1e2, FractureKind::conductive});
  s.source = {SourceTerm::Kind::constant, 0.7};
  const RunResult r1 = run_scenario(s);

  Scenario s3 = s;
  const double c = 3.0;
  s3.boundary["left"].value *= c;
  s3.boundary["right"].value *= c;
  s3.source.value *= c;
  const RunResult r3 = run_scenario(s3);

  REQUIRE(r1.sol.p.size() == r3.sol.p.size());
  const double scale = 1.0 + c * max_abs(r1.sol.p);
  for (std::size_t i = 0; i < r1.sol.p.size(); ++i)
    CHECK(std::abs(c * r1.sol.p[i] - r3.sol.p[i]) < 1e-9 * scale);
  const double uscale = 1.0 + c * max_abs(r1.sol.u);
  for (std::size_t i = 0; i < r1.sol.u.size(); ++i)
    CHECK(std::abs(c * r1.sol.u[i] - r3.sol.u[i]) < 1e-9 * uscale);
}

TEST_CASE("pipeline: pure Neumann system is reported as singular") {
  Scenario s = base_scenario();
  s.mesh = {2, 2, 0};
  for (const char* side : {"left", "right", "bottom", "top"})
    s.boundary[side] = {BcType::neumann, 0.0, false};
  s.allow_pure_neumann = true;
  s.source = {SourceTerm::Kind::constant, 1.0};  // incompatible data
  CHECK_THROWS_AS(run_scenario(s), NumericalError);
}
