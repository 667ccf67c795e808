#include "fracflow/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "fracflow/basis.hpp"
#include "fracflow/errors.hpp"
#include "fracflow/quadrature.hpp"

namespace fracflow {

double stabilization(CellClass cls, double h, const PenaltyParams& params,
                     double Km) {
  if (!(h > 0.0))
    throw ConfigError("stabilization: cell size must be positive");
  if (!(Km > 0.0))
    throw NumericalError("stabilization: permeability must be positive");
  double a = Km;
  switch (cls) {
    case CellClass::regular:
      break;
    case CellClass::blocking:
      a *= params.C_b * std::pow(h / params.L, params.s_b);
      break;
    case CellClass::conductive:
      a *= params.C_c * std::pow(h / params.L, -params.s_c);
      break;
  }
  a *= params.global_scale;
  if (!(a > 0.0) || !std::isfinite(a))
    throw NumericalError("stabilization: alpha is not positive and finite");
  return a;
}

namespace {

TriFrame cell_frame(const Mesh& mesh, int cell) {
  const auto v = mesh.cell_vertices(cell);
  TriFrame f = tri_frame(v[0], v[1], v[2]);
  if (!(f.det > 0.0))
    throw NumericalError("degenerate cell " + std::to_string(cell));
  return f;
}

/// Quadrature for boundary data (Dirichlet projections and Neumann loads):
/// one order beyond the facet terms, clamped to the supported range. The
/// energy diagnostics reuse the same rule so the discrete energy identity
/// holds to roundoff.
int boundary_data_exactness(int degree) { return std::min(6, 2 * degree + 3); }

}  // namespace

LocalSystem build_local(const Mesh& mesh, int cell,
                        const CellClassification& classes,
                        const Scenario& scenario, const PenaltyParams& params,
                        int degree) {
  if (degree < 0 || degree > 2)
    throw ConfigError("build_local: degree must be 0, 1, or 2");
  if (cell < 0 || cell >= mesh.n_cells())
    throw ConfigError("build_local: cell index out of range");

  const int m = cell_space_dim(degree);
  const int nf1 = degree + 1;
  const int nf = 3 * nf1;

  LocalSystem ls;
  ls.degree = degree;
  ls.m = m;
  ls.nf = nf;
  ls.facet_ids = mesh.cell_facets[static_cast<std::size_t>(cell)];

  const CellBasis basis(degree);
  const FacetBasis facet_basis(degree);
  const TriangleQuadrature vol_rule = triangle_quadrature(2 * degree + 2);
  const SegmentQuadrature facet_rule =
      segment_quadrature(std::max(1, 2 * degree + 1));

  const TriFrame frame = cell_frame(mesh, cell);
  const double Km = scenario.matrix_permeability_at(mesh.cell_centroid(cell));
  if (!(Km > 0.0))
    throw NumericalError("cell " + std::to_string(cell) +
                         ": nonpositive matrix permeability");
  const CellClass cls = classes.class_of[static_cast<std::size_t>(cell)];
  const double alpha =
      stabilization(cls, mesh.cell_diameter(cell), params, Km);

  // Volume terms: mass M, weak derivatives Cx/Cy with
  // Cx(i, j) = integral of (d_x phi_i) phi_j, and the source load.
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd Cx = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd Cy = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd load = Eigen::VectorXd::Zero(m);
  std::vector<double> vals(static_cast<std::size_t>(m));
  std::vector<Vec2> grads(static_cast<std::size_t>(m));
  for (std::size_t q = 0; q < vol_rule.points.size(); ++q) {
    const Vec2 r = vol_rule.points[q];
    const double w = vol_rule.weights[q] * frame.det;
    basis.eval(r, vals);
    basis.eval_gradients(r, grads);
    for (int i = 0; i < m; ++i)
      grads[static_cast<std::size_t>(i)] =
          frame.gradient_to_physical(grads[static_cast<std::size_t>(i)]);
    const double f = scenario.source.eval(frame.to_physical(r));
    for (int i = 0; i < m; ++i) {
      const double vi = vals[static_cast<std::size_t>(i)];
      load(i) += w * f * vi;
      for (int j = 0; j < m; ++j) {
        const double vj = vals[static_cast<std::size_t>(j)];
        M(i, j) += w * vi * vj;
        Cx(i, j) += w * grads[static_cast<std::size_t>(i)].x * vj;
        Cy(i, j) += w * grads[static_cast<std::size_t>(i)].y * vj;
      }
    }
  }

  // Facet terms. Facets are integrated in their global parameterization so
  // both incident cells assemble against the same facet basis.
  //   Sb    = boundary mass <p, q> on the cell boundary
  //   E     = <phat, q>,  N = <phat, w . n>,  Shat = facet mass
  //   Cpu   = -(u, grad q) + <u . n, q>   (volume part filled below)
  Eigen::MatrixXd Sb = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(m, nf);
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(2 * m, nf);
  Eigen::MatrixXd Shat = Eigen::MatrixXd::Zero(nf, nf);
  Eigen::MatrixXd Cpu = Eigen::MatrixXd::Zero(m, 2 * m);
  Cpu.block(0, 0, m, m) = -Cx;
  Cpu.block(0, m, m, m) = -Cy;
  std::vector<double> fvals(static_cast<std::size_t>(nf1));
  for (int lf = 0; lf < 3; ++lf) {
    const int fid = ls.facet_ids[static_cast<std::size_t>(lf)];
    const Vec2 n = mesh.facet_outward_normal(fid, cell);
    const double len = mesh.facet_length(fid);
    for (std::size_t q = 0; q < facet_rule.points.size(); ++q) {
      const double t = facet_rule.points[q];
      const double w = facet_rule.weights[q] * len;
      const Vec2 x = mesh.facet_point(fid, t);
      basis.eval(frame.to_reference(x), vals);
      facet_basis.eval(t, fvals);
      for (int i = 0; i < m; ++i) {
        const double vi = vals[static_cast<std::size_t>(i)];
        for (int j = 0; j < m; ++j) {
          const double s = w * vi * vals[static_cast<std::size_t>(j)];
          Sb(i, j) += s;
          Cpu(i, j) += n.x * s;
          Cpu(i, m + j) += n.y * s;
        }
        for (int l = 0; l < nf1; ++l) {
          const double s = w * vi * fvals[static_cast<std::size_t>(l)];
          E(i, lf * nf1 + l) += s;
          N(i, lf * nf1 + l) += n.x * s;
          N(m + i, lf * nf1 + l) += n.y * s;
        }
      }
      for (int l = 0; l < nf1; ++l)
        for (int l2 = 0; l2 < nf1; ++l2)
          Shat(lf * nf1 + l, lf * nf1 + l2) +=
              w * fvals[static_cast<std::size_t>(l)] *
              fvals[static_cast<std::size_t>(l2)];
    }
  }

  // Fracture surface terms on the cut segments. Blocking cuts resist the
  // normal flux of the total velocity, conductive cuts add a tangential
  // shortcut proportional to the matrix velocity; by classification a cell
  // carries at most one kind, which keeps the condensed system symmetric.
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  for (const FractureCut& cut : classes.cuts[static_cast<std::size_t>(cell)]) {
    if (cut.fracture < 0 ||
        cut.fracture >= static_cast<int>(scenario.fractures.size()))
      throw ConfigError("classification references an unknown fracture");
    const FractureSpec& spec =
        scenario.fractures[static_cast<std::size_t>(cut.fracture)];
    const Vec2 n = spec.normal();
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t q = 0; q < facet_rule.points.size(); ++q) {
      const double s = facet_rule.points[q];
      const double w = facet_rule.weights[q] * cut.length;
      const Vec2 x = cut.p0 + s * (cut.p1 - cut.p0);
      basis.eval(frame.to_reference(x), vals);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          Q(i, j) += w * vals[static_cast<std::size_t>(i)] *
                     vals[static_cast<std::size_t>(j)];
    }
    if (spec.kind == FractureKind::blocking) {
      const double c = spec.thickness / spec.permeability;
      B.block(0, 0, m, m) += c * n.x * n.x * Q;
      B.block(0, m, m, m) += c * n.x * n.y * Q;
      B.block(m, 0, m, m) += c * n.y * n.x * Q;
      B.block(m, m, m, m) += c * n.y * n.y * Q;
    } else {
      const double c = spec.thickness * spec.permeability / (Km * Km);
      const double pxx = 1.0 - n.x * n.x;
      const double pxy = -n.x * n.y;
      const double pyy = 1.0 - n.y * n.y;
      C.block(0, 0, m, m) += c * pxx * Q;
      C.block(0, m, m, m) += c * pxy * Q;
      C.block(m, 0, m, m) += c * pxy * Q;
      C.block(m, m, m, m) += c * pyy * Q;
    }
  }

  Eigen::MatrixXd Mv = Eigen::MatrixXd::Zero(2 * m, 2 * m);
  Mv.block(0, 0, m, m) = M;
  Mv.block(m, m, m, m) = M;

  ls.Auu = Mv / Km + B;
  ls.Auut = -(Mv / Km + C);
  ls.Autut = Mv / Km;
  ls.Bup = Eigen::MatrixXd(2 * m, m);
  ls.Bup.block(0, 0, m, m) = -Cx;
  ls.Bup.block(m, 0, m, m) = -Cy;
  ls.Buf = N;
  ls.Cpu = std::move(Cpu);
  ls.Cpp = alpha * Sb;
  ls.Cpf = -alpha * E;
  ls.load = std::move(load);
  ls.Du = N.transpose();
  ls.Dp = alpha * E.transpose();
  ls.Df = -alpha * Shat;
  return ls;
}

CondensedCell condense(const LocalSystem& local) {
  // Row (a) gives u from ut, row (b) gives ut from (p, phat), row (c) gives
  // p from phat. The leftover of row (d) is the cell's facet contribution.
  Eigen::LLT<Eigen::MatrixXd> auu(local.Auu);
  if (auu.info() != Eigen::Success)
    throw NumericalError(
        "condense: total-velocity block is not positive definite");
  Eigen::LLT<Eigen::MatrixXd> autut(local.Autut);
  if (autut.info() != Eigen::Success)
    throw NumericalError(
        "condense: matrix-velocity block is not positive definite");

  const Eigen::MatrixXd Pa = -auu.solve(local.Auut);  // u = Pa ut
  CellRecovery rec;
  rec.Tp = -autut.solve(local.Bup);
  rec.Tf = -autut.solve(local.Buf);
  rec.Wp = Pa * rec.Tp;
  rec.Wf = Pa * rec.Tf;

  const Eigen::MatrixXd App = local.Cpu * rec.Wp + local.Cpp;
  const Eigen::MatrixXd Apf = local.Cpu * rec.Wf + local.Cpf;
  Eigen::LLT<Eigen::MatrixXd> app(App);
  if (app.info() != Eigen::Success)
    throw NumericalError(
        "condense: local pressure block is not positive definite");
  rec.Rp = -app.solve(Apf);
  rec.sp = app.solve(local.load);

  CondensedCell cc;
  cc.S = -(local.Du * (rec.Wp * rec.Rp + rec.Wf) + local.Dp * rec.Rp +
           local.Df);
  cc.t = (local.Du * rec.Wp + local.Dp) * rec.sp;
  cc.recovery = std::move(rec);
  return cc;
}

CondensedSystem assemble(const Mesh& mesh, const CellClassification& classes,
                         const Scenario& scenario, const PenaltyParams& params,
                         int degree) {
  if (degree < 0 || degree > 2)
    throw ConfigError("assemble: degree must be 0, 1, or 2");
  if (static_cast<int>(classes.class_of.size()) != mesh.n_cells() ||
      static_cast<int>(classes.cuts.size()) != mesh.n_cells())
    throw ConfigError("assemble: classification does not match the mesh");

  CondensedSystem sys;
  sys.mesh = &mesh;
  sys.classes = &classes;
  sys.scenario = &scenario;
  sys.params = params;
  sys.degree = degree;

  const int nf1 = degree + 1;
  sys.ndof_total = mesh.n_facets() * nf1;
  sys.dirichlet_values.assign(static_cast<std::size_t>(sys.ndof_total), 0.0);
  sys.dof_map.assign(static_cast<std::size_t>(sys.ndof_total), -1);

  // Attach boundary conditions to facets.
  std::vector<const BoundaryCondition*> facet_bc(
      static_cast<std::size_t>(mesh.n_facets()), nullptr);
  for (int f = 0; f < mesh.n_facets(); ++f) {
    if (!mesh.facets[static_cast<std::size_t>(f)].is_boundary()) continue;
    if (mesh.facet_tag[static_cast<std::size_t>(f)] < 0)
      throw ConfigError("assemble: boundary facet " + std::to_string(f) +
                        " carries no tag");
    const std::string& name = mesh.tag_name(f);
    const auto it = scenario.boundary.find(name);
    if (it == scenario.boundary.end())
      throw ConfigError("assemble: no boundary condition for tag '" + name +
                        "'");
    facet_bc[static_cast<std::size_t>(f)] = &it->second;
  }

  // L^2 projection of the Dirichlet datum onto each facet space. The facet
  // basis is orthonormal in the unit parameterization, so the projection
  // coefficients are plain integrals against the basis.
  const FacetBasis facet_basis(degree);
  const SegmentQuadrature data_rule =
      segment_quadrature(boundary_data_exactness(degree));
  std::vector<double> fvals(static_cast<std::size_t>(nf1));
  for (int f = 0; f < mesh.n_facets(); ++f) {
    const BoundaryCondition* bc = facet_bc[static_cast<std::size_t>(f)];
    if (bc == nullptr || bc->type != BcType::dirichlet) continue;
    for (std::size_t q = 0; q < data_rule.points.size(); ++q) {
      const double t = data_rule.points[q];
      const double g = bc->eval(mesh.facet_point(f, t));
      facet_basis.eval(t, fvals);
      for (int l = 0; l < nf1; ++l)
        sys.dirichlet_values[static_cast<std::size_t>(f * nf1 + l)] +=
            data_rule.weights[q] * g * fvals[static_cast<std::size_t>(l)];
    }
  }

  int next_free = 0;
  for (int f = 0; f < mesh.n_facets(); ++f) {
    const BoundaryCondition* bc = facet_bc[static_cast<std::size_t>(f)];
    const bool fixed = bc != nullptr && bc->type == BcType::dirichlet;
    for (int l = 0; l < nf1; ++l)
      sys.dof_map[static_cast<std::size_t>(f * nf1 + l)] =
          fixed ? -1 : next_free++;
  }
  sys.ndof_free = next_free;

  // Condense every cell and scatter into the facet system; columns of
  // Dirichlet DOFs move to the right-hand side.
  const int nf = 3 * nf1;
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(mesh.n_cells()) *
                   static_cast<std::size_t>(nf) * static_cast<std::size_t>(nf));
  sys.b.assign(static_cast<std::size_t>(sys.ndof_free), 0.0);
  sys.recovery.resize(static_cast<std::size_t>(mesh.n_cells()));
  sys.alpha.resize(static_cast<std::size_t>(mesh.n_cells()));
  std::vector<int> gdof(static_cast<std::size_t>(nf));
  for (int cell = 0; cell < mesh.n_cells(); ++cell) {
    LocalSystem local;
    CondensedCell cc;
    try {
      local = build_local(mesh, cell, classes, scenario, params, degree);
      cc = condense(local);
    } catch (const NumericalError& e) {
      throw NumericalError("cell " + std::to_string(cell) + ": " + e.what());
    }
    sys.alpha[static_cast<std::size_t>(cell)] = stabilization(
        classes.class_of[static_cast<std::size_t>(cell)],
        mesh.cell_diameter(cell), params,
        scenario.matrix_permeability_at(mesh.cell_centroid(cell)));
    sys.recovery[static_cast<std::size_t>(cell)] = std::move(cc.recovery);

    for (int a = 0; a < nf; ++a)
      gdof[static_cast<std::size_t>(a)] =
          local.facet_ids[static_cast<std::size_t>(a / nf1)] * nf1 + a % nf1;
    for (int a = 0; a < nf; ++a) {
      const int ia = sys.dof_map[static_cast<std::size_t>(
          gdof[static_cast<std::size_t>(a)])];
      if (ia < 0) continue;
      sys.b[static_cast<std::size_t>(ia)] += cc.t(a);
      for (int c = 0; c < nf; ++c) {
        const int gc = gdof[static_cast<std::size_t>(c)];
        const int ic = sys.dof_map[static_cast<std::size_t>(gc)];
        if (ic >= 0) {
          triplets.push_back({ia, ic, cc.S(a, c)});
        } else {
          sys.b[static_cast<std::size_t>(ia)] -=
              cc.S(a, c) * sys.dirichlet_values[static_cast<std::size_t>(gc)];
        }
      }
    }
  }

  // Neumann data <g, mu> moves to the right-hand side with a minus sign
  // (the facet equation reads sum of cell contributions = boundary flux).
  for (int f = 0; f < mesh.n_facets(); ++f) {
    const BoundaryCondition* bc = facet_bc[static_cast<std::size_t>(f)];
    if (bc == nullptr || bc->type != BcType::neumann) continue;
    const double len = mesh.facet_length(f);
    for (std::size_t q = 0; q < data_rule.points.size(); ++q) {
      const double t = data_rule.points[q];
      const double g = bc->eval(mesh.facet_point(f, t));
      facet_basis.eval(t, fvals);
      for (int l = 0; l < nf1; ++l) {
        const int ia = sys.dof_map[static_cast<std::size_t>(f * nf1 + l)];
        sys.b[static_cast<std::size_t>(ia)] -=
            len * data_rule.weights[q] * g * fvals[static_cast<std::size_t>(l)];
      }
    }
  }

  sys.A = SparseSym::from_triplets(sys.ndof_free, std::move(triplets));
  return sys;
}

HDGSolution recover(const CondensedSystem& sys,
                    std::span<const double> facet_solution) {
  if (static_cast<int>(facet_solution.size()) != sys.ndof_free)
    throw ConfigError("recover: solution vector has the wrong size");
  const Mesh& mesh = *sys.mesh;
  const int nf1 = sys.degree + 1;
  const int nf = 3 * nf1;
  const int m = cell_space_dim(sys.degree);

  HDGSolution sol;
  sol.mesh = sys.mesh;
  sol.classes = sys.classes;
  sol.scenario = sys.scenario;
  sol.params = sys.params;
  sol.degree = sys.degree;
  sol.alpha = sys.alpha;

  sol.p_hat.resize(static_cast<std::size_t>(sys.ndof_total));
  for (int d = 0; d < sys.ndof_total; ++d) {
    const int i = sys.dof_map[static_cast<std::size_t>(d)];
    sol.p_hat[static_cast<std::size_t>(d)] =
        i >= 0 ? facet_solution[static_cast<std::size_t>(i)]
               : sys.dirichlet_values[static_cast<std::size_t>(d)];
  }

  sol.u.assign(static_cast<std::size_t>(mesh.n_cells()) * 2 * m, 0.0);
  sol.u_tilde.assign(static_cast<std::size_t>(mesh.n_cells()) * 2 * m, 0.0);
  sol.p.assign(static_cast<std::size_t>(mesh.n_cells()) * m, 0.0);

  Eigen::VectorXd ph(nf);
  for (int cell = 0; cell < mesh.n_cells(); ++cell) {
    const CellRecovery& rec = sys.recovery[static_cast<std::size_t>(cell)];
    const auto& fids = mesh.cell_facets[static_cast<std::size_t>(cell)];
    for (int a = 0; a < nf; ++a)
      ph(a) = sol.p_hat[static_cast<std::size_t>(
          fids[static_cast<std::size_t>(a / nf1)] * nf1 + a % nf1)];
    const Eigen::VectorXd P = rec.Rp * ph + rec.sp;
    const Eigen::VectorXd U = rec.Wp * P + rec.Wf * ph;
    const Eigen::VectorXd Ut = rec.Tp * P + rec.Tf * ph;
    for (int i = 0; i < m; ++i)
      sol.p[static_cast<std::size_t>(cell * m + i)] = P(i);
    for (int i = 0; i < 2 * m; ++i) {
      sol.u[static_cast<std::size_t>(cell * 2 * m + i)] = U(i);
      sol.u_tilde[static_cast<std::size_t>(cell * 2 * m + i)] = Ut(i);
    }
  }
  return sol;
}

}  // namespace fracflow
