#include "fracflow/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracflow/basis.hpp"
#include "fracflow/errors.hpp"
#include "fracflow/quadrature.hpp"

namespace fracflow {

namespace {

TriFrame checked_frame(const Mesh& mesh, int cell) {
  const auto v = mesh.cell_vertices(cell);
  TriFrame f = tri_frame(v[0], v[1], v[2]);
  if (!(f.det > 0.0))
    throw NumericalError("degenerate cell " + std::to_string(cell));
  return f;
}

double eval_scalar(std::span<const double> coeffs,
                   std::span<const double> vals) {
  double s = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) s += coeffs[i] * vals[i];
  return s;
}

Vec2 eval_vector(std::span<const double> coeffs, std::span<const double> vals) {
  Vec2 v{0.0, 0.0};
  const std::size_t m = vals.size();
  for (std::size_t i = 0; i < m; ++i) {
    v.x += coeffs[i] * vals[i];
    v.y += coeffs[m + i] * vals[i];
  }
  return v;
}

std::span<const double> cell_span(const std::vector<double>& field, int cell,
                                  int stride) {
  return {field.data() + static_cast<std::size_t>(cell) *
                             static_cast<std::size_t>(stride),
          static_cast<std::size_t>(stride)};
}

/// Must match the assembly's boundary-data rule so the discrete energy
/// identity closes to roundoff.
int boundary_data_exactness(int degree) { return std::min(6, 2 * degree + 3); }

const BoundaryCondition* boundary_condition(const HDGSolution& sol, int facet) {
  const Mesh& mesh = *sol.mesh;
  if (!mesh.facets[static_cast<std::size_t>(facet)].is_boundary())
    return nullptr;
  const auto it = sol.scenario->boundary.find(mesh.tag_name(facet));
  if (it == sol.scenario->boundary.end())
    throw ConfigError("no boundary condition for tag '" +
                      mesh.tag_name(facet) + "'");
  return &it->second;
}

}  // namespace

void postprocess_pressure(HDGSolution& sol) {
  const Mesh& mesh = *sol.mesh;
  const int k = sol.degree;
  const int m = sol.cell_dim();
  const int ms = sol.star_dim();
  const CellBasis basis_k(k);
  const CellBasis basis_s(k + 1);
  const TriangleQuadrature rule = triangle_quadrature(2 * (k + 1));

  sol.p_star.assign(
      static_cast<std::size_t>(mesh.n_cells()) * static_cast<std::size_t>(ms),
      0.0);
  std::vector<double> vals_k(static_cast<std::size_t>(m));
  std::vector<double> vals_s(static_cast<std::size_t>(ms));
  std::vector<Vec2> grads(static_cast<std::size_t>(ms));
  for (int cell = 0; cell < mesh.n_cells(); ++cell) {
    const TriFrame frame = checked_frame(mesh, cell);
    const double Km =
        sol.scenario->matrix_permeability_at(mesh.cell_centroid(cell));
    const std::span<const double> p = cell_span(sol.p, cell, m);
    const std::span<const double> ut = cell_span(sol.u_tilde, cell, 2 * m);

    Eigen::MatrixXd stiffness = Eigen::MatrixXd::Zero(ms, ms);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(ms);
    Eigen::VectorXd basis_integrals = Eigen::VectorXd::Zero(ms);
    double p_integral = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const Vec2 r = rule.points[q];
      const double w = rule.weights[q] * frame.det;
      basis_k.eval(r, vals_k);
      basis_s.eval(r, vals_s);
      basis_s.eval_gradients(r, grads);
      for (int i = 0; i < ms; ++i)
        grads[static_cast<std::size_t>(i)] =
            frame.gradient_to_physical(grads[static_cast<std::size_t>(i)]);
      const Vec2 u_tilde = eval_vector(ut, vals_k);
      for (int i = 0; i < ms; ++i) {
        const Vec2 gi = grads[static_cast<std::size_t>(i)];
        rhs(i) -= w * dot(u_tilde, gi) / Km;
        basis_integrals(i) += w * vals_s[static_cast<std::size_t>(i)];
        for (int j = 0; j < ms; ++j)
          stiffness(i, j) += w * dot(gi, grads[static_cast<std::size_t>(j)]);
      }
      p_integral += w * eval_scalar(p, vals_k);
    }

    // The first basis function is the constant, so its stiffness row and
    // column vanish; solve for the nonconstant part and pin the mean.
    Eigen::LLT<Eigen::MatrixXd> llt(
        stiffness.block(1, 1, ms - 1, ms - 1).eval());
    if (llt.info() != Eigen::Success)
      throw NumericalError("postprocess: singular local gradient system on "
                           "cell " +
                           std::to_string(cell));
    const Eigen::VectorXd tail = llt.solve(rhs.segment(1, ms - 1));
    double weighted = 0.0;
    for (int i = 1; i < ms; ++i) weighted += basis_integrals(i) * tail(i - 1);
    const double head = (p_integral - weighted) / basis_integrals(0);
    double* out = sol.p_star.data() + static_cast<std::size_t>(cell) *
                                          static_cast<std::size_t>(ms);
    out[0] = head;
    for (int i = 1; i < ms; ++i) out[i] = tail(i - 1);
  }
}

std::vector<LineSample> sample_line(const HDGSolution& sol, Vec2 a, Vec2 b,
                                    int n) {
  if (n < 2) throw ConfigError("sample_line: need at least 2 samples");
  if (sol.p_star.empty())
    throw ConfigError("sample_line: postprocessed pressure missing");
  const Mesh& mesh = *sol.mesh;
  const int ms = sol.star_dim();
  const CellBasis basis_s(sol.degree + 1);
  std::vector<double> vals(static_cast<std::size_t>(ms));
  const double total = dist(a, b);

  std::vector<TriFrame> frames;
  frames.reserve(static_cast<std::size_t>(mesh.n_cells()));
  for (int cell = 0; cell < mesh.n_cells(); ++cell)
    frames.push_back(checked_frame(mesh, cell));

  std::vector<LineSample> samples;
  samples.reserve(static_cast<std::size_t>(n));
  constexpr double tol = 1e-10;
  for (int i = 0; i < n; ++i) {
    const double lambda = static_cast<double>(i) / (n - 1);
    const Vec2 x = a + lambda * (b - a);
    int owner = -1;
    Vec2 ref{};
    for (int cell = 0; cell < mesh.n_cells(); ++cell) {
      const Vec2 r = frames[static_cast<std::size_t>(cell)].to_reference(x);
      if (r.x >= -tol && r.y >= -tol && r.x + r.y <= 1.0 + tol) {
        owner = cell;
        ref = r;
        break;
      }
    }
    if (owner < 0)
      throw ConfigError("sample_line: point outside the mesh");
    basis_s.eval(ref, vals);
    samples.push_back(
        {lambda * total, x, eval_scalar(cell_span(sol.p_star, owner, ms), vals)});
  }
  return samples;
}

std::vector<double> conservation_residuals(const HDGSolution& sol) {
  const Mesh& mesh = *sol.mesh;
  const int k = sol.degree;
  const int m = sol.cell_dim();
  const int nf1 = sol.facet_dim();
  const CellBasis basis(k);
  const FacetBasis facet_basis(k);
  const TriangleQuadrature vol_rule = triangle_quadrature(2 * k + 2);
  const SegmentQuadrature facet_rule =
      segment_quadrature(std::max(1, 2 * k + 1));

  std::vector<double> residuals(static_cast<std::size_t>(mesh.n_cells()), 0.0);
  std::vector<double> vals(static_cast<std::size_t>(m));
  std::vector<double> fvals(static_cast<std::size_t>(nf1));
  for (int cell = 0; cell < mesh.n_cells(); ++cell) {
    const TriFrame frame = checked_frame(mesh, cell);
    const std::span<const double> u = cell_span(sol.u, cell, 2 * m);
    const std::span<const double> p = cell_span(sol.p, cell, m);
    const double alpha = sol.alpha[static_cast<std::size_t>(cell)];
    double r = 0.0;
    for (std::size_t q = 0; q < vol_rule.points.size(); ++q)
      r -= vol_rule.weights[q] * frame.det *
           sol.scenario->source.eval(frame.to_physical(vol_rule.points[q]));
    for (int lf = 0; lf < 3; ++lf) {
      const int fid =
          mesh.cell_facets[static_cast<std::size_t>(cell)][static_cast<std::size_t>(lf)];
      const Vec2 n = mesh.facet_outward_normal(fid, cell);
      const double len = mesh.facet_length(fid);
      for (std::size_t q = 0; q < facet_rule.points.size(); ++q) {
        const double t = facet_rule.points[q];
        const double w = facet_rule.weights[q] * len;
        const Vec2 x = mesh.facet_point(fid, t);
        basis.eval(frame.to_reference(x), vals);
        facet_basis.eval(t, fvals);
        const Vec2 uval = eval_vector(u, vals);
        const double pval = eval_scalar(p, vals);
        double phat = 0.0;
        for (int l = 0; l < nf1; ++l)
          phat += sol.p_hat[static_cast<std::size_t>(fid * nf1 + l)] *
                  fvals[static_cast<std::size_t>(l)];
        r += w * (dot(uval, n) + alpha * (pval - phat));
      }
    }
    residuals[static_cast<std::size_t>(cell)] = r;
  }
  return residuals;
}

double energy(const HDGSolution& sol) {
  const Mesh& mesh = *sol.mesh;
  const int k = sol.degree;
  const int m = sol.cell_dim();
  const CellBasis basis(k);
  const TriangleQuadrature vol_rule = triangle_quadrature(2 * k + 2);
  const SegmentQuadrature cut_rule =
      segment_quadrature(std::max(1, 2 * k + 1));

  double e = 0.0;
  std::vector<double> vals(static_cast<std::size_t>(m));
  for (int cell = 0; cell < mesh.n_cells(); ++cell) {
    const TriFrame frame = checked_frame(mesh, cell);
    const double Km =
        sol.scenario->matrix_permeability_at(mesh.cell_centroid(cell));
    const CellClass cls = sol.classes->class_of[static_cast<std::size_t>(cell)];
    const std::span<const double> field = cell_span(
        cls == CellClass::conductive ? sol.u_tilde : sol.u, cell, 2 * m);
    for (std::size_t q = 0; q < vol_rule.points.size(); ++q) {
      const double w = vol_rule.weights[q] * frame.det;
      basis.eval(vol_rule.points[q], vals);
      const Vec2 v = eval_vector(field, vals);
      e += w * dot(v, v) / Km;
    }
    for (const FractureCut& cut :
         sol.classes->cuts[static_cast<std::size_t>(cell)]) {
      const FractureSpec& spec =
          sol.scenario->fractures[static_cast<std::size_t>(cut.fracture)];
      const Vec2 n = spec.normal();
      for (std::size_t q = 0; q < cut_rule.points.size(); ++q) {
        const double w = cut_rule.weights[q] * cut.length;
        const Vec2 x = cut.p0 + cut_rule.points[q] * (cut.p1 - cut.p0);
        basis.eval(frame.to_reference(x), vals);
        if (spec.kind == FractureKind::blocking) {
          const Vec2 uval = eval_vector(field, vals);
          const double un = dot(uval, n);
          e += w * spec.thickness / spec.permeability * un * un;
        } else {
          const Vec2 utval = eval_vector(field, vals);
          const Vec2 tangential = utval - dot(utval, n) * n;
          e += w * spec.thickness * spec.permeability / (Km * Km) *
               dot(tangential, tangential);
        }
      }
    }
  }
  return e;
}

double energy_residual(const HDGSolution& sol) {
  const Mesh& mesh = *sol.mesh;
  const int k = sol.degree;
  const int m = sol.cell_dim();
  const int nf1 = sol.facet_dim();
  const CellBasis basis(k);
  const FacetBasis facet_basis(k);
  const TriangleQuadrature vol_rule = triangle_quadrature(2 * k + 2);
  const SegmentQuadrature facet_rule =
      segment_quadrature(std::max(1, 2 * k + 1));
  const SegmentQuadrature data_rule =
      segment_quadrature(boundary_data_exactness(k));

  double jump = 0.0;       // <alpha (p - phat), (p - phat)>
  double source_work = 0.0;  // (f, p)
  double dirichlet_work = 0.0;  // <u^.n, phat> on Dirichlet facets
  double neumann_work = 0.0;    // <g, phat> on Neumann facets
  std::vector<double> vals(static_cast<std::size_t>(m));
  std::vector<double> fvals(static_cast<std::size_t>(nf1));
  for (int cell = 0; cell < mesh.n_cells(); ++cell) {
    const TriFrame frame = checked_frame(mesh, cell);
    const std::span<const double> u = cell_span(sol.u, cell, 2 * m);
    const std::span<const double> p = cell_span(sol.p, cell, m);
    const double alpha = sol.alpha[static_cast<std::size_t>(cell)];
    for (std::size_t q = 0; q < vol_rule.points.size(); ++q) {
      const double w = vol_rule.weights[q] * frame.det;
      basis.eval(vol_rule.points[q], vals);
      source_work +=
          w * sol.scenario->source.eval(frame.to_physical(vol_rule.points[q])) *
          eval_scalar(p, vals);
    }
    for (int lf = 0; lf < 3; ++lf) {
      const int fid =
          mesh.cell_facets[static_cast<std::size_t>(cell)][static_cast<std::size_t>(lf)];
      const Vec2 n = mesh.facet_outward_normal(fid, cell);
      const double len = mesh.facet_length(fid);
      const BoundaryCondition* bc = boundary_condition(sol, fid);
      const bool dirichlet = bc != nullptr && bc->type == BcType::dirichlet;
      for (std::size_t q = 0; q < facet_rule.points.size(); ++q) {
        const double t = facet_rule.points[q];
        const double w = facet_rule.weights[q] * len;
        const Vec2 x = mesh.facet_point(fid, t);
        basis.eval(frame.to_reference(x), vals);
        facet_basis.eval(t, fvals);
        const double pval = eval_scalar(p, vals);
        double phat = 0.0;
        for (int l = 0; l < nf1; ++l)
          phat += sol.p_hat[static_cast<std::size_t>(fid * nf1 + l)] *
                  fvals[static_cast<std::size_t>(l)];
        const double diff = pval - phat;
        jump += w * alpha * diff * diff;
        if (dirichlet) {
          const double flux = dot(eval_vector(u, vals), n) + alpha * diff;
          dirichlet_work += w * flux * phat;
        }
      }
    }
  }
  for (int f = 0; f < mesh.n_facets(); ++f) {
    const BoundaryCondition* bc = boundary_condition(sol, f);
    if (bc == nullptr || bc->type != BcType::neumann) continue;
    const double len = mesh.facet_length(f);
    for (std::size_t q = 0; q < data_rule.points.size(); ++q) {
      const double t = data_rule.points[q];
      const double g = bc->eval(mesh.facet_point(f, t));
      facet_basis.eval(t, fvals);
      double phat = 0.0;
      for (int l = 0; l < nf1; ++l)
        phat += sol.p_hat[static_cast<std::size_t>(f * nf1 + l)] *
                fvals[static_cast<std::size_t>(l)];
      neumann_work += len * data_rule.weights[q] * g * phat;
    }
  }
  return energy(sol) + jump - source_work + dirichlet_work + neumann_work;
}

double boundary_flux(const HDGSolution& sol, const std::string& tag) {
  const Mesh& mesh = *sol.mesh;
  int tag_index = -1;
  for (std::size_t i = 0; i < mesh.boundary_names.size(); ++i)
    if (mesh.boundary_names[i] == tag) tag_index = static_cast<int>(i);
  if (tag_index < 0)
    throw ConfigError("boundary_flux: unknown boundary tag '" + tag + "'");

  const int k = sol.degree;
  const int m = sol.cell_dim();
  const int nf1 = sol.facet_dim();
  const CellBasis basis(k);
  const FacetBasis facet_basis(k);
  const SegmentQuadrature facet_rule =
      segment_quadrature(std::max(1, 2 * k + 1));
  std::vector<double> vals(static_cast<std::size_t>(m));
  std::vector<double> fvals(static_cast<std::size_t>(nf1));

  double flux = 0.0;
  for (int f = 0; f < mesh.n_facets(); ++f) {
    if (mesh.facet_tag[static_cast<std::size_t>(f)] != tag_index) continue;
    const int cell = mesh.facets[static_cast<std::size_t>(f)].cells[0];
    const TriFrame frame = checked_frame(mesh, cell);
    const Vec2 n = mesh.facet_outward_normal(f, cell);
    const double len = mesh.facet_length(f);
    const std::span<const double> u = cell_span(sol.u, cell, 2 * m);
    const std::span<const double> p = cell_span(sol.p, cell, m);
    const double alpha = sol.alpha[static_cast<std::size_t>(cell)];
    for (std::size_t q = 0; q < facet_rule.points.size(); ++q) {
      const double t = facet_rule.points[q];
      const double w = facet_rule.weights[q] * len;
      basis.eval(frame.to_reference(mesh.facet_point(f, t)), vals);
      facet_basis.eval(t, fvals);
      double phat = 0.0;
      for (int l = 0; l < nf1; ++l)
        phat += sol.p_hat[static_cast<std::size_t>(f * nf1 + l)] *
                fvals[static_cast<std::size_t>(l)];
      flux += w * (dot(eval_vector(u, vals), n) +
                   alpha * (eval_scalar(p, vals) - phat));
    }
  }
  return flux;
}

namespace {

template <typename EvalError>
double l2_norm_of_error(const HDGSolution& sol, EvalError&& pointwise_sq) {
  const Mesh& mesh = *sol.mesh;
  const TriangleQuadrature rule = triangle_quadrature(6);
  double total = 0.0;
  for (int cell = 0; cell < mesh.n_cells(); ++cell) {
    const TriFrame frame = checked_frame(mesh, cell);
    for (std::size_t q = 0; q < rule.points.size(); ++q)
      total += rule.weights[q] * frame.det *
               pointwise_sq(cell, rule.points[q], frame.to_physical(rule.points[q]));
  }
  return std::sqrt(total);
}

}  // namespace

double l2_error_p_star(const HDGSolution& sol,
                       const std::function<double(Vec2)>& exact) {
  if (sol.p_star.empty())
    throw ConfigError("l2_error_p_star: postprocessed pressure missing");
  const int ms = sol.star_dim();
  const CellBasis basis_s(sol.degree + 1);
  std::vector<double> vals(static_cast<std::size_t>(ms));
  return l2_norm_of_error(sol, [&](int cell, Vec2 r, Vec2 x) {
    basis_s.eval(r, vals);
    const double d = eval_scalar(cell_span(sol.p_star, cell, ms), vals) -
                     exact(x);
    return d * d;
  });
}

double l2_error_p(const HDGSolution& sol,
                  const std::function<double(Vec2)>& exact) {
  const int m = sol.cell_dim();
  const CellBasis basis(sol.degree);
  std::vector<double> vals(static_cast<std::size_t>(m));
  return l2_norm_of_error(sol, [&](int cell, Vec2 r, Vec2 x) {
    basis.eval(r, vals);
    const double d = eval_scalar(cell_span(sol.p, cell, m), vals) - exact(x);
    return d * d;
  });
}

double l2_error_u(const HDGSolution& sol,
                  const std::function<Vec2(Vec2)>& exact) {
  const int m = sol.cell_dim();
  const CellBasis basis(sol.degree);
  std::vector<double> vals(static_cast<std::size_t>(m));
  return l2_norm_of_error(sol, [&](int cell, Vec2 r, Vec2 x) {
    basis.eval(r, vals);
    const Vec2 d = eval_vector(cell_span(sol.u, cell, 2 * m), vals) - exact(x);
    return dot(d, d);
  });
}

double eval_p_star(const HDGSolution& sol, int cell, Vec2 x) {
  if (cell < 0 || cell >= sol.mesh->n_cells())
    throw ConfigError("eval_p_star: cell index out of range");
  if (sol.p_star.empty())
    throw ConfigError("eval_p_star: postprocessed pressure missing");
  const int ms = sol.star_dim();
  const CellBasis basis_s(sol.degree + 1);
  std::vector<double> vals(static_cast<std::size_t>(ms));
  basis_s.eval(checked_frame(*sol.mesh, cell).to_reference(x), vals);
  return eval_scalar(cell_span(sol.p_star, cell, ms), vals);
}

Vec2 eval_u(const HDGSolution& sol, int cell, Vec2 x) {
  if (cell < 0 || cell >= sol.mesh->n_cells())
    throw ConfigError("eval_u: cell index out of range");
  const int m = sol.cell_dim();
  const CellBasis basis(sol.degree);
  std::vector<double> vals(static_cast<std::size_t>(m));
  basis.eval(checked_frame(*sol.mesh, cell).to_reference(x), vals);
  return eval_vector(cell_span(sol.u, cell, 2 * m), vals);
}

}  // namespace fracflow
