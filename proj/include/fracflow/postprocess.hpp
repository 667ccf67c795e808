#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fracflow/solution.hpp"

namespace fracflow {

/// Element-local postprocessed pressure p* in P_{k+1}: on every cell
///   (grad p*, grad q) = -(K^-1 u_tilde, grad q)   for all q in P_{k+1},
///   mean of p* = mean of p.
/// Fills sol.p_star.
void postprocess_pressure(HDGSolution& sol);

struct LineSample {
  double s = 0.0;  // arc length along the cut
  Vec2 point;
  double value = 0.0;
};

/// p* sampled at n equispaced points of the segment [a, b] (endpoints
/// included). Points on shared edges evaluate from the lower cell id;
/// points outside the mesh are an error.
std::vector<LineSample> sample_line(const HDGSolution& sol, Vec2 a, Vec2 b,
                                    int n);

/// Per-cell conservation residual
///   r_K = int_dK (u.n + alpha (p - phat)) ds - int_K f dx,
/// computed with the assembly quadrature so that exact local conservation
/// shows up as solver-level roundoff.
std::vector<double> conservation_residuals(const HDGSolution& sol);

/// Residual of the discrete energy identity
///   E(u, ut) + <alpha (p - phat), (p - phat)> = (f, p)
///             - <u^.n, phat>_Dirichlet - <g, phat>_Neumann,
/// where E is the nonnegative class-wise energy (matrix term on regular and
/// blocking cells, matrix-velocity term on conductive cells, plus both
/// fracture surface terms). Zero boundary correction for homogeneous
/// Dirichlet data.
double energy_residual(const HDGSolution& sol);

/// The nonnegative energy E(u, ut) itself.
double energy(const HDGSolution& sol);

/// Total numerical flux int_F u^.n ds over all facets with the given tag
/// (outward normal). Unknown tags are an error.
double boundary_flux(const HDGSolution& sol, const std::string& tag);

/// L2 errors against reference fields, integrated with the order-6 rule.
double l2_error_p_star(const HDGSolution& sol,
                       const std::function<double(Vec2)>& exact);
double l2_error_p(const HDGSolution& sol,
                  const std::function<double(Vec2)>& exact);
double l2_error_u(const HDGSolution& sol,
                  const std::function<Vec2(Vec2)>& exact);

/// Evaluate the discrete fields at a physical point of a given cell.
double eval_p_star(const HDGSolution& sol, int cell, Vec2 x);
Vec2 eval_u(const HDGSolution& sol, int cell, Vec2 x);

}  // namespace fracflow
