#pragma once

#include <span>
#include <vector>

#include "fracflow/sparse.hpp"

namespace fracflow {

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;  // recomputed ||b - A x|| / ||b||
};

/// Jacobi-preconditioned conjugate gradients for SPD systems.
/// tol is relative (||b - A x|| <= tol ||b||); max_iter < 0 means 20 n.
/// Throws NumericalError on nonpositive curvature (matrix not SPD, e.g. a
/// singular pure-Neumann system) or when max_iter is exhausted, with the
/// final residual in the message.
std::vector<double> solve_spd(const SparseSym& A, std::span<const double> b,
                              double tol = 1e-12, int max_iter = -1,
                              SolveReport* report = nullptr);

/// Dense Cholesky (test oracle), n <= 2000. Throws NumericalError when the
/// factorization fails (matrix not SPD).
std::vector<double> solve_dense_cholesky(const SparseSym& A,
                                         std::span<const double> b);

struct SpdCheck {
  double symmetry_defect_rel = 0.0;  // max|A - A^T| / max|A|
  bool cholesky_checked = false;     // dense factorization attempted (n <= 2000)
  bool passed = false;
};

/// Symmetry to 1e-12 relative plus, for n <= 2000, a dense Cholesky
/// factorization attempt.
SpdCheck verify_spd(const SparseSym& A);

}  // namespace fracflow
