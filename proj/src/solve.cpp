#include "fracflow/solve.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include <Eigen/Dense>

#include "fracflow/errors.hpp"
#include "fracflow/kernels.hpp"

namespace fracflow {

namespace {

double norm2(const std::vector<double>& v) {
  return std::sqrt(kernels::dot(v.data(), v.data(), v.size()));
}

// ||b - A x|| computed from scratch.
double true_residual(const SparseSym& A, std::span<const double> b,
                     const std::vector<double>& x, std::vector<double>& work) {
  A.multiply(x.data(), work.data());
  double s = 0.0;
  for (std::size_t i = 0; i < work.size(); ++i) {
    const double r = b[i] - work[i];
    s += r * r;
  }
  return std::sqrt(s);
}

[[noreturn]] void fail(const char* what, int iterations, double rel_residual) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%s after %d iterations (relative residual %.3e)", what,
                iterations, rel_residual);
  throw NumericalError(buf);
}

}  // namespace

std::vector<double> solve_spd(const SparseSym& A, std::span<const double> b,
                              double tol, int max_iter, SolveReport* report) {
  const std::size_t n = static_cast<std::size_t>(A.n);
  if (b.size() != n) throw ConfigError("solve_spd: size mismatch");
  std::vector<double> x(n, 0.0);
  if (report) *report = {};
  if (n == 0) return x;

  const double norm_b =
      std::sqrt(kernels::dot(b.data(), b.data(), b.size()));
  if (norm_b == 0.0) return x;

  std::vector<double> inv_diag = A.diagonal();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(inv_diag[i] > 0.0))
      throw NumericalError(
          "solve_spd: nonpositive diagonal entry, matrix is not positive "
          "definite");
    inv_diag[i] = 1.0 / inv_diag[i];
  }

  if (max_iter < 0) max_iter = 20 * static_cast<int>(n);

  std::vector<double> r(b.begin(), b.end());
  std::vector<double> z(n), p(n), q(n);
  kernels::hadamard(inv_diag.data(), r.data(), z.data(), n);
  p = z;
  double rz = kernels::dot(r.data(), z.data(), n);

  int it = 0;
  double rel = 1.0;
  while (it < max_iter) {
    ++it;
    A.multiply(p.data(), q.data());
    const double curvature = kernels::dot(p.data(), q.data(), n);
    if (!(curvature > 0.0))
      fail("solve_spd: nonpositive curvature, matrix is not positive definite",
           it, norm2(r) / norm_b);
    const double alpha = rz / curvature;
    kernels::axpy(alpha, p.data(), x.data(), n);
    kernels::axpy(-alpha, q.data(), r.data(), n);

    if (norm2(r) <= tol * norm_b) {
      // Guard against drift of the recurrence: accept only the true residual.
      const double res = true_residual(A, b, x, q);
      rel = res / norm_b;
      if (rel <= tol) {
        if (report) *report = {it, rel};
        return x;
      }
      // Restart from the recomputed residual.
      A.multiply(x.data(), q.data());
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
      kernels::hadamard(inv_diag.data(), r.data(), z.data(), n);
      p = z;
      rz = kernels::dot(r.data(), z.data(), n);
      continue;
    }

    kernels::hadamard(inv_diag.data(), r.data(), z.data(), n);
    const double rz_next = kernels::dot(r.data(), z.data(), n);
    const double beta = rz_next / rz;
    kernels::xpby(z.data(), beta, p.data(), n);
    rz = rz_next;
  }
  fail("solve_spd: no convergence", it, true_residual(A, b, x, q) / norm_b);
}

std::vector<double> solve_dense_cholesky(const SparseSym& A,
                                         std::span<const double> b) {
  if (A.n > 2000)
    throw ConfigError("solve_dense_cholesky: n must be at most 2000");
  const std::size_t n = static_cast<std::size_t>(A.n);
  if (b.size() != n) throw ConfigError("solve_dense_cholesky: size mismatch");
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(A.n, A.n);
  for (int r = 0; r < A.n; ++r)
    for (int k = A.row_ptr[static_cast<std::size_t>(r)];
         k < A.row_ptr[static_cast<std::size_t>(r) + 1]; ++k)
      dense(r, A.col[static_cast<std::size_t>(k)]) =
          A.val[static_cast<std::size_t>(k)];
  Eigen::LLT<Eigen::MatrixXd> llt(dense);
  if (llt.info() != Eigen::Success)
    throw NumericalError(
        "solve_dense_cholesky: factorization failed, matrix is not positive "
        "definite");
  Eigen::VectorXd rhs(A.n);
  for (std::size_t i = 0; i < n; ++i) rhs(static_cast<int>(i)) = b[i];
  const Eigen::VectorXd sol = llt.solve(rhs);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = sol(static_cast<int>(i));
  return x;
}

SpdCheck verify_spd(const SparseSym& A) {
  SpdCheck check;
  double defect = 0.0, scale = 0.0;
  A.symmetry_defect(&defect, &scale);
  check.symmetry_defect_rel = scale > 0.0 ? defect / scale : 0.0;
  check.passed = check.symmetry_defect_rel <= 1e-12;
  if (A.n <= 2000) {
    check.cholesky_checked = true;
    Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(A.n, A.n);
    for (int r = 0; r < A.n; ++r)
      for (int k = A.row_ptr[static_cast<std::size_t>(r)];
           k < A.row_ptr[static_cast<std::size_t>(r) + 1]; ++k)
        dense(r, A.col[static_cast<std::size_t>(k)]) =
            A.val[static_cast<std::size_t>(k)];
    Eigen::LLT<Eigen::MatrixXd> llt(dense);
    if (llt.info() != Eigen::Success) check.passed = false;
  }
  return check;
}

}  // namespace fracflow
