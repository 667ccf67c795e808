#pragma once

#include <span>

#include <Eigen/Dense>

#include "fracflow/geometry2d.hpp"

namespace fracflow {

/// L2-orthonormal polynomial basis on the reference triangle, built by
/// Cholesky orthonormalization of the monomials (the Gram matrix is exact:
/// integral of x^i y^j over the reference triangle is i! j! / (i+j+2)!).
/// The first function is the constant sqrt(2). Degrees 0..3 are supported;
/// degree 3 exists for the postprocessed pressure space P_{k+1}.
class CellBasis {
 public:
  explicit CellBasis(int degree);

  int degree() const { return degree_; }
  int dim() const { return dim_; }

  /// Values of all basis functions at a reference point.
  void eval(Vec2 xhat, std::span<double> values) const;
  /// Reference gradients of all basis functions.
  void eval_gradients(Vec2 xhat, std::span<Vec2> gradients) const;

 private:
  int degree_;
  int dim_;
  Eigen::MatrixXd coeff_;  // dim x n_monomials
};

/// Orthonormal (shifted Legendre) basis on the reference segment [0, 1],
/// degrees 0..2. Facet mass matrices are |F| times the identity up to
/// roundoff; nothing downstream relies on that.
class FacetBasis {
 public:
  explicit FacetBasis(int degree);

  int degree() const { return degree_; }
  int dim() const { return degree_ + 1; }

  void eval(double t, std::span<double> values) const;

 private:
  int degree_;
};

inline int cell_space_dim(int degree) {
  return (degree + 1) * (degree + 2) / 2;
}

}  // namespace fracflow
