#include "fracflow/basis.hpp"

#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "fracflow/errors.hpp"

namespace fracflow {

namespace {

constexpr int kMaxMonomials = 10;  // complete polynomials up to degree 3

struct Monomial {
  int i, j;  // x^i y^j
};

// Graded ordering so the first (k+1)(k+2)/2 monomials span P_k.
constexpr std::array<Monomial, kMaxMonomials> kMonomials = {{
    {0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}, {3, 0}, {2, 1}, {1, 2},
    {0, 3},
}};

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Exact monomial moment on the reference triangle {x,y >= 0, x+y <= 1}:
//   integral of x^i y^j = i! j! / (i+j+2)!.
double reference_moment(int i, int j) {
  return factorial(i) * factorial(j) / factorial(i + j + 2);
}

// Rows express L^2-orthonormal functions in the monomial basis. The Gram
// matrix is assembled from exact moments and Cholesky-factored once; since
// the monomials are graded, the leading principal blocks serve every degree.
const Eigen::MatrixXd& orthonormal_coefficients() {
  static const Eigen::MatrixXd coeff = [] {
    Eigen::MatrixXd gram(kMaxMonomials, kMaxMonomials);
    for (int a = 0; a < kMaxMonomials; ++a)
      for (int b = 0; b < kMaxMonomials; ++b)
        gram(a, b) = reference_moment(
            kMonomials[static_cast<std::size_t>(a)].i +
                kMonomials[static_cast<std::size_t>(b)].i,
            kMonomials[static_cast<std::size_t>(a)].j +
                kMonomials[static_cast<std::size_t>(b)].j);
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success)
      throw NumericalError("cell basis: Gram matrix factorization failed");
    // C = L^{-1}: then C G C^T = I, and C is lower triangular, so the
    // first function is a constant and degrees nest.
    Eigen::MatrixXd c = Eigen::MatrixXd::Identity(kMaxMonomials, kMaxMonomials);
    llt.matrixL().solveInPlace(c);
    return c;
  }();
  return coeff;
}

void monomial_values(Vec2 x, std::array<double, kMaxMonomials>& out) {
  const double xs[4] = {1.0, x.x, x.x * x.x, x.x * x.x * x.x};
  const double ys[4] = {1.0, x.y, x.y * x.y, x.y * x.y * x.y};
  for (int m = 0; m < kMaxMonomials; ++m)
    out[static_cast<std::size_t>(m)] =
        xs[kMonomials[static_cast<std::size_t>(m)].i] *
        ys[kMonomials[static_cast<std::size_t>(m)].j];
}

void monomial_gradients(Vec2 x, std::array<Vec2, kMaxMonomials>& out) {
  const double xs[4] = {1.0, x.x, x.x * x.x, x.x * x.x * x.x};
  const double ys[4] = {1.0, x.y, x.y * x.y, x.y * x.y * x.y};
  for (int m = 0; m < kMaxMonomials; ++m) {
    const int i = kMonomials[static_cast<std::size_t>(m)].i;
    const int j = kMonomials[static_cast<std::size_t>(m)].j;
    out[static_cast<std::size_t>(m)] = {
        i > 0 ? i * xs[i - 1] * ys[j] : 0.0,
        j > 0 ? j * xs[i] * ys[j - 1] : 0.0,
    };
  }
}

}  // namespace

CellBasis::CellBasis(int degree) : degree_(degree), dim_(0) {
  if (degree < 0 || degree > 3)
    throw ConfigError("cell basis: degree must be in 0..3");
  dim_ = cell_space_dim(degree);
  coeff_ = orthonormal_coefficients().topLeftCorner(dim_, dim_);
}

void CellBasis::eval(Vec2 x, std::span<double> values) const {
  const int dim = static_cast<int>(coeff_.rows());
  if (static_cast<int>(values.size()) != dim)
    throw ConfigError("cell basis: wrong output size");
  std::array<double, kMaxMonomials> mono{};
  monomial_values(x, mono);
  for (int r = 0; r < dim; ++r) {
    double s = 0.0;
    for (int c = 0; c <= r; ++c)  // lower triangular coefficients
      s += coeff_(r, c) * mono[static_cast<std::size_t>(c)];
    values[static_cast<std::size_t>(r)] = s;
  }
}

void CellBasis::eval_gradients(Vec2 x, std::span<Vec2> gradients) const {
  const int dim = static_cast<int>(coeff_.rows());
  if (static_cast<int>(gradients.size()) != dim)
    throw ConfigError("cell basis: wrong output size");
  std::array<Vec2, kMaxMonomials> mono{};
  monomial_gradients(x, mono);
  for (int r = 0; r < dim; ++r) {
    Vec2 g{0.0, 0.0};
    for (int c = 0; c <= r; ++c) {
      g.x += coeff_(r, c) * mono[static_cast<std::size_t>(c)].x;
      g.y += coeff_(r, c) * mono[static_cast<std::size_t>(c)].y;
    }
    gradients[static_cast<std::size_t>(r)] = g;
  }
}

FacetBasis::FacetBasis(int degree) : degree_(degree) {
  if (degree < 0 || degree > 2)
    throw ConfigError("facet basis: degree must be in 0..2");
}

void FacetBasis::eval(double t, std::span<double> values) const {
  if (static_cast<int>(values.size()) != degree_ + 1)
    throw ConfigError("facet basis: wrong output size");
  // Shifted Legendre polynomials, orthonormal in L^2(0, 1).
  values[0] = 1.0;
  if (degree_ >= 1) values[1] = std::sqrt(3.0) * (2.0 * t - 1.0);
  if (degree_ >= 2) values[2] = std::sqrt(5.0) * (6.0 * t * t - 6.0 * t + 1.0);
}

}  // namespace fracflow
