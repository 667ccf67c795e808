#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "fracflow/basis.hpp"
#include "fracflow/errors.hpp"
#include "fracflow/quadrature.hpp"

using namespace fracflow;

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Exact monomial moment over the reference triangle {x,y>=0, x+y<=1}:
// integral of x^i y^j = i! j! / (i+j+2)!.
double triangle_moment(int i, int j) {
  return factorial(i) * factorial(j) / factorial(i + j + 2);
}

}  // namespace

TEST_CASE("triangle quadrature: classical low-order rules") {
  const TriangleQuadrature r1 = triangle_quadrature(1);
  REQUIRE(r1.size() == 1);
  CHECK(r1.points[0].x == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(r1.points[0].y == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(r1.weights[0] == doctest::Approx(0.5).epsilon(1e-14));

  const TriangleQuadrature r2 = triangle_quadrature(2);
  double xy = 0.0;
  for (int q = 0; q < r2.size(); ++q) {
    const std::size_t i = static_cast<std::size_t>(q);
    xy += r2.weights[i] * r2.points[i].x * r2.points[i].y;
  }
  CHECK(xy == doctest::Approx(1.0 / 24.0).epsilon(1e-14));
}

TEST_CASE("segment quadrature: classical two-point Gauss rule") {
  const SegmentQuadrature r = segment_quadrature(3);
  REQUIRE(r.size() == 2);
  const double lo = (1.0 - 1.0 / std::sqrt(3.0)) / 2.0;
  const double hi = (1.0 + 1.0 / std::sqrt(3.0)) / 2.0;
  CHECK(std::min(r.points[0], r.points[1]) ==
        doctest::Approx(lo).epsilon(1e-14));
  CHECK(std::max(r.points[0], r.points[1]) ==
        doctest::Approx(hi).epsilon(1e-14));
  CHECK(r.weights[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(r.weights[1] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("quadrature: declared exactness holds for every monomial") {
  for (int order = 1; order <= 6; ++order) {
    const TriangleQuadrature tri = triangle_quadrature(order);
    double wsum = 0.0;
    for (double w : tri.weights) {
      CHECK(w > 0.0);
      wsum += w;
    }
    CHECK(wsum == doctest::Approx(0.5).epsilon(1e-14));
    for (int i = 0; i + 0 <= order; ++i) {
      for (int j = 0; i + j <= order; ++j) {
        double acc = 0.0;
        for (int q = 0; q < tri.size(); ++q) {
          const std::size_t k = static_cast<std::size_t>(q);
          acc += tri.weights[k] * std::pow(tri.points[k].x, i) *
                 std::pow(tri.points[k].y, j);
        }
        CHECK(std::abs(acc - triangle_moment(i, j)) < 1e-14);
      }
    }

    const SegmentQuadrature seg = segment_quadrature(order);
    double ssum = 0.0;
    for (double w : seg.weights) {
      CHECK(w > 0.0);
      ssum += w;
    }
    CHECK(ssum == doctest::Approx(1.0).epsilon(1e-14));
    for (int i = 0; i <= order; ++i) {
      double acc = 0.0;
      for (int q = 0; q < seg.size(); ++q) {
        const std::size_t k = static_cast<std::size_t>(q);
        acc += seg.weights[k] * std::pow(seg.points[k], i);
      }
      CHECK(std::abs(acc - 1.0 / (i + 1)) < 1e-14);
    }
  }
}

TEST_CASE("quadrature: unsupported orders are rejected") {
  CHECK_THROWS_AS(triangle_quadrature(0), ConfigError);
  CHECK_THROWS_AS(triangle_quadrature(7), ConfigError);
  CHECK_THROWS_AS(segment_quadrature(0), ConfigError);
  CHECK_THROWS_AS(segment_quadrature(7), ConfigError);
}

TEST_CASE("cell basis: dimensions, orthonormality, degree-0 shape") {
  for (int k : {0, 1, 2}) {
    const CellBasis basis(k);
    const int dim = basis.dim();
    CHECK(dim == cell_space_dim(k));
    CHECK(dim == (k + 1) * (k + 2) / 2);

    // mass matrix equals the identity: the basis is L2-orthonormal on the
    // reference triangle, so it is symmetric positive definite by
    // construction
    const TriangleQuadrature rule = triangle_quadrature(std::min(6, 2 * k + 1 + 1));
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
    std::vector<double> vals(static_cast<std::size_t>(dim));
    for (int q = 0; q < rule.size(); ++q) {
      const std::size_t iq = static_cast<std::size_t>(q);
      basis.eval(rule.points[iq], vals);
      for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b)
          M(a, b) += rule.weights[iq] * vals[static_cast<std::size_t>(a)] *
                     vals[static_cast<std::size_t>(b)];
    }
    CHECK((M - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff() <
          1e-13);
  }

  // k = 0: the single function is the L2-normalized constant sqrt(2),
  // with zero gradient
  const CellBasis b0(0);
  std::array<double, 1> v{};
  std::array<Vec2, 1> g{};
  b0.eval({0.3, 0.3}, v);
  b0.eval_gradients({0.3, 0.3}, g);
  CHECK(v[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(g[0].x == 0.0);
  CHECK(g[0].y == 0.0);
}

TEST_CASE("cell basis: spans exactly the polynomials of its degree") {
  // L2-project monomials onto the span and check zero residual for degree
  // <= k (and a nonzero residual one degree up, so the space is not larger)
  for (int k : {0, 1, 2}) {
    const CellBasis basis(k);
    const int dim = basis.dim();
    const TriangleQuadrature rule = triangle_quadrature(6);
    std::vector<double> vals(static_cast<std::size_t>(dim));

    const auto residual = [&](int i, int j) {
      Eigen::VectorXd coeff = Eigen::VectorXd::Zero(dim);
      for (int q = 0; q < rule.size(); ++q) {
        const std::size_t iq = static_cast<std::size_t>(q);
        basis.eval(rule.points[iq], vals);
        const double m = std::pow(rule.points[iq].x, i) *
                         std::pow(rule.points[iq].y, j);
        for (int a = 0; a < dim; ++a)
          coeff(a) += rule.weights[iq] * m * vals[static_cast<std::size_t>(a)];
      }
      // orthonormal basis: projection coefficients are the inner products
      double r2 = 0.0;
      for (int q = 0; q < rule.size(); ++q) {
        const std::size_t iq = static_cast<std::size_t>(q);
        basis.eval(rule.points[iq], vals);
        double proj = 0.0;
        for (int a = 0; a < dim; ++a)
          proj += coeff(a) * vals[static_cast<std::size_t>(a)];
        const double m = std::pow(rule.points[iq].x, i) *
                         std::pow(rule.points[iq].y, j);
        r2 += rule.weights[iq] * (m - proj) * (m - proj);
      }
      return std::sqrt(std::max(0.0, r2));
    };

    for (int i = 0; i <= k; ++i)
      for (int j = 0; i + j <= k; ++j) CHECK(residual(i, j) < 1e-13);
    CHECK(residual(k + 1, 0) > 1e-3);
  }
}

TEST_CASE("cell basis: gradients match finite differences") {
  const double eps = 1e-6;
  for (int k : {1, 2}) {
    const CellBasis basis(k);
    const int dim = basis.dim();
    std::vector<double> vp(static_cast<std::size_t>(dim)),
        vm(static_cast<std::size_t>(dim));
    std::vector<Vec2> grad(static_cast<std::size_t>(dim));
    for (const Vec2 p : {Vec2{0.2, 0.3}, Vec2{0.5, 0.25}, Vec2{0.1, 0.7}}) {
      basis.eval_gradients(p, grad);
      basis.eval({p.x + eps, p.y}, vp);
      basis.eval({p.x - eps, p.y}, vm);
      for (int a = 0; a < dim; ++a) {
        const std::size_t ia = static_cast<std::size_t>(a);
        CHECK(grad[ia].x ==
              doctest::Approx((vp[ia] - vm[ia]) / (2 * eps)).epsilon(1e-6));
      }
      basis.eval({p.x, p.y + eps}, vp);
      basis.eval({p.x, p.y - eps}, vm);
      for (int a = 0; a < dim; ++a) {
        const std::size_t ia = static_cast<std::size_t>(a);
        CHECK(grad[ia].y ==
              doctest::Approx((vp[ia] - vm[ia]) / (2 * eps)).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("facet basis: orthonormal on the unit interval and spans P_k") {
  for (int k : {0, 1, 2}) {
    const FacetBasis basis(k);
    CHECK(basis.dim() == k + 1);
    const SegmentQuadrature rule = segment_quadrature(std::min(6, 2 * k + 2));
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(k + 1, k + 1);
    std::vector<double> vals(static_cast<std::size_t>(k + 1));
    for (int q = 0; q < rule.size(); ++q) {
      const std::size_t iq = static_cast<std::size_t>(q);
      basis.eval(rule.points[iq], vals);
      for (int a = 0; a <= k; ++a)
        for (int b = 0; b <= k; ++b)
          M(a, b) += rule.weights[iq] * vals[static_cast<std::size_t>(a)] *
                     vals[static_cast<std::size_t>(b)];
    }
    CHECK((M - Eigen::MatrixXd::Identity(k + 1, k + 1)).cwiseAbs().maxCoeff() <
          1e-13);

    // projection of t^k onto the span has zero residual
    const SegmentQuadrature fine = segment_quadrature(6);
    Eigen::VectorXd coeff = Eigen::VectorXd::Zero(k + 1);
    for (int q = 0; q < fine.size(); ++q) {
      const std::size_t iq = static_cast<std::size_t>(q);
      basis.eval(fine.points[iq], vals);
      for (int a = 0; a <= k; ++a)
        coeff(a) += fine.weights[iq] * std::pow(fine.points[iq], k) *
                    vals[static_cast<std::size_t>(a)];
    }
    double r2 = 0.0;
    for (int q = 0; q < fine.size(); ++q) {
      const std::size_t iq = static_cast<std::size_t>(q);
      basis.eval(fine.points[iq], vals);
      double proj = 0.0;
      for (int a = 0; a <= k; ++a)
        proj += coeff(a) * vals[static_cast<std::size_t>(a)];
      const double diff = std::pow(fine.points[iq], k) - proj;
      r2 += fine.weights[iq] * diff * diff;
    }
    CHECK(std::sqrt(std::max(0.0, r2)) < 1e-13);
  }
}
