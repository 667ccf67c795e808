#include "fracflow/quadrature.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "fracflow/errors.hpp"

namespace fracflow {

namespace {

// Nodes and weights of a Gauss rule from the three-term recurrence of the
// orthogonal polynomials (Golub-Welsch): eigenvalues of the symmetric
// tridiagonal recurrence matrix are the nodes, mu0 times the squared first
// eigenvector components the weights.
void golub_welsch(const std::vector<double>& diag,
                  const std::vector<double>& offdiag, double mu0,
                  std::vector<double>& nodes, std::vector<double>& weights) {
  const int n = static_cast<int>(diag.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = diag[static_cast<std::size_t>(i)];
    if (i + 1 < n) {
      J(i, i + 1) = offdiag[static_cast<std::size_t>(i)];
      J(i + 1, i) = offdiag[static_cast<std::size_t>(i)];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  nodes.resize(static_cast<std::size_t>(n));
  weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    nodes[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
  }
}

// Legendre weight on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  std::vector<double> diag(static_cast<std::size_t>(n), 0.0);
  std::vector<double> off;
  for (int k = 1; k < n; ++k)
    off.push_back(std::sqrt(static_cast<double>(k) * k /
                            (4.0 * k * k - 1.0)));
  golub_welsch(diag, off, 2.0, nodes, weights);
}

// Jacobi weight (1 - x) on [-1, 1], as needed by the collapsed triangle map.
void gauss_jacobi10(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  std::vector<double> diag, off;
  for (int k = 0; k < n; ++k)
    diag.push_back(-1.0 / ((2.0 * k + 1.0) * (2.0 * k + 3.0)));
  for (int k = 1; k < n; ++k) {
    const double b = static_cast<double>(k) * (k + 1.0) /
                     ((2.0 * k + 1.0) * (2.0 * k + 1.0));
    off.push_back(std::sqrt(b));
  }
  golub_welsch(diag, off, 2.0, nodes, weights);
}

int points_for(int exactness) { return (exactness + 2) / 2; }

}  // namespace

SegmentQuadrature segment_quadrature(int exactness) {
  if (exactness < 1 || exactness > 6)
    throw ConfigError("segment_quadrature: exactness must be in 1..6");
  std::vector<double> nodes, weights;
  gauss_legendre(points_for(exactness), nodes, weights);
  SegmentQuadrature q;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    q.points.push_back(0.5 * (nodes[i] + 1.0));
    q.weights.push_back(0.5 * weights[i]);
  }
  return q;
}

TriangleQuadrature triangle_quadrature(int exactness) {
  if (exactness < 1 || exactness > 6)
    throw ConfigError("triangle_quadrature: exactness must be in 1..6");
  const int n = points_for(exactness);
  std::vector<double> an, aw, bn, bw;
  gauss_legendre(n, an, aw);
  gauss_jacobi10(n, bn, bw);

  // Duffy map of the square onto the triangle:
  //   x = (1+a)(1-b)/4, y = (1+b)/2, dx dy = (1-b)/8 da db,
  // with the (1-b) factor absorbed into the Jacobi rule. A polynomial of
  // total degree d has degree <= d in both a and b, so n points per
  // direction are exact for d <= 2n-1. All weights are positive.
  TriangleQuadrature q;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double a = an[static_cast<std::size_t>(i)];
      const double b = bn[static_cast<std::size_t>(j)];
      q.points.push_back({0.25 * (1.0 + a) * (1.0 - b), 0.5 * (1.0 + b)});
      q.weights.push_back(aw[static_cast<std::size_t>(i)] *
                          bw[static_cast<std::size_t>(j)] / 8.0);
    }
  }
  return q;
}

}  // namespace fracflow
