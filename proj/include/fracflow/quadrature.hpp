#pragma once

#include <vector>

#include "fracflow/geometry2d.hpp"

namespace fracflow {

/// Rule on the reference triangle {x >= 0, y >= 0, x + y <= 1}.
/// Weights are positive and sum to the reference measure 1/2.
struct TriangleQuadrature {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int size() const { return static_cast<int>(points.size()); }
};

/// Rule on the reference segment [0, 1]; weights sum to 1.
struct SegmentQuadrature {
  std::vector<double> points;
  std::vector<double> weights;
  int size() const { return static_cast<int>(points.size()); }
};

/// Gauss-Legendre rule exact for polynomials of degree <= exactness,
/// 1 <= exactness <= 6.
SegmentQuadrature segment_quadrature(int exactness);

/// Collapsed-coordinate Gauss x Gauss-Jacobi rule exact for total degree
/// <= exactness, 1 <= exactness <= 6. exactness 1 gives the one-point
/// centroid rule.
TriangleQuadrature triangle_quadrature(int exactness);

}  // namespace fracflow
