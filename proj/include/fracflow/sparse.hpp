#pragma once

#include <cstdint>
#include <vector>

namespace fracflow {

struct Triplet {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Symmetric sparse matrix in CSR format with both triangles stored.
struct SparseSym {
  int n = 0;
  std::vector<int> row_ptr;  // size n+1
  std::vector<int> col;
  std::vector<double> val;

  std::size_t nnz() const { return val.size(); }

  /// Builds CSR from triplets: duplicates are summed, columns sorted.
  /// Entry order is deterministic.
  static SparseSym from_triplets(int n, std::vector<Triplet> triplets);

  std::vector<double> diagonal() const;
  /// max_ij |A - A^T| and max_ij |A|, for the symmetry check.
  void symmetry_defect(double* defect, double* scale) const;
  void multiply(const double* x, double* y) const;
};

}  // namespace fracflow
