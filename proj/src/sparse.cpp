#include "fracflow/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "fracflow/errors.hpp"
#include "fracflow/kernels.hpp"

namespace fracflow {

SparseSym SparseSym::from_triplets(int n, std::vector<Triplet> triplets) {
  if (n < 0) throw ConfigError("sparse matrix: negative dimension");
  for (const Triplet& t : triplets)
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n)
      throw ConfigError("sparse matrix: triplet index out of range");

  std::sort(triplets.begin(), triplets.end(),
            [](const Triplet& a, const Triplet& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });

  SparseSym m;
  m.n = n;
  m.row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  std::size_t i = 0;
  while (i < triplets.size()) {
    const int r = triplets[i].row;
    const int c = triplets[i].col;
    double v = triplets[i].value;
    ++i;
    while (i < triplets.size() && triplets[i].row == r && triplets[i].col == c) {
      v += triplets[i].value;
      ++i;
    }
    m.col.push_back(c);
    m.val.push_back(v);
    ++m.row_ptr[static_cast<std::size_t>(r) + 1];
  }
  for (int r = 0; r < n; ++r)
    m.row_ptr[static_cast<std::size_t>(r) + 1] +=
        m.row_ptr[static_cast<std::size_t>(r)];
  return m;
}

std::vector<double> SparseSym::diagonal() const {
  std::vector<double> d(static_cast<std::size_t>(n), 0.0);
  for (int r = 0; r < n; ++r) {
    for (int k = row_ptr[static_cast<std::size_t>(r)];
         k < row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
      if (col[static_cast<std::size_t>(k)] == r) {
        d[static_cast<std::size_t>(r)] = val[static_cast<std::size_t>(k)];
        break;
      }
    }
  }
  return d;
}

void SparseSym::symmetry_defect(double* defect, double* scale) const {
  double d = 0.0, s = 0.0;
  for (int r = 0; r < n; ++r) {
    for (int k = row_ptr[static_cast<std::size_t>(r)];
         k < row_ptr[static_cast<std::size_t>(r) + 1]; ++k) {
      const int c = col[static_cast<std::size_t>(k)];
      const double v = val[static_cast<std::size_t>(k)];
      s = std::max(s, std::abs(v));
      // Binary search for (c, r); a missing transpose entry counts fully.
      const int lo = row_ptr[static_cast<std::size_t>(c)];
      const int hi = row_ptr[static_cast<std::size_t>(c) + 1];
      const int* begin = col.data() + lo;
      const int* end = col.data() + hi;
      const int* it = std::lower_bound(begin, end, r);
      const double vt = (it != end && *it == r)
                            ? val[static_cast<std::size_t>(lo + (it - begin))]
                            : 0.0;
      d = std::max(d, std::abs(v - vt));
    }
  }
  if (defect) *defect = d;
  if (scale) *scale = s;
}

void SparseSym::multiply(const double* x, double* y) const {
  kernels::spmv(n, row_ptr.data(), col.data(), val.data(), x, y);
}

}  // namespace fracflow
