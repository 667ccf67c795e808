#pragma once

#include <cstddef>

namespace fracflow::kernels {

// Hot loops of the iterative solver. Each kernel has a scalar reference
// implementation (namespace ref) and a vectorized variant (AVX2+FMA on
// x86-64, NEON on AArch64); the public entry points dispatch once at
// startup based on what the CPU supports. Set FRACFLOW_FORCE_SCALAR=1 in
// the environment to pin the scalar path.

namespace ref {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);   // y += a x
void xpby(const double* x, double b, double* y, std::size_t n);   // y = x + b y
void hadamard(const double* x, const double* y, double* z, std::size_t n);
void spmv(int n, const int* row_ptr, const int* col, const double* val,
          const double* x, double* y);
}  // namespace ref

double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void xpby(const double* x, double b, double* y, std::size_t n);
void hadamard(const double* x, const double* y, double* z, std::size_t n);
void spmv(int n, const int* row_ptr, const int* col, const double* val,
          const double* x, double* y);

/// "avx2", "neon", or "scalar".
const char* active_isa();

}  // namespace fracflow::kernels
