#include "fracflow/kernels.hpp"

#include <cstdlib>

namespace fracflow::kernels {

namespace ref {

double dot(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void xpby(const double* x, double b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + b * y[i];
}

void hadamard(const double* x, const double* y, double* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] = x[i] * y[i];
}

void spmv(int n, const int* row_ptr, const int* col, const double* val,
          const double* x, double* y) {
  for (int r = 0; r < n; ++r) {
    double s = 0.0;
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += val[k] * x[col[k]];
    y[r] = s;
  }
}

}  // namespace ref

#ifdef FRACFLOW_HAVE_AVX2
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void xpby(const double* x, double b, double* y, std::size_t n);
void hadamard(const double* x, const double* y, double* z, std::size_t n);
void spmv(int n, const int* row_ptr, const int* col, const double* val,
          const double* x, double* y);
}  // namespace avx2
#endif

#ifdef FRACFLOW_HAVE_NEON
namespace neon {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void xpby(const double* x, double b, double* y, std::size_t n);
void hadamard(const double* x, const double* y, double* z, std::size_t n);
void spmv(int n, const int* row_ptr, const int* col, const double* val,
          const double* x, double* y);
}  // namespace neon
#endif

namespace {

struct Dispatch {
  double (*dot)(const double*, const double*, std::size_t) = &ref::dot;
  void (*axpy)(double, const double*, double*, std::size_t) = &ref::axpy;
  void (*xpby)(const double*, double, double*, std::size_t) = &ref::xpby;
  void (*hadamard)(const double*, const double*, double*, std::size_t) =
      &ref::hadamard;
  void (*spmv)(int, const int*, const int*, const double*, const double*,
               double*) = &ref::spmv;
  const char* isa = "scalar";

  Dispatch() {
#if defined(FRACFLOW_HAVE_AVX2) || defined(FRACFLOW_HAVE_NEON)
    const char* force = std::getenv("FRACFLOW_FORCE_SCALAR");
    const bool forced_scalar = force != nullptr && force[0] == '1';
#endif
#ifdef FRACFLOW_HAVE_AVX2
    if (!forced_scalar && __builtin_cpu_supports("avx2") &&
        __builtin_cpu_supports("fma")) {
      dot = &avx2::dot;
      axpy = &avx2::axpy;
      xpby = &avx2::xpby;
      hadamard = &avx2::hadamard;
      spmv = &avx2::spmv;
      isa = "avx2";
    }
#endif
#ifdef FRACFLOW_HAVE_NEON
    if (!forced_scalar) {  // AdvSIMD is architectural on AArch64
      dot = &neon::dot;
      axpy = &neon::axpy;
      xpby = &neon::xpby;
      hadamard = &neon::hadamard;
      spmv = &neon::spmv;
      isa = "neon";
    }
#endif
  }
};

const Dispatch& dispatch() {
  static const Dispatch d;
  return d;
}

}  // namespace

double dot(const double* x, const double* y, std::size_t n) {
  return dispatch().dot(x, y, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  dispatch().axpy(a, x, y, n);
}

void xpby(const double* x, double b, double* y, std::size_t n) {
  dispatch().xpby(x, b, y, n);
}

void hadamard(const double* x, const double* y, double* z, std::size_t n) {
  dispatch().hadamard(x, y, z, n);
}

void spmv(int n, const int* row_ptr, const int* col, const double* val,
          const double* x, double* y) {
  dispatch().spmv(n, row_ptr, col, val, x, y);
}

const char* active_isa() { return dispatch().isa; }

}  // namespace fracflow::kernels
