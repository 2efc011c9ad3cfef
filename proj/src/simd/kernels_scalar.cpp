#include "chs/simd.hpp"

namespace chs::simd {
namespace {

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void axpby_scalar(double a, const double* x, double b, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

void rotate_scalar(double* x, double* y, std::size_t n, double c, double s) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    const double yi = y[i];
    x[i] = c * xi - s * yi;
    y[i] = s * xi + c * yi;
  }
}

void csr_spmv_scalar(std::size_t n_rows, const std::size_t* row_ptr, const std::size_t* col,
                     const double* val, const double* x, double* y) {
  for (std::size_t i = 0; i < n_rows; ++i) {
    double s = 0.0;
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Backend::scalar, dot_scalar,    axpy_scalar,
                                 axpby_scalar,    rotate_scalar, csr_spmv_scalar};
  return table;
}

}  // namespace chs::simd
