#pragma once

// Data-parallel kernels used by the vector, sparse and dense routines.
//
// Each kernel has a portable scalar reference implementation and, on x86-64
// builds, an AVX2/FMA variant. The active table is chosen once at startup
// from the CPU feature bits; CHS_SIMD=scalar|avx2 in the environment or
// set_backend() overrides the choice. Results of the two backends agree to
// rounding (reductions use a different summation order), so a run is only
// bit-reproducible against itself on the same backend.

#include <cstddef>
#include <string_view>
#include <vector>

namespace chs::simd {

enum class Backend { scalar, avx2 };

struct KernelTable {
  Backend backend;
  double (*dot)(const double* x, const double* y, std::size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  // y = a * x + b * y
  void (*axpby)(double a, const double* x, double b, double* y, std::size_t n);
  // (x, y) <- (c*x - s*y, s*x + c*y)
  void (*rotate)(double* x, double* y, std::size_t n, double c, double s);
  // y = A x for CSR storage
  void (*csr_spmv)(std::size_t n_rows, const std::size_t* row_ptr, const std::size_t* col,
                   const double* val, const double* x, double* y);
};

const KernelTable& scalar_kernels();
// Null when the build or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

const KernelTable& active();
void set_backend(Backend b);
std::vector<Backend> available_backends();
std::string_view backend_name(Backend b);

// RAII override used by equivalence tests.
class ScopedBackend {
 public:
  explicit ScopedBackend(Backend b);
  ~ScopedBackend();
  ScopedBackend(const ScopedBackend&) = delete;
  ScopedBackend& operator=(const ScopedBackend&) = delete;

 private:
  Backend previous_;
};

}  // namespace chs::simd
