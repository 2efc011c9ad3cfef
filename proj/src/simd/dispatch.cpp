#include <atomic>
#include <cstdlib>
#include <string>

#include "chs/error.hpp"
#include "chs/simd.hpp"

namespace chs::simd {

#ifndef CHS_HAVE_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

namespace {

const KernelTable* pick_default() {
  if (const char* env = std::getenv("CHS_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return &scalar_kernels();
    if (want == "avx2" && avx2_kernels() != nullptr) return avx2_kernels();
  }
  if (const KernelTable* t = avx2_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> table{pick_default()};
  return table;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void set_backend(Backend b) {
  switch (b) {
    case Backend::scalar:
      slot().store(&scalar_kernels(), std::memory_order_release);
      return;
    case Backend::avx2:
      if (const KernelTable* t = avx2_kernels()) {
        slot().store(t, std::memory_order_release);
        return;
      }
      throw InvalidArgument("AVX2 kernels are not available on this machine");
  }
}

std::vector<Backend> available_backends() {
  std::vector<Backend> out{Backend::scalar};
  if (avx2_kernels() != nullptr) out.push_back(Backend::avx2);
  return out;
}

std::string_view backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

ScopedBackend::ScopedBackend(Backend b) : previous_(active().backend) { set_backend(b); }
ScopedBackend::~ScopedBackend() { set_backend(previous_); }

}  // namespace chs::simd
