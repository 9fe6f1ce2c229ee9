#include <atomic>
#include <cassert>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"
#include "stackfit/error.hpp"
#include "stackfit/kernels.hpp"

namespace stackfit::kernels {
namespace {

constexpr KernelTable kScalarTable{&scalar::axpy, &scalar::scale, &scalar::correlate};
#if defined(STACKFIT_HAVE_AVX2)
constexpr KernelTable kAvx2Table{&avx2::axpy, &avx2::scale, &avx2::correlate};
#endif
#if defined(STACKFIT_HAVE_NEON)
constexpr KernelTable kNeonTable{&neon::axpy, &neon::scale, &neon::correlate};
#endif

const KernelTable* table_for(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar:
      return &kScalarTable;
    case Backend::Avx2:
#if defined(STACKFIT_HAVE_AVX2)
      return &kAvx2Table;
#else
      return nullptr;
#endif
    case Backend::Neon:
#if defined(STACKFIT_HAVE_NEON)
      return &kNeonTable;
#else
      return nullptr;
#endif
  }
  return nullptr;
}

Backend detect_default() noexcept {
  if (const char* env = std::getenv("STACKFIT_SIMD")) {
    const std::string want(env);
    for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon}) {
      if (want == to_string(b) && backend_supported(b)) return b;
    }
  }
  if (backend_supported(Backend::Avx2)) return Backend::Avx2;
  if (backend_supported(Backend::Neon)) return Backend::Neon;
  return Backend::Scalar;
}

struct State {
  std::atomic<Backend> backend{detect_default()};
  std::atomic<const KernelTable*> table{table_for(backend.load())};
};

State& state() {
  static State s;
  return s;
}

const KernelTable& active() { return *state().table.load(std::memory_order_relaxed); }

}  // namespace

std::string_view to_string(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar:
      return "scalar";
    case Backend::Avx2:
      return "avx2";
    case Backend::Neon:
      return "neon";
  }
  return "unknown";
}

bool backend_supported(Backend b) noexcept {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
#if defined(STACKFIT_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Backend::Neon:
#if defined(STACKFIT_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend active_backend() noexcept { return state().backend.load(); }

void set_backend(Backend b) {
  if (!backend_supported(b)) {
    throw Error(ErrorCode::InvalidInput,
                "SIMD backend '" + std::string(to_string(b)) + "' is not available on this host");
  }
  state().backend.store(b);
  state().table.store(table_for(b));
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  active().axpy(alpha, x.data(), y.data(), y.size());
}

void scale(double alpha, std::span<double> x) { active().scale(alpha, x.data(), x.size()); }

void correlate(std::span<const double> padded, std::span<const double> taps,
               std::span<double> out) {
  assert(!taps.empty() && padded.size() + 1 >= out.size() + taps.size());
  active().correlate(padded.data(), taps.data(), taps.size(), out.data(), out.size());
}

}  // namespace stackfit::kernels
