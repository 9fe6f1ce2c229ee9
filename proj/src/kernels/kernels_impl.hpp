#pragma once

// Raw-pointer entry points for each backend. The SIMD translation units are
// compiled with ISA flags, so they include nothing that could emit inline
// functions shared with the rest of the library.

#include <cstddef>

namespace stackfit::kernels {

struct KernelTable {
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*scale)(double alpha, double* x, std::size_t n);
  void (*correlate)(const double* padded, const double* taps, std::size_t ntaps, double* out,
                    std::size_t n);
};

namespace scalar {
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void correlate(const double* padded, const double* taps, std::size_t ntaps, double* out,
               std::size_t n);
}  // namespace scalar

#if defined(STACKFIT_HAVE_AVX2)
namespace avx2 {
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void correlate(const double* padded, const double* taps, std::size_t ntaps, double* out,
               std::size_t n);
}  // namespace avx2
#endif

#if defined(STACKFIT_HAVE_NEON)
namespace neon {
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scale(double alpha, double* x, std::size_t n);
void correlate(const double* padded, const double* taps, std::size_t ntaps, double* out,
               std::size_t n);
}  // namespace neon
#endif

}  // namespace stackfit::kernels
