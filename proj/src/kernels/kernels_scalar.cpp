#include "kernels_impl.hpp"

namespace stackfit::kernels::scalar {

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = x[i] * alpha;
}

void correlate(const double* padded, const double* taps, std::size_t ntaps, double* out,
               std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < ntaps; ++k) acc = acc + taps[k] * padded[i + k];
    out[i] = acc;
  }
}

}  // namespace stackfit::kernels::scalar
