#include <arm_neon.h>

#include "kernels_impl.hpp"

namespace stackfit::kernels::neon {

// vmulq + vaddq rather than vfmaq so rounding matches the scalar reference.

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t a = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float64x2_t y0 = vld1q_f64(y + i);
    float64x2_t y1 = vld1q_f64(y + i + 2);
    y0 = vaddq_f64(y0, vmulq_f64(a, vld1q_f64(x + i)));
    y1 = vaddq_f64(y1, vmulq_f64(a, vld1q_f64(x + i + 2)));
    vst1q_f64(y + i, y0);
    vst1q_f64(y + i + 2, y1);
  }
  for (; i < n; ++i) y[i] = y[i] + alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  const float64x2_t a = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_f64(vld1q_f64(x + i), a));
  for (; i < n; ++i) x[i] = x[i] * alpha;
}

void correlate(const double* padded, const double* taps, std::size_t ntaps, double* out,
               std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    for (std::size_t k = 0; k < ntaps; ++k) {
      const float64x2_t w = vdupq_n_f64(taps[k]);
      acc0 = vaddq_f64(acc0, vmulq_f64(w, vld1q_f64(padded + i + k)));
      acc1 = vaddq_f64(acc1, vmulq_f64(w, vld1q_f64(padded + i + k + 2)));
    }
    vst1q_f64(out + i, acc0);
    vst1q_f64(out + i + 2, acc1);
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < ntaps; ++k) acc = acc + taps[k] * padded[i + k];
    out[i] = acc;
  }
}

}  // namespace stackfit::kernels::neon
