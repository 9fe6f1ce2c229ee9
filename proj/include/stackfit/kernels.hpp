#pragma once

// Data-parallel inner loops shared by the Gaussian filter and the simplex
// tableau. Every backend evaluates each output element with the same sequence
// of IEEE multiplies and adds as the scalar reference, so results are
// bit-identical across backends (the build disables FMA contraction).

#include <span>
#include <string_view>

namespace stackfit::kernels {

enum class Backend { Scalar, Avx2, Neon };

std::string_view to_string(Backend b) noexcept;

/// True when the backend was compiled in and the running CPU supports it.
bool backend_supported(Backend b) noexcept;

/// Backend selected at first use: STACKFIT_SIMD=scalar|avx2|neon if set and
/// supported, otherwise the widest supported one.
Backend active_backend() noexcept;

/// Overrides the runtime selection. Throws stackfit::Error when unsupported.
void set_backend(Backend b);

/// y[i] += alpha * x[i]
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// x[i] *= alpha
void scale(double alpha, std::span<double> x);

/// out[i] = sum_k taps[k] * padded[i + k], k ascending.
/// Requires padded.size() >= out.size() + taps.size() - 1.
void correlate(std::span<const double> padded, std::span<const double> taps,
               std::span<double> out);

}  // namespace stackfit::kernels
