#pragma once

#include <complex>
#include <cstddef>
#include <span>

// Data-parallel inner-loop kernels. Every kernel has a scalar reference
// implementation and, on x86-64, an AVX2 variant selected once at runtime.
// The variants accumulate in the same 4-way striped order, so they agree to
// the accuracy of the vector exp/sin/cos (a few ulp), which the equivalence
// tests pin down.

namespace metamorph::simd {

enum class Backend { Scalar, Avx2 };

/// Backend chosen from CPUID plus the METAMORPH_SIMD env var
/// (values: auto, scalar, avx2). Resolved once per process.
Backend active_backend();
const char* backend_name(Backend b);
bool avx2_supported();

/// Sum of (w_re[j] + i w_im[j]) * exp(e_re[j] + i e_im[j]).
/// Exponent real parts must lie in [-745, 709]; entries below -745 are
/// treated as exact zeros by the callers' exponent clamping.
std::complex<double> weighted_cexp_sum(std::span<const double> w_re,
                                       std::span<const double> w_im,
                                       std::span<const double> e_re,
                                       std::span<const double> e_im);

/// Sum of (w_re[j] + i w_im[j]) * (cos(phase[j]) + i sin(phase[j])).
std::complex<double> weighted_phase_sum(std::span<const double> w_re,
                                        std::span<const double> w_im,
                                        std::span<const double> phase);

namespace scalar {
std::complex<double> weighted_cexp_sum(std::span<const double> w_re,
                                       std::span<const double> w_im,
                                       std::span<const double> e_re,
                                       std::span<const double> e_im);
std::complex<double> weighted_phase_sum(std::span<const double> w_re,
                                        std::span<const double> w_im,
                                        std::span<const double> phase);
}  // namespace scalar

// Defined when the library is built with AVX2 support; otherwise these throw.
// Gate direct calls on avx2_supported().
namespace avx2 {
std::complex<double> weighted_cexp_sum(std::span<const double> w_re,
                                       std::span<const double> w_im,
                                       std::span<const double> e_re,
                                       std::span<const double> e_im);
std::complex<double> weighted_phase_sum(std::span<const double> w_re,
                                        std::span<const double> w_im,
                                        std::span<const double> phase);
}  // namespace avx2

}  // namespace metamorph::simd
