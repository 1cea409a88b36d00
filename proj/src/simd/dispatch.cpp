#include <cstdlib>
#include <stdexcept>
#include <string>

#include "metamorph/simd/kernels.hpp"

namespace metamorph::simd {

bool avx2_supported() {
#if defined(METAMORPH_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

Backend resolve_backend() {
    const char* env = std::getenv("METAMORPH_SIMD");
    const std::string mode = env ? env : "auto";
    if (mode == "scalar") return Backend::Scalar;
    if (mode == "avx2") {
        if (!avx2_supported())
            throw std::runtime_error("METAMORPH_SIMD=avx2 but AVX2 is unavailable");
        return Backend::Avx2;
    }
    if (mode != "auto" && !mode.empty())
        throw std::runtime_error("METAMORPH_SIMD must be auto, scalar or avx2 (got '" + mode + "')");
    return avx2_supported() ? Backend::Avx2 : Backend::Scalar;
}

}  // namespace

Backend active_backend() {
    static const Backend backend = resolve_backend();
    return backend;
}

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
    }
    return "unknown";
}

#if !defined(METAMORPH_HAVE_AVX2)
namespace avx2 {
std::complex<double> weighted_cexp_sum(std::span<const double>, std::span<const double>,
                                       std::span<const double>, std::span<const double>) {
    throw std::runtime_error("AVX2 kernels not built on this platform");
}
std::complex<double> weighted_phase_sum(std::span<const double>, std::span<const double>,
                                        std::span<const double>) {
    throw std::runtime_error("AVX2 kernels not built on this platform");
}
}  // namespace avx2
#endif

std::complex<double> weighted_cexp_sum(std::span<const double> w_re,
                                       std::span<const double> w_im,
                                       std::span<const double> e_re,
                                       std::span<const double> e_im) {
    if (active_backend() == Backend::Avx2) return avx2::weighted_cexp_sum(w_re, w_im, e_re, e_im);
    return scalar::weighted_cexp_sum(w_re, w_im, e_re, e_im);
}

std::complex<double> weighted_phase_sum(std::span<const double> w_re,
                                        std::span<const double> w_im,
                                        std::span<const double> phase) {
    if (active_backend() == Backend::Avx2) return avx2::weighted_phase_sum(w_re, w_im, phase);
    return scalar::weighted_phase_sum(w_re, w_im, phase);
}

}  // namespace metamorph::simd
