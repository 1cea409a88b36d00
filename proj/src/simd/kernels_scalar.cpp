#include "metamorph/simd/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace metamorph::simd::scalar {

// 4-way striped accumulation, mirroring the vector lanes, so the scalar and
// AVX2 paths share a rounding structure and differ only in exp/sincos.

std::complex<double> weighted_cexp_sum(std::span<const double> w_re,
                                       std::span<const double> w_im,
                                       std::span<const double> e_re,
                                       std::span<const double> e_im) {
    const std::size_t n = w_re.size();
    if (w_im.size() != n || e_re.size() != n || e_im.size() != n)
        throw std::invalid_argument("weighted_cexp_sum: span lengths differ");
    double acc_re[4] = {0, 0, 0, 0};
    double acc_im[4] = {0, 0, 0, 0};
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        for (int l = 0; l < 4; ++l) {
            const std::size_t k = j + l;
            const double m = e_re[k] < -745.0 ? 0.0 : std::exp(e_re[k]);
            const double c = std::cos(e_im[k]);
            const double s = std::sin(e_im[k]);
            const double tr = m * c;
            const double ti = m * s;
            acc_re[l] += w_re[k] * tr - w_im[k] * ti;
            acc_im[l] += w_re[k] * ti + w_im[k] * tr;
        }
    }
    for (; j < n; ++j) {
        const double m = e_re[j] < -745.0 ? 0.0 : std::exp(e_re[j]);
        const double c = std::cos(e_im[j]);
        const double s = std::sin(e_im[j]);
        const double tr = m * c;
        const double ti = m * s;
        acc_re[j % 4] += w_re[j] * tr - w_im[j] * ti;
        acc_im[j % 4] += w_re[j] * ti + w_im[j] * tr;
    }
    return {(acc_re[0] + acc_re[1]) + (acc_re[2] + acc_re[3]),
            (acc_im[0] + acc_im[1]) + (acc_im[2] + acc_im[3])};
}

std::complex<double> weighted_phase_sum(std::span<const double> w_re,
                                        std::span<const double> w_im,
                                        std::span<const double> phase) {
    const std::size_t n = w_re.size();
    if (w_im.size() != n || phase.size() != n)
        throw std::invalid_argument("weighted_phase_sum: span lengths differ");
    double acc_re[4] = {0, 0, 0, 0};
    double acc_im[4] = {0, 0, 0, 0};
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        for (int l = 0; l < 4; ++l) {
            const std::size_t k = j + l;
            const double c = std::cos(phase[k]);
            const double s = std::sin(phase[k]);
            acc_re[l] += w_re[k] * c - w_im[k] * s;
            acc_im[l] += w_re[k] * s + w_im[k] * c;
        }
    }
    for (; j < n; ++j) {
        const double c = std::cos(phase[j]);
        const double s = std::sin(phase[j]);
        acc_re[j % 4] += w_re[j] * c - w_im[j] * s;
        acc_im[j % 4] += w_re[j] * s + w_im[j] * c;
    }
    return {(acc_re[0] + acc_re[1]) + (acc_re[2] + acc_re[3]),
            (acc_im[0] + acc_im[1]) + (acc_im[2] + acc_im[3])};
}

}  // namespace metamorph::simd::scalar
