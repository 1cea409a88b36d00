#include <immintrin.h>

#include <cmath>
#include <stdexcept>

#include "metamorph/simd/kernels.hpp"

// AVX2+FMA variants. exp and sincos use Cephes-style minimax kernels
// (rational exp after base-2 range reduction; octant-reduced sin/cos with a
// three-part pi/4 split), good to a couple of ulp for the argument ranges the
// quadrature produces. The equivalence tests in tests/test_simd.cpp pin the
// agreement with the scalar reference.

namespace metamorph::simd::avx2 {
namespace {

inline __m256d mask32_to_pd(__m128i m) {
    return _mm256_castsi256_pd(_mm256_cvtepi32_epi64(m));
}

inline __m256d pow2i(__m128i n) {
    __m256i n64 = _mm256_cvtepi32_epi64(n);
    n64 = _mm256_add_epi64(n64, _mm256_set1_epi64x(1023));
    n64 = _mm256_slli_epi64(n64, 52);
    return _mm256_castsi256_pd(n64);
}

// exp(x) for x in [-745, 709]; lanes below -745 return exactly 0.
inline __m256d exp_pd(__m256d x) {
    const __m256d lo = _mm256_set1_pd(-745.0);
    const __m256d hi = _mm256_set1_pd(709.0);
    const __m256d zero_mask = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
    x = _mm256_max_pd(_mm256_min_pd(x, hi), lo);

    const __m256d n = _mm256_round_pd(
        _mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
        _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93145751953125e-1), x);
    r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.42860682030941723212e-6), r);
    const __m256d r2 = _mm256_mul_pd(r, r);

    __m256d px = _mm256_set1_pd(1.26177193074810590878e-4);
    px = _mm256_fmadd_pd(px, r2, _mm256_set1_pd(3.02994407707441961300e-2));
    px = _mm256_fmadd_pd(px, r2, _mm256_set1_pd(9.99999999999999999910e-1));
    px = _mm256_mul_pd(px, r);

    __m256d qx = _mm256_set1_pd(3.00198505138664455042e-6);
    qx = _mm256_fmadd_pd(qx, r2, _mm256_set1_pd(2.52448340349684104192e-3));
    qx = _mm256_fmadd_pd(qx, r2, _mm256_set1_pd(2.27265548208155028766e-1));
    qx = _mm256_fmadd_pd(qx, r2, _mm256_set1_pd(2.0));

    __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
    e = _mm256_fmadd_pd(_mm256_set1_pd(2.0), e, _mm256_set1_pd(1.0));

    // scale by 2^n in two steps so subnormal-adjacent lanes stay exact
    const __m128i ni = _mm256_cvtpd_epi32(n);
    const __m128i n1 = _mm_srai_epi32(ni, 1);
    const __m128i n2 = _mm_sub_epi32(ni, n1);
    e = _mm256_mul_pd(e, pow2i(n1));
    e = _mm256_mul_pd(e, pow2i(n2));
    return _mm256_andnot_pd(zero_mask, e);
}

// sin and cos for |x| < 2^30 (octant index must fit int32).
inline void sincos_pd(__m256d x, __m256d& s_out, __m256d& c_out) {
    const __m256d signbit = _mm256_set1_pd(-0.0);
    const __m256d sign_x = _mm256_and_pd(x, signbit);
    const __m256d ax = _mm256_andnot_pd(signbit, x);

    __m256d y = _mm256_floor_pd(_mm256_mul_pd(ax, _mm256_set1_pd(1.2732395447351626862)));
    __m128i ji = _mm256_cvttpd_epi32(y);
    const __m128i jodd = _mm_and_si128(ji, _mm_set1_epi32(1));
    ji = _mm_add_epi32(ji, jodd);
    y = _mm256_add_pd(y, _mm256_cvtepi32_pd(jodd));
    const __m128i j = _mm_and_si128(ji, _mm_set1_epi32(7));  // in {0,2,4,6}

    const __m128i two = _mm_set1_epi32(2);
    const __m128i four = _mm_set1_epi32(4);
    const __m256d swap = mask32_to_pd(_mm_cmpeq_epi32(_mm_and_si128(j, two), two));
    const __m256d negf = mask32_to_pd(_mm_cmpeq_epi32(_mm_and_si128(j, four), four));

    __m256d z = _mm256_fnmadd_pd(y, _mm256_set1_pd(7.85398125648498535156e-1), ax);
    z = _mm256_fnmadd_pd(y, _mm256_set1_pd(3.77489470793079817668e-8), z);
    z = _mm256_fnmadd_pd(y, _mm256_set1_pd(2.69515142907905952645e-15), z);
    const __m256d zz = _mm256_mul_pd(z, z);

    __m256d ps = _mm256_set1_pd(1.58962301576546568060e-10);
    ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(-2.50507477628578072866e-8));
    ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(2.75573136213857245213e-6));
    ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(-1.98412698295895385996e-4));
    ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(8.33333333332211858878e-3));
    ps = _mm256_fmadd_pd(ps, zz, _mm256_set1_pd(-1.66666666666666307295e-1));
    const __m256d sv = _mm256_fmadd_pd(_mm256_mul_pd(ps, zz), z, z);

    __m256d pc = _mm256_set1_pd(-1.13585365213876817300e-11);
    pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(2.08757008419747316778e-9));
    pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(-2.75573141792967388112e-7));
    pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(2.48015872888517179684e-5));
    pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(-1.38888888888730564116e-3));
    pc = _mm256_fmadd_pd(pc, zz, _mm256_set1_pd(4.16666666666665929218e-2));
    const __m256d cv = _mm256_fmadd_pd(
        _mm256_mul_pd(pc, zz), zz,
        _mm256_fnmadd_pd(_mm256_set1_pd(0.5), zz, _mm256_set1_pd(1.0)));

    __m256d sin_v = _mm256_blendv_pd(sv, cv, swap);
    __m256d cos_v = _mm256_blendv_pd(cv, sv, swap);
    sin_v = _mm256_xor_pd(sin_v, _mm256_and_pd(negf, signbit));
    sin_v = _mm256_xor_pd(sin_v, sign_x);
    cos_v = _mm256_xor_pd(cos_v, _mm256_and_pd(_mm256_xor_pd(negf, swap), signbit));
    s_out = sin_v;
    c_out = cos_v;
}

inline bool phase_in_range(__m256d x) {
    const __m256d lim = _mm256_set1_pd(1.0e9);
    const __m256d ax = _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
    return _mm256_movemask_pd(_mm256_cmp_pd(ax, lim, _CMP_GT_OQ)) == 0;
}

inline std::complex<double> combine(const __m256d acc_re, const __m256d acc_im,
                                    const double* w_re, const double* w_im,
                                    const double* e_re, const double* e_im,
                                    const double* phase, std::size_t done, std::size_t n) {
    alignas(32) double ar[4], ai[4];
    _mm256_store_pd(ar, acc_re);
    _mm256_store_pd(ai, acc_im);
    for (std::size_t j = done; j < n; ++j) {
        double tr, ti;
        if (phase) {
            tr = std::cos(phase[j]);
            ti = std::sin(phase[j]);
        } else {
            const double m = e_re[j] < -745.0 ? 0.0 : std::exp(e_re[j]);
            tr = m * std::cos(e_im[j]);
            ti = m * std::sin(e_im[j]);
        }
        ar[j % 4] += w_re[j] * tr - w_im[j] * ti;
        ai[j % 4] += w_re[j] * ti + w_im[j] * tr;
    }
    return {(ar[0] + ar[1]) + (ar[2] + ar[3]), (ai[0] + ai[1]) + (ai[2] + ai[3])};
}

}  // namespace

std::complex<double> weighted_cexp_sum(std::span<const double> w_re,
                                       std::span<const double> w_im,
                                       std::span<const double> e_re,
                                       std::span<const double> e_im) {
    const std::size_t n = w_re.size();
    if (w_im.size() != n || e_re.size() != n || e_im.size() != n)
        throw std::invalid_argument("weighted_cexp_sum: span lengths differ");
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d er = _mm256_loadu_pd(e_re.data() + j);
        const __m256d ei = _mm256_loadu_pd(e_im.data() + j);
        const __m256d wr = _mm256_loadu_pd(w_re.data() + j);
        const __m256d wi = _mm256_loadu_pd(w_im.data() + j);
        __m256d tr, ti;
        if (phase_in_range(ei)) {
            const __m256d m = exp_pd(er);
            __m256d s, c;
            sincos_pd(ei, s, c);
            tr = _mm256_mul_pd(m, c);
            ti = _mm256_mul_pd(m, s);
        } else {
            alignas(32) double trs[4], tis[4];
            for (int l = 0; l < 4; ++l) {
                const double m = e_re[j + l] < -745.0 ? 0.0 : std::exp(e_re[j + l]);
                trs[l] = m * std::cos(e_im[j + l]);
                tis[l] = m * std::sin(e_im[j + l]);
            }
            tr = _mm256_load_pd(trs);
            ti = _mm256_load_pd(tis);
        }
        acc_re = _mm256_fmadd_pd(wr, tr, acc_re);
        acc_re = _mm256_fnmadd_pd(wi, ti, acc_re);
        acc_im = _mm256_fmadd_pd(wr, ti, acc_im);
        acc_im = _mm256_fmadd_pd(wi, tr, acc_im);
    }
    return combine(acc_re, acc_im, w_re.data(), w_im.data(), e_re.data(), e_im.data(), nullptr,
                   j, n);
}

std::complex<double> weighted_phase_sum(std::span<const double> w_re,
                                        std::span<const double> w_im,
                                        std::span<const double> phase) {
    const std::size_t n = w_re.size();
    if (w_im.size() != n || phase.size() != n)
        throw std::invalid_argument("weighted_phase_sum: span lengths differ");
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
        const __m256d ph = _mm256_loadu_pd(phase.data() + j);
        const __m256d wr = _mm256_loadu_pd(w_re.data() + j);
        const __m256d wi = _mm256_loadu_pd(w_im.data() + j);
        __m256d s, c;
        if (phase_in_range(ph)) {
            sincos_pd(ph, s, c);
        } else {
            alignas(32) double ss[4], cs[4];
            for (int l = 0; l < 4; ++l) {
                ss[l] = std::sin(phase[j + l]);
                cs[l] = std::cos(phase[j + l]);
            }
            s = _mm256_load_pd(ss);
            c = _mm256_load_pd(cs);
        }
        acc_re = _mm256_fmadd_pd(wr, c, acc_re);
        acc_re = _mm256_fnmadd_pd(wi, s, acc_re);
        acc_im = _mm256_fmadd_pd(wr, s, acc_im);
        acc_im = _mm256_fmadd_pd(wi, c, acc_im);
    }
    return combine(acc_re, acc_im, w_re.data(), w_im.data(), nullptr, nullptr, phase.data(), j,
                   n);
}

}  // namespace metamorph::simd::avx2
