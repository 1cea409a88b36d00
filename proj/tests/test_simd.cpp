#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "metamorph/simd/kernels.hpp"

using namespace metamorph::simd;
using Complex = std::complex<double>;

namespace {

struct Arrays {
    std::vector<double> wre, wim, ere, eim, phase;
};

Arrays random_arrays(std::size_t n, unsigned seed, double phase_span) {
    Arrays a;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> w(-2.0, 2.0);
    std::uniform_real_distribution<double> e(-40.0, 2.0);
    std::uniform_real_distribution<double> ph(-phase_span, phase_span);
    a.wre.resize(n);
    a.wim.resize(n);
    a.ere.resize(n);
    a.eim.resize(n);
    a.phase.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        a.wre[i] = w(rng);
        a.wim[i] = w(rng);
        a.ere[i] = e(rng);
        a.eim[i] = ph(rng);
        a.phase[i] = ph(rng);
    }
    return a;
}

double l1_bound(const Arrays& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.wre.size(); ++i)
        s += std::hypot(a.wre[i], a.wim[i]) * std::exp(a.ere[i]);
    return s + 1e-300;
}

}  // namespace

TEST_CASE("scalar and AVX2 kernels agree") {
    if (!avx2_supported()) return;
    for (std::size_t n : {std::size_t{0}, std::size_t{1}, std::size_t{3}, std::size_t{4},
                          std::size_t{5}, std::size_t{127}, std::size_t{1024}}) {
        const Arrays a = random_arrays(n, 1000 + static_cast<unsigned>(n), 30.0);
        const Complex s1 = scalar::weighted_cexp_sum(a.wre, a.wim, a.ere, a.eim);
        const Complex v1 = avx2::weighted_cexp_sum(a.wre, a.wim, a.ere, a.eim);
        CHECK(std::abs(s1 - v1) <= 5e-14 * l1_bound(a));

        double wl1 = 1e-300;
        for (std::size_t i = 0; i < n; ++i) wl1 += std::hypot(a.wre[i], a.wim[i]);
        const Complex s2 = scalar::weighted_phase_sum(a.wre, a.wim, a.phase);
        const Complex v2 = avx2::weighted_phase_sum(a.wre, a.wim, a.phase);
        CHECK(std::abs(s2 - v2) <= 5e-14 * wl1);
    }
}

TEST_CASE("vector exp matches std::exp across the range") {
    if (!avx2_supported()) return;
    std::vector<double> wre{1.0}, wim{0.0}, eim{0.0}, ere{0.0};
    for (double x = -744.0; x <= 709.0; x += 0.637) {
        ere[0] = x;
        const Complex got = avx2::weighted_cexp_sum(wre, wim, ere, eim);
        const double want = std::exp(x);
        CHECK(std::abs(got.real() - want) <= 4e-15 * want + 1e-320);
        CHECK(got.imag() == 0.0);
    }
    // deep underflow clamps to exact zero
    ere[0] = -800.0;
    CHECK(avx2::weighted_cexp_sum(wre, wim, ere, eim) == Complex(0, 0));
}

TEST_CASE("vector sincos matches std across a wide phase range") {
    if (!avx2_supported()) return;
    std::vector<double> wre{1.0}, wim{0.0}, phase{0.0};
    std::mt19937_64 rng(7);
    for (double span : {3.2, 700.0, 1e4, 1e6}) {
        std::uniform_real_distribution<double> u(-span, span);
        for (int i = 0; i < 200; ++i) {
            phase[0] = u(rng);
            const Complex got = avx2::weighted_phase_sum(wre, wim, phase);
            CHECK(std::abs(got.real() - std::cos(phase[0])) < 5e-13);
            CHECK(std::abs(got.imag() - std::sin(phase[0])) < 5e-13);
        }
    }
    // beyond the vector reduction range the kernel falls back per-block
    std::vector<double> big_w{1.0, 1.0, 1.0, 1.0}, big_wi{0.0, 0.0, 0.0, 0.0};
    std::vector<double> big_ph{2e9, -3e9, 0.5, 1.0};
    const Complex got = avx2::weighted_phase_sum(big_w, big_wi, big_ph);
    Complex want{};
    for (double p : big_ph) want += Complex(std::cos(p), std::sin(p));
    CHECK(std::abs(got - want) < 1e-12);
}

TEST_CASE("dispatch reports a coherent backend") {
    const Backend b = active_backend();
    CHECK((b == Backend::Scalar || b == Backend::Avx2));
    if (b == Backend::Avx2) CHECK(avx2_supported());
    CHECK(backend_name(b) != nullptr);

    const Arrays a = random_arrays(64, 5, 10.0);
    const Complex direct = weighted_cexp_sum(a.wre, a.wim, a.ere, a.eim);
    const Complex ref = scalar::weighted_cexp_sum(a.wre, a.wim, a.ere, a.eim);
    CHECK(std::abs(direct - ref) <= 5e-14 * l1_bound(a));
}

TEST_CASE("kernels reject mismatched spans") {
    std::vector<double> a{1.0, 2.0}, b{1.0};
    CHECK_THROWS_AS(scalar::weighted_cexp_sum(a, b, a, a), std::invalid_argument);
    CHECK_THROWS_AS(scalar::weighted_phase_sum(a, a, b), std::invalid_argument);
}
