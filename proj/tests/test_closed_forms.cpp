#include <doctest.h>

#include <cmath>
#include <random>

#include "metamorph/closed_forms.hpp"
#include "metamorph/jets.hpp"

using namespace metamorph;

namespace {
const Hbar kH{1.0};
double rel(Complex got, Complex want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}
PhasePoint random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    std::uniform_real_distribution<double> rr(0.6, 1.8);
    return {c(rng), c(rng), c(rng), rr(rng)};
}
}  // namespace

TEST_CASE("gaussian_integral values") {
    CHECK(rel(gaussian_integral(Complex(1, 0), Complex(0, 0)), Complex(1, 0)) < 1e-15);
    CHECK(rel(gaussian_integral(Complex(2, 0), Complex(0, 0)),
              Complex(1.0 / std::sqrt(2.0), 0)) < 1e-15);
    // independent quadrature value for (a=1, z=i)
    CHECK(rel(gaussian_integral(Complex(1, 0), Complex(0, 1)),
              Complex(23.140692632779267, 0)) < 1e-13);
    CHECK_THROWS_AS(gaussian_integral(Complex(-1, 0), Complex(0, 0)), std::invalid_argument);
    CHECK_THROWS_AS(gaussian_integral(Complex(0, 1), Complex(0, 0)), std::invalid_argument);
}

TEST_CASE("wave packet transform is the substitution value") {
    const WavePacketSpec unit{Complex(1, 0), 0.0};
    CHECK(rel(wave_packet_metamorphism(unit, {0, 0, 0, 1}, kH),
              Complex(1.0 / std::sqrt(2.0), 0)) < 1e-14);
    CHECK(rel(wave_packet_metamorphism(unit, {1, 0, 0, 1}, kH),
              Complex(std::exp(-kPi / 2.0) / std::sqrt(2.0), 0)) < 1e-14);
    CHECK(rel(wave_packet_metamorphism(unit, {0, 0, 0, 2}, kH),
              Complex(std::sqrt(2.0) / std::sqrt(5.0), 0)) < 1e-14);
    CHECK_THROWS_AS(wave_packet_metamorphism({Complex(-1, 0), 0.0}, {0, 0, 0, 1}, kH),
                    std::invalid_argument);
}

TEST_CASE("plane wave transform values") {
    CHECK(rel(plane_wave_metamorphism({0.0}, {0, 0, 0, 1}, kH), Complex(1, 0)) < 1e-14);
    // kbar/hbar + x = 0 kills the Gaussian factor
    CHECK(rel(plane_wave_metamorphism({2.0 * kPi}, {-1, 0, 0, 1}, kH), Complex(1, 0)) < 1e-14);
    CHECK(rel(plane_wave_metamorphism({2.0 * kPi}, {0, 1, 0, 1}, kH),
              Complex(std::exp(-kPi), 0)) < 1e-12);
    // equals the sigma -> 0 packet limit with lambda = kbar
    std::mt19937_64 rng(42);
    for (int i = 0; i < 10; ++i) {
        const PhasePoint p = random_point(rng);
        const double k = 1.3;
        const Complex a = plane_wave_metamorphism({k}, p, kH);
        const Complex b =
            wave_packet_metamorphism({Complex(1e-12, 0), k / (2.0 * kPi)}, p, kH);
        CHECK(rel(a, b) < 1e-10);
    }
}

TEST_CASE("point-mass transforms") {
    CHECK(rel(delta_metamorphism(0, {0, 0, 0, 4}, kH), Complex(2, 0)) < 1e-15);
    CHECK(rel(delta_metamorphism(0, {1, 1, 0, 1}, kH), Complex(std::exp(-kPi), 0)) < 1e-12);
    CHECK(rel(delta_metamorphism(1, {1, 0, 0, 1}, kH), Complex(0, -2.0 * kPi)) < 1e-14);
    CHECK_THROWS_AS(delta_metamorphism(2, {0, 0, 0, 1}, kH), std::invalid_argument);
    CHECK_THROWS_AS(delta_metamorphism(-1, {0, 0, 0, 1}, kH), std::invalid_argument);

    // the repeated bracket is exactly the chart z
    std::mt19937_64 rng(42);
    for (int i = 0; i < 20; ++i) {
        const PhasePoint p = random_point(rng);
        const Complex ratio =
            delta_metamorphism(1, p, kH) / delta_metamorphism(0, p, kH);
        const Complex want = -2.0 * kPi * Complex(0, 1) * phase_to_complex(p).z;
        CHECK(std::abs(ratio - want) < 1e-12 * (1.0 + std::abs(want)));
    }
}

TEST_CASE("reproducing kernel") {
    std::mt19937_64 rng(42);
    const PhasePoint p = random_point(rng);
    CHECK(rel(reproducing_kernel(p, p, kH), Complex(1.0 / std::sqrt(2.0), 0)) < 1e-14);
    CHECK(rel(reproducing_kernel({0, 0, 0, 1}, {0, 0, 0, 2}, kH),
              Complex(std::sqrt(2.0 / 5.0), 0)) < 1e-14);
    for (int i = 0; i < 30; ++i) {
        const PhasePoint a = random_point(rng);
        const PhasePoint b = random_point(rng);
        const Complex k1 = reproducing_kernel(a, b, kH);
        const Complex k2 = std::conj(reproducing_kernel(b, a, kH));
        CHECK(std::abs(k1 - k2) < 1e-13 * (1.0 + std::abs(k1)));
    }
}

TEST_CASE("chart factors lift back to the closed forms") {
    std::mt19937_64 rng(42);
    const WavePacketSpec spec{Complex(0.9, 0.1), 0.4};
    const FieldFunction packet = lift_G(wave_packet_f2(spec, kH), kH);
    const FieldFunction wave = lift_G(plane_wave_f2(1.7, kH), kH);
    for (int i = 0; i < 20; ++i) {
        const PhasePoint p = random_point(rng);
        CHECK(rel(packet(p), wave_packet_metamorphism(spec, p, kH)) < 1e-12);
        CHECK(rel(wave(p), plane_wave_metamorphism({1.7}, p, kH)) < 1e-12);
    }
}

TEST_CASE("plane_wave_f2 spot values and structure") {
    const HoloJet flat = plane_wave_f2(0.0, kH);
    CHECK(rel(flat.value(Complex(0, 0), Complex(0, 1)), Complex(1, 0)) < 1e-15);
    const double k = 2.0 * std::sqrt(kPi);
    const HoloJet jet = plane_wave_f2(k, kH);
    CHECK(rel(jet.value(Complex(0, 0), Complex(0, 1)), Complex(std::exp(-1.0), 0)) < 1e-14);

    std::mt19937_64 rng(42);
    for (int i = 0; i < 10; ++i) {
        const ComplexChart c = phase_to_complex(random_point(rng));
        const auto s = structural_residual_scaled(jet, c.z, c.w, kH);
        CHECK(std::abs(s.value) < 1e-9 * s.scale);
    }
}

TEST_CASE("wave_packet_f2 jet consistency and holomorphy") {
    const HoloJet jet = wave_packet_f2({Complex(1, 0), 0.5}, kH);
    std::mt19937_64 rng(42);
    for (int i = 0; i < 10; ++i) {
        const ComplexChart c = phase_to_complex(random_point(rng));
        CHECK(jet_consistency_residual(jet, c.z, c.w) < 1e-6);
        CHECK(cauchy_riemann_residual([&](Complex z) { return jet.value(z, c.w); }, c.z) <
              1e-8);
        const auto s = structural_residual_scaled(jet, c.z, c.w, kH);
        CHECK(std::abs(s.value) < 1e-9 * s.scale);
    }
}
