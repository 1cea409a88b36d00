#include <doctest.h>

#include <cmath>
#include <random>

#include "metamorph/closed_forms.hpp"
#include "metamorph/jets.hpp"
#include "metamorph/transform.hpp"

using namespace metamorph;

namespace {
const Hbar kH{1.0};
const FdScheme kFd{};
constexpr Complex kI{0.0, 1.0};

PhasePoint random_point(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    std::uniform_real_distribution<double> rr(0.6, 1.8);
    return {c(rng), c(rng), c(rng), rr(rng)};
}

HoloJet constant_jet(Complex value) {
    HoloJet jet;
    jet.value = [value](Complex, Complex) { return value; };
    jet.dz = jet.dw = jet.dzz = [](Complex, Complex) { return Complex{}; };
    return jet;
}
}  // namespace

TEST_CASE("annihilators vanish on a transform field") {
    const FieldFunction F = [](const PhasePoint& p) {
        return wave_packet_metamorphism({Complex(1, 0), 0.0}, p, kH);
    };
    const PhasePoint p{0.3, -0.2, 0.5, 1.1};
    for (auto which : {Annihilator::C1, Annihilator::C2, Annihilator::S1, Annihilator::S2}) {
        const Complex r = apply_annihilator(which, F, p, kH, kFd);
        CHECK(std::abs(r) < 1e-5 * std::abs(F(p)) + 1e-5);
    }
}

TEST_CASE("S1 detects a non-image factor") {
    const FieldFunction F = lift_G(constant_jet(Complex(1, 0)), kH);
    std::mt19937_64 rng(42);
    const PhasePoint p = random_point(rng);
    const OperatorSample s = apply_annihilator_scaled(Annihilator::S1, F, p, kH, kFd);
    CHECK(std::abs(s.value) > 1e-3 * s.scale);
}

TEST_CASE("annihilators of the zero field are zero") {
    const FieldFunction zero = [](const PhasePoint&) { return Complex{}; };
    std::mt19937_64 rng(42);
    const PhasePoint p = random_point(rng);
    for (auto which : {Annihilator::C1, Annihilator::C2, Annihilator::S1, Annihilator::S2})
        CHECK(std::abs(apply_annihilator(which, zero, p, kH, kFd)) == 0.0);
}

TEST_CASE("FD guards") {
    const FieldFunction F = [](const PhasePoint& p) { return Complex(p.x, 0.0); };
    FdScheme broken;
    broken.first_rel = 0.0;
    CHECK_THROWS_AS(apply_annihilator(Annihilator::C1, F, {0, 0, 0, 1}, kH, broken),
                    QuadratureError);
    const FieldFunction bad = [](const PhasePoint&) {
        return Complex(std::nan(""), 0.0);
    };
    CHECK_THROWS_AS(apply_annihilator(Annihilator::C1, bad, {0, 0, 0, 1}, kH, kFd),
                    QuadratureError);
}

TEST_CASE("lift_G spot values") {
    const FieldFunction F = lift_G(constant_jet(Complex(1, 0)), kH);
    CHECK(std::abs(F({0, 0.4, -0.7, 1.69}) - Complex(1.3, 0)) < 1e-12);
    CHECK(std::abs(F({1, 0, 0, 1}) - Complex(std::exp(-kPi), 0)) < 1e-12);
    const FieldFunction P = lift_G(wave_packet_f2({Complex(1, 0), 0.0}, kH), kH);
    CHECK(std::abs(P({0, 0, 0, 1}) - Complex(1.0 / std::sqrt(2.0), 0)) < 1e-14);
}

TEST_CASE("structural residual values") {
    CHECK(std::abs(structural_residual(constant_jet(Complex(1, 0)), Complex(0.3, 0.1),
                                       Complex(0.2, 1.1), kH) -
                   Complex(0, -2.0 * kPi)) < 1e-13);
    HoloJet zero = constant_jet(Complex{});
    CHECK(std::abs(structural_residual(zero, Complex(0, 0), Complex(0, 1), kH)) == 0.0);
}

TEST_CASE("schrodinger coordinate change") {
    {
        const auto out = schrodinger_coords(Complex(0, 0), Complex(0, 1), Complex(1, 0));
        CHECK(std::abs(out[0]) == 0.0);
        CHECK(std::abs(out[1] - Complex(0, -1)) < 1e-15);
        CHECK(std::abs(out[2] - std::polar(1.0, -kPi / 4.0)) < 1e-15);
    }
    {
        const auto out = schrodinger_coords(Complex(0, 1), Complex(0, 1), Complex(0, 0));
        CHECK(std::abs(out[0] - Complex(1, 0)) < 1e-15);
        CHECK(std::abs(out[2]) == 0.0);
    }
    CHECK_THROWS_AS(schrodinger_coords(Complex(1, 0), Complex(0, 0), Complex(1, 0)),
                    std::invalid_argument);

    std::mt19937_64 rng(42);
    for (int i = 0; i < 20; ++i) {
        const ComplexChart c = phase_to_complex(random_point(rng));
        const Complex v(0.3, -0.8);
        const auto fwd = schrodinger_coords(c.z, c.w, v);
        const auto back = schrodinger_coords_inverse(fwd[0], fwd[1], fwd[2]);
        CHECK(std::abs(back[0] - c.z) + std::abs(back[1] - c.w) + std::abs(back[2] - v) <
              1e-14);
    }
}

TEST_CASE("D0 intertwines the second derivative") {
    const QuadratureSpec q{};
    SourceFunction f{[](double u) { return Complex(std::exp(-kPi * u * u), 0.0); },
                     DecayBound{1.0, kPi, 0.0}};
    SourceFunction fpp{[](double u) {
                           return Complex(
                               (-2.0 * kPi + 4.0 * kPi * kPi * u * u) * std::exp(-kPi * u * u),
                               0.0);
                       },
                       DecayBound{50.0, 0.9 * kPi, 0.0}};
    const FieldFunction F = [&](const PhasePoint& p) { return forward_value(f, p, kH, q); };
    const PhasePoint p{0.2, 0.1, 0.0, 1.0};
    CHECK(std::abs(apply_D0(F, p, kH, kFd) - forward_value(fpp, p, kH, q)) < 1e-5);

    const FieldFunction zero = [](const PhasePoint&) { return Complex{}; };
    CHECK(std::abs(apply_D0(zero, p, kH, kFd)) == 0.0);

    // plane-wave eigenvalue -k^2
    const double k = 1.5;
    const FieldFunction E = [k](const PhasePoint& pp) {
        return plane_wave_metamorphism({k}, pp, kH);
    };
    std::mt19937_64 rng(42);
    for (int i = 0; i < 5; ++i) {
        const PhasePoint pp = random_point(rng);
        const Complex got = apply_D0(E, pp, kH, kFd);
        const Complex want = -k * k * E(pp);
        CHECK(std::abs(got - want) < 1e-5 * std::abs(want));
    }
}

TEST_CASE("D in the image chart") {
    const Complex z(0.4, 0.2), w(0.3, 1.2);
    CHECK(std::abs(apply_D(constant_jet(Complex(1, 0)), z, w, kH) -
                   2.0 * kPi * kI * w) < 1e-13);
    CHECK(std::abs(apply_D(constant_jet(Complex{}), z, w, kH)) == 0.0);
    const double k = 2.0;
    const HoloJet jet = plane_wave_f2(k, kH);
    const Complex got = apply_D(jet, z, w, kH);
    const Complex want = -k * k * jet.value(z, w);
    CHECK(std::abs(got - want) < 1e-9 * std::abs(want));
}

TEST_CASE("cauchy_derivative is exact on polynomials") {
    const auto f = [](Complex z) { return z * z * z - 2.0 * z + Complex(1, 1); };
    const Complex z0(0.7, -0.3);
    const Complex want = 3.0 * z0 * z0 - 2.0;
    CHECK(std::abs(cauchy_derivative(f, z0, 1e-3) - want) < 1e-12);
}
