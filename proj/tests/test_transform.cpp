#include <doctest.h>

#include <cmath>

#include "metamorph/closed_forms.hpp"
#include "metamorph/transform.hpp"

using namespace metamorph;

namespace {
const Hbar kH{1.0};
const QuadratureSpec kQ{};

SourceFunction gaussian() {
    return {[](double u) { return Complex(std::exp(-kPi * u * u), 0.0); },
            DecayBound{1.0, kPi, 0.0}};
}

double rel(Complex got, Complex want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}
}  // namespace

TEST_CASE("forward matches the packet closed form") {
    const QuadratureResult r = forward(gaussian(), {0, 0, 0, 1}, kH, kQ);
    CHECK(rel(r.value, Complex(1.0 / std::sqrt(2.0), 0)) < 1e-10);
    CHECK(r.error_estimate < 1e-10);
    CHECK(r.error_estimate >= 0.0);
}

TEST_CASE("forward of the zero function is zero") {
    SourceFunction zero{[](double) { return Complex{}; }, DecayBound{1.0, 0.0, 0.0}};
    CHECK(std::abs(forward_value(zero, {0.7, -0.4, 0.3, 1.2}, kH, kQ)) == 0.0);
}

TEST_CASE("forward of a bounded wave matches the closed form") {
    SourceFunction wave{[](double u) { return std::exp(Complex(0.0, -u)); },
                        DecayBound{1.0, 0.0, 0.0}};
    const Complex got = forward_value(wave, {0, 1, 0, 1}, kH, kQ);
    const Complex want = plane_wave_metamorphism({1.0}, {0, 1, 0, 1}, kH);
    CHECK(rel(got, want) < 1e-8);
}

TEST_CASE("forward guards") {
    SourceFunction wave{[](double u) { return std::exp(Complex(0.0, -u)); },
                        DecayBound{1.0, 0.0, 0.0}};
    QuadratureSpec q = kQ;
    q.max_halfwidth = 1.0;  // bounded source needs ~5.3 at this eps
    CHECK_THROWS_AS(forward_value(wave, {0, 0, 0, 1}, kH, q), QuadratureError);

    // dishonest decay metadata is caught by spot sampling
    SourceFunction liar{[](double) { return Complex(1.0, 0.0); }, DecayBound{1.0, kPi, 0.0}};
    CHECK_THROWS_AS(forward_value(liar, {0, 0, 0, 1}, kH, kQ), std::invalid_argument);

    SourceFunction bad{[](double) { return Complex(std::nan(""), 0.0); },
                       DecayBound{1.0, 0.0, 0.0}};
    CHECK_THROWS(forward_value(bad, {0, 0, 0, 1}, kH, kQ));
}

TEST_CASE("forward_grid agrees with forward and the closed form") {
    const ReferenceSheet sheet{0.0, 1.0};
    const GridSpec g3 = make_xy_grid(-0.5, 0.5, 3, -0.5, 0.5, 3);
    const SampledField F = forward_grid(gaussian(), g3, sheet, kH, kQ);
    CHECK(F.values.size() == 9);
    const WavePacketSpec spec{Complex(1, 0), 0.0};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            const PhasePoint p{F.grid.coordinate(0, i), F.grid.coordinate(1, j), 0.0, 1.0};
            CHECK(rel(F.at(i, j), wave_packet_metamorphism(spec, p, kH)) < 1e-8);
        }

    // single node grid equals forward
    GridSpec g1;
    g1.axes = {Axis{"x", 0.25, 0.25, 1}, Axis{"y", -0.5, -0.5, 1}};
    const SampledField F1 = forward_grid(gaussian(), g1, sheet, kH, kQ);
    CHECK(F1.values.size() == 1);
    CHECK(F1.values[0] == forward_value(gaussian(), {0.25, -0.5, 0.0, 1.0}, kH, kQ));

    // zero source gives the zero field
    SourceFunction zero{[](double) { return Complex{}; }, DecayBound{1.0, 0.0, 0.0}};
    const SampledField Fz = forward_grid(zero, g3, sheet, kH, kQ);
    for (const Complex& v : Fz.values) CHECK(std::abs(v) == 0.0);

    // failures carry the grid node index
    QuadratureSpec qbad = kQ;
    qbad.max_halfwidth = 0.5;
    try {
        forward_grid(gaussian(), g3, sheet, kH, qbad);
        CHECK(false);
    } catch (const QuadratureError& e) {
        CHECK(std::string(e.what()).find("grid node") != std::string::npos);
    }
}

TEST_CASE("pairing matches L2 inner products") {
    const ReferenceSheet sheet{0.0, 1.0};
    const GridSpec grid = make_xy_grid(-4.0, 4.0, 129, -4.0, 4.0, 129);
    const SampledField F = forward_grid(gaussian(), grid, sheet, kH, kQ);
    CHECK(std::abs(pairing(F, F, sheet, kH) - Complex(1.0 / std::sqrt(2.0), 0)) < 1e-4);

    SourceFunction shifted{
        [](double u) { return Complex(std::exp(-kPi * (u - 1.0) * (u - 1.0)), 0.0); },
        DecayBound{1.0, kPi, 1.0}};
    // the shifted transform rides out to y ~ 1, so pair on a wider slice
    const GridSpec wide = make_xy_grid(-5.0, 5.0, 161, -5.0, 5.0, 161);
    const SampledField Fw = forward_grid(gaussian(), wide, sheet, kH, kQ);
    const SampledField G = forward_grid(shifted, wide, sheet, kH, kQ);
    const Complex want(std::exp(-kPi / 2.0) / std::sqrt(2.0), 0.0);
    CHECK(std::abs(pairing(Fw, G, sheet, kH) - want) < 1e-4);

    SampledField zero = F;
    for (Complex& v : zero.values) v = Complex{};
    CHECK(std::abs(pairing(F, zero, sheet, kH)) == 0.0);

    // mismatched grids and sheets are rejected
    const SampledField small =
        forward_grid(gaussian(), make_xy_grid(-4.0, 4.0, 65, -4.0, 4.0, 65), sheet, kH, kQ);
    CHECK_THROWS_AS(pairing(F, small, sheet, kH), std::invalid_argument);
    CHECK_THROWS_AS(pairing(F, F, ReferenceSheet{0.5, 1.0}, kH), std::invalid_argument);

    // a grid that cuts the field off fails the boundary precondition
    const SampledField tight =
        forward_grid(gaussian(), make_xy_grid(-1.0, 1.0, 33, -1.0, 1.0, 33), sheet, kH, kQ);
    CHECK_THROWS_AS(pairing(tight, tight, sheet, kH), QuadratureError);
}

TEST_CASE("reproduce restores field values") {
    const ReferenceSheet sheet{0.0, 1.0};
    const GridSpec grid = make_xy_grid(-6.0, 6.0, 385, -6.0, 6.0, 385);
    const SampledField F = forward_grid(gaussian(), grid, sheet, kH, kQ);
    const WavePacketSpec spec{Complex(1, 0), 0.0};

    CHECK(std::abs(reproduce(F, {0, 0, 0, 1}, sheet, kH) -
                   Complex(1.0 / std::sqrt(2.0), 0)) < 1e-4);
    const PhasePoint cross{0, 0, 1, 2};
    CHECK(std::abs(reproduce(F, cross, sheet, kH) -
                   wave_packet_metamorphism(spec, cross, kH)) < 1e-4);

    SampledField zero = F;
    for (Complex& v : zero.values) v = Complex{};
    CHECK(std::abs(reproduce(zero, cross, sheet, kH)) == 0.0);
}

TEST_CASE("inverse round trip and calibration") {
    const ReferenceSheet sheet{0.0, 1.0};
    const GridSpec grid = make_xy_grid(-4.0, 4.0, 129, -4.0, 4.0, 129);
    const SampledField F = forward_grid(gaussian(), grid, sheet, kH, kQ);
    CHECK(std::abs(inverse(F, 0.0, kH, kQ) - Complex(1, 0)) < 1e-4);

    SampledField zero = F;
    for (Complex& v : zero.values) v = Complex{};
    CHECK(std::abs(inverse(zero, 0.0, kH, kQ)) == 0.0);

    SampledField nosheet = F;
    nosheet.sheet.reset();
    CHECK_THROWS_AS(inverse(nosheet, 0.0, kH, kQ), std::invalid_argument);

    // observed constant: sqrt(2) * hbar at hbar = 1, sheet-independent
    CHECK(inverse_calibration(kH, sheet, kQ) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
    CHECK(inverse_calibration(kH, ReferenceSheet{0.4, 1.3}, kQ) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
}
