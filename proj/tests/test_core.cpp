#include <doctest.h>

#include <cmath>
#include <random>

#include "metamorph/core.hpp"

using namespace metamorph;

namespace {
double rel(Complex got, Complex want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}
}  // namespace

TEST_CASE("phase_to_complex basic points") {
    {
        const ComplexChart c = phase_to_complex({0, 0, 0, 1});
        CHECK(c.z == Complex(0, 0));
        CHECK(c.w == Complex(0, 1));
    }
    {
        const ComplexChart c = phase_to_complex({1, 1, 0, 1});
        CHECK(c.z == Complex(1, 1));
        CHECK(c.w == Complex(0, 1));
    }
    {
        const ComplexChart c = phase_to_complex({1, 0, 2, 1});
        CHECK(c.z == Complex(1, 0));
        CHECK(c.w == Complex(2, 1));
    }
}

TEST_CASE("complex_to_phase inverts the chart") {
    {
        const PhasePoint p = complex_to_phase({Complex(0, 0), Complex(0, 1)});
        CHECK(p.x == 0.0);
        CHECK(p.y == 0.0);
        CHECK(p.b == 0.0);
        CHECK(p.r == 1.0);
    }
    {
        const PhasePoint p = complex_to_phase({Complex(1, 1), Complex(0, 1)});
        CHECK(p.x == doctest::Approx(1.0));
        CHECK(p.y == doctest::Approx(1.0));
    }
    {
        // solve the 2x2 real system by hand: b=3, r=2, y=0, x=2
        const PhasePoint p = complex_to_phase({Complex(2, 0), Complex(3, 4)});
        CHECK(p.x == doctest::Approx(2.0));
        CHECK(p.y == doctest::Approx(0.0));
        CHECK(p.b == doctest::Approx(3.0));
        CHECK(p.r == doctest::Approx(2.0));
    }
    CHECK_THROWS_AS(complex_to_phase({Complex(0, 0), Complex(1, 0)}), std::invalid_argument);
    CHECK_THROWS_AS(complex_to_phase({Complex(0, 0), Complex(1, -2)}), std::invalid_argument);
}

TEST_CASE("chart round trips") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    std::uniform_real_distribution<double> logr(std::log(1e-3), std::log(1e3));
    for (int i = 0; i < 500; ++i) {
        const PhasePoint p{coord(rng), coord(rng), coord(rng), std::exp(logr(rng))};
        const PhasePoint back = complex_to_phase(phase_to_complex(p));
        CHECK(back.x == doctest::Approx(p.x).epsilon(1e-12));
        CHECK(back.y == doctest::Approx(p.y).epsilon(1e-12));
        CHECK(back.b == doctest::Approx(p.b).epsilon(1e-12));
        CHECK(back.r == doctest::Approx(p.r).epsilon(1e-12));
    }
    for (int i = 0; i < 200; ++i) {
        const ComplexChart c{Complex(coord(rng), coord(rng)),
                             Complex(coord(rng), std::exp(logr(rng)))};
        const ComplexChart back = phase_to_complex(complex_to_phase(c));
        CHECK(std::abs(back.z - c.z) <= 1e-12 * (1.0 + std::abs(c.z)));
        CHECK(std::abs(back.w - c.w) <= 1e-12 * (1.0 + std::abs(c.w)));
    }
}

TEST_CASE("principal_sqrt branch") {
    CHECK(principal_sqrt(Complex(4, 0)) == Complex(2, 0));
    CHECK(rel(principal_sqrt(Complex(-1, 0)), Complex(0, 1)) < 1e-15);
    CHECK(rel(principal_sqrt(Complex(0, 2)), Complex(1, 1)) < 1e-15);
    CHECK(principal_sqrt(Complex(0, 0)) == Complex(0, 0));

    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 500; ++i) {
        Complex a(u(rng), u(rng));
        if (a.real() < 0.0 && std::abs(a.imag()) < 1e-3) continue;  // off the cut
        const Complex s = principal_sqrt(a);
        CHECK(s.real() >= 0.0);
        CHECK(rel(s * s, a) < 1e-14);
    }
}

TEST_CASE("validation rejects bad inputs") {
    CHECK_THROWS_AS(validate(PhasePoint{0, 0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(PhasePoint{0, 0, 0, -1}), std::invalid_argument);
    CHECK_THROWS_AS(validate(Hbar{0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(Hbar{-1.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(ReferenceSheet{0.0, 0.0}), std::invalid_argument);
    QuadratureSpec q;
    q.truncation_eps = 1.5;
    CHECK_THROWS_AS(validate(q), std::invalid_argument);
    q = QuadratureSpec{};
    q.nodes_per_panel = 1;
    CHECK_THROWS_AS(validate(q), std::invalid_argument);

    GridSpec g;
    g.axes = {Axis{"x", 0.0, 1.0, 1}};
    CHECK_THROWS_AS(validate(g), std::invalid_argument);  // count 1 needs min == max
    g.axes = {Axis{"x", 0.0, 0.0, 1}};
    CHECK_NOTHROW(validate(g));
    g.axes = {Axis{"x", 1.0, 0.0, 4}};
    CHECK_THROWS_AS(validate(g), std::invalid_argument);
}

TEST_CASE("cexp_guarded underflow clamp") {
    CHECK(cexp_guarded(Complex(-800.0, 3.0)) == Complex(0, 0));
    CHECK(std::abs(cexp_guarded(Complex(0.0, 0.0)) - Complex(1, 0)) == 0.0);
    CHECK(std::isfinite(cexp_guarded(Complex(-700.0, 1.0)).real()));
}
