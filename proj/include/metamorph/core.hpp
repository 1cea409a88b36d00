#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace metamorph {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// The scale parameter of the transform family. Must be positive.
struct Hbar {
    double value = 1.0;
};

/// A point (x, y, b, r) of the extended phase space, r > 0.
struct PhasePoint {
    double x = 0.0;
    double y = 0.0;
    double b = 0.0;
    double r = 1.0;
};

/// Holomorphic coordinates w = b + i r^2, z = x + w y. Im(w) > 0 on the valid domain.
struct ComplexChart {
    Complex z{};
    Complex w{};
};

/// A fixed (b0, r0) slice of phase space, r0 > 0.
struct ReferenceSheet {
    double b0 = 0.0;
    double r0 = 1.0;
};

/// Controls for the composite Gauss-Legendre engine.
/// `panels` is a lower bound; the oscillation/envelope rules may add more.
struct QuadratureSpec {
    int panels = 8;
    int nodes_per_panel = 24;
    double truncation_eps = 1e-12;
    double max_halfwidth = 64.0;
};

struct Axis {
    std::string label;
    double min = 0.0;
    double max = 0.0;
    int count = 1;
};

/// Rectangular coordinate grid; node i on an axis sits at min + i*(max-min)/(count-1).
struct GridSpec {
    std::vector<Axis> axes;

    std::size_t node_count() const;
    double coordinate(std::size_t axis, std::size_t index) const;
    double step(std::size_t axis) const;
};

void validate(const Hbar& h);
void validate(const PhasePoint& p);
void validate(const ReferenceSheet& sheet);
void validate(const QuadratureSpec& q);
void validate(const GridSpec& grid);

/// (x,y,b,r) -> (z,w) with w = b + i r^2, z = x + w y.
ComplexChart phase_to_complex(const PhasePoint& p);

/// Chart inversion; rejects Im(w) <= 0.
PhasePoint complex_to_phase(const ComplexChart& c);

/// Principal-branch square root (non-negative real part); 0 -> 0.
Complex principal_sqrt(Complex a);

/// exp with the underflow clamp: Re(e) < -745 returns exactly 0.
Complex cexp_guarded(Complex e);

/// Thrown when quadrature cannot meet its contract (truncation, non-finite samples,
/// non-convergence).
class QuadratureError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace metamorph
