#pragma once

#include "metamorph/core.hpp"
#include "metamorph/jets.hpp"

namespace metamorph {

/// Gaussian wave packet e^{-pi sigma u^2 - 2 pi i lambda u}, Re(sigma) > 0.
struct WavePacketSpec {
    Complex sigma{1.0, 0.0};
    double lambda = 0.0;
};

/// Exponential wave e^{-i k u}.
struct PlaneWaveSpec {
    double k = 0.0;
    double kbar() const { return k / (2.0 * kPi); }
};

/// Integral of e^{-pi a u^2 - 2 pi i z u} over the line: exp(-pi z^2 / a) / sqrt(a).
/// Requires Re(a) > 0.
Complex gaussian_integral(Complex a, Complex z);

/// Transform of the wave packet, evaluated through the complex-chart form and
/// cross-checked against the direct form to 1e-12 on every call.
Complex wave_packet_metamorphism(const WavePacketSpec& spec, const PhasePoint& p, Hbar h);

/// Transform of e^{-i k u}.
Complex plane_wave_metamorphism(const PlaneWaveSpec& spec, const PhasePoint& p, Hbar h);

/// Transform of the point mass (order 0) and of -2 pi i hbar z times it
/// (order 1). Orders other than 0 and 1 are rejected.
Complex delta_metamorphism(int order, const PhasePoint& p, Hbar h);

/// K(p, p0) = <phi_p, phi_p0>: the sheet-restriction kernel used by the
/// reproducing evaluation. Hermitian: K(p, p0) = conj(K(p0, p)).
Complex reproducing_kernel(const PhasePoint& p, const PhasePoint& p0, Hbar h);

/// Image-chart factor of the wave-packet transform with analytic partials;
/// lift_G of it reproduces wave_packet_metamorphism pointwise.
HoloJet wave_packet_f2(const WavePacketSpec& spec, Hbar h);

/// Image-chart factor of the plane-wave transform:
/// exp(-i k z / w + k^2 / (4 pi i hbar w)) / sqrt(-i w), with analytic partials.
HoloJet plane_wave_f2(double k, Hbar h);

namespace detail {
/// Direct form of the packet transform, analytically continued to complex
/// lambda (needed by the coherent-state route to the reproducing kernel).
Complex packet_direct(Complex sigma, Complex lambda, const PhasePoint& p, double hbar);
}  // namespace detail

}  // namespace metamorph
