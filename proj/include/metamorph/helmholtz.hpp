#pragma once

#include <array>
#include <functional>

#include "metamorph/core.hpp"
#include "metamorph/jets.hpp"
#include "metamorph/transform.hpp"

namespace metamorph {

/// Per-dimension chart coordinates ((z1,w1), ..., (zn,wn)), n in {2,3}.
struct MultiChart {
    std::vector<ComplexChart> dims;
};

/// Holomorphic function of n chart pairs with first partials and the diagonal
/// second z-derivatives.
struct HoloJetN {
    using Fn = std::function<Complex(const MultiChart&)>;
    int n = 2;
    Fn value;
    std::vector<Fn> dz, dw, dzz;
};

/// Jet of a function of (t, s1, s2) with t-derivative and the two diagonal
/// second s-derivatives.
struct F3Jet {
    using Fn = std::function<Complex(Complex, Complex, Complex)>;
    Fn value, dt, ds1, ds2, ds1s1, ds2s2;
};

/// Jet of a function of (t1, t2, s1, s2, s3).
struct F5Jet {
    using Args = std::array<Complex, 5>;
    using Fn = std::function<Complex(const Args&)>;
    Fn value, dt1, dt2, ds1, ds2, ds3, ds1s1, ds2s2, ds3s3;
};

/// Plane-wave superposition parameters: wave number k, aperture density
/// exponent a (weight e^{-a k1^2}), branch sign for the second wavenumber
/// component (-1 or +1), starting node count for the adaptive rule, and an
/// overall amplitude (0 gives the zero field).
struct BeamSpec {
    double k = 2.0 * kPi;
    double a = 0.0;
    int sign = -1;
    int nodes = 512;
    double amplitude = 1.0;
};

void validate(const BeamSpec& spec);

using FieldFunction2 = std::function<Complex(const PhasePoint&, const PhasePoint&)>;

/// Left side of the first-order transmuted equation in two dimensions:
/// 2 w1 (z1 d_z1 + w1 d_w1) f4 + 2 w2 (z2 d_z2 + w2 d_w2) f4
///   + (w1 + w2 + k^2/(2 pi i hbar)) f4.
Complex transmuted_residual_2d(const HoloJetN& f4, const MultiChart& mc, double k, Hbar h);
OperatorSample transmuted_residual_2d_scaled(const HoloJetN& f4, const MultiChart& mc, double k,
                                             Hbar h);

/// Generic solution of the transmuted equation from an f3 jet:
/// e^{k^2 (1/w1 + 1/w2)/(8 pi i hbar)} / (sqrt(w1) sqrt(w2))
///   * f3(1/w1 - 1/w2, z1/w1, z2/w2), partials by the chain rule.
HoloJetN lift_f3_to_f4(const F3Jet& f3, double k, Hbar h);

/// The full 8-coordinate field built from f3 (the closed combined form).
FieldFunction2 full_metamorphism_2d(const F3Jet& f3, double k, Hbar h);

/// Tensor lift of an n=2 jet: sqrt(r1 r2) e^{-pi i hbar (x1^2/w1 + x2^2/w2)} f4.
FieldFunction2 tensor_lift_2d(const HoloJetN& f4, Hbar h);

/// Product of the per-dimension plane-wave chart factors.
HoloJetN plane_wave_f4(double k1, double k2, Hbar h);

/// The two free-propagation conditions and their difference, in the
/// t = 1/w1 - 1/w2 convention:
///   first  = 4 pi i hbar f3_t - f3_{s2 s2} - k^2/2 f3
///   second = 4 pi i hbar f3_t + f3_{s1 s1} + k^2/2 f3
///   third  = second - first  (= f3_{s1 s1} + f3_{s2 s2} + k^2 f3)
std::array<Complex, 3> structural_residuals_2d(const F3Jet& f3, Complex t, Complex s1,
                                               Complex s2, double k, Hbar h);
std::array<OperatorSample, 3> structural_residuals_2d_scaled(const F3Jet& f3, Complex t,
                                                             Complex s1, Complex s2, double k,
                                                             Hbar h);

/// Beam factor: integral over k1 in [-k, k] of
/// exp((2 k1^2 - k^2) t / (8 pi i hbar) - i k1 s1 + sign * i sqrt(k^2-k1^2) s2)
///   * amplitude * e^{-a k1^2},
/// by adaptive Gauss-Legendre (nodes doubled until the relative change is
/// below 1e-8).
Complex gaussian_beam_f3(const BeamSpec& spec, Complex t, Complex s1, Complex s2, Hbar h);

/// Same integral bundled with its differentiated-under-the-integral partials.
F3Jet gaussian_beam_f3_jet(const BeamSpec& spec, Hbar h);

/// Physical-space superposition u(u1,u2) = int e^{-i k1 u1 + sign i kappa u2}
/// * amplitude e^{-a k1^2} dk1 on the grid.
SampledField reconstruct_physical_field(const BeamSpec& spec, const GridSpec& grid);

/// Physical-space beam value at a single point.
Complex physical_beam_value(const BeamSpec& spec, double u1, double u2);

/// Central second-difference Laplacian plus k^2 F on interior nodes of a 2D or
/// 3D uniform grid (counts >= 5 per axis); boundary nodes are set to NaN.
SampledField helmholtz_residual(const SampledField& F, double k);

/// Max |value| over finite (interior) nodes.
double max_interior_abs(const SampledField& F);
double max_abs_field(const SampledField& F);

/// 3D transmuted equation residual.
Complex transmuted_residual_3d(const HoloJetN& f6, const MultiChart& mc, double k, Hbar h);
OperatorSample transmuted_residual_3d_scaled(const HoloJetN& f6, const MultiChart& mc, double k,
                                             Hbar h);

/// 3D generic solution from an f5 jet:
/// e^{k^2 (1/w1+1/w2+1/w3)/(12 pi i hbar)} / (sqrt(w1) sqrt(w2) sqrt(w3))
///   * f5(1/w1 - 1/w3, 1/w2 - 1/w3, z1/w1, z2/w2, z3/w3).
HoloJetN lift_f5_to_f6(const F5Jet& f5, double k, Hbar h);

/// The three 3D structural residuals, exactly as the t1 = 1/w1 - 1/w3,
/// t2 = 1/w2 - 1/w3 convention requires:
///   (4 pi i hbar f5_t1 + f5_{s1 s1} + k^2/3 f5,
///    4 pi i hbar f5_t2 + f5_{s2 s2} + k^2/3 f5,
///    4 pi i hbar (f5_t1 + f5_t2) - f5_{s3 s3} - k^2/3 f5)
std::array<Complex, 3> structural_residuals_3d(const F5Jet& f5, const F5Jet::Args& args,
                                               double k, Hbar h);
std::array<OperatorSample, 3> structural_residuals_3d_scaled(const F5Jet& f5,
                                                             const F5Jet::Args& args, double k,
                                                             Hbar h);

/// Two-variable forward transform (the per-variable tensor kernel) of a
/// bivariate source, by nested panel quadrature.
Complex forward_2d(const std::function<Complex(double, double)>& f, const DecayBound& d1,
                   const DecayBound& d2, const PhasePoint& p1, const PhasePoint& p2, Hbar h,
                   const QuadratureSpec& q);

}  // namespace metamorph
