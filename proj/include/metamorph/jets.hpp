#pragma once

#include <array>
#include <functional>

#include "metamorph/core.hpp"

namespace metamorph {

/// A holomorphic function of (z, w) bundled with its first partials and the
/// second z-derivative, all defined on Im(w) > 0.
struct HoloJet {
    std::function<Complex(Complex, Complex)> value;
    std::function<Complex(Complex, Complex)> dz;
    std::function<Complex(Complex, Complex)> dw;
    std::function<Complex(Complex, Complex)> dzz;
};

/// A complex-valued field on phase points (r > 0).
using FieldFunction = std::function<Complex(const PhasePoint&)>;

/// Central-difference step policy. Steps scale as rel*(1+|coordinate|).
/// swap_br deliberately exchanges the b and r derivative slots; it exists as
/// a negative control for the annihilation tests.
struct FdScheme {
    double first_rel = 1e-5;
    double second_rel = 1e-4;
    bool swap_br = false;
};

enum class Annihilator { C1, C2, S1, S2 };

/// Operator value together with the sum of the magnitudes of its additive
/// terms; residual checks compare against `scale`.
struct OperatorSample {
    Complex value;
    double scale;
};

/// Applies one of the image-space annihilators to F at p by central
/// differences with the slot mapping d0->x, d1->y, d2->b, d3->r.
OperatorSample apply_annihilator_scaled(Annihilator which, const FieldFunction& F,
                                        const PhasePoint& p, Hbar h, const FdScheme& fd);
Complex apply_annihilator(Annihilator which, const FieldFunction& F, const PhasePoint& p,
                          Hbar h, const FdScheme& fd);

/// The generic-solution lift: p -> sqrt(r) * exp(-pi i hbar x^2 / w) * f2(z, w).
FieldFunction lift_G(const HoloJet& f2, Hbar h);

/// Left side of the structural condition
/// w f2_zz - 4 pi i hbar z f2_z - 4 pi i hbar w f2_w - 2 pi i hbar f2.
Complex structural_residual(const HoloJet& f2, Complex z, Complex w, Hbar h);
OperatorSample structural_residual_scaled(const HoloJet& f2, Complex z, Complex w, Hbar h);

/// Change of variables (z, w, v) -> (z/w, 1/w, v/sqrt(w)). Rejects w == 0.
std::array<Complex, 3> schrodinger_coords(Complex z, Complex w, Complex f2val);
/// Inverse of schrodinger_coords.
std::array<Complex, 3> schrodinger_coords_inverse(Complex zs, Complex ws, Complex vs);

/// First-order operator intertwining the source-side second derivative:
/// 2 pi i hbar (w x d_x + x d_y + 2 w^2 d_b + w I) with w = b + i r^2.
OperatorSample apply_D0_scaled(const FieldFunction& F, const PhasePoint& p, Hbar h,
                               const FdScheme& fd);
Complex apply_D0(const FieldFunction& F, const PhasePoint& p, Hbar h, const FdScheme& fd);

/// Image-chart form of the same operator: 2 pi i hbar w (2 z f2_z + 2 w f2_w + f2).
Complex apply_D(const HoloJet& f2, Complex z, Complex w, Hbar h);

/// Derivative of a holomorphic function by an m-point Cauchy circle stencil of
/// the given radius. Exact for polynomials of degree < m; noise ~ eps/radius.
Complex cauchy_derivative(const std::function<Complex(Complex)>& f, Complex z0, double radius,
                          int points = 8);

/// Max relative mismatch between the jet's stated partials and circle-stencil
/// derivatives at (z, w).
double jet_consistency_residual(const HoloJet& jet, Complex z, Complex w);

/// Cauchy-Riemann residual |d/dz along real displacement - d/dz along
/// imaginary displacement| of f at z0, normalized by the derivative scale.
double cauchy_riemann_residual(const std::function<Complex(Complex)>& f, Complex z0);

}  // namespace metamorph
