#include "metamorph/jets.hpp"

#include <cmath>

namespace metamorph {

namespace {

constexpr Complex kI{0.0, 1.0};

enum Coord { kX = 0, kY = 1, kB = 2, kR = 3 };

PhasePoint shifted(const PhasePoint& p, int coord, double delta) {
    PhasePoint q = p;
    switch (coord) {
        case kX: q.x += delta; break;
        case kY: q.y += delta; break;
        case kB: q.b += delta; break;
        case kR: q.r += delta; break;
    }
    return q;
}

double coord_value(const PhasePoint& p, int coord) {
    switch (coord) {
        case kX: return p.x;
        case kY: return p.y;
        case kB: return p.b;
        default: return p.r;
    }
}

int map_coord(int coord, const FdScheme& fd) {
    if (fd.swap_br) {
        if (coord == kB) return kR;
        if (coord == kR) return kB;
    }
    return coord;
}

Complex eval(const FieldFunction& F, const PhasePoint& p) {
    const Complex v = F(p);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw QuadratureError("field evaluation produced a non-finite stencil value");
    return v;
}

Complex d1(const FieldFunction& F, const PhasePoint& p, int coord, const FdScheme& fd) {
    const int c = map_coord(coord, fd);
    const double h = fd.first_rel * (1.0 + std::abs(coord_value(p, c)));
    if (!(h > 0.0)) throw QuadratureError("finite-difference step underflow");
    return (eval(F, shifted(p, c, h)) - eval(F, shifted(p, c, -h))) / (2.0 * h);
}

Complex d2xx(const FieldFunction& F, const PhasePoint& p, const FdScheme& fd) {
    const double h = fd.second_rel * (1.0 + std::abs(p.x));
    return (eval(F, shifted(p, kX, h)) - 2.0 * eval(F, p) + eval(F, shifted(p, kX, -h))) /
           (h * h);
}

Complex d2xy(const FieldFunction& F, const PhasePoint& p, const FdScheme& fd) {
    const double hx = fd.second_rel * (1.0 + std::abs(p.x));
    const double hy = fd.second_rel * (1.0 + std::abs(p.y));
    PhasePoint pp = p, pm = p, mp = p, mm = p;
    pp.x += hx; pp.y += hy;
    pm.x += hx; pm.y -= hy;
    mp.x -= hx; mp.y += hy;
    mm.x -= hx; mm.y -= hy;
    return (eval(F, pp) - eval(F, pm) - eval(F, mp) + eval(F, mm)) / (4.0 * hx * hy);
}

OperatorSample sum_terms(std::initializer_list<Complex> terms, Complex f0) {
    Complex total{};
    double scale = std::abs(f0);
    for (const Complex& t : terms) {
        total += t;
        scale += std::abs(t);
    }
    return {total, scale};
}

}  // namespace

OperatorSample apply_annihilator_scaled(Annihilator which, const FieldFunction& F,
                                        const PhasePoint& p, Hbar h, const FdScheme& fd) {
    validate(p);
    validate(h);
    const double hb = h.value;
    const Complex f0 = eval(F, p);
    switch (which) {
        case Annihilator::C1: {
            const Complex a = (Complex(p.r * p.r, -p.b) * d1(F, p, kX, fd)) / p.r;
            const Complex b = (kI * d1(F, p, kY, fd)) / p.r;
            const Complex c = Complex(2.0 * kPi * hb * p.x, 0.0) * f0 / p.r;
            return sum_terms({a, b, c}, f0);
        }
        case Annihilator::C2: {
            const Complex a = 2.0 * p.r * p.r * d1(F, p, kB, fd);
            const Complex b = kI * p.r * d1(F, p, kR, fd);
            const Complex c = -0.5 * kI * f0;
            return sum_terms({a, b, c}, f0);
        }
        case Annihilator::S1: {
            const Complex a = p.r * p.r * 4.0 * kPi * kI * hb * d1(F, p, kB, fd);
            const Complex b = -p.r * p.r * d2xx(F, p, fd);
            return sum_terms({a, b}, f0);
        }
        case Annihilator::S2: {
            const Complex a = -2.0 * kPi * kI * p.r * hb * d1(F, p, kR, fd);
            const Complex b = -p.b * d2xx(F, p, fd);
            const Complex c = d2xy(F, p, fd);
            const Complex d = -2.0 * kPi * kI * p.x * hb * d1(F, p, kX, fd);
            const Complex e = -kI * kPi * hb * f0;
            return sum_terms({a, b, c, d, e}, f0);
        }
    }
    throw std::invalid_argument("unknown annihilator");
}

Complex apply_annihilator(Annihilator which, const FieldFunction& F, const PhasePoint& p,
                          Hbar h, const FdScheme& fd) {
    return apply_annihilator_scaled(which, F, p, h, fd).value;
}

FieldFunction lift_G(const HoloJet& f2, Hbar h) {
    validate(h);
    const double hb = h.value;
    return [f2, hb](const PhasePoint& p) -> Complex {
        const ComplexChart c = phase_to_complex(p);
        const Complex pref = cexp_guarded(-kPi * kI * hb * p.x * p.x / c.w);
        return std::sqrt(p.r) * pref * f2.value(c.z, c.w);
    };
}

OperatorSample structural_residual_scaled(const HoloJet& f2, Complex z, Complex w, Hbar h) {
    validate(h);
    if (!(w.imag() > 0.0)) throw std::invalid_argument("structural residual requires Im(w) > 0");
    const double hb = h.value;
    const Complex v = f2.value(z, w);
    const Complex a = w * f2.dzz(z, w);
    const Complex b = -4.0 * kPi * kI * hb * z * f2.dz(z, w);
    const Complex c = -4.0 * kPi * kI * hb * w * f2.dw(z, w);
    const Complex d = -2.0 * kPi * kI * hb * v;
    return sum_terms({a, b, c, d}, v);
}

Complex structural_residual(const HoloJet& f2, Complex z, Complex w, Hbar h) {
    return structural_residual_scaled(f2, z, w, h).value;
}

std::array<Complex, 3> schrodinger_coords(Complex z, Complex w, Complex f2val) {
    if (w == Complex(0.0, 0.0)) throw std::invalid_argument("schrodinger_coords requires w != 0");
    return {z / w, 1.0 / w, f2val / principal_sqrt(w)};
}

std::array<Complex, 3> schrodinger_coords_inverse(Complex zs, Complex ws, Complex vs) {
    if (ws == Complex(0.0, 0.0))
        throw std::invalid_argument("schrodinger_coords_inverse requires ws != 0");
    const Complex w = 1.0 / ws;
    return {zs * w, w, vs * principal_sqrt(w)};
}

OperatorSample apply_D0_scaled(const FieldFunction& F, const PhasePoint& p, Hbar h,
                               const FdScheme& fd) {
    validate(p);
    validate(h);
    const double hb = h.value;
    const Complex w(p.b, p.r * p.r);
    const Complex pref = 2.0 * kPi * kI * hb;
    const Complex f0 = eval(F, p);
    const Complex a = pref * w * p.x * d1(F, p, kX, fd);
    const Complex b = pref * p.x * d1(F, p, kY, fd);
    const Complex c = pref * 2.0 * w * w * d1(F, p, kB, fd);
    const Complex d = pref * w * f0;
    return sum_terms({a, b, c, d}, f0);
}

Complex apply_D0(const FieldFunction& F, const PhasePoint& p, Hbar h, const FdScheme& fd) {
    return apply_D0_scaled(F, p, h, fd).value;
}

Complex apply_D(const HoloJet& f2, Complex z, Complex w, Hbar h) {
    validate(h);
    if (!(w.imag() > 0.0)) throw std::invalid_argument("apply_D requires Im(w) > 0");
    const double hb = h.value;
    return 2.0 * kPi * kI * hb * w *
           (2.0 * z * f2.dz(z, w) + 2.0 * w * f2.dw(z, w) + f2.value(z, w));
}

Complex cauchy_derivative(const std::function<Complex(Complex)>& f, Complex z0, double radius,
                          int points) {
    Complex acc{};
    for (int j = 0; j < points; ++j) {
        const double theta = 2.0 * kPi * j / points;
        const Complex omega = std::polar(1.0, theta);
        acc += f(z0 + radius * omega) * std::conj(omega);
    }
    return acc / (radius * static_cast<double>(points));
}

double jet_consistency_residual(const HoloJet& jet, Complex z, Complex w) {
    const double rz = 1e-3 * (1.0 + std::abs(z));
    const double rw = 1e-3 * (1.0 + std::abs(w));
    const Complex v = jet.value(z, w);
    const Complex dz_est = cauchy_derivative([&](Complex zz) { return jet.value(zz, w); }, z, rz);
    const Complex dw_est = cauchy_derivative([&](Complex ww) { return jet.value(z, ww); }, w,
                                             std::min(rw, 0.25 * w.imag()));
    const Complex dzz_est = cauchy_derivative([&](Complex zz) { return jet.dz(zz, w); }, z, rz);
    double worst = 0.0;
    const auto rel = [&](Complex est, Complex stated) {
        return std::abs(est - stated) / (std::abs(stated) + std::abs(v) + 1e-300);
    };
    worst = std::max(worst, rel(dz_est, jet.dz(z, w)));
    worst = std::max(worst, rel(dw_est, jet.dw(z, w)));
    worst = std::max(worst, rel(dzz_est, jet.dzz(z, w)));
    return worst;
}

double cauchy_riemann_residual(const std::function<Complex(Complex)>& f, Complex z0) {
    const double h = 1e-5 * (1.0 + std::abs(z0));
    const Complex d_real = (f(z0 + h) - f(z0 - h)) / (2.0 * h);
    const Complex d_imag = (f(z0 + kI * h) - f(z0 - kI * h)) / (2.0 * kI * h);
    return std::abs(d_real - d_imag) / (std::abs(d_real) + std::abs(d_imag) + 1e-300);
}

}  // namespace metamorph
