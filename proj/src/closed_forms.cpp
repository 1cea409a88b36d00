#include "metamorph/closed_forms.hpp"

#include <cmath>

namespace metamorph {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_packet(const Complex& sigma) {
    if (!(sigma.real() > 0.0))
        throw std::invalid_argument("wave packet requires Re(sigma) > 0");
}

// f2 exponent and prefactor of the packet in chart coordinates.
struct PacketChart {
    Complex A;  // sigma/hbar - i w
    Complex g;  // exponent of f2
};

PacketChart packet_chart(Complex sigma, Complex lambda, Complex z, Complex w, double hb) {
    const Complex A = sigma / hb - kI * w;
    const Complex g = -kPi * (lambda * lambda / (hb * A) + 2.0 * z * lambda / A -
                              kI * z * z * sigma / (A * w));
    return {A, g};
}

}  // namespace

Complex gaussian_integral(Complex a, Complex z) {
    if (!(a.real() > 0.0))
        throw std::invalid_argument("gaussian_integral requires Re(a) > 0");
    return cexp_guarded(-kPi * z * z / a) / principal_sqrt(a);
}

namespace detail {

Complex packet_direct(Complex sigma, Complex lambda, const PhasePoint& p, double hb) {
    const Complex A = Complex(p.r * p.r, -p.b) + sigma / hb;
    const Complex z1 = p.x + (lambda - kI * sigma * p.y) / hb;
    const Complex exponent =
        -kPi * sigma * p.y * p.y - 2.0 * kPi * kI * lambda * p.y - kPi * hb * z1 * z1 / A;
    return std::sqrt(p.r) / principal_sqrt(A) * cexp_guarded(exponent);
}

}  // namespace detail

Complex wave_packet_metamorphism(const WavePacketSpec& spec, const PhasePoint& p, Hbar h) {
    validate(p);
    validate(h);
    require_packet(spec.sigma);
    const double hb = h.value;
    const ComplexChart c = phase_to_complex(p);
    const PacketChart pc = packet_chart(spec.sigma, spec.lambda, c.z, c.w, hb);
    const Complex chart_form = std::sqrt(p.r) / principal_sqrt(pc.A) *
                               cexp_guarded(-kPi * kI * hb * p.x * p.x / c.w + pc.g);
    const Complex direct = detail::packet_direct(spec.sigma, spec.lambda, p, hb);
    const double mag = std::abs(chart_form) + std::abs(direct);
    if (mag > 1e-280 && std::abs(chart_form - direct) > 1e-12 * mag)
        throw std::logic_error("wave packet transform: chart and direct forms disagree");
    return chart_form;
}

Complex plane_wave_metamorphism(const PlaneWaveSpec& spec, const PhasePoint& p, Hbar h) {
    validate(p);
    validate(h);
    const double hb = h.value;
    const Complex A(p.r * p.r, -p.b);
    const Complex arg = spec.kbar() / hb + p.x;
    const Complex exponent = -kI * spec.k * p.y - kPi * hb * arg * arg / A;
    return std::sqrt(p.r) / principal_sqrt(A) * cexp_guarded(exponent);
}

Complex delta_metamorphism(int order, const PhasePoint& p, Hbar h) {
    validate(p);
    validate(h);
    if (order != 0 && order != 1)
        throw std::invalid_argument("delta_metamorphism order must be 0 or 1");
    const double hb = h.value;
    const Complex exponent =
        -kPi * hb * Complex(p.r * p.r, -p.b) * p.y * p.y + 2.0 * kPi * kI * hb * p.y * p.x;
    const Complex order0 = std::sqrt(hb * p.r) * cexp_guarded(exponent);
    if (order == 0) return order0;
    const Complex z = phase_to_complex(p).z;
    return -2.0 * kPi * kI * hb * z * order0;
}

Complex reproducing_kernel(const PhasePoint& p, const PhasePoint& p0, Hbar h) {
    validate(p);
    validate(p0);
    validate(h);
    const double hb = h.value;
    const Complex D(p0.r * p0.r + p.r * p.r, p.b - p0.b);
    const Complex w0(p0.b, p0.r * p0.r);
    const double dy = p0.y - p.y;
    const Complex u = p0.x - p.x + w0 * dy;
    const Complex exponent =
        -kPi * hb * u * u / D + kPi * kI * hb * (2.0 * dy * p0.x + w0 * dy * dy);
    return std::sqrt(hb) * principal_sqrt(p.r * p0.r / D) * cexp_guarded(exponent);
}

HoloJet wave_packet_f2(const WavePacketSpec& spec, Hbar h) {
    validate(h);
    require_packet(spec.sigma);
    const Complex sigma = spec.sigma;
    const Complex lambda(spec.lambda, 0.0);
    const double hb = h.value;
    HoloJet jet;
    jet.value = [=](Complex z, Complex w) {
        const PacketChart pc = packet_chart(sigma, lambda, z, w, hb);
        return cexp_guarded(pc.g) / principal_sqrt(pc.A);
    };
    jet.dz = [=](Complex z, Complex w) {
        const PacketChart pc = packet_chart(sigma, lambda, z, w, hb);
        const Complex gz = -(2.0 * kPi / pc.A) * (lambda - kI * z * sigma / w);
        return cexp_guarded(pc.g) / principal_sqrt(pc.A) * gz;
    };
    jet.dw = [=](Complex z, Complex w) {
        const PacketChart pc = packet_chart(sigma, lambda, z, w, hb);
        const Complex A = pc.A;
        const Complex gw = -kPi * (kI * lambda * lambda / (hb * A * A) +
                                   2.0 * kI * z * lambda / (A * A) +
                                   kI * z * z * sigma * (A - kI * w) / (A * A * w * w));
        return cexp_guarded(pc.g) / principal_sqrt(A) * (gw + kI / (2.0 * A));
    };
    jet.dzz = [=](Complex z, Complex w) {
        const PacketChart pc = packet_chart(sigma, lambda, z, w, hb);
        const Complex gz = -(2.0 * kPi / pc.A) * (lambda - kI * z * sigma / w);
        const Complex gzz = 2.0 * kPi * kI * sigma / (pc.A * w);
        return cexp_guarded(pc.g) / principal_sqrt(pc.A) * (gz * gz + gzz);
    };
    return jet;
}

HoloJet plane_wave_f2(double k, Hbar h) {
    validate(h);
    const double hb = h.value;
    const auto expo = [k, hb](Complex z, Complex w) {
        return (-kI * k * z + k * k / (4.0 * kPi * kI * hb)) / w;
    };
    HoloJet jet;
    jet.value = [=](Complex z, Complex w) {
        return cexp_guarded(expo(z, w)) / principal_sqrt(-kI * w);
    };
    jet.dz = [=](Complex z, Complex w) {
        return cexp_guarded(expo(z, w)) / principal_sqrt(-kI * w) * (-kI * k / w);
    };
    jet.dw = [=](Complex z, Complex w) {
        const Complex v = cexp_guarded(expo(z, w)) / principal_sqrt(-kI * w);
        return v * (-expo(z, w) / w - 1.0 / (2.0 * w));
    };
    jet.dzz = [=](Complex z, Complex w) {
        const Complex d = -kI * k / w;
        return cexp_guarded(expo(z, w)) / principal_sqrt(-kI * w) * d * d;
    };
    return jet;
}

}  // namespace metamorph
