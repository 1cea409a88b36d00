#include "metamorph/core.hpp"

#include <cmath>

namespace metamorph {

std::size_t GridSpec::node_count() const {
    std::size_t n = 1;
    for (const auto& ax : axes) n *= static_cast<std::size_t>(ax.count);
    return n;
}

double GridSpec::coordinate(std::size_t axis, std::size_t index) const {
    const Axis& ax = axes.at(axis);
    if (ax.count == 1) return ax.min;
    return ax.min + static_cast<double>(index) * (ax.max - ax.min) / static_cast<double>(ax.count - 1);
}

double GridSpec::step(std::size_t axis) const {
    const Axis& ax = axes.at(axis);
    if (ax.count < 2) throw std::invalid_argument("grid axis '" + ax.label + "' has no step (count < 2)");
    return (ax.max - ax.min) / static_cast<double>(ax.count - 1);
}

void validate(const Hbar& h) {
    if (!(h.value > 0.0) || !std::isfinite(h.value))
        throw std::invalid_argument("hbar must be a positive finite real");
}

void validate(const PhasePoint& p) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.b) || !std::isfinite(p.r))
        throw std::invalid_argument("phase point has non-finite coordinates");
    if (!(p.r > 0.0)) throw std::invalid_argument("phase point requires r > 0");
}

void validate(const ReferenceSheet& sheet) {
    if (!std::isfinite(sheet.b0) || !std::isfinite(sheet.r0) || !(sheet.r0 > 0.0))
        throw std::invalid_argument("reference sheet requires finite b0 and r0 > 0");
}

void validate(const QuadratureSpec& q) {
    if (q.panels < 1) throw std::invalid_argument("quadrature panels must be >= 1");
    if (q.nodes_per_panel < 2) throw std::invalid_argument("quadrature nodes_per_panel must be >= 2");
    if (!(q.truncation_eps > 0.0) || !(q.truncation_eps < 1.0))
        throw std::invalid_argument("quadrature truncation_eps must lie in (0, 1)");
    if (!(q.max_halfwidth > 0.0)) throw std::invalid_argument("quadrature max_halfwidth must be > 0");
}

void validate(const GridSpec& grid) {
    if (grid.axes.empty()) throw std::invalid_argument("grid must have at least one axis");
    for (const auto& ax : grid.axes) {
        if (ax.count < 1) throw std::invalid_argument("grid axis '" + ax.label + "' needs count >= 1");
        if (!std::isfinite(ax.min) || !std::isfinite(ax.max))
            throw std::invalid_argument("grid axis '" + ax.label + "' has non-finite bounds");
        if (ax.count == 1) {
            if (ax.min != ax.max)
                throw std::invalid_argument("grid axis '" + ax.label + "' with count 1 needs min == max");
        } else if (!(ax.min < ax.max)) {
            throw std::invalid_argument("grid axis '" + ax.label + "' needs min < max");
        }
    }
}

ComplexChart phase_to_complex(const PhasePoint& p) {
    validate(p);
    const Complex w(p.b, p.r * p.r);
    return ComplexChart{Complex(p.x, 0.0) + w * p.y, w};
}

PhasePoint complex_to_phase(const ComplexChart& c) {
    if (!(c.w.imag() > 0.0)) throw std::invalid_argument("chart inversion requires Im(w) > 0");
    PhasePoint p;
    p.b = c.w.real();
    p.r = std::sqrt(c.w.imag());
    p.y = c.z.imag() / c.w.imag();
    p.x = c.z.real() - p.b * p.y;
    return p;
}

Complex principal_sqrt(Complex a) {
    return std::sqrt(a);
}

Complex cexp_guarded(Complex e) {
    if (e.real() < -745.0) return Complex(0.0, 0.0);
    return std::exp(e);
}

}  // namespace metamorph
