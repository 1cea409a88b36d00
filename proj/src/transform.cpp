#include "metamorph/transform.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "metamorph/closed_forms.hpp"
#include "metamorph/parallel.hpp"
#include "metamorph/quadrature.hpp"
#include "metamorph/simd/kernels.hpp"

namespace metamorph {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_xy_axes(const GridSpec& grid) {
    if (grid.axes.size() != 2 || grid.axes[0].label != "x" || grid.axes[1].label != "y")
        throw std::invalid_argument("grid axes must be exactly (x, y)");
}

void require_same_grid(const SampledField& a, const SampledField& b) {
    if (a.grid.axes.size() != b.grid.axes.size())
        throw std::invalid_argument("fields sampled on different grids");
    for (std::size_t i = 0; i < a.grid.axes.size(); ++i) {
        const Axis& ax = a.grid.axes[i];
        const Axis& bx = b.grid.axes[i];
        if (ax.min != bx.min || ax.max != bx.max || ax.count != bx.count)
            throw std::invalid_argument("fields sampled on different grids");
    }
}

double max_abs(const SampledField& f) {
    double m = 0.0;
    for (const Complex& v : f.values) m = std::max(m, std::abs(v));
    return m;
}

void check_boundary_decay(const SampledField& f, const char* what) {
    const std::size_t nx = f.grid.axes.at(0).count;
    const std::size_t ny = f.grid.axes.at(1).count;
    const double cap = 1e-8 * max_abs(f);
    double worst = 0.0;
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) {
            if (i != 0 && i + 1 != nx && j != 0 && j + 1 != ny) continue;
            worst = std::max(worst, std::abs(f.at(i, j)));
        }
    if (worst > cap)
        throw QuadratureError(std::string(what) +
                              ": field does not decay below 1e-8 of its peak at the grid "
                              "boundary (grid too small)");
}

// Sequential pairwise reduction; order fixed, independent of callers' threads.
Complex pairwise_sum(std::vector<Complex>& terms) {
    if (terms.empty()) return {};
    std::size_t n = terms.size();
    while (n > 1) {
        const std::size_t half = n / 2;
        for (std::size_t i = 0; i < half; ++i) terms[i] = terms[2 * i] + terms[2 * i + 1];
        if (n % 2) {
            terms[half] = terms[n - 1];
            n = half + 1;
        } else {
            n = half;
        }
    }
    return terms[0];
}

void spot_check_decay(const SourceFunction& f, double lo, double hi) {
    const DecayBound& d = f.decay;
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const double u = lo + t * (hi - lo);
        const double bound = d.C * std::exp(-d.alpha * (u - d.center) * (u - d.center));
        const Complex v = f.f(u);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw QuadratureError("source function returned a non-finite value");
        if (std::abs(v) > bound * (1.0 + 1e-9) + 1e-300)
            throw std::invalid_argument("source decay metadata violated by spot sample");
    }
}

struct RowSum {
    std::vector<double> wre, wim, ere, eim;
    void resize(std::size_t n) {
        wre.resize(n);
        wim.resize(n);
        ere.resize(n);
        eim.resize(n);
    }
    Complex reduce() const { return simd::weighted_cexp_sum(wre, wim, ere, eim); }
};

Complex forward_with_plan(const SourceFunction& f, const PhasePoint& p, double hb,
                          const detail::PanelPlan& plan) {
    const std::size_t n = plan.nodes.size();
    RowSum row;
    row.resize(n);
    const double beta = kPi * hb * p.r * p.r;
    for (std::size_t j = 0; j < n; ++j) {
        const double u = plan.nodes[j];
        const double v = u - p.y;
        const Complex fv = f.f(u);
        if (!std::isfinite(fv.real()) || !std::isfinite(fv.imag()))
            throw QuadratureError("non-finite integrand sample in forward transform");
        row.wre[j] = plan.weights[j] * fv.real();
        row.wim[j] = plan.weights[j] * fv.imag();
        row.ere[j] = -beta * v * v;
        row.eim[j] = kPi * hb * p.b * v * v - 2.0 * kPi * hb * p.x * v;
    }
    return std::sqrt(hb * p.r) * row.reduce();
}

}  // namespace

namespace detail {

PanelPlan forward_plan(const DecayBound& decay, const PhasePoint& p, double hb,
                       const QuadratureSpec& q, int nodes_override) {
    const double beta = kPi * hb * p.r * p.r;
    const double alpha = std::max(decay.alpha, 0.0);
    const double rho = beta + alpha;
    // combined Gaussian envelope center, formed in u coordinates so a narrow
    // source keeps its spike position to full precision
    const double u_center = (alpha * decay.center + beta * p.y) / rho;
    const double logC = std::log(std::max(decay.C, 1.0));
    const double L = std::sqrt(std::max(logC + std::log(1.0 / q.truncation_eps), 1.0) / rho);
    if (L > q.max_halfwidth)
        throw QuadratureError("forward truncation halfwidth exceeds max_halfwidth "
                              "(source decays too slowly for the requested eps)");

    const double vmax = std::abs(u_center - p.y) + L;
    const double osc = hb * (std::abs(p.x) + std::abs(p.b) * vmax);  // cycles per unit v
    double width = 0.25 / std::sqrt(rho);
    if (osc > 0.0) width = std::min(width, 0.25 / osc);
    const int panels = std::max(q.panels, static_cast<int>(std::ceil(2.0 * L / width)));
    const int nodes = nodes_override > 0 ? nodes_override : q.nodes_per_panel;
    const GaussLegendreRule& rule = gauss_legendre(nodes);

    PanelPlan plan;
    plan.nodes.reserve(static_cast<std::size_t>(panels) * nodes);
    plan.weights.reserve(static_cast<std::size_t>(panels) * nodes);
    const double lo = u_center - L;
    const double pw = 2.0 * L / panels;
    for (int pnl = 0; pnl < panels; ++pnl) {
        const double mid = lo + (pnl + 0.5) * pw;
        for (int k = 0; k < nodes; ++k) {
            plan.nodes.push_back(mid + 0.5 * pw * rule.nodes[k]);
            plan.weights.push_back(0.5 * pw * rule.weights[k]);
        }
    }
    return plan;
}

}  // namespace detail

Complex& SampledField::at(std::size_t i, std::size_t j) {
    return values[i * static_cast<std::size_t>(grid.axes.at(1).count) + j];
}

const Complex& SampledField::at(std::size_t i, std::size_t j) const {
    return values[i * static_cast<std::size_t>(grid.axes.at(1).count) + j];
}

void validate(const SampledField& field) {
    validate(field.grid);
    if (field.values.size() != field.grid.node_count())
        throw std::invalid_argument("field value count does not match the grid");
    for (const Complex& v : field.values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("field contains non-finite values");
}

QuadratureResult forward(const SourceFunction& f, const PhasePoint& p, Hbar h,
                         const QuadratureSpec& q) {
    validate(p);
    validate(h);
    validate(q);
    const auto plan = detail::forward_plan(f.decay, p, h.value, q);
    spot_check_decay(f, plan.nodes.front(), plan.nodes.back());
    const Complex full = forward_with_plan(f, p, h.value, plan);
    const auto half_plan =
        detail::forward_plan(f.decay, p, h.value, q, std::max(2, q.nodes_per_panel / 2));
    const Complex half = forward_with_plan(f, p, h.value, half_plan);
    return {full, std::abs(full - half)};
}

Complex forward_value(const SourceFunction& f, const PhasePoint& p, Hbar h,
                      const QuadratureSpec& q) {
    validate(p);
    validate(h);
    validate(q);
    const auto plan = detail::forward_plan(f.decay, p, h.value, q);
    spot_check_decay(f, plan.nodes.front(), plan.nodes.back());
    return forward_with_plan(f, p, h.value, plan);
}

SampledField forward_grid(const SourceFunction& f, const GridSpec& grid,
                          const ReferenceSheet& sheet, Hbar h, const QuadratureSpec& q) {
    validate(grid);
    require_xy_axes(grid);
    validate(sheet);
    validate(h);
    validate(q);
    SampledField out;
    out.grid = grid;
    out.values.resize(grid.node_count());
    out.coords = FieldCoords::PhaseSpace;
    out.hbar = h.value;
    out.sheet = sheet;
    const std::size_t nx = grid.axes[0].count;
    const std::size_t ny = grid.axes[1].count;
    parallel_for(nx, [&](std::size_t i) {
        for (std::size_t j = 0; j < ny; ++j) {
            const PhasePoint p{grid.coordinate(0, i), grid.coordinate(1, j), sheet.b0, sheet.r0};
            try {
                out.at(i, j) = forward_value(f, p, h, q);
            } catch (const QuadratureError& e) {
                throw QuadratureError(std::string(e.what()) + " [grid node (" +
                                      std::to_string(i) + ", " + std::to_string(j) + ")]");
            }
        }
    });
    return out;
}

Complex pairing(const SampledField& F1, const SampledField& F2, const ReferenceSheet& sheet,
                Hbar h) {
    validate(F1);
    validate(F2);
    validate(sheet);
    validate(h);
    require_xy_axes(F1.grid);
    require_same_grid(F1, F2);
    for (const SampledField* f : {&F1, &F2})
        if (f->sheet && (f->sheet->b0 != sheet.b0 || f->sheet->r0 != sheet.r0))
            throw std::invalid_argument("field sheet metadata disagrees with the pairing sheet");
    check_boundary_decay(F1, "pairing");
    check_boundary_decay(F2, "pairing");

    const std::size_t nx = F1.grid.axes[0].count;
    const std::size_t ny = F1.grid.axes[1].count;
    const double dx = F1.grid.step(0);
    const double dy = F1.grid.step(1);
    std::vector<Complex> rows(nx);
    for (std::size_t i = 0; i < nx; ++i) {
        Complex acc{};
        for (std::size_t j = 0; j < ny; ++j) {
            double wt = 1.0;
            if (i == 0 || i + 1 == nx) wt *= 0.5;
            if (j == 0 || j + 1 == ny) wt *= 0.5;
            acc += wt * F1.at(i, j) * std::conj(F2.at(i, j));
        }
        rows[i] = acc;
    }
    const Complex total = pairwise_sum(rows);
    return std::sqrt(2.0 * h.value) * dx * dy * total;
}

Complex reproduce(const SampledField& F, const PhasePoint& p, const ReferenceSheet& sheet,
                  Hbar h) {
    validate(F);
    validate(p);
    validate(sheet);
    validate(h);
    require_xy_axes(F.grid);
    check_boundary_decay(F, "reproduce");
    SampledField kernel;
    kernel.grid = F.grid;
    kernel.values.resize(F.grid.node_count());
    kernel.coords = FieldCoords::PhaseSpace;
    kernel.hbar = h.value;
    kernel.sheet = sheet;
    const std::size_t nx = F.grid.axes[0].count;
    const std::size_t ny = F.grid.axes[1].count;
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) {
            const PhasePoint p0{F.grid.coordinate(0, i), F.grid.coordinate(1, j), sheet.b0,
                                sheet.r0};
            kernel.at(i, j) = reproducing_kernel(p, p0, h);
        }
    return pairing(F, kernel, sheet, h);
}

namespace {

Complex inverse_raw(const SampledField& F, double u, const ReferenceSheet& sheet, double hb) {
    const std::size_t nx = F.grid.axes.at(0).count;
    const std::size_t ny = F.grid.axes.at(1).count;
    const double dx = F.grid.step(0);
    const double dy = F.grid.step(1);

    // kernel modulus is flat along x, so x-edges must decay through F itself;
    // y-edges get the Gaussian envelope factor
    const double fmax = max_abs(F);
    double worst = 0.0;
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) {
            const bool xedge = (i == 0 || i + 1 == nx);
            const bool yedge = (j == 0 || j + 1 == ny);
            if (!xedge && !yedge) continue;
            double v = std::abs(F.at(i, j));
            if (!xedge) {
                const double d = u - F.grid.coordinate(1, j);
                v *= std::exp(-kPi * hb * sheet.r0 * sheet.r0 * d * d);
            }
            worst = std::max(worst, v);
        }
    if (worst > 1e-8 * fmax)
        throw QuadratureError("inverse: integrand does not decay at the grid boundary");

    std::vector<double> wre(nx), wim(nx), ere(nx), eim(nx);
    std::vector<Complex> rows(ny);
    for (std::size_t j = 0; j < ny; ++j) {
        const double d = u - F.grid.coordinate(1, j);
        const double ere_row = -kPi * hb * sheet.r0 * sheet.r0 * d * d;
        const double eim_row = -kPi * hb * sheet.b0 * d * d;
        double wy = (j == 0 || j + 1 == ny) ? 0.5 : 1.0;
        for (std::size_t i = 0; i < nx; ++i) {
            double wt = wy * ((i == 0 || i + 1 == nx) ? 0.5 : 1.0);
            const Complex fv = F.at(i, j);
            wre[i] = wt * fv.real();
            wim[i] = wt * fv.imag();
            ere[i] = ere_row;
            eim[i] = eim_row + 2.0 * kPi * hb * d * F.grid.coordinate(0, i);
        }
        rows[j] = simd::weighted_cexp_sum(wre, wim, ere, eim);
    }
    return std::sqrt(sheet.r0) * dx * dy * pairwise_sum(rows);
}

}  // namespace

double inverse_calibration(Hbar h, const ReferenceSheet& sheet, const QuadratureSpec& q) {
    validate(h);
    validate(sheet);
    using Key = std::tuple<double, double, double>;
    static std::mutex mutex;
    static std::map<Key, double> cache;
    const Key key{h.value, sheet.b0, sheet.r0};
    {
        std::lock_guard lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const double hb = h.value;
    SourceFunction gauss{[hb](double u) { return Complex(std::exp(-kPi * hb * u * u), 0.0); },
                         DecayBound{1.0, kPi * hb, 0.0}};
    // extent sized so the calibration slice clears the 1e-8 boundary bar on
    // any sheet: the slice decays in x at rate pi*hbar*Re(1/A)
    const Complex A(sheet.r0 * sheet.r0 + 1.0, -sheet.b0);
    const double rate = kPi * hb * (A / std::norm(A)).real();
    const double extent = std::max(4.0 / std::sqrt(hb), std::sqrt(22.0 / rate));
    const GridSpec grid = make_xy_grid(-extent, extent, 257, -extent, extent, 257);
    const SampledField F = forward_grid(gauss, grid, sheet, h, q);
    const Complex raw = inverse_raw(F, 0.0, sheet, hb);
    const double c = 1.0 / raw.real();
    if (!std::isfinite(c) || std::abs(raw.imag()) > 1e-6 * std::abs(raw.real()))
        throw QuadratureError("inverse calibration failed (degenerate raw value)");
    std::lock_guard lock(mutex);
    cache.emplace(key, c);
    return c;
}

Complex inverse(const SampledField& F, double u, Hbar h, const QuadratureSpec& q) {
    validate(F);
    validate(h);
    validate(q);
    require_xy_axes(F.grid);
    if (!F.sheet) throw std::invalid_argument("inverse requires sheet metadata on the field");
    const ReferenceSheet sheet = *F.sheet;
    const double c = inverse_calibration(h, sheet, q);
    return c * inverse_raw(F, u, sheet, h.value);
}

GridSpec make_xy_grid(double xmin, double xmax, int nx, double ymin, double ymax, int ny) {
    GridSpec grid;
    grid.axes = {Axis{"x", xmin, xmax, nx}, Axis{"y", ymin, ymax, ny}};
    validate(grid);
    return grid;
}

}  // namespace metamorph
