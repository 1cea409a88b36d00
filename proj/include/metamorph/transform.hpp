#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "metamorph/core.hpp"

namespace metamorph {

/// |f(u)| <= C * exp(-alpha (u - center)^2); alpha = 0 means merely bounded.
/// Used only to size the truncation window; spot-checked at sample nodes.
struct DecayBound {
    double C = 1.0;
    double alpha = 0.0;
    double center = 0.0;
};

struct SourceFunction {
    std::function<Complex(double)> f;
    DecayBound decay{};
};

enum class FieldCoords { PhaseSpace, Physical };

/// Complex field sampled on a rectangular grid, row-major in axis order.
struct SampledField {
    GridSpec grid;
    std::vector<Complex> values;
    FieldCoords coords = FieldCoords::PhaseSpace;
    double hbar = 1.0;
    std::optional<ReferenceSheet> sheet;

    Complex& at(std::size_t i, std::size_t j);
    const Complex& at(std::size_t i, std::size_t j) const;
};

void validate(const SampledField& field);

struct QuadratureResult {
    Complex value;
    double error_estimate;
};

/// Forward transform at one phase point by composite Gauss-Legendre panels on
/// the truncated envelope window; the estimate is the change under halving the
/// per-panel node count.
QuadratureResult forward(const SourceFunction& f, const PhasePoint& p, Hbar h,
                         const QuadratureSpec& q);
Complex forward_value(const SourceFunction& f, const PhasePoint& p, Hbar h,
                      const QuadratureSpec& q);

/// Element-wise forward on an (x, y) grid at a fixed sheet. Deterministic
/// regardless of the worker count.
SampledField forward_grid(const SourceFunction& f, const GridSpec& grid,
                          const ReferenceSheet& sheet, Hbar h, const QuadratureSpec& q);

/// Phase-space inner product of two sheet slices, sqrt(2 hbar) dx dy measure;
/// equals the source-side L2 inner product for transform pairs.
Complex pairing(const SampledField& F1, const SampledField& F2, const ReferenceSheet& sheet,
                Hbar h);

/// Evaluates the field at an arbitrary phase point (any b, r) from one sheet
/// slice by pairing against the sheet-restricted kernel.
Complex reproduce(const SampledField& F, const PhasePoint& p, const ReferenceSheet& sheet,
                  Hbar h);

/// Recovers the source at u from a sheet slice; the normalization constant is
/// calibrated once per (hbar, sheet) and cached.
Complex inverse(const SampledField& F, double u, Hbar h, const QuadratureSpec& q);

/// The calibrated constant c(hbar, sheet) used by inverse().
double inverse_calibration(Hbar h, const ReferenceSheet& sheet, const QuadratureSpec& q);

/// Convenience (x, y) grid.
GridSpec make_xy_grid(double xmin, double xmax, int nx, double ymin, double ymax, int ny);

namespace detail {
/// Panel-rule node/weight plan for the forward integral at p (nodes in u).
struct PanelPlan {
    std::vector<double> nodes;
    std::vector<double> weights;
};
PanelPlan forward_plan(const DecayBound& decay, const PhasePoint& p, double hbar,
                       const QuadratureSpec& q, int nodes_override = 0);
}  // namespace detail

}  // namespace metamorph
