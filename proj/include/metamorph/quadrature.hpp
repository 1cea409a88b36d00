#pragma once

#include <cstddef>
#include <vector>

namespace metamorph {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes and weights for an n-point rule (Newton on the Legendre polynomial,
/// Chebyshev initial guess). Results are cached per n.
const GaussLegendreRule& gauss_legendre(int n);

}  // namespace metamorph
