#pragma once

#include <vector>

#include "jumpgeo/geometry.hpp"

namespace jumpgeo {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Directions and weights on the unit sphere S^{m-1} in R^m; weights sum to its
/// area. m = 1 gives {+1, -1}; m = 2 the midpoint rule in the angle; m >= 3 a
/// product rule in hyperspherical angles (Gauss-Legendre in the polar angles,
/// midpoint in the azimuth).
struct SphereRule {
    std::vector<Vector> directions;
    std::vector<double> weights;
};
SphereRule sphere_rule(int m, int order);

}  // namespace jumpgeo
