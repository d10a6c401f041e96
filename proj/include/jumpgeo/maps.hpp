#pragma once

#include <functional>
#include <optional>

#include "jumpgeo/geometry.hpp"

namespace jumpgeo {

/// A map h : R^m -> N with N an embedded manifold in R^d.
struct MapIntoManifold {
    int domain_dim = 1;
    Manifold target = Manifold::euclidean(1);
    std::function<Vector(const Vector&)> eval;
    /// Radius around a probe point within which h is known to be C^2.
    double smoothness_radius = std::numeric_limits<double>::infinity();
    /// Optional d x m Jacobian; finite differences are used otherwise.
    std::function<Eigen::MatrixXd(const Vector&)> jacobian;

    Vector operator()(const Vector& z) const { return eval(z); }

    /// Scalar function u : R^m -> R viewed as a map into R^1.
    static MapIntoManifold scalar(int domain_dim, std::function<double(const Vector&)> u);
    /// z -> c for a fixed point c of the target.
    static MapIntoManifold constant(int domain_dim, Manifold target, Vector c);
    /// z -> (cos theta(z), sin theta(z)) into the circle.
    static MapIntoManifold circle_valued(int domain_dim, std::function<double(const Vector&)> theta);
    /// z -> R h(z) for an orthogonal R preserving the target.
    MapIntoManifold rotated(const Eigen::MatrixXd& r) const;
    /// z -> h(lambda z).
    MapIntoManifold rescaled(double lambda) const;
};

/// The circle-valued map z -> (1, z_1) / sqrt(1 + z_1^2) = (cos atan z_1, sin atan z_1).
MapIntoManifold arctan_circle_map(int domain_dim);

}  // namespace jumpgeo
