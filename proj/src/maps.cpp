#include "jumpgeo/maps.hpp"

#include <cmath>

namespace jumpgeo {

MapIntoManifold MapIntoManifold::scalar(int domain_dim, std::function<double(const Vector&)> u) {
    MapIntoManifold h;
    h.domain_dim = domain_dim;
    h.target = Manifold::euclidean(1);
    h.eval = [u = std::move(u)](const Vector& z) {
        Vector out(1);
        out[0] = u(z);
        return out;
    };
    return h;
}

MapIntoManifold MapIntoManifold::constant(int domain_dim, Manifold target, Vector c) {
    target.require_member(c, "constant map value");
    MapIntoManifold h;
    h.domain_dim = domain_dim;
    h.target = std::move(target);
    h.eval = [c = std::move(c)](const Vector&) { return c; };
    return h;
}

MapIntoManifold MapIntoManifold::circle_valued(int domain_dim,
                                               std::function<double(const Vector&)> theta) {
    MapIntoManifold h;
    h.domain_dim = domain_dim;
    h.target = Manifold::circle();
    h.eval = [theta = std::move(theta)](const Vector& z) {
        const double a = theta(z);
        Vector out(2);
        out << std::cos(a), std::sin(a);
        return out;
    };
    return h;
}

MapIntoManifold MapIntoManifold::rotated(const Eigen::MatrixXd& r) const {
    MapIntoManifold h = *this;
    h.eval = [inner = eval, r](const Vector& z) -> Vector { return r * inner(z); };
    if (jacobian) {
        h.jacobian = [inner = jacobian, r](const Vector& z) -> Eigen::MatrixXd { return r * inner(z); };
    }
    return h;
}

MapIntoManifold MapIntoManifold::rescaled(double lambda) const {
    MapIntoManifold h = *this;
    h.eval = [inner = eval, lambda](const Vector& z) { return inner(lambda * z); };
    if (jacobian) {
        h.jacobian = [inner = jacobian, lambda](const Vector& z) -> Eigen::MatrixXd {
            return lambda * inner(lambda * z);
        };
    }
    h.smoothness_radius = smoothness_radius / std::abs(lambda);
    return h;
}

MapIntoManifold arctan_circle_map(int domain_dim) {
    MapIntoManifold h;
    h.domain_dim = domain_dim;
    h.target = Manifold::circle();
    h.eval = [](const Vector& z) {
        const double s = 1.0 / std::sqrt(1.0 + z[0] * z[0]);
        Vector out(2);
        out << s, z[0] * s;
        return out;
    };
    h.jacobian = [domain_dim](const Vector& z) {
        const double q = 1.0 + z[0] * z[0];
        const double s3 = 1.0 / (q * std::sqrt(q));
        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2, domain_dim);
        j(0, 0) = -z[0] * s3;
        j(1, 0) = s3;
        return j;
    };
    return h;
}

}  // namespace jumpgeo
