#pragma once

#include <cmath>
#include <random>

#include "jumpgeo/geometry.hpp"

namespace testsupport {

using jumpgeo::Vector;

inline Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

inline Vector gaussian(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = g(rng);
    return v;
}

inline Vector random_sphere_point(int ambient, std::mt19937_64& rng) {
    Vector v = gaussian(ambient, rng);
    return v / v.norm();
}

// The unit sphere S^2 again, but only through projection and retraction, so the
// generic code paths can be compared with the closed forms.
inline jumpgeo::Manifold generic_sphere() {
    jumpgeo::GenericCallbacks cb;
    cb.project = [](const Vector& x, const Vector& v) -> Vector {
        return v - x * (x.dot(v) / x.squaredNorm());
    };
    cb.retract = [](const Vector& p) -> Vector { return p / p.norm(); };
    cb.tubular_radius = 0.5;
    cb.injectivity_radius = M_PI;
    cb.diameter = M_PI;
    cb.sample = [](std::mt19937_64& rng) { return random_sphere_point(3, rng); };
    return jumpgeo::Manifold::generic(3, 2, cb);
}

// Torus of revolution in R^3: distance 2 from the axis to the tube centre, tube radius 1.
inline constexpr double kTorusMajor = 2.0;
inline constexpr double kTorusMinor = 1.0;

inline Vector torus_core(const Vector& p) {
    const double rho = std::hypot(p[0], p[1]);
    return vec({kTorusMajor * p[0] / rho, kTorusMajor * p[1] / rho, 0.0});
}

inline Vector torus_point(double u, double v) {
    const double rho = kTorusMajor + kTorusMinor * std::cos(v);
    return vec({rho * std::cos(u), rho * std::sin(u), kTorusMinor * std::sin(v)});
}

inline jumpgeo::Manifold torus() {
    jumpgeo::GenericCallbacks cb;
    cb.project = [](const Vector& x, const Vector& v) -> Vector {
        Vector n = x - torus_core(x);
        n /= n.norm();
        return v - n * n.dot(v);
    };
    cb.retract = [](const Vector& p) -> Vector {
        const Vector c = torus_core(p);
        const Vector d = p - c;
        return c + kTorusMinor * d / d.norm();
    };
    cb.tubular_radius = 0.9;
    cb.injectivity_radius = M_PI * kTorusMinor;
    cb.sample = [](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> a(0.0, 2.0 * M_PI);
        return torus_point(a(rng), a(rng));
    };
    return jumpgeo::Manifold::generic(3, 2, cb);
}

}  // namespace testsupport
