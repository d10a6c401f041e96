#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "jumpgeo/geometry.hpp"
#include "support.hpp"

using namespace jumpgeo;
using testsupport::vec;

namespace {

// Plain RK4 on x'' = -|x'|^2 x (great circles of the unit sphere), no renormalisation.
Vector sphere_geodesic_rk4(Vector x, Vector v, int steps) {
    const double h = 1.0 / steps;
    auto acc = [](const Vector& p, const Vector& q) -> Vector { return -q.squaredNorm() * p; };
    for (int i = 0; i < steps; ++i) {
        const Vector k1x = v, k1v = acc(x, v);
        const Vector k2x = v + 0.5 * h * k1v, k2v = acc(x + 0.5 * h * k1x, v + 0.5 * h * k1v);
        const Vector k3x = v + 0.5 * h * k2v, k3v = acc(x + 0.5 * h * k2x, v + 0.5 * h * k2v);
        const Vector k4x = v + h * k3v, k4v = acc(x + h * k3x, v + h * k3v);
        x += h / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x);
        v += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
    }
    return x;
}

}  // namespace

TEST_CASE("project_to_tangent examples") {
    const Manifold s2 = Manifold::sphere(2);
    CHECK((project_to_tangent(s2, vec({0, 0, 1}), vec({1, 2, 3})).vec - vec({1, 2, 0})).norm() == 0.0);
    CHECK(project_to_tangent(s2, vec({1, 0, 0}), vec({5, 0, 0})).vec.norm() == 0.0);
    const Manifold r3 = Manifold::euclidean(3);
    CHECK(project_to_tangent(r3, vec({7, -1, 2}), vec({1, 2, 3})).vec == vec({1, 2, 3}));
    CHECK_THROWS_AS(project_to_tangent(s2, vec({0, 0, 1.1}), vec({1, 0, 0})), DomainError);
}

TEST_CASE("sphere membership tolerance") {
    const Manifold s2 = Manifold::sphere(2);
    CHECK(s2.contains(vec({0, 0, 1})));
    CHECK(s2.contains(vec({0, 0, 1 + 4e-13})));
    CHECK_FALSE(s2.contains(vec({0, 0, 1 + 1e-11})));
    CHECK_FALSE(s2.contains(vec({0, 1})));
    CHECK(Manifold::sphere(1).kind() == ManifoldKind::Circle);
}

TEST_CASE("exp_map examples") {
    const Manifold c = Manifold::circle();
    CHECK((exp_map(c, {vec({1, 0}), vec({0, M_PI})}) - vec({-1, 0})).norm() < 1e-15);

    const Manifold s2 = Manifold::sphere(2);
    const Vector north = vec({0, 0, 1});
    CHECK(exp_map(s2, {north, Vector::Zero(3)}) == north);
    const Vector e = exp_map(s2, {north, vec({M_PI / 2, 0, 0})});
    CHECK((e - vec({1, 0, 0})).norm() < 1e-15);
    // independent ODE route
    const Vector ode = sphere_geodesic_rk4(north, vec({M_PI / 2, 0, 0}), 4000);
    CHECK((ode - e).norm() < 1e-12);

    const Manifold r2 = Manifold::euclidean(2);
    CHECK(exp_map(r2, {vec({1, 1}), vec({2, -3})}) == vec({3, -2}));
}

TEST_CASE("exp_map agrees with an ODE integration on random sphere data") {
    std::mt19937_64 rng(11);
    const Manifold s2 = Manifold::sphere(2);
    for (int i = 0; i < 20; ++i) {
        const Vector x = testsupport::random_sphere_point(3, rng);
        const Vector v = 2.5 * random_unit_tangent(s2, x, rng);
        CHECK((exp_map(s2, {x, v}) - sphere_geodesic_rk4(x, v, 4000)).norm() < 1e-11);
    }
}

TEST_CASE("log_map examples") {
    const Manifold c = Manifold::circle();
    const TangentVector l = log_map(c, vec({1, 0}), vec({0, 1}));
    CHECK((l.vec - vec({0, M_PI / 2})).norm() < 1e-15);
    CHECK(log_map(c, vec({1, 0}), vec({1, 0})).vec.norm() == 0.0);

    const Manifold s2 = Manifold::sphere(2);
    CHECK_THROWS_AS(log_map(s2, vec({0, 0, 1}), vec({0, 0, -1})), CutLocusError);
    const double tiny = 1e-5;  // 1 + <x,y> ~ tiny^2 / 2 < 1e-8
    CHECK_THROWS_AS(log_map(s2, vec({0, 0, 1}), vec({std::sin(tiny), 0, -std::cos(tiny)})),
                    CutLocusError);
    CHECK_NOTHROW(log_map(s2, vec({0, 0, 1}), vec({std::sin(0.01), 0, -std::cos(0.01)})));
}

TEST_CASE("geodesic_distance examples") {
    const Manifold s2 = Manifold::sphere(2);
    CHECK(geodesic_distance(s2, vec({0, 0, 1}), vec({1, 0, 0})) == doctest::Approx(M_PI / 2).epsilon(1e-15));
    CHECK(geodesic_distance(s2, vec({0, 0, 1}), vec({0, 0, 1})) == 0.0);
    CHECK(geodesic_distance(Manifold::euclidean(2), vec({0, 0}), vec({3, 4})) == 5.0);
}

TEST_CASE("riemannian_inner examples") {
    const Manifold s2 = Manifold::sphere(2);
    const Vector n = vec({0, 0, 1});
    CHECK(riemannian_inner(s2, {n, vec({1, 0, 0})}, {n, vec({1, 0, 0})}) == 1.0);
    CHECK(riemannian_inner(s2, {n, vec({1, 0, 0})}, {n, vec({0, 1, 0})}) == 0.0);
    CHECK(riemannian_inner(s2, {n, vec({2, 0, 0})}, {n, vec({1, 1, 0})}) == 2.0);
    CHECK_THROWS_AS(riemannian_inner(s2, {n, vec({1, 0, 0})}, {vec({1, 0, 0}), vec({0, 1, 0})}),
                    DomainError);
}

TEST_CASE("property: projection is an orthogonal projector with radial kernel") {
    std::mt19937_64 rng(3);
    for (const Manifold& m : {Manifold::sphere(2), Manifold::circle(), Manifold::sphere(4)}) {
        const int a = m.ambient_dim();
        for (int i = 0; i < 1000; ++i) {
            const Vector x = m.sample_point(rng);
            const Vector u = testsupport::gaussian(a, rng);
            const Vector v = testsupport::gaussian(a, rng);
            const Vector pu = m.project(x, u);
            CHECK((m.project(x, pu) - pu).norm() <= 1e-12);
            CHECK(std::abs(pu.dot(v) - u.dot(m.project(x, v))) <= 1e-12);
            CHECK(m.project(x, x).norm() <= 1e-12);
        }
    }
}

TEST_CASE("property: exp/log round trip and distance consistency on spheres") {
    std::mt19937_64 rng(5);
    for (const Manifold& m : {Manifold::sphere(2), Manifold::circle(), Manifold::sphere(3)}) {
        for (int i = 0; i < 1000; ++i) {
            const Vector x = m.sample_point(rng);
            std::uniform_real_distribution<double> len(0.0, 0.9 * m.injectivity_radius());
            const Vector v = len(rng) * random_unit_tangent(m, x, rng);
            const Vector y = exp_map(m, {x, v});
            CHECK(m.contains(y));
            CHECK((log_map(m, x, y).vec - v).norm() <= 1e-8);
            CHECK(std::abs(geodesic_distance(m, x, y) - v.norm()) <= 1e-9);
            CHECK(geodesic_distance(m, x, y) == geodesic_distance(m, y, x));
        }
    }
}

TEST_CASE("tangent basis is orthonormal and tangent") {
    std::mt19937_64 rng(8);
    const Manifold s3 = Manifold::sphere(3);
    for (int i = 0; i < 50; ++i) {
        const Vector x = s3.sample_point(rng);
        const auto basis = s3.tangent_basis(x);
        REQUIRE(basis.size() == 3);
        for (std::size_t a = 0; a < basis.size(); ++a) {
            CHECK(std::abs(basis[a].dot(x)) < 1e-12);
            for (std::size_t b = 0; b < basis.size(); ++b) {
                CHECK(std::abs(basis[a].dot(basis[b]) - (a == b ? 1.0 : 0.0)) < 1e-12);
            }
        }
    }
}

TEST_CASE("second fundamental form of the sphere") {
    const Manifold s2 = Manifold::sphere(2);
    const Vector x = vec({0, 0, 1});
    CHECK((s2.second_fundamental_form(x, vec({1, 0, 0}), vec({1, 0, 0})) - vec({0, 0, -1})).norm() < 1e-15);
    CHECK(s2.second_fundamental_form(x, vec({1, 0, 0}), vec({0, 1, 0})).norm() < 1e-15);
    CHECK(Manifold::euclidean(3).second_fundamental_form(x, vec({1, 0, 0}), vec({1, 0, 0})).norm() == 0.0);
}

TEST_CASE("generic sphere reproduces the closed forms") {
    const Manifold g = testsupport::generic_sphere();
    const Manifold s2 = Manifold::sphere(2);
    std::mt19937_64 rng(21);
    for (int i = 0; i < 10; ++i) {
        const Vector x = testsupport::random_sphere_point(3, rng);
        const Vector u = random_unit_tangent(s2, x, rng);
        const Vector w = random_unit_tangent(s2, x, rng);
        CHECK((g.second_fundamental_form(x, u, w) - s2.second_fundamental_form(x, u, w)).norm() < 1e-6);
        const Vector v = 1.7 * u;
        const Vector y = exp_map(g, {x, v});
        CHECK((y - exp_map(s2, {x, v})).norm() < 1e-9);
        CHECK((log_map(g, x, y).vec - v).norm() < 1e-7);
        CHECK(std::abs(geodesic_distance(g, x, y) - 1.7) < 1e-7);
    }
}

TEST_CASE("generic torus geodesics along a meridian and the outer equator") {
    const Manifold t = testsupport::torus();
    const Vector x = testsupport::torus_point(0.0, 0.0);  // (3, 0, 0)
    CHECK(t.contains(x));
    // meridian: circle of radius 1 in the xz-plane around (2, 0, 0)
    const double s = 1.2;
    const Vector y = exp_map(t, {x, vec({0, 0, s})});
    CHECK((y - testsupport::torus_point(0.0, s / testsupport::kTorusMinor)).norm() < 1e-9);
    // outer equator: circle of radius 3
    const Vector z = exp_map(t, {x, vec({0, s, 0})});
    CHECK((z - testsupport::torus_point(s / 3.0, 0.0)).norm() < 1e-9);
    CHECK((log_map(t, x, y).vec - vec({0, 0, s})).norm() < 1e-7);
    CHECK_THROWS_AS(exp_map(t, {vec({3, 0, 0.5}), vec({0, 1, 0})}), DomainError);
}
