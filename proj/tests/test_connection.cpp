#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "jumpgeo/connection.hpp"
#include "support.hpp"

using namespace jumpgeo;
using testsupport::vec;

TEST_CASE("rule names round trip") {
    for (RuleKind k : {RuleKind::Euclidean, RuleKind::Projection, RuleKind::Exponential}) {
        CHECK(parse_rule_kind(to_string(k)) == k);
    }
    CHECK_THROWS_AS(parse_rule_kind("parallel"), DomainError);
}

TEST_CASE("evaluate examples") {
    const Manifold c = Manifold::circle();
    const ConnectionRule proj(RuleKind::Projection, c);
    CHECK(evaluate(proj, vec({1, 0}), vec({-1, 0})).vec.norm() == 0.0);

    const Manifold s2 = Manifold::sphere(2);
    for (RuleKind k : {RuleKind::Projection, RuleKind::Exponential}) {
        const ConnectionRule rule(k, s2);
        const Vector x = vec({0.6, 0, 0.8});
        const TangentVector g = evaluate(rule, x, x);
        CHECK(g.vec.norm() == 0.0);
        CHECK(g.base == x);
    }

    const ConnectionRule p2(RuleKind::Projection, s2);
    const ConnectionRule e2(RuleKind::Exponential, s2);
    for (double r : {0.01, 0.1, 0.3, 1.0}) {
        const Vector x = vec({0, 0, 1});
        const Vector y = vec({std::sin(r), 0, std::cos(r)});
        const Vector gp = evaluate(p2, x, y).vec;
        const Vector ge = evaluate(e2, x, y).vec;
        CHECK((gp - vec({std::sin(r), 0, 0})).norm() < 1e-15);
        CHECK((ge - vec({r, 0, 0})).norm() < 1e-14);
        CHECK(std::abs((ge - gp).norm() - (r - std::sin(r))) < 1e-14);
    }
    CHECK_THROWS_AS(evaluate(e2, vec({0, 0, 1}), vec({0, 0, -1})), CutLocusError);
    CHECK_THROWS_AS(ConnectionRule(RuleKind::Euclidean, s2), DomainError);
    CHECK_THROWS_AS(evaluate(p2, vec({0, 0, 1}), vec({0, 0, 2})), DomainError);
}

TEST_CASE("flat space: projection and exponential both give y - x") {
    const Manifold r3 = Manifold::euclidean(3);
    std::mt19937_64 rng(4);
    const ConnectionRule eu(RuleKind::Euclidean, r3), pr(RuleKind::Projection, r3),
        ex(RuleKind::Exponential, r3);
    for (int i = 0; i < 100; ++i) {
        const Vector x = r3.sample_point(rng), y = r3.sample_point(rng);
        const Vector d = y - x;
        CHECK(evaluate(eu, x, y).vec == d);
        CHECK(evaluate(pr, x, y).vec == d);
        CHECK(evaluate(ex, x, y).vec == d);
    }
}

TEST_CASE("check_axioms examples") {
    const AxiomReport p = check_axioms(ConnectionRule(RuleKind::Projection, Manifold::sphere(2)), 100, 1);
    CHECK(p.samples == 100);
    CHECK(p.max_tangency <= 1e-5);
    CHECK(p.max_diagonal == 0.0);
    CHECK(p.max_differential <= 1e-5);

    const AxiomReport e = check_axioms(ConnectionRule(RuleKind::Exponential, Manifold::circle()), 100, 1);
    CHECK(e.worst() <= 1e-5);

    const AxiomReport f = check_axioms(ConnectionRule(RuleKind::Euclidean, Manifold::euclidean(3)), 100, 1);
    CHECK(f.worst() == 0.0);
}

TEST_CASE("check_axioms is deterministic in the seed") {
    const ConnectionRule r(RuleKind::Exponential, Manifold::sphere(2));
    const AxiomReport a = check_axioms(r, 50, 9), b = check_axioms(r, 50, 9);
    CHECK(a.max_differential == b.max_differential);
    CHECK(a.max_tangency == b.max_tangency);
}

TEST_CASE("axioms hold on a generic torus") {
    const Manifold t = testsupport::torus();
    for (RuleKind k : {RuleKind::Projection, RuleKind::Exponential}) {
        const AxiomReport rep = check_axioms(ConnectionRule(k, t), 20, 2);
        CHECK(rep.max_diagonal == 0.0);
        CHECK(rep.max_tangency <= 1e-8);
        CHECK(rep.max_differential <= 1e-5);
    }
}

TEST_CASE("property: projection and exponential rules agree to third order") {
    const Manifold s2 = Manifold::sphere(2);
    const ConnectionRule p(RuleKind::Projection, s2), e(RuleKind::Exponential, s2);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> radius(0.0, 0.3);
    for (int i = 0; i < 2000; ++i) {
        const Vector x = s2.sample_point(rng);
        const double r = radius(rng);
        const Vector y = exp_map(s2, {x, r * random_unit_tangent(s2, x, rng)});
        const double d = geodesic_distance(s2, x, y);
        CHECK((evaluate(p, x, y).vec - evaluate(e, x, y).vec).norm() <= d * d * d);
    }
}
