#include "jumpgeo/connection.hpp"

#include <algorithm>

namespace jumpgeo {

std::string to_string(RuleKind kind) {
    switch (kind) {
        case RuleKind::Euclidean: return "euclidean";
        case RuleKind::Projection: return "projection";
        case RuleKind::Exponential: return "exponential";
    }
    return "?";
}

RuleKind parse_rule_kind(const std::string& name) {
    if (name == "euclidean") return RuleKind::Euclidean;
    if (name == "projection") return RuleKind::Projection;
    if (name == "exponential") return RuleKind::Exponential;
    throw DomainError("unknown connection rule '" + name + "'");
}

ConnectionRule::ConnectionRule(RuleKind kind, Manifold manifold)
    : kind_(kind), manifold_(std::move(manifold)) {
    if (kind_ == RuleKind::Euclidean && !manifold_.is_flat()) {
        throw DomainError("the Euclidean rule y - x is not tangent on " + manifold_.name());
    }
}

Vector evaluate_unchecked(const ConnectionRule& rule, const Vector& x, const Vector& y) {
    const Manifold& m = rule.manifold();
    if (x == y) return Vector::Zero(x.size());
    switch (rule.kind()) {
        case RuleKind::Euclidean: return y - x;
        case RuleKind::Projection: return m.project(x, y - x);
        case RuleKind::Exponential: return log_map(m, x, y).vec;
    }
    return Vector::Zero(x.size());
}

TangentVector evaluate(const ConnectionRule& rule, const Vector& x, const Vector& y) {
    const Manifold& m = rule.manifold();
    m.require_member(x, "rule base point");
    m.require_member(y, "rule target point");
    return {x, evaluate_unchecked(rule, x, y)};
}

double AxiomReport::worst() const {
    return std::max({max_tangency, max_diagonal, max_differential});
}

namespace {

// A curve through x with velocity e at 0.
Vector curve(const Manifold& m, const Vector& x, const Vector& e, double t) {
    switch (m.kind()) {
        case ManifoldKind::Euclidean: return x + t * e;
        case ManifoldKind::Generic: return m.retract(x + t * e);
        default: return exp_map(m, {x, t * e});
    }
}

}  // namespace

AxiomReport check_axioms(const ConnectionRule& rule, int samples, std::uint64_t seed) {
    if (samples < 1) throw DomainError("check_axioms: samples must be >= 1");
    const Manifold& m = rule.manifold();
    std::mt19937_64 rng(seed);
    AxiomReport report;
    report.samples = samples;
    const double h = kAxiomStep;
    for (int s = 0; s < samples; ++s) {
        const Vector x = m.sample_point(rng);
        report.max_diagonal = std::max(report.max_diagonal, evaluate(rule, x, x).vec.norm());

        // (i) on a nearby point in a random tangent direction.
        const Vector dir = random_unit_tangent(m, x, rng);
        const Vector y = curve(m, x, dir, 0.3);
        const Vector g = evaluate(rule, x, y).vec;
        report.max_tangency = std::max(report.max_tangency, (m.project(x, g) - g).norm());

        // (iii) along each basis direction.
        for (const Vector& e : m.tangent_basis(x)) {
            const Vector plus = evaluate(rule, x, curve(m, x, e, h)).vec;
            const Vector minus = evaluate(rule, x, curve(m, x, e, -h)).vec;
            const Vector diff = (plus - minus) / (2.0 * h);
            report.max_differential = std::max(report.max_differential, (diff - e).norm());
        }
    }
    return report;
}

}  // namespace jumpgeo
