#pragma once

#include <cstdint>
#include <string>

#include "jumpgeo/geometry.hpp"

namespace jumpgeo {

enum class RuleKind {
    Euclidean,    ///< gamma(x, y) = y - x, flat space only
    Projection,   ///< gamma(x, y) = Pi_x(y - x)
    Exponential,  ///< gamma(x, y) = exp_x^{-1} y
};

std::string to_string(RuleKind kind);
/// Parses "euclidean", "projection" or "exponential"; DomainError otherwise.
RuleKind parse_rule_kind(const std::string& name);

/// A connection rule bound to the manifold it acts on.
class ConnectionRule {
  public:
    /// Euclidean rules are only accepted on flat manifolds.
    ConnectionRule(RuleKind kind, Manifold manifold);

    RuleKind kind() const { return kind_; }
    const Manifold& manifold() const { return manifold_; }

  private:
    RuleKind kind_;
    Manifold manifold_;
};

/// gamma(x, y) in T_xM. Exact zero on the diagonal for every kind.
TangentVector evaluate(const ConnectionRule& rule, const Vector& x, const Vector& y);

/// Same as `evaluate`, skipping membership checks. For hot loops over points
/// that were already validated.
Vector evaluate_unchecked(const ConnectionRule& rule, const Vector& x, const Vector& y);

/// Worst-case deviations from the three connection-rule axioms.
struct AxiomReport {
    int samples = 0;
    double max_tangency = 0.0;     ///< (i)   |Pi_x gamma(x,y) - gamma(x,y)|
    double max_diagonal = 0.0;     ///< (ii)  |gamma(x,x)|
    double max_differential = 0.0; ///< (iii) |d gamma(x,.)_x e - e| over an orthonormal basis

    double worst() const;
};

/// Central-difference step used for axiom (iii). A power of two near 1e-5, so
/// that affine rules on dyadic sample points difference exactly.
inline constexpr double kAxiomStep = 0x1p-17;

/// Random-sample certificate of the axioms near the diagonal. Deterministic in `seed`.
AxiomReport check_axioms(const ConnectionRule& rule, int samples, std::uint64_t seed);

}  // namespace jumpgeo
