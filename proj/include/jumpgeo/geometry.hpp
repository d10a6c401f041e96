#pragma once

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "jumpgeo/errors.hpp"

namespace jumpgeo {

using Vector = Eigen::VectorXd;

/// Membership tolerance for closed-form manifolds: | |x|^2 - 1 | <= 1e-12 on spheres.
inline constexpr double kMembershipTol = 1e-12;
/// log_map refuses pairs with 1 + <x,y> below this on spheres.
inline constexpr double kCutLocusTol = 1e-8;

enum class ManifoldKind { Euclidean, Circle, Sphere, Generic };

/// User-supplied description of an embedded submanifold N of R^a.
///
/// `project(x, v)` must return the orthogonal projection of the ambient vector v
/// onto T_xN for x on N. `retract(p)` must map an ambient point p inside the
/// tubular neighbourhood onto its nearest point of N. Everything else (exp, log,
/// distance, second fundamental form) is derived numerically from these two.
struct GenericCallbacks {
    std::function<Vector(const Vector&, const Vector&)> project;
    std::function<Vector(const Vector&)> retract;
    /// Radius of the tubular neighbourhood on which `retract` is valid. No
    /// constructive bound exists in general, so the caller provides it.
    double tubular_radius = 0.0;
    double injectivity_radius = std::numeric_limits<double>::infinity();
    double diameter = std::numeric_limits<double>::infinity();
    double membership_tol = 1e-10;
    /// Optional sampler of points on N; needed by the axiom checker.
    std::function<Vector(std::mt19937_64&)> sample;
};

/// An embedded Riemannian manifold N in R^a with the induced metric.
///
/// Points are always stored in ambient coordinates. Spheres and the circle use
/// closed forms; Generic manifolds go through the callbacks.
class Manifold {
  public:
    static Manifold euclidean(int dim);
    static Manifold circle();
    /// Unit sphere S^n in R^{n+1}. `sphere(1)` is the same object as `circle()`.
    static Manifold sphere(int n);
    static Manifold generic(int ambient_dim, int intrinsic_dim, GenericCallbacks callbacks);

    ManifoldKind kind() const { return kind_; }
    int ambient_dim() const { return ambient_dim_; }
    int intrinsic_dim() const { return intrinsic_dim_; }
    bool is_flat() const { return kind_ == ManifoldKind::Euclidean; }
    bool is_sphere() const { return kind_ == ManifoldKind::Circle || kind_ == ManifoldKind::Sphere; }
    std::string name() const;

    double injectivity_radius() const;
    double diameter() const;

    /// Membership predicate (dimension check included).
    bool contains(const Vector& x) const;
    /// Throws DomainError naming `what` when x is not on the manifold.
    void require_member(const Vector& x, const char* what = "point") const;

    /// Pi_x v, without the membership check.
    Vector project(const Vector& x, const Vector& v) const;
    /// Nearest point on the manifold for an ambient point near it.
    Vector retract(const Vector& p) const;
    /// Normal-valued second fundamental form II_x(u, v) for tangent u, v.
    Vector second_fundamental_form(const Vector& x, const Vector& u, const Vector& v) const;
    /// Orthonormal basis of T_xN: Gram-Schmidt on projected ambient axes.
    std::vector<Vector> tangent_basis(const Vector& x) const;
    /// A random point on the manifold. Euclidean samples lie on a dyadic grid.
    Vector sample_point(std::mt19937_64& rng) const;
    /// Default base point: last axis for spheres, (1,0) for the circle, origin for R^a.
    Vector default_point() const;

    const GenericCallbacks* callbacks() const { return callbacks_.get(); }

  private:
    Manifold(ManifoldKind kind, int ambient, int intrinsic)
        : kind_(kind), ambient_dim_(ambient), intrinsic_dim_(intrinsic) {}

    ManifoldKind kind_;
    int ambient_dim_;
    int intrinsic_dim_;
    std::shared_ptr<const GenericCallbacks> callbacks_;
};

/// A tangent vector in ambient coordinates together with its base point.
struct TangentVector {
    Vector base;
    Vector vec;

    double norm() const { return vec.norm(); }
};

TangentVector project_to_tangent(const Manifold& m, const Vector& x, const Vector& v);

/// exp_x(v). Closed form on spheres; projection-retraction geodesic integration
/// (step 1e-3 in arc length, Richardson-checked) on Generic manifolds.
Vector exp_map(const Manifold& m, const TangentVector& v);

/// exp_x^{-1}(y). Throws CutLocusError for antipodal input on spheres.
TangentVector log_map(const Manifold& m, const Vector& x, const Vector& y);

double geodesic_distance(const Manifold& m, const Vector& x, const Vector& y);

/// Induced metric g_x(u, v).
double riemannian_inner(const Manifold& m, const TangentVector& u, const TangentVector& v);

/// Uniform unit vector in T_xN: isotropic ambient Gaussian, projected and normalised.
Vector random_unit_tangent(const Manifold& m, const Vector& x, std::mt19937_64& rng);

}  // namespace jumpgeo
