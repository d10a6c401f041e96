#include "jumpgeo/geometry.hpp"

#include <cmath>
#include <sstream>

namespace jumpgeo {

namespace {

// Arc-length step for generic geodesic integration.
constexpr double kGeodesicStep = 1e-3;
// Richardson threshold between the h and h/2 integrations.
constexpr double kGeodesicTol = 1e-7;
// Finite-difference step for the derivative of the projection field.
constexpr double kShapeStep = 1e-5;

void require_dim(const Manifold& m, const Vector& v, const char* what) {
    if (v.size() != m.ambient_dim()) {
        std::ostringstream os;
        os << what << " has dimension " << v.size() << ", expected " << m.ambient_dim() << " for "
           << m.name();
        throw DomainError(os.str());
    }
}

double sphere_distance(const Vector& x, const Vector& y) {
    // Equal to arccos(<x,y>) on the unit sphere, accurate for nearby and
    // nearly antipodal points alike.
    return 2.0 * std::atan2((x - y).norm(), (x + y).norm());
}

struct GeodesicState {
    Vector x;
    Vector v;
};

// Unit-speed geodesic of length `length` from x in direction `dir`, RK4 on
// x'' = II_x(x', x') with retraction back onto the manifold after each step.
Vector integrate_geodesic(const Manifold& m, const Vector& x0, const Vector& dir, double length,
                          int steps) {
    const double h = length / steps;
    auto accel = [&](const Vector& x, const Vector& v) {
        Vector xr = m.retract(x);
        Vector vt = m.project(xr, v);
        return m.second_fundamental_form(xr, vt, vt);
    };
    GeodesicState s{x0, dir};
    for (int i = 0; i < steps; ++i) {
        Vector k1x = s.v;
        Vector k1v = accel(s.x, s.v);
        Vector k2x = s.v + 0.5 * h * k1v;
        Vector k2v = accel(s.x + 0.5 * h * k1x, k2x);
        Vector k3x = s.v + 0.5 * h * k2v;
        Vector k3v = accel(s.x + 0.5 * h * k2x, k3x);
        Vector k4x = s.v + h * k3v;
        Vector k4v = accel(s.x + h * k3x, k4x);
        Vector x = s.x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        Vector v = s.v + (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        s.x = m.retract(x);
        s.v = m.project(s.x, v);
        const double n = s.v.norm();
        if (!(n > 0.0) || !std::isfinite(n)) {
            throw NumericError("geodesic integration lost the velocity");
        }
        s.v /= n;
    }
    return s.x;
}

Vector generic_exp(const Manifold& m, const Vector& x, const Vector& v) {
    const double length = v.norm();
    if (length == 0.0) return x;
    const Vector dir = v / length;
    const int steps = std::max(1, static_cast<int>(std::ceil(length / kGeodesicStep)));
    Vector coarse = integrate_geodesic(m, x, dir, length, steps);
    Vector fine = integrate_geodesic(m, x, dir, length, 2 * steps);
    if ((coarse - fine).norm() > kGeodesicTol * std::max(1.0, length)) {
        throw NumericError("geodesic integration failed the Richardson check");
    }
    return fine;
}

TangentVector generic_log(const Manifold& m, const Vector& x, const Vector& y) {
    const auto basis = m.tangent_basis(x);
    const int k = static_cast<int>(basis.size());
    Eigen::MatrixXd frame(m.ambient_dim(), k);
    for (int j = 0; j < k; ++j) frame.col(j) = basis[j];

    Vector v = m.project(x, y - x);
    constexpr double delta = 1e-6;
    for (int iter = 0; iter < 40; ++iter) {
        if (v.norm() >= m.injectivity_radius()) {
            throw CutLocusError("log_map: shooting left the injectivity ball");
        }
        const Vector residual = y - generic_exp(m, x, v);
        if (residual.norm() < 1e-11) return {x, v};
        Eigen::MatrixXd jac(m.ambient_dim(), k);
        for (int j = 0; j < k; ++j) {
            jac.col(j) = (generic_exp(m, x, v + delta * frame.col(j)) -
                          generic_exp(m, x, v - delta * frame.col(j))) /
                         (2.0 * delta);
        }
        const Vector step = jac.colPivHouseholderQr().solve(residual);
        v += frame * step;
    }
    if ((y - generic_exp(m, x, v)).norm() > 1e-9) {
        throw NumericError("log_map: shooting did not converge");
    }
    return {x, v};
}

}  // namespace

Manifold Manifold::euclidean(int dim) {
    if (dim < 1) throw DomainError("Euclidean dimension must be positive");
    return Manifold(ManifoldKind::Euclidean, dim, dim);
}

Manifold Manifold::circle() { return Manifold(ManifoldKind::Circle, 2, 1); }

Manifold Manifold::sphere(int n) {
    if (n < 1) throw DomainError("sphere dimension must be positive");
    if (n == 1) return circle();
    return Manifold(ManifoldKind::Sphere, n + 1, n);
}

Manifold Manifold::generic(int ambient_dim, int intrinsic_dim, GenericCallbacks callbacks) {
    if (ambient_dim < 1 || intrinsic_dim < 1 || intrinsic_dim > ambient_dim) {
        throw DomainError("generic manifold: need 1 <= intrinsic_dim <= ambient_dim");
    }
    if (!callbacks.project || !callbacks.retract) {
        throw DomainError("generic manifold: projection and retraction callbacks are required");
    }
    if (!(callbacks.tubular_radius > 0.0)) {
        throw DomainError("generic manifold: tubular_radius must be positive");
    }
    Manifold m(ManifoldKind::Generic, ambient_dim, intrinsic_dim);
    m.callbacks_ = std::make_shared<const GenericCallbacks>(std::move(callbacks));
    return m;
}

std::string Manifold::name() const {
    switch (kind_) {
        case ManifoldKind::Euclidean: return "R^" + std::to_string(ambient_dim_);
        case ManifoldKind::Circle: return "S^1";
        case ManifoldKind::Sphere: return "S^" + std::to_string(intrinsic_dim_);
        case ManifoldKind::Generic:
            return "generic(" + std::to_string(intrinsic_dim_) + " in R^" +
                   std::to_string(ambient_dim_) + ")";
    }
    return "?";
}

double Manifold::injectivity_radius() const {
    switch (kind_) {
        case ManifoldKind::Euclidean: return std::numeric_limits<double>::infinity();
        case ManifoldKind::Circle:
        case ManifoldKind::Sphere: return M_PI;
        case ManifoldKind::Generic: return callbacks_->injectivity_radius;
    }
    return 0.0;
}

double Manifold::diameter() const {
    switch (kind_) {
        case ManifoldKind::Euclidean: return std::numeric_limits<double>::infinity();
        case ManifoldKind::Circle:
        case ManifoldKind::Sphere: return M_PI;
        case ManifoldKind::Generic: return callbacks_->diameter;
    }
    return 0.0;
}

bool Manifold::contains(const Vector& x) const {
    if (x.size() != ambient_dim_ || !x.allFinite()) return false;
    switch (kind_) {
        case ManifoldKind::Euclidean: return true;
        case ManifoldKind::Circle:
        case ManifoldKind::Sphere: return std::abs(x.squaredNorm() - 1.0) <= kMembershipTol;
        case ManifoldKind::Generic:
            return (callbacks_->retract(x) - x).norm() <= callbacks_->membership_tol;
    }
    return false;
}

void Manifold::require_member(const Vector& x, const char* what) const {
    if (!contains(x)) {
        std::ostringstream os;
        os << what << " is not on " << name();
        throw DomainError(os.str());
    }
}

Vector Manifold::project(const Vector& x, const Vector& v) const {
    switch (kind_) {
        case ManifoldKind::Euclidean: return v;
        case ManifoldKind::Circle:
        case ManifoldKind::Sphere: return v - (x.dot(v) / x.squaredNorm()) * x;
        case ManifoldKind::Generic: return callbacks_->project(x, v);
    }
    return v;
}

Vector Manifold::retract(const Vector& p) const {
    switch (kind_) {
        case ManifoldKind::Euclidean: return p;
        case ManifoldKind::Circle:
        case ManifoldKind::Sphere: {
            const double n = p.norm();
            if (!(n > 0.0)) throw DomainError("cannot retract the origin onto a sphere");
            return p / n;
        }
        case ManifoldKind::Generic: return callbacks_->retract(p);
    }
    return p;
}

Vector Manifold::second_fundamental_form(const Vector& x, const Vector& u, const Vector& v) const {
    switch (kind_) {
        case ManifoldKind::Euclidean: return Vector::Zero(ambient_dim_);
        case ManifoldKind::Circle:
        case ManifoldKind::Sphere: return -(u.dot(v) / x.squaredNorm()) * x;
        case ManifoldKind::Generic: {
            // II(u, v) = normal part of the derivative of Pi along u, applied to v.
            const double un = u.norm();
            if (un == 0.0) return Vector::Zero(ambient_dim_);
            const double s = kShapeStep / un;
            const Vector xp = retract(x + s * u);
            const Vector xm = retract(x - s * u);
            const Vector d = (project(xp, v) - project(xm, v)) / (2.0 * s);
            return d - project(x, d);
        }
    }
    return Vector::Zero(ambient_dim_);
}

std::vector<Vector> Manifold::tangent_basis(const Vector& x) const {
    std::vector<Vector> basis;
    basis.reserve(intrinsic_dim_);
    for (int j = 0; j < ambient_dim_ && static_cast<int>(basis.size()) < intrinsic_dim_; ++j) {
        Vector w = project(x, Vector::Unit(ambient_dim_, j));
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) w -= b.dot(w) * b;
        }
        const double n = w.norm();
        if (n > 1e-8) basis.push_back(w / n);
    }
    return basis;
}

Vector Manifold::sample_point(std::mt19937_64& rng) const {
    std::normal_distribution<double> normal;
    Vector g(ambient_dim_);
    switch (kind_) {
        case ManifoldKind::Euclidean:
            for (int i = 0; i < ambient_dim_; ++i) {
                const double c = std::clamp(normal(rng), -4.0, 4.0);
                g[i] = std::round(c * 1024.0) / 1024.0;
            }
            return g;
        case ManifoldKind::Circle:
        case ManifoldKind::Sphere: {
            double n = 0.0;
            do {
                for (int i = 0; i < ambient_dim_; ++i) g[i] = normal(rng);
                n = g.norm();
            } while (n < 1e-12);
            return g / n;
        }
        case ManifoldKind::Generic:
            if (!callbacks_->sample) throw DomainError("generic manifold has no sampler");
            return callbacks_->sample(rng);
    }
    return g;
}

Vector Manifold::default_point() const {
    Vector x = Vector::Zero(ambient_dim_);
    switch (kind_) {
        case ManifoldKind::Euclidean: return x;
        case ManifoldKind::Circle: x[0] = 1.0; return x;
        case ManifoldKind::Sphere: x[ambient_dim_ - 1] = 1.0; return x;
        case ManifoldKind::Generic: throw DomainError("generic manifold has no default point");
    }
    return x;
}

TangentVector project_to_tangent(const Manifold& m, const Vector& x, const Vector& v) {
    require_dim(m, v, "vector");
    m.require_member(x, "base point");
    return {x, m.project(x, v)};
}

Vector exp_map(const Manifold& m, const TangentVector& v) {
    m.require_member(v.base, "base point");
    require_dim(m, v.vec, "tangent vector");
    const Vector& x = v.base;
    switch (m.kind()) {
        case ManifoldKind::Euclidean: return x + v.vec;
        case ManifoldKind::Circle:
        case ManifoldKind::Sphere: {
            const double n = v.vec.norm();
            if (n == 0.0) return x;
            Vector y = std::cos(n) * x + (std::sin(n) / n) * v.vec;
            return y / y.norm();
        }
        case ManifoldKind::Generic: return generic_exp(m, x, v.vec);
    }
    return x;
}

TangentVector log_map(const Manifold& m, const Vector& x, const Vector& y) {
    m.require_member(x, "base point");
    m.require_member(y, "target point");
    switch (m.kind()) {
        case ManifoldKind::Euclidean: return {x, y - x};
        case ManifoldKind::Circle:
        case ManifoldKind::Sphere: {
            const double c = x.dot(y);
            if (1.0 + c <= kCutLocusTol) {
                throw CutLocusError("log_map: points are antipodal on " + m.name());
            }
            const Vector w = y - c * x;
            const double wn = w.norm();
            const double theta = sphere_distance(x, y);
            if (wn == 0.0 || theta == 0.0) return {x, Vector::Zero(x.size())};
            return {x, (theta / wn) * w};
        }
        case ManifoldKind::Generic:
            if (x == y) return {x, Vector::Zero(x.size())};
            return generic_log(m, x, y);
    }
    return {x, Vector::Zero(x.size())};
}

double geodesic_distance(const Manifold& m, const Vector& x, const Vector& y) {
    m.require_member(x, "first point");
    m.require_member(y, "second point");
    switch (m.kind()) {
        case ManifoldKind::Euclidean: return (y - x).norm();
        case ManifoldKind::Circle:
        case ManifoldKind::Sphere: return sphere_distance(x, y);
        case ManifoldKind::Generic:
            if (x == y) return 0.0;
            return generic_log(m, x, y).vec.norm();
    }
    return 0.0;
}

double riemannian_inner(const Manifold& m, const TangentVector& u, const TangentVector& v) {
    if (u.base.size() != v.base.size() || u.base != v.base) {
        throw DomainError("riemannian_inner: tangent vectors have different base points");
    }
    require_dim(m, u.vec, "first tangent vector");
    require_dim(m, v.vec, "second tangent vector");
    return u.vec.dot(v.vec);
}

Vector random_unit_tangent(const Manifold& m, const Vector& x, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Vector g(m.ambient_dim());
    for (;;) {
        for (int i = 0; i < g.size(); ++i) g[i] = normal(rng);
        const Vector t = m.project(x, g);
        const double n = t.norm();
        if (n >= 1e-12) return t / n;
    }
}

}  // namespace jumpgeo
