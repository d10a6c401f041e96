#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "jumpgeo/connection.hpp"
#include "jumpgeo/paths.hpp"

namespace jumpgeo {

/// A scalar function on the ambient space restricted to the manifold, with its
/// ambient gradient and Hessian. Only the values near the manifold matter.
struct ScalarFunction {
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> gradient;
    std::function<Eigen::MatrixXd(const Vector&)> hessian;

    static ScalarFunction constant(int ambient_dim, double c);
    /// f(x) = <a, x> + b.
    static ScalarFunction linear(Vector a, double b = 0.0);
    /// f(x) = x_i.
    static ScalarFunction coordinate(int ambient_dim, int i);
    /// f(x) = x^T Q x / 2 with Q symmetric.
    static ScalarFunction quadratic(Eigen::MatrixXd q);
};

/// A 1-form given by its ambient representative: <phi(x), v> = phi(x) . v for
/// tangent v. Any extension of f works for df since only tangent directions are
/// paired.
struct CotangentField {
    std::function<Vector(const Vector&)> covector;

    static CotangentField differential(const ScalarFunction& f);
    static CotangentField zero(int ambient_dim);

    double pair(const Vector& x, const Vector& v) const { return covector(x).dot(v); }
};

/// Symmetric bilinear form field b_x(u, v) on tangent vectors.
using TwoTensorField = std::function<double(const Vector& x, const Vector& u, const Vector& v)>;

/// g_x(u, v) = u . v.
TwoTensorField metric_tensor();
/// (phi (x) psi)_x(u, v) = <phi(x), u><psi(x), v>.
TwoTensorField tensor_product(CotangentField phi, CotangentField psi);
/// Riemannian Hessian of f on the manifold: D^2 f(u, v) + <Df, II(u, v)>.
TwoTensorField riemannian_hessian(const Manifold& m, ScalarFunction f);

/// Values sampled at partition times, constant in between.
struct TimeSeries {
    std::vector<double> t;
    std::vector<double> v;

    double back() const { return v.back(); }
    double max_abs() const;
    /// Value at time s (last sample with t_i <= s).
    double at(double s) const;
};

/// Discrete sum J_t = sum_i <phi(X_{T_{i-1}}), gamma(X_{T_{i-1}}, X_{T_i})>.
/// Throws DomainError if the partition misses a jump time of the path.
TimeSeries ito_sum(const CotangentField& phi, const DeltaPath& path, const ConnectionRule& rule,
                   const Partition& p);

/// The jump correction sum_{s <= t} <phi(X_{s-}), DeltaX_s - gamma(X_{s-}, X_s)>.
TimeSeries jump_correction(const CotangentField& phi, const DeltaPath& path,
                           const ConnectionRule& rule, const Partition& p);

/// Ito integral along (Delta X, X): ito_sum plus jump_correction. Its jump at s
/// is <phi(X_{s-}), DeltaX_s> whatever the internal rule.
TimeSeries ito_integral_delta(const CotangentField& phi, const DeltaPath& path,
                              const ConnectionRule& rule, const Partition& p);

struct QuadraticVariationResult {
    TimeSeries total;
    TimeSeries continuous_part;
    TimeSeries jump_part;
};

/// Quadratic variation of a 2-tensor: Riemann sum of b(gamma, gamma) over the
/// partition, with each jump's rule term b(gamma, gamma) exchanged for b(DeltaX,
/// DeltaX). The jump part is sum b(DeltaX, DeltaX); the continuous part is the
/// remainder and does not see the marks.
QuadraticVariationResult quadratic_variation(const TwoTensorField& b, const DeltaPath& path,
                                             const ConnectionRule& rule, const Partition& p);

/// Riemannian quadratic variation [X,X] (b = g). The internal rule defaults to
/// the projection rule, which is defined everywhere on embedded manifolds.
QuadraticVariationResult riemannian_qv(const DeltaPath& path, const Partition& p);
QuadraticVariationResult riemannian_qv(const DeltaPath& path, const Partition& p,
                                       const ConnectionRule& rule);

/// f(X) = f(X_0) + N + A + B, with per-time residual.
struct ItoDecomposition {
    TimeSeries f;
    TimeSeries N;
    TimeSeries A;
    TimeSeries B;
    TimeSeries residual_series;
    double residual = 0.0;  ///< max |f(X_t) - f(X_0) - N_t - A_t - B_t|
};

ItoDecomposition ito_decompose(const ScalarFunction& f, const DeltaPath& path,
                               const ConnectionRule& rule, const Partition& p);

/// Terminal value of the Ito integral for a sequence of refining partitions.
struct RefinementSweep {
    std::vector<double> meshes;
    std::vector<double> terminal;
    std::vector<double> increments;  ///< |terminal[i+1] - terminal[i]|
    /// Least-squares slope of log increment against log mesh; NaN with < 2 increments.
    double cauchy_rate = 0.0;
};

/// Runs ito_integral_delta for meshes 2^-lo ... 2^-hi (default 2^-3 ... 2^-8).
RefinementSweep refinement_sweep(const CotangentField& phi, const DeltaPath& path,
                                 const ConnectionRule& rule, int lo = 3, int hi = 8);

struct ZTest {
    double mean = 0.0;
    double std_error = 0.0;
    double z = 0.0;
    bool degenerate = false;  ///< zero spread; z reported as 0 (all zero) or +-inf
    std::size_t n = 0;
};

/// Mean-zero test over replica terminal values. Needs at least 30 samples.
ZTest martingale_ztest(std::span<const double> samples);

/// CSV with header `t,value`.
void write_series_csv(std::ostream& os, const TimeSeries& s);
/// CSV with header `t,f,N,A,B,residual`.
void write_decomposition_csv(std::ostream& os, const ItoDecomposition& d);

}  // namespace jumpgeo
