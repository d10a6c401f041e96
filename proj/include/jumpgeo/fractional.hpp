#pragma once

#include <cstdint>

#include "jumpgeo/maps.hpp"

namespace jumpgeo {

/// Constant of the alpha-stable Levy measure n(dx) = c_{m,alpha} |x|^{-(m+alpha)} dx,
/// alpha 2^(alpha-2) pi^(-(m+2)/2) sin(alpha pi/2) Gamma((m+alpha)/2) Gamma(alpha/2),
/// evaluated in log space.
double levy_constant(int m, double alpha);

/// Area of the unit sphere S^{m-1} in R^m (2 for m = 1).
double unit_sphere_area(int m);

struct FractionalConfig {
    double alpha = 1.0;
    int m = 1;
    double inner_cutoff = 1e-3;  ///< below: second-order Taylor model of the integrand
    double outer_cutoff = 1e3;   ///< above: compactified tail panel
    int radial_order = 16;       ///< Gauss-Legendre nodes per radial panel
    int angular_order = 16;
    /// jump_energy_phi only: drop the kernel on |w - z| <= exclude_radius. Used
    /// to match a simulator that truncates jumps below this size.
    double exclude_radius = 0.0;

    void validate() const;
};

struct OperatorValue {
    Vector value;
    double error_estimate = 0.0;
};

/// (-Delta)^{alpha/2} h(x), componentwise, as the singular integral
/// c_{m,alpha} \int (2h(x) - h(x+u) - h(x-u)) |u|^{-(m+alpha)} du.
/// Certified by doubling both quadrature orders twice; throws AccuracyError
/// when the successive differences do not contract (ratio > 0.5).
OperatorValue fractional_laplacian(const MapIntoManifold& h, const Vector& x,
                                   const FractionalConfig& cfg);

struct LagrangeResidual {
    double residual = 0.0;       ///< |Pi_{h(x)} (-Delta)^{alpha/2} h(x)|
    double operator_norm = 0.0;  ///< |(-Delta)^{alpha/2} h(x)|
    double error_estimate = 0.0;
    Vector operator_value;
};

LagrangeResidual lagrange_residual(const MapIntoManifold& h, const Vector& x,
                                   const FractionalConfig& cfg);

struct PhiValue {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// phi(z) = \int |h(z) - h(w)|^2 c_{m,alpha} |z - w|^{-(m+alpha)} dw, same
/// cutoff scheme and certification as fractional_laplacian.
PhiValue jump_energy_phi(const MapIntoManifold& h, const Vector& z, const FractionalConfig& cfg);

/// phi at a single quadrature level (orders scaled by 2^level), uncertified.
double jump_energy_phi_at_level(const MapIntoManifold& h, const Vector& z,
                                const FractionalConfig& cfg, int level);

struct LevySystemReport {
    double alpha = 0.0;
    int m = 0;
    Vector point;
    double horizon = 0.0;
    double epsilon = 0.0;
    int replicas = 0;
    double lhs = 0.0;  ///< mean of sum_{s <= T} |h(Z_s) - h(Z_{s-})|^2
    double se_lhs = 0.0;
    double rhs = 0.0;  ///< mean of \int_0^T phi_eps(Z_s) ds
    double se_rhs = 0.0;
    double bias_bound = 0.0;  ///< quadrature error of phi, times T
    int phi_level = 0;
    bool compatible = false;
};

/// Monte Carlo check of E sum |Delta h(Z)|^2 = E \int phi(Z_s) ds on [0, T] for
/// the compound-Poisson stable process with jumps above `epsilon`. The two sides
/// use independent paths; phi uses the same truncation. Compatible iff
/// |lhs - rhs| <= 3 sqrt(se_lhs^2 + se_rhs^2) + bias_bound. Requires m >= 2.
LevySystemReport levy_system_check(const MapIntoManifold& h, const Vector& z,
                                   const FractionalConfig& cfg, double horizon, int replicas,
                                   std::uint64_t seed, double epsilon = 0.1, int threads = 1);

}  // namespace jumpgeo
