#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "jumpgeo/maps.hpp"
#include "jumpgeo/paths.hpp"

namespace jumpgeo {

enum class ScheduleMode { PoissonTimes, FixedTimes };

/// When the jumps happen and how large the k-th one is: r_k = c * k^(-beta),
/// unless explicit radii are given.
struct JumpSchedule {
    ScheduleMode mode = ScheduleMode::FixedTimes;
    double rate = 1.0;               ///< PoissonTimes only
    std::vector<double> times;       ///< FixedTimes only, strictly increasing, > 0
    double horizon = 0.0;
    double c = 1.0;
    double beta = 1.0;
    std::vector<double> radii;       ///< overrides c, beta when non-empty

    /// Jumps at t = 1, 2, ..., count with horizon = count.
    static JumpSchedule unit_times(int count, double c, double beta);
    static JumpSchedule fixed(std::vector<double> times, std::vector<double> radii, double horizon);
    static JumpSchedule poisson(double rate, double horizon, double c, double beta);

    /// r_k for k >= 1.
    double radius(std::size_t k) const;
    /// Whether sum_k r_k^2 < infinity.
    bool square_summable() const;
    void validate() const;
};

/// Event times of a rate-`rate` Poisson process on [0, horizon].
std::vector<double> simulate_poisson(double rate, double horizon, std::uint64_t seed);

/// The non-converging gamma-martingale X_t = exp(i pi N_t) on the circle with
/// projection-rule marks, which are all zero.
DeltaPath antipodal_poisson_circle(double rate, double horizon, std::uint64_t seed);

/// Pure-jump martingale whose k-th jump is exp_x(r_k V) with V uniform on the
/// unit tangent sphere; marks are log_map(x_{k-1}, x_k).
DeltaPath geodesic_jump_martingale(const Manifold& m, const JumpSchedule& schedule,
                                   std::uint64_t seed, std::optional<Vector> start = std::nullopt);

/// Sphere-valued eta-martingale: jump targets exp_x(+-r_k V) with a fair sign,
/// marks Pi_x(x_k - x_{k-1}) = +-sin(r_k) V.
DeltaPath projection_martingale(const Manifold& m, const JumpSchedule& schedule,
                                std::uint64_t seed, std::optional<Vector> start = std::nullopt);

enum class SmallJumpMode { Drop, GaussianCompensate };

struct StableProcessConfig {
    double alpha = 1.0;
    int m = 2;
    double epsilon = 0.1;  ///< jumps with |x| <= epsilon are truncated
    double horizon = 1.0;
    SmallJumpMode small_jump_mode = SmallJumpMode::Drop;
    /// Recording step for the Gaussian stand-in of the small jumps.
    double grid_step = 1e-2;
    /// Upper bound on the expected number of jumps per path.
    double max_expected_events = 5e7;

    void validate() const;
};

/// Intensity n({|x| > eps}) = c_{m,alpha} |S^{m-1}| eps^(-alpha) / alpha.
double stable_jump_intensity(int m, double alpha, double epsilon);
/// Per-coordinate variance rate of the truncated small jumps,
/// c_{m,alpha} |S^{m-1}| eps^(2-alpha) / ((2-alpha) m).
double stable_small_jump_variance(int m, double alpha, double epsilon);
/// P(|J| <= r) = 1 - (eps / r)^alpha for a retained jump J.
double stable_jump_magnitude_cdf(double r, double alpha, double epsilon);

/// Compound-Poisson approximation of the isotropic alpha-stable process on R^m
/// started at `start` (origin by default).
DeltaPath simulate_stable(const StableProcessConfig& cfg, std::uint64_t seed,
                          std::optional<Vector> start = std::nullopt);

/// h(Z) with marks Pi_{h(Z_{s-})}(h(Z_s) - h(Z_{s-})) at the jumps of Z.
DeltaPath pushforward(const MapIntoManifold& h, const DeltaPath& z_path);

enum class Convergence { Converged, Oscillating };

/// Geodesic diameter of the path restricted to [(1 - rho) T, T].
double tail_diameter(const DeltaPath& path, double rho);

/// Converged iff the tail diameter is <= eps.
Convergence classify_convergence(const DeltaPath& path, double rho, double eps);

struct ClassifierConfig {
    double rho = 0.2;
    double eps = 0.0;

    /// rho = 0.2, eps = 0.05 * diam(M). Requires a finite diameter.
    static ClassifierConfig defaults_for(const Manifold& m);
};

/// One-sample Kolmogorov-Smirnov statistic sup |F_n - F|.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

}  // namespace jumpgeo
