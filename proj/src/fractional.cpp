#include "jumpgeo/fractional.hpp"

#include <cmath>
#include <sstream>

#include "jumpgeo/numeric.hpp"
#include "jumpgeo/parallel.hpp"
#include "jumpgeo/processes.hpp"
#include "jumpgeo/quadrature.hpp"

namespace jumpgeo {

namespace {

double log_gamma(double x) {
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

// Nodes r_i and weights w_i with sum_i w_i g(r_i) ~ \int_a^inf g(r) r^{-1-alpha} dr.
// Log-spaced Gauss-Legendre panels (one per decade) on [a, R], then the tail
// through t = (R / r)^alpha in (0, 1].
struct RadialRule {
    std::vector<double> r;
    std::vector<double> w;
};

RadialRule radial_rule(double a, double big_r, double alpha, int order) {
    RadialRule rule;
    const int panels = std::max(1, static_cast<int>(std::ceil(std::log10(big_r / a) - 1e-12)));
    const double la = std::log(a);
    const double step = (std::log(big_r) - la) / panels;
    for (int p = 0; p < panels; ++p) {
        const QuadratureRule gl = gauss_legendre(order, la + p * step, la + (p + 1) * step);
        for (int i = 0; i < order; ++i) {
            const double r = std::exp(gl.nodes[i]);
            rule.r.push_back(r);
            rule.w.push_back(gl.weights[i] * std::pow(r, -alpha));
        }
    }
    const QuadratureRule tail = gauss_legendre(order, 0.0, 1.0);
    const double scale = 1.0 / (alpha * std::pow(big_r, alpha));
    for (int i = 0; i < order; ++i) {
        rule.r.push_back(big_r * std::pow(tail.nodes[i], -1.0 / alpha));
        rule.w.push_back(tail.weights[i] * scale);
    }
    return rule;
}

void check_map(const MapIntoManifold& h, const Vector& x, const FractionalConfig& cfg) {
    cfg.validate();
    if (h.domain_dim != cfg.m) throw DomainError("map domain dimension differs from cfg.m");
    if (x.size() != cfg.m) throw DomainError("evaluation point has the wrong dimension");
    if (!h.eval) throw DomainError("map has no evaluator");
}

Vector laplacian_fd(const MapIntoManifold& h, const Vector& x, double step) {
    const Vector hx = h(x);
    Vector lap = Vector::Zero(hx.size());
    for (int i = 0; i < x.size(); ++i) {
        const Vector e = step * Vector::Unit(x.size(), i);
        lap += (h(x + e) + h(x - e) - 2.0 * hx) / (step * step);
    }
    return lap;
}

Eigen::MatrixXd jacobian(const MapIntoManifold& h, const Vector& x, double step) {
    if (h.jacobian) return h.jacobian(x);
    const Vector hx = h(x);
    Eigen::MatrixXd j(hx.size(), x.size());
    for (int i = 0; i < x.size(); ++i) {
        const Vector e = step * Vector::Unit(x.size(), i);
        j.col(i) = (h(x + e) - h(x - e)) / (2.0 * step);
    }
    return j;
}

FractionalConfig at_level(const FractionalConfig& cfg, int level) {
    FractionalConfig c = cfg;
    c.radial_order = cfg.radial_order << level;
    c.angular_order = cfg.angular_order << level;
    return c;
}

Vector operator_at_level(const MapIntoManifold& h, const Vector& x, const FractionalConfig& base,
                         int level) {
    const FractionalConfig cfg = at_level(base, level);
    const double alpha = cfg.alpha;
    const double c = levy_constant(cfg.m, alpha);
    const Vector hx = h(x);
    const RadialRule radial = radial_rule(cfg.inner_cutoff, cfg.outer_cutoff, alpha, cfg.radial_order);
    const SphereRule sphere = sphere_rule(cfg.m, cfg.angular_order);

    Vector acc = Vector::Zero(hx.size());
    for (std::size_t i = 0; i < radial.r.size(); ++i) {
        Vector shell = Vector::Zero(hx.size());
        for (std::size_t d = 0; d < sphere.directions.size(); ++d) {
            const Vector u = radial.r[i] * sphere.directions[d];
            shell += sphere.weights[d] * (2.0 * hx - h(x + u) - h(x - u));
        }
        acc += radial.w[i] * shell;
    }
    // |u| < inner_cutoff: 2h(x) - h(x+u) - h(x-u) ~ -u^T D^2h u, angular mean |u|^2 tr/m
    const double delta = cfg.inner_cutoff;
    const Vector lap = laplacian_fd(h, x, delta);
    acc -= (unit_sphere_area(cfg.m) / cfg.m) * std::pow(delta, 2.0 - alpha) / (2.0 - alpha) * lap;
    return c * acc;
}

// Q at levels 0, 1, 2; returns Q2 with |Q2 - Q1| as the error estimate.
template <class Eval>
std::pair<Vector, double> certify(Eval&& eval, const char* what) {
    const Vector q0 = eval(0);
    const Vector q1 = eval(1);
    const Vector q2 = eval(2);
    const double d1 = (q1 - q0).norm();
    const double d2 = (q2 - q1).norm();
    if (d2 > 1e-12 * std::max(1.0, q2.norm()) && d2 > 0.5 * d1) {
        std::ostringstream os;
        os << what << ": order doubling does not converge (|Q2-Q1| = " << d2
           << ", |Q1-Q0| = " << d1 << ")";
        throw AccuracyError(os.str());
    }
    return {q2, d2};
}

}  // namespace

double levy_constant(int m, double alpha) {
    if (m < 1) throw DomainError("levy_constant: m must be >= 1");
    if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("levy_constant: alpha must lie in (0, 2)");
    const double log_c = std::log(alpha) + (alpha - 2.0) * std::log(2.0) -
                         0.5 * (m + 2.0) * std::log(M_PI) + std::log(std::sin(0.5 * alpha * M_PI)) +
                         log_gamma(0.5 * (m + alpha)) + log_gamma(0.5 * alpha);
    return std::exp(log_c);
}

double unit_sphere_area(int m) {
    if (m < 1) throw DomainError("unit_sphere_area: m must be >= 1");
    return std::exp(std::log(2.0) + 0.5 * m * std::log(M_PI) - log_gamma(0.5 * m));
}

void FractionalConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("alpha must lie in (0, 2)");
    if (m < 1) throw DomainError("m must be >= 1");
    if (!(inner_cutoff > 0.0 && inner_cutoff < outer_cutoff)) {
        throw DomainError("need 0 < inner_cutoff < outer_cutoff");
    }
    if (radial_order < 4 || angular_order < 4) throw DomainError("quadrature orders must be >= 4");
    if (!(exclude_radius >= 0.0 && exclude_radius < outer_cutoff)) {
        throw DomainError("need 0 <= exclude_radius < outer_cutoff");
    }
}

OperatorValue fractional_laplacian(const MapIntoManifold& h, const Vector& x,
                                   const FractionalConfig& cfg) {
    check_map(h, x, cfg);
    auto [value, err] = certify([&](int level) { return operator_at_level(h, x, cfg, level); },
                                "fractional_laplacian");
    return {std::move(value), err};
}

LagrangeResidual lagrange_residual(const MapIntoManifold& h, const Vector& x,
                                   const FractionalConfig& cfg) {
    const OperatorValue op = fractional_laplacian(h, x, cfg);
    const Vector hx = h(x);
    h.target.require_member(hx, "h(x)");
    LagrangeResidual out;
    out.operator_value = op.value;
    out.operator_norm = op.value.norm();
    out.residual = h.target.project(hx, op.value).norm();
    out.error_estimate = op.error_estimate;
    return out;
}

double jump_energy_phi_at_level(const MapIntoManifold& h, const Vector& z,
                                const FractionalConfig& base, int level) {
    check_map(h, z, base);
    const FractionalConfig cfg = at_level(base, level);
    const double alpha = cfg.alpha;
    const double c = levy_constant(cfg.m, alpha);
    const Vector hz = h(z);
    const bool truncated = cfg.exclude_radius > 0.0;
    const double start = truncated ? cfg.exclude_radius : cfg.inner_cutoff;
    const RadialRule radial = radial_rule(start, cfg.outer_cutoff, alpha, cfg.radial_order);
    const SphereRule sphere = sphere_rule(cfg.m, cfg.angular_order);

    CompensatedSum acc;
    for (std::size_t i = 0; i < radial.r.size(); ++i) {
        double shell = 0.0;
        for (std::size_t d = 0; d < sphere.directions.size(); ++d) {
            shell += sphere.weights[d] * (hz - h(z + radial.r[i] * sphere.directions[d])).squaredNorm();
        }
        acc.add(radial.w[i] * shell);
    }
    if (!truncated) {
        // |u| < inner_cutoff: |h(z) - h(z+u)|^2 ~ |Dh u|^2, angular mean |u|^2 |Dh|_F^2 / m
        const double delta = cfg.inner_cutoff;
        const double frob = jacobian(h, z, delta).squaredNorm();
        acc.add(frob * (unit_sphere_area(cfg.m) / cfg.m) * std::pow(delta, 2.0 - alpha) /
                (2.0 - alpha));
    }
    return c * acc.value();
}

PhiValue jump_energy_phi(const MapIntoManifold& h, const Vector& z, const FractionalConfig& cfg) {
    auto [value, err] = certify(
        [&](int level) { return Vector::Constant(1, jump_energy_phi_at_level(h, z, cfg, level)); },
        "jump_energy_phi");
    return {value[0], err};
}

LevySystemReport levy_system_check(const MapIntoManifold& h, const Vector& z,
                                   const FractionalConfig& cfg, double horizon, int replicas,
                                   std::uint64_t seed, double epsilon, int threads) {
    cfg.validate();
    if (cfg.m < 2) throw DomainError("levy_system_check needs m >= 2 (transient stable process)");
    if (replicas < 2) throw DomainError("levy_system_check needs at least two replicas");
    if (!(horizon >= 0.0)) throw DomainError("levy_system_check: horizon must be nonnegative");
    check_map(h, z, cfg);

    StableProcessConfig sc;
    sc.alpha = cfg.alpha;
    sc.m = cfg.m;
    sc.epsilon = epsilon;
    sc.horizon = horizon;
    sc.small_jump_mode = SmallJumpMode::Drop;
    sc.validate();

    FractionalConfig phi_cfg = cfg;
    phi_cfg.exclude_radius = epsilon;

    // Pick the cheapest quadrature level that agrees with level 2 to 1e-3
    // (relative) at a handful of probe points; its worst error feeds the bias bound.
    std::vector<Vector> probes{z};
    for (int i = 0; i < cfg.m; ++i) {
        probes.push_back(z + 2.0 * Vector::Unit(cfg.m, i));
        probes.push_back(z - 2.0 * Vector::Unit(cfg.m, i));
    }
    double err_by_level[3] = {0.0, 0.0, 0.0};
    for (const Vector& p : probes) {
        const double q0 = jump_energy_phi_at_level(h, p, phi_cfg, 0);
        const double q1 = jump_energy_phi_at_level(h, p, phi_cfg, 1);
        const double q2 = jump_energy_phi_at_level(h, p, phi_cfg, 2);
        const double tail = std::abs(q2 - q1);
        err_by_level[0] = std::max(err_by_level[0], std::abs(q0 - q2) + tail);
        err_by_level[1] = std::max(err_by_level[1], std::abs(q1 - q2) + tail);
        err_by_level[2] = std::max(err_by_level[2], tail);
        (void)q0;
    }
    const double phi_scale = std::max(1e-300, jump_energy_phi_at_level(h, z, phi_cfg, 2));
    int level = 2;
    for (int l = 0; l < 2; ++l) {
        if (err_by_level[l] <= 1e-3 * phi_scale) {
            level = l;
            break;
        }
    }

    std::vector<double> lhs(replicas), rhs(replicas);
    parallel_for(static_cast<std::size_t>(replicas), threads, [&](std::size_t i) {
        const DeltaPath a = simulate_stable(sc, split_seed(seed, 2 * i), z);
        CompensatedSum jumps;
        Vector prev = h(a.events().front().x);
        for (std::size_t k = 1; k < a.size(); ++k) {
            Vector cur = h(a.events()[k].x);
            jumps.add((cur - prev).squaredNorm());
            prev = std::move(cur);
        }
        lhs[i] = jumps.value();

        const DeltaPath b = simulate_stable(sc, split_seed(seed, 2 * i + 1), z);
        CompensatedSum occupation;
        const auto& ev = b.events();
        for (std::size_t k = 0; k < ev.size(); ++k) {
            const double until = k + 1 < ev.size() ? ev[k + 1].t : horizon;
            if (until > ev[k].t) {
                occupation.add(jump_energy_phi_at_level(h, ev[k].x, phi_cfg, level) *
                               (until - ev[k].t));
            }
        }
        rhs[i] = occupation.value();
    });

    auto mean_se = [](const std::vector<double>& v) {
        CompensatedSum s;
        for (double x : v) s.add(x);
        const double n = static_cast<double>(v.size());
        const double mean = s.value() / n;
        CompensatedSum q;
        for (double x : v) q.add((x - mean) * (x - mean));
        return std::pair{mean, std::sqrt(q.value() / (n - 1.0) / n)};
    };

    LevySystemReport r;
    r.alpha = cfg.alpha;
    r.m = cfg.m;
    r.point = z;
    r.horizon = horizon;
    r.epsilon = epsilon;
    r.replicas = replicas;
    std::tie(r.lhs, r.se_lhs) = mean_se(lhs);
    std::tie(r.rhs, r.se_rhs) = mean_se(rhs);
    r.phi_level = level;
    r.bias_bound = horizon * err_by_level[level];
    r.compatible = std::abs(r.lhs - r.rhs) <=
                   3.0 * std::sqrt(r.se_lhs * r.se_lhs + r.se_rhs * r.se_rhs) + r.bias_bound;
    return r;
}

}  // namespace jumpgeo
