#include "jumpgeo/processes.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "jumpgeo/fractional.hpp"
#include "jumpgeo/numeric.hpp"

namespace jumpgeo {

JumpSchedule JumpSchedule::unit_times(int count, double c, double beta) {
    JumpSchedule s;
    s.mode = ScheduleMode::FixedTimes;
    s.times.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int k = 1; k <= count; ++k) s.times.push_back(k);
    s.horizon = count;
    s.c = c;
    s.beta = beta;
    return s;
}

JumpSchedule JumpSchedule::fixed(std::vector<double> times, std::vector<double> radii, double horizon) {
    JumpSchedule s;
    s.mode = ScheduleMode::FixedTimes;
    s.times = std::move(times);
    s.radii = std::move(radii);
    s.horizon = horizon;
    return s;
}

JumpSchedule JumpSchedule::poisson(double rate, double horizon, double c, double beta) {
    JumpSchedule s;
    s.mode = ScheduleMode::PoissonTimes;
    s.rate = rate;
    s.horizon = horizon;
    s.c = c;
    s.beta = beta;
    return s;
}

double JumpSchedule::radius(std::size_t k) const {
    if (k == 0) throw DomainError("jump index starts at 1");
    if (!radii.empty()) {
        if (k > radii.size()) throw DomainError("schedule has fewer radii than jumps");
        return radii[k - 1];
    }
    return c * std::pow(static_cast<double>(k), -beta);
}

bool JumpSchedule::square_summable() const {
    if (!radii.empty()) return true;
    return beta > 0.5;
}

void JumpSchedule::validate() const {
    if (!(horizon >= 0.0)) throw DomainError("schedule horizon must be nonnegative");
    if (mode == ScheduleMode::PoissonTimes) {
        if (!(rate > 0.0)) throw DomainError("schedule rate must be positive");
    } else {
        for (std::size_t i = 0; i < times.size(); ++i) {
            if (!(times[i] > 0.0) || (i > 0 && !(times[i] > times[i - 1])) || times[i] > horizon) {
                throw DomainError("fixed jump times must increase strictly within (0, horizon]");
            }
        }
    }
    if (radii.empty()) {
        if (!(c > 0.0)) throw DomainError("schedule radius scale c must be positive");
        if (!std::isfinite(beta)) throw DomainError("schedule beta must be finite");
    } else {
        for (double r : radii) {
            if (!(r > 0.0)) throw DomainError("schedule radii must be positive");
        }
    }
}

namespace {

std::vector<double> poisson_times(double rate, double horizon, std::mt19937_64& rng) {
    std::vector<double> times;
    if (!(horizon > 0.0)) return times;
    std::exponential_distribution<double> gap(rate);
    double t = gap(rng);
    while (t <= horizon) {
        times.push_back(t);
        t += gap(rng);
    }
    return times;
}

std::vector<double> schedule_times(const JumpSchedule& s, std::mt19937_64& rng) {
    if (s.mode == ScheduleMode::FixedTimes) return s.times;
    return poisson_times(s.rate, s.horizon, rng);
}

Vector start_point(const Manifold& m, const std::optional<Vector>& start) {
    Vector x = start ? *start : m.default_point();
    m.require_member(x, "start point");
    return x;
}

void check_radius(const Manifold& m, double r, std::size_t k) {
    if (!(r < m.injectivity_radius())) {
        std::ostringstream os;
        os << "jump radius r_" << k << " = " << r << " reaches the injectivity radius "
           << m.injectivity_radius() << " of " << m.name();
        throw DomainError(os.str());
    }
}

}  // namespace

std::vector<double> simulate_poisson(double rate, double horizon, std::uint64_t seed) {
    if (!(rate > 0.0)) throw DomainError("simulate_poisson: rate must be positive");
    if (!(horizon >= 0.0)) throw DomainError("simulate_poisson: horizon must be nonnegative");
    std::mt19937_64 rng(seed);
    return poisson_times(rate, horizon, rng);
}

DeltaPath antipodal_poisson_circle(double rate, double horizon, std::uint64_t seed) {
    const Manifold circle = Manifold::circle();
    const ConnectionRule eta(RuleKind::Projection, circle);
    const auto times = simulate_poisson(rate, horizon, seed);
    std::vector<PathEvent> events;
    events.reserve(times.size() + 1);
    Vector x(2);
    x << 1.0, 0.0;
    events.push_back({0.0, x, std::nullopt});
    for (double t : times) {
        Vector y = -x;
        Vector mark = evaluate_unchecked(eta, x, y);
        events.push_back({t, y, std::move(mark)});
        x = std::move(y);
    }
    return DeltaPath(circle, std::move(events), horizon);
}

DeltaPath geodesic_jump_martingale(const Manifold& m, const JumpSchedule& schedule,
                                   std::uint64_t seed, std::optional<Vector> start) {
    schedule.validate();
    std::mt19937_64 rng(seed);
    const auto times = schedule_times(schedule, rng);
    for (std::size_t k = 1; k <= times.size(); ++k) check_radius(m, schedule.radius(k), k);

    std::vector<PathEvent> events;
    events.reserve(times.size() + 1);
    Vector x = start_point(m, start);
    events.push_back({0.0, x, std::nullopt});
    for (std::size_t k = 1; k <= times.size(); ++k) {
        const double r = schedule.radius(k);
        const Vector dir = random_unit_tangent(m, x, rng);
        Vector y = exp_map(m, {x, r * dir});
        Vector mark = log_map(m, x, y).vec;
        events.push_back({times[k - 1], y, std::move(mark)});
        x = std::move(y);
    }
    return DeltaPath(m, std::move(events), schedule.horizon);
}

DeltaPath projection_martingale(const Manifold& m, const JumpSchedule& schedule, std::uint64_t seed,
                                std::optional<Vector> start) {
    if (!m.is_sphere()) throw DomainError("projection_martingale needs a sphere, got " + m.name());
    schedule.validate();
    const ConnectionRule eta(RuleKind::Projection, m);
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution coin(0.5);
    const auto times = schedule_times(schedule, rng);
    for (std::size_t k = 1; k <= times.size(); ++k) check_radius(m, schedule.radius(k), k);

    std::vector<PathEvent> events;
    events.reserve(times.size() + 1);
    Vector x = start_point(m, start);
    events.push_back({0.0, x, std::nullopt});
    for (std::size_t k = 1; k <= times.size(); ++k) {
        const double r = schedule.radius(k);
        const double sign = coin(rng) ? 1.0 : -1.0;
        const Vector dir = random_unit_tangent(m, x, rng);
        Vector y = exp_map(m, {x, sign * r * dir});
        Vector mark = evaluate_unchecked(eta, x, y);
        events.push_back({times[k - 1], y, std::move(mark)});
        x = std::move(y);
    }
    return DeltaPath(m, std::move(events), schedule.horizon);
}

void StableProcessConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("stable alpha must lie in (0, 2)");
    if (m < 1) throw DomainError("stable dimension m must be >= 1");
    if (!(epsilon > 0.0)) throw DomainError("stable truncation epsilon must be positive");
    if (!(horizon >= 0.0)) throw DomainError("stable horizon must be nonnegative");
    if (small_jump_mode == SmallJumpMode::GaussianCompensate && !(grid_step > 0.0)) {
        throw DomainError("stable grid_step must be positive");
    }
}

double stable_jump_intensity(int m, double alpha, double epsilon) {
    return levy_constant(m, alpha) * unit_sphere_area(m) * std::pow(epsilon, -alpha) / alpha;
}

double stable_small_jump_variance(int m, double alpha, double epsilon) {
    return levy_constant(m, alpha) * unit_sphere_area(m) * std::pow(epsilon, 2.0 - alpha) /
           ((2.0 - alpha) * m);
}

double stable_jump_magnitude_cdf(double r, double alpha, double epsilon) {
    if (r <= epsilon) return 0.0;
    return 1.0 - std::pow(epsilon / r, alpha);
}

DeltaPath simulate_stable(const StableProcessConfig& cfg, std::uint64_t seed,
                          std::optional<Vector> start) {
    cfg.validate();
    const Manifold space = Manifold::euclidean(cfg.m);
    const double lambda = stable_jump_intensity(cfg.m, cfg.alpha, cfg.epsilon);
    if (!(lambda * cfg.horizon <= cfg.max_expected_events)) {
        std::ostringstream os;
        os << "simulate_stable: expected " << lambda * cfg.horizon
           << " jumps exceeds the budget; increase epsilon (currently " << cfg.epsilon << ")";
        throw ResourceError(os.str());
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal;

    const auto jump_times = poisson_times(lambda, cfg.horizon, rng);
    auto draw_jump = [&]() {
        // magnitude eps * U^(-1/alpha) with U in (0, 1]
        const double u = 1.0 - unif(rng);
        const double r = cfg.epsilon * std::pow(u, -1.0 / cfg.alpha);
        Vector dir(cfg.m);
        double n = 0.0;
        do {
            for (int i = 0; i < cfg.m; ++i) dir[i] = normal(rng);
            n = dir.norm();
        } while (n < 1e-12);
        return Vector(r * dir / n);
    };

    Vector x = start ? *start : Vector::Zero(cfg.m);
    space.require_member(x, "stable start point");
    std::vector<PathEvent> events;
    events.push_back({0.0, x, std::nullopt});

    if (cfg.small_jump_mode == SmallJumpMode::Drop) {
        events.reserve(jump_times.size() + 1);
        for (double t : jump_times) {
            Vector j = draw_jump();
            x = x + j;
            events.push_back({t, x, std::move(j)});
        }
        return DeltaPath(space, std::move(events), cfg.horizon);
    }

    // Gaussian stand-in for the small jumps, sampled on the recording grid.
    const double sigma2 = stable_small_jump_variance(cfg.m, cfg.alpha, cfg.epsilon);
    const auto cells = static_cast<std::size_t>(std::ceil(cfg.horizon / cfg.grid_step - 1e-12));
    std::size_t next_jump = 0;
    double last_grid = 0.0;
    for (std::size_t g = 1; g <= cells; ++g) {
        const double tg = g == cells ? cfg.horizon : static_cast<double>(g) * cfg.grid_step;
        while (next_jump < jump_times.size() && jump_times[next_jump] < tg) {
            Vector j = draw_jump();
            x = x + j;
            events.push_back({jump_times[next_jump], x, std::move(j)});
            ++next_jump;
        }
        const double sd = std::sqrt(sigma2 * (tg - last_grid));
        for (int i = 0; i < cfg.m; ++i) x[i] += sd * normal(rng);
        Vector mark;
        const bool jump_here = next_jump < jump_times.size() && jump_times[next_jump] == tg;
        if (jump_here) {
            // A jump exactly on a grid time: record both in one event.
            mark = draw_jump();
            x = x + mark;
            ++next_jump;
        }
        events.push_back({tg, x, jump_here ? std::optional<Vector>(mark) : std::nullopt});
        last_grid = tg;
    }
    return DeltaPath(space, std::move(events), cfg.horizon, Interpolation::RecordedGrid);
}

DeltaPath pushforward(const MapIntoManifold& h, const DeltaPath& z_path) {
    const Manifold& target = h.target;
    if (z_path.manifold().ambient_dim() != h.domain_dim) {
        throw DomainError("pushforward: path dimension does not match the map domain");
    }
    std::vector<PathEvent> events;
    events.reserve(z_path.size());
    for (const PathEvent& e : z_path.events()) {
        Vector y = h(e.x);
        if (!target.contains(y)) {
            throw DomainError("pushforward: h(Z_t) leaves " + target.name() + " at t = " +
                              format_double(e.t));
        }
        std::optional<Vector> mark;
        if (e.mark && !events.empty()) {
            const Vector& prev = events.back().x;
            if (y != prev && geodesic_distance(target, prev, y) > kJumpThreshold) {
                mark = target.project(prev, y - prev);
            }
        }
        events.push_back({e.t, std::move(y), std::move(mark)});
    }
    return DeltaPath(target, std::move(events), z_path.horizon(), z_path.interpolation());
}

double tail_diameter(const DeltaPath& path, double rho) {
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("tail fraction rho must lie in (0, 1)");
    const double start = (1.0 - rho) * path.horizon();
    std::vector<const Vector*> pts;
    const std::size_t first = path.index_at(start);
    for (std::size_t k = first; k < path.size(); ++k) pts.push_back(&path.events()[k].x);
    const Manifold& m = path.manifold();
    double diam = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            diam = std::max(diam, geodesic_distance(m, *pts[i], *pts[j]));
        }
    }
    return diam;
}

Convergence classify_convergence(const DeltaPath& path, double rho, double eps) {
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("tail fraction rho must lie in (0, 1)");
    if (!(eps > 0.0)) throw DomainError("classifier eps must be positive");
    const double start = (1.0 - rho) * path.horizon();
    const std::size_t first = path.index_at(start);
    const Manifold& m = path.manifold();
    const auto& ev = path.events();
    for (std::size_t i = first; i < ev.size(); ++i) {
        for (std::size_t j = i + 1; j < ev.size(); ++j) {
            if (geodesic_distance(m, ev[i].x, ev[j].x) > eps) return Convergence::Oscillating;
        }
    }
    return Convergence::Converged;
}

ClassifierConfig ClassifierConfig::defaults_for(const Manifold& m) {
    const double d = m.diameter();
    if (!std::isfinite(d)) {
        throw DomainError("classifier eps has no default on the non-compact " + m.name());
    }
    return {0.2, 0.05 * d};
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw DomainError("ks_statistic: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

}  // namespace jumpgeo
