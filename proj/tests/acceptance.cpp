// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <unistd.h>

#include "jumpgeo/connection.hpp"
#include "jumpgeo/experiments.hpp"
#include "jumpgeo/fractional.hpp"
#include "jumpgeo/integrator.hpp"
#include "jumpgeo/numeric.hpp"
#include "jumpgeo/parallel.hpp"
#include "jumpgeo/processes.hpp"

using namespace jumpgeo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream time;
    time.precision(3);
    time << secs << " s";
    if (budget_s > 0.0) {
        time << " (budget " << budget_s << " s)";
        if (secs > budget_s) {
            o.pass = false;
            o.detail += "; over time budget";
        }
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " " << title << ": " << o.detail << " ["
              << time.str() << "]" << std::endl;
}

std::string num(double x) {
    std::ostringstream os;
    os.precision(4);
    os << x;
    return os.str();
}

int threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

fs::path scratch(const std::string& tag) {
    const fs::path p = fs::temp_directory_path() / ("jumpgeo_acceptance_" + std::to_string(::getpid())) / tag;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

ExperimentResult run_defaults(const std::string& kind, const fs::path& dir, int n_threads = 1) {
    RunOptions opts;
    opts.out_dir = dir;
    opts.threads = n_threads;
    return run_experiment(resolve_config(default_config(kind)), opts);
}

std::string clause_summary(const ExperimentResult& r) {
    std::string s;
    for (const Clause& c : r.clauses) s += (s.empty() ? "" : "; ") + c.name + " " + (c.pass ? "ok" : "FAILED") + " (" + c.detail + ")";
    return s;
}

// sin(x0) x1, a non-polynomial test function
ScalarFunction sine_product(int a) {
    ScalarFunction f;
    f.value = [](const Vector& x) { return std::sin(x[0]) * x[1]; };
    f.gradient = [a](const Vector& x) {
        Vector g = Vector::Zero(a);
        g[0] = std::cos(x[0]) * x[1];
        g[1] = std::sin(x[0]);
        return g;
    };
    f.hessian = [a](const Vector& x) {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(a, a);
        h(0, 0) = -std::sin(x[0]) * x[1];
        h(0, 1) = h(1, 0) = std::cos(x[0]);
        return h;
    };
    return f;
}

std::vector<ScalarFunction> five_functions() {
    Eigen::MatrixXd q(3, 3);
    q << 2, 1, 0, 1, -1, 0.5, 0, 0.5, 3;
    return {ScalarFunction::coordinate(3, 0), ScalarFunction::coordinate(3, 1), ScalarFunction::coordinate(3, 2),
            ScalarFunction::quadratic(q), sine_product(3)};
}

// Fourier side of (-Delta)^{1/2} e^{-z^2} at 0 on the line: (1/pi) int_0^inf k sqrt(pi) e^{-k^2/4} dk,
// composite Simpson on [0, 60].
double fourier_side_gaussian() {
    const int n = 200000;
    const double b = 60.0, h = b / n;
    auto f = [](double k) { return k * std::sqrt(M_PI) * std::exp(-0.25 * k * k); };
    double s = f(0.0) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return (s * h / 3.0) / M_PI;
}

}  // namespace

int main() {
    const Manifold s2 = Manifold::sphere(2);

    criterion(1, "connection-rule axioms", 5.0, [&] {
        double worst = 0.0, diag = 0.0;
        std::string where;
        const std::vector<std::pair<RuleKind, Manifold>> cases = {
            {RuleKind::Projection, s2},
            {RuleKind::Exponential, s2},
            {RuleKind::Projection, Manifold::circle()},
            {RuleKind::Exponential, Manifold::circle()},
            {RuleKind::Euclidean, Manifold::euclidean(3)},
        };
        std::uint64_t idx = 0;
        for (const auto& [kind, m] : cases) {
            const AxiomReport r = check_axioms(ConnectionRule(kind, m), 1000, split_seed(1, idx++));
            diag = std::max(diag, r.max_diagonal);
            if (r.worst() >= worst) {
                worst = r.worst();
                where = to_string(kind) + " on " + m.name();
            }
        }
        return Outcome{worst <= 1e-5 && diag == 0.0,
                       "max Jacobian deviation " + num(worst) + " (" + where + "), max |gamma(x,x)| " + num(diag)};
    });

    criterion(2, "projection vs exponential rule to second order", 5.0, [&] {
        const ConnectionRule proj(RuleKind::Projection, s2), expo(RuleKind::Exponential, s2);
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double worst_ratio = 0.0;
        int violations = 0;
        for (int i = 0; i < 10000; ++i) {
            const Vector x = s2.sample_point(rng);
            const double d = 0.3 * (1.0 - unit(rng));  // (0, 0.3]
            const Vector y = exp_map(s2, {x, d * random_unit_tangent(s2, x, rng)});
            const double dist = geodesic_distance(s2, x, y);
            const double gap = (evaluate(proj, x, y).vec - evaluate(expo, x, y).vec).norm();
            const double bound = dist * dist * dist;
            violations += gap > bound;
            worst_ratio = std::max(worst_ratio, gap / bound);
        }
        return Outcome{violations == 0, std::to_string(violations) + " of 10000 pairs exceed d^3; max gap/d^3 " +
                                            num(worst_ratio)};
    });

    criterion(3, "telescoping Ito identity for pure-jump paths", 10.0, [&] {
        const auto fs5 = five_functions();
        const JumpSchedule sched = JumpSchedule::poisson(25.0, 20.0, 0.8, 0.3);
        const ConnectionRule expo(RuleKind::Exponential, s2), proj(RuleKind::Projection, s2);
        double worst = 0.0, worst_a = 0.0;
        std::size_t max_jumps = 0;
        for (std::uint64_t i = 0; i < 100; ++i) {
            const bool geodesic = i % 2 == 0;
            const DeltaPath p = geodesic ? geodesic_jump_martingale(s2, sched, split_seed(3, i))
                                         : projection_martingale(s2, sched, split_seed(3, i));
            max_jumps = std::max(max_jumps, p.jump_times().size());
            const Partition part = partition_for(p, p.horizon());
            for (const auto& f : fs5) {
                const ItoDecomposition d = ito_decompose(f, p, geodesic ? expo : proj, part);
                worst_a = std::max(worst_a, d.A.max_abs());
                worst = std::max(worst, std::abs(d.f.back() - d.f.v.front() - d.N.back() - d.B.back()));
            }
        }
        return Outcome{worst <= 1e-9 && max_jumps <= 1000 && worst_a == 0.0,
                       "max |f(X_T) - f(X_0) - N_T - B_T| " + num(worst) + ", max |A| " + num(worst_a) +
                           ", 100 paths, up to " + std::to_string(max_jumps) + " jumps"};
    });

    criterion(4, "jump-corrected integral independent of the internal rule", 0.0, [&] {
        const auto fs5 = five_functions();
        const JumpSchedule sched = JumpSchedule::poisson(25.0, 20.0, 0.8, 0.3);
        const ConnectionRule expo(RuleKind::Exponential, s2), proj(RuleKind::Projection, s2);
        double worst = 0.0;
        for (std::uint64_t i = 0; i < 100; ++i) {
            const DeltaPath p = i % 2 == 0 ? projection_martingale(s2, sched, split_seed(4, i))
                                           : geodesic_jump_martingale(s2, sched, split_seed(4, i));
            const Partition part = partition_for(p, 0.05);
            for (const auto& f : fs5) {
                const CotangentField df = CotangentField::differential(f);
                const TimeSeries a = ito_integral_delta(df, p, proj, part);
                const TimeSeries b = ito_integral_delta(df, p, expo, part);
                for (std::size_t k = 0; k < a.v.size(); ++k) worst = std::max(worst, std::abs(a.v[k] - b.v[k]));
            }
        }
        return Outcome{worst <= 1e-10, "max |I_proj - I_exp| over 100 paths and 5 functions " + num(worst)};
    });

    criterion(5, "exact quadratic-variation laws", 0.0, [&] {
        const JumpSchedule sched = JumpSchedule::unit_times(1000, 0.5, 0.6);
        CompensatedSum r2, sin2;
        for (std::size_t k = 1; k <= 1000; ++k) {
            r2.add(sched.radius(k) * sched.radius(k));
            sin2.add(std::sin(sched.radius(k)) * std::sin(sched.radius(k)));
        }
        double worst_g = 0.0, worst_p = 0.0;
        for (std::uint64_t s = 0; s < 5; ++s) {
            const DeltaPath g = geodesic_jump_martingale(s2, sched, split_seed(5, s));
            const DeltaPath p = projection_martingale(s2, sched, split_seed(5, 100 + s));
            worst_g = std::max(worst_g, std::abs(riemannian_qv(g, partition_for(g, 1.0)).total.back() - r2.value()));
            worst_p = std::max(worst_p, std::abs(riemannian_qv(p, partition_for(p, 1.0)).total.back() - sin2.value()));
        }
        return Outcome{worst_g <= 1e-12 && worst_p <= 1e-12,
                       "geodesic |[X,X]_T - sum r_k^2| " + num(worst_g) + " (sum " + num(r2.value()) +
                           "), projection |[X,X]_T - sum sin^2 r_k| " + num(worst_p) + " (sum " + num(sin2.value()) + ")"};
    });

    criterion(6, "martingale z-test over seeds 1-100", 60.0, [&] {
        const JumpSchedule sched = JumpSchedule::unit_times(10, 0.5, 0.6);
        const int replicas = 10000;
        std::string detail;
        bool pass = true;
        for (const std::string ctor : {"geodesic", "projection"}) {
            const ConnectionRule rule(ctor == "geodesic" ? RuleKind::Exponential : RuleKind::Projection, s2);
            std::array<int, 3> ok{};
            double worst_z = 0.0;
            for (std::uint64_t seed = 1; seed <= 100; ++seed) {
                std::vector<double> terminal(3 * replicas);
                parallel_for(replicas, threads(), [&](std::size_t i) {
                    const std::uint64_t s = split_seed(seed, i);
                    const DeltaPath p = ctor == "geodesic" ? geodesic_jump_martingale(s2, sched, s)
                                                           : projection_martingale(s2, sched, s);
                    const Partition part = partition_for(p, p.horizon());
                    for (int j = 0; j < 3; ++j) {
                        const CotangentField df = CotangentField::differential(ScalarFunction::coordinate(3, j));
                        terminal[j * replicas + i] = ito_integral_delta(df, p, rule, part).back();
                    }
                });
                for (int j = 0; j < 3; ++j) {
                    const ZTest z = martingale_ztest(std::span<const double>(terminal).subspan(j * replicas, replicas));
                    ok[j] += std::abs(z.z) <= 3.0;
                    worst_z = std::max(worst_z, std::abs(z.z));
                }
            }
            for (int j = 0; j < 3; ++j) pass = pass && ok[j] >= 99;
            detail += (detail.empty() ? "" : "; ") + ctor + ": seeds with |z| <= 3 for x0/x1/x2 = " +
                      std::to_string(ok[0]) + "/" + std::to_string(ok[1]) + "/" + std::to_string(ok[2]) +
                      ", max |z| " + num(worst_z);
        }
        return Outcome{pass, detail};
    });

    criterion(7, "antipodal Poisson counterexample", 0.0, [&] {
        const fs::path dir = scratch("counterexample");
        const ExperimentResult r = run_defaults("counterexample", dir, threads());
        const std::string csv = slurp(dir / "counterexample.csv");
        std::istringstream is(csv);
        std::string line;
        std::getline(is, line);
        bool header_ok = line == "replica,converged,qv_total,Nf_terminal";
        bool zeros = true;
        int rows = 0;
        while (std::getline(is, line)) {
            const auto f = split_csv_line(line);
            zeros = zeros && parse_double(f[2]) == 0.0;
            ++rows;
        }
        return Outcome{r.all_pass() && header_ok && zeros && rows == 100,
                       clause_summary(r) + "; qv_total column all zero over " + std::to_string(rows) + " rows"};
    });

    criterion(8, "convergence dichotomy, monotone in beta", 0.0, [&] {
        const std::array<double, 4> betas{0.4, 0.5, 0.6, 0.8};
        const int replicas = 1000;
        bool pass = true;
        std::string detail;
        for (const std::string ctor : {"geodesic", "projection"}) {
            std::array<double, 4> frac{};
            for (std::size_t b = 0; b < betas.size(); ++b) {
                const JumpSchedule sched = JumpSchedule::unit_times(1000, 0.3, betas[b]);
                const ClassifierConfig cl = ClassifierConfig::defaults_for(s2);
                std::vector<int> conv(replicas);
                parallel_for(replicas, threads(), [&](std::size_t i) {
                    const std::uint64_t s = split_seed(8, i);
                    const DeltaPath p = ctor == "geodesic" ? geodesic_jump_martingale(s2, sched, s)
                                                           : projection_martingale(s2, sched, s);
                    conv[i] = classify_convergence(p, cl.rho, cl.eps) == Convergence::Converged;
                });
                double c = 0.0;
                for (int v : conv) c += v;
                frac[b] = c / replicas;
            }
            bool monotone = true;
            for (std::size_t b = 0; b + 1 < betas.size(); ++b) {
                const double se = std::sqrt((frac[b] * (1 - frac[b]) + frac[b + 1] * (1 - frac[b + 1])) / replicas);
                monotone = monotone && frac[b + 1] - frac[b] > 3.0 * se;
            }
            const bool ok = frac[2] >= 0.95 && frac[0] <= 0.20 && monotone;
            pass = pass && ok;
            detail += (detail.empty() ? "" : "; ") + ctor + " converged fractions at beta 0.4/0.5/0.6/0.8 = " +
                      num(frac[0]) + "/" + num(frac[1]) + "/" + num(frac[2]) + "/" + num(frac[3]) +
                      (monotone ? " (strictly increasing beyond 3 se)" : " (NOT strictly increasing beyond 3 se)");
        }
        return Outcome{pass, detail};
    });

    criterion(9, "stable jump magnitudes vs truncated Pareto (KS, 1%)", 0.0, [&] {
        const ExperimentResult r = run_defaults("stable-tail", scratch("stable"));
        return Outcome{r.all_pass() && r.clauses.size() == 3, clause_summary(r)};
    });

    criterion(10, "fractional operator oracle", 0.0, [&] {
        FractionalConfig cfg;
        cfg.m = 1;
        cfg.alpha = 1.0;
        const MapIntoManifold g = MapIntoManifold::scalar(1, [](const Vector& z) { return std::exp(-z.squaredNorm()); });
        const Vector origin = Vector::Zero(1);
        const double kernel = fractional_laplacian(g, origin, cfg).value[0];
        const double fourier = fourier_side_gaussian();
        const double rel = std::abs(kernel - fourier) / fourier;
        Vector c(2);
        c << 0.6, 0.8;
        double const_norm = 0.0;
        for (int m = 1; m <= 3; ++m) {
            FractionalConfig cm = cfg;
            cm.m = m;
            const Vector z = Vector::Constant(m, 0.3);
            const_norm = std::max(const_norm, fractional_laplacian(MapIntoManifold::constant(m, Manifold::circle(), c), z, cm).value.norm());
        }
        return Outcome{rel <= 1e-4 && const_norm <= 1e-8, "kernel " + num(kernel) + " vs Fourier " + num(fourier) +
                                                              ", relative " + num(rel) + "; constant maps " + num(const_norm)};
    });

    criterion(11, "Levy-system identity for the circle-valued map", 300.0, [&] {
        const ExperimentResult r = run_defaults("levy-system", scratch("levy"), threads());
        return Outcome{r.all_pass(), clause_summary(r)};
    });

    criterion(12, "byte-identical reruns", 0.0, [&] {
        std::string detail;
        bool same = true;
        for (const std::string kind : {"ito-identity", "martingale-test", "counterexample", "axioms", "stable-tail"}) {
            const fs::path a = scratch("det_a_" + kind), b = scratch("det_b_" + kind);
            const ExperimentResult ra = run_defaults(kind, a, 1);
            const ExperimentResult rb = run_defaults(kind, b, 3);
            int files = 0;
            for (const auto& entry : fs::directory_iterator(a)) {
                const bool eq = slurp(entry.path()) == slurp(b / entry.path().filename());
                same = same && eq && fs::exists(b / entry.path().filename());
                if (!eq) detail += " differs: " + entry.path().filename().string();
                ++files;
            }
            detail += (detail.empty() ? "" : ", ") + kind + " " + std::to_string(files) + " files";
        }
        return Outcome{same, detail + " identical across reruns (1 vs 3 threads)"};
    });

    fs::remove_all(fs::temp_directory_path() / ("jumpgeo_acceptance_" + std::to_string(::getpid())));
    std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAILED") << std::endl;
    return failures == 0 ? 0 : 1;
}
