#include "jumpgeo/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "jumpgeo/numeric.hpp"

namespace jumpgeo {

ScalarFunction ScalarFunction::constant(int ambient_dim, double c) {
    return {[c](const Vector&) { return c; },
            [ambient_dim](const Vector&) { return Vector::Zero(ambient_dim); },
            [ambient_dim](const Vector&) { return Eigen::MatrixXd::Zero(ambient_dim, ambient_dim); }};
}

ScalarFunction ScalarFunction::linear(Vector a, double b) {
    const auto n = a.size();
    return {[a, b](const Vector& x) { return a.dot(x) + b; }, [a](const Vector&) { return a; },
            [n](const Vector&) { return Eigen::MatrixXd::Zero(n, n); }};
}

ScalarFunction ScalarFunction::coordinate(int ambient_dim, int i) {
    return linear(Vector::Unit(ambient_dim, i));
}

ScalarFunction ScalarFunction::quadratic(Eigen::MatrixXd q) {
    return {[q](const Vector& x) { return 0.5 * x.dot(q * x); },
            [q](const Vector& x) -> Vector { return q * x; },
            [q](const Vector&) { return q; }};
}

CotangentField CotangentField::differential(const ScalarFunction& f) { return {f.gradient}; }

CotangentField CotangentField::zero(int ambient_dim) {
    return {[ambient_dim](const Vector&) { return Vector::Zero(ambient_dim); }};
}

TwoTensorField metric_tensor() {
    return [](const Vector&, const Vector& u, const Vector& v) { return u.dot(v); };
}

TwoTensorField tensor_product(CotangentField phi, CotangentField psi) {
    return [phi = std::move(phi), psi = std::move(psi)](const Vector& x, const Vector& u,
                                                        const Vector& v) {
        return phi.pair(x, u) * psi.pair(x, v);
    };
}

TwoTensorField riemannian_hessian(const Manifold& m, ScalarFunction f) {
    return [m, f = std::move(f)](const Vector& x, const Vector& u, const Vector& v) {
        const double ambient = u.dot(f.hessian(x) * v);
        if (m.is_flat()) return ambient;
        return ambient + f.gradient(x).dot(m.second_fundamental_form(x, u, v));
    };
}

double TimeSeries::max_abs() const {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double TimeSeries::at(double s) const {
    auto it = std::upper_bound(t.begin(), t.end(), s);
    if (it == t.begin()) throw DomainError("TimeSeries::at before the first sample");
    return v[static_cast<std::size_t>(it - t.begin()) - 1];
}

namespace {

// Partition states plus the jumps attached to partition indices.
struct Skeleton {
    std::vector<double> times;
    std::vector<Vector> points;  // X_{T_i}
    // For each partition index, the path event index of a jump at T_i, or npos.
    std::vector<std::size_t> jump_event;
};

constexpr std::size_t kNoJump = static_cast<std::size_t>(-1);

Skeleton skeleton(const DeltaPath& path, const Partition& p) {
    const auto& times = p.times();
    if (times.back() > path.horizon()) {
        throw DomainError("partition extends beyond the path horizon");
    }
    Skeleton s;
    s.times = times;
    s.points.reserve(times.size());
    s.jump_event.assign(times.size(), kNoJump);
    for (double t : times) s.points.push_back(path.events()[path.index_at(t)].x);
    const auto& events = path.events();
    for (std::size_t k = 1; k < events.size(); ++k) {
        if (!events[k].mark) continue;
        auto it = std::lower_bound(times.begin(), times.end(), events[k].t);
        if (it == times.end() || *it != events[k].t) {
            if (events[k].t > times.back()) continue;
            throw DomainError("partition misses the jump time " + format_double(events[k].t));
        }
        s.jump_event[static_cast<std::size_t>(it - times.begin())] = k;
    }
    return s;
}

TimeSeries make_series(const std::vector<double>& t) {
    TimeSeries s;
    s.t = t;
    s.v.reserve(t.size());
    return s;
}

}  // namespace

TimeSeries ito_sum(const CotangentField& phi, const DeltaPath& path, const ConnectionRule& rule,
                   const Partition& p) {
    const Skeleton s = skeleton(path, p);
    TimeSeries out = make_series(s.times);
    CompensatedSum acc;
    out.v.push_back(0.0);
    for (std::size_t i = 1; i < s.times.size(); ++i) {
        const Vector& a = s.points[i - 1];
        acc.add(phi.pair(a, evaluate_unchecked(rule, a, s.points[i])));
        out.v.push_back(acc.value());
    }
    return out;
}

TimeSeries jump_correction(const CotangentField& phi, const DeltaPath& path,
                           const ConnectionRule& rule, const Partition& p) {
    const Skeleton s = skeleton(path, p);
    const auto& events = path.events();
    TimeSeries out = make_series(s.times);
    CompensatedSum acc;
    out.v.push_back(0.0);
    for (std::size_t i = 1; i < s.times.size(); ++i) {
        if (const std::size_t k = s.jump_event[i]; k != kNoJump) {
            const Vector& before = events[k - 1].x;
            const Vector gamma = evaluate_unchecked(rule, before, events[k].x);
            acc.add(phi.pair(before, *events[k].mark - gamma));
        }
        out.v.push_back(acc.value());
    }
    return out;
}

TimeSeries ito_integral_delta(const CotangentField& phi, const DeltaPath& path,
                              const ConnectionRule& rule, const Partition& p) {
    const Skeleton s = skeleton(path, p);
    const auto& events = path.events();
    TimeSeries out = make_series(s.times);
    CompensatedSum acc;
    out.v.push_back(0.0);
    for (std::size_t i = 1; i < s.times.size(); ++i) {
        const Vector& a = s.points[i - 1];
        double term = phi.pair(a, evaluate_unchecked(rule, a, s.points[i]));
        if (const std::size_t k = s.jump_event[i]; k != kNoJump) {
            const Vector& before = events[k - 1].x;
            const Vector gamma = evaluate_unchecked(rule, before, events[k].x);
            term += phi.pair(before, *events[k].mark - gamma);
        }
        acc.add(term);
        out.v.push_back(acc.value());
    }
    return out;
}

QuadraticVariationResult quadratic_variation(const TwoTensorField& b, const DeltaPath& path,
                                             const ConnectionRule& rule, const Partition& p) {
    const Skeleton s = skeleton(path, p);
    const auto& events = path.events();
    QuadraticVariationResult r{make_series(s.times), make_series(s.times), make_series(s.times)};
    CompensatedSum cont;
    CompensatedSum jump;
    r.total.v.push_back(0.0);
    r.continuous_part.v.push_back(0.0);
    r.jump_part.v.push_back(0.0);
    for (std::size_t i = 1; i < s.times.size(); ++i) {
        const Vector& a = s.points[i - 1];
        const Vector g = evaluate_unchecked(rule, a, s.points[i]);
        double cell = b(a, g, g);
        if (const std::size_t k = s.jump_event[i]; k != kNoJump) {
            const Vector& before = events[k - 1].x;
            const Vector& mark = *events[k].mark;
            const Vector gj = evaluate_unchecked(rule, before, events[k].x);
            cell -= b(before, gj, gj);
            jump.add(b(before, mark, mark));
        }
        cont.add(cell);
        r.continuous_part.v.push_back(cont.value());
        r.jump_part.v.push_back(jump.value());
        r.total.v.push_back(r.continuous_part.v.back() + r.jump_part.v.back());
    }
    return r;
}

QuadraticVariationResult riemannian_qv(const DeltaPath& path, const Partition& p) {
    return riemannian_qv(path, p, ConnectionRule(RuleKind::Projection, path.manifold()));
}

QuadraticVariationResult riemannian_qv(const DeltaPath& path, const Partition& p,
                                       const ConnectionRule& rule) {
    return quadratic_variation(metric_tensor(), path, rule, p);
}

ItoDecomposition ito_decompose(const ScalarFunction& f, const DeltaPath& path,
                               const ConnectionRule& rule, const Partition& p) {
    const Skeleton s = skeleton(path, p);
    const auto& events = path.events();
    ItoDecomposition d;
    d.N = ito_integral_delta(CotangentField::differential(f), path, rule, p);

    const TwoTensorField half_hessian = [hess = riemannian_hessian(path.manifold(), f)](
                                            const Vector& x, const Vector& u, const Vector& v) {
        return 0.5 * hess(x, u, v);
    };
    d.A = quadratic_variation(half_hessian, path, rule, p).continuous_part;

    d.f = make_series(s.times);
    d.B = make_series(s.times);
    d.residual_series = make_series(s.times);
    const double f0 = f.value(s.points.front());
    CompensatedSum b;
    for (std::size_t i = 0; i < s.times.size(); ++i) {
        if (const std::size_t k = s.jump_event[i]; i > 0 && k != kNoJump) {
            const Vector& before = events[k - 1].x;
            b.add(f.value(events[k].x) - f.value(before) - f.gradient(before).dot(*events[k].mark));
        }
        const double fx = f.value(s.points[i]);
        d.f.v.push_back(fx);
        d.B.v.push_back(b.value());
        const double res = fx - f0 - d.N.v[i] - d.A.v[i] - d.B.v[i];
        d.residual_series.v.push_back(res);
        d.residual = std::max(d.residual, std::abs(res));
    }
    return d;
}

RefinementSweep refinement_sweep(const CotangentField& phi, const DeltaPath& path,
                                 const ConnectionRule& rule, int lo, int hi) {
    if (lo > hi) throw DomainError("refinement_sweep: empty mesh range");
    RefinementSweep sweep;
    const auto jumps = path.jump_times();
    for (int j = lo; j <= hi; ++j) {
        const double mesh = std::ldexp(1.0, -j);
        const Partition p = build_partition(path.horizon(), mesh, jumps);
        sweep.meshes.push_back(mesh);
        sweep.terminal.push_back(ito_integral_delta(phi, path, rule, p).back());
    }
    for (std::size_t i = 1; i < sweep.terminal.size(); ++i) {
        sweep.increments.push_back(std::abs(sweep.terminal[i] - sweep.terminal[i - 1]));
    }
    // log-log slope over positive increments
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < sweep.increments.size(); ++i) {
        if (sweep.increments[i] > 0.0) {
            pts.emplace_back(std::log(sweep.meshes[i]), std::log(sweep.increments[i]));
        }
    }
    if (pts.size() < 2) {
        sweep.cauchy_rate = std::numeric_limits<double>::quiet_NaN();
        return sweep;
    }
    double mx = 0.0, my = 0.0;
    for (auto [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0.0, sxx = 0.0;
    for (auto [x, y] : pts) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sweep.cauchy_rate = sxy / sxx;
    return sweep;
}

ZTest martingale_ztest(std::span<const double> samples) {
    if (samples.size() < 30) {
        throw DomainError("martingale_ztest needs at least 30 replicas, got " +
                          std::to_string(samples.size()));
    }
    ZTest out;
    out.n = samples.size();
    const double n = static_cast<double>(samples.size());
    CompensatedSum sum;
    for (double x : samples) sum.add(x);
    out.mean = sum.value() / n;
    CompensatedSum sq;
    for (double x : samples) sq.add((x - out.mean) * (x - out.mean));
    const double sd = std::sqrt(sq.value() / (n - 1.0));
    out.std_error = sd / std::sqrt(n);
    if (out.std_error == 0.0) {
        out.degenerate = true;
        out.z = out.mean == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), out.mean);
    } else {
        out.z = out.mean / out.std_error;
    }
    return out;
}

void write_series_csv(std::ostream& os, const TimeSeries& s) {
    os << "t,value\n";
    for (std::size_t i = 0; i < s.t.size(); ++i) {
        os << format_double(s.t[i]) << ',' << format_double(s.v[i]) << '\n';
    }
}

void write_decomposition_csv(std::ostream& os, const ItoDecomposition& d) {
    os << "t,f,N,A,B,residual\n";
    for (std::size_t i = 0; i < d.f.t.size(); ++i) {
        os << format_double(d.f.t[i]) << ',' << format_double(d.f.v[i]) << ','
           << format_double(d.N.v[i]) << ',' << format_double(d.A.v[i]) << ','
           << format_double(d.B.v[i]) << ',' << format_double(d.residual_series.v[i]) << '\n';
    }
}

}  // namespace jumpgeo
