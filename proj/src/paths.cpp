#include "jumpgeo/paths.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "jumpgeo/numeric.hpp"

namespace jumpgeo {

namespace {

std::string at_time(double t) { return " (t = " + format_double(t) + ")"; }

}  // namespace

DeltaPath::DeltaPath(Manifold manifold, std::vector<PathEvent> events, double horizon,
                     Interpolation interpolation)
    : manifold_(std::move(manifold)),
      events_(std::move(events)),
      horizon_(horizon),
      interpolation_(interpolation) {
    if (events_.empty()) throw DomainError("path needs at least the initial event");
    if (events_.front().t != 0.0) throw DomainError("path must start at t = 0");
    if (events_.front().mark) throw DomainError("no jump mark allowed at t = 0");
    if (!(horizon_ >= events_.back().t)) throw DomainError("horizon precedes the last event");
    for (std::size_t k = 0; k < events_.size(); ++k) {
        const PathEvent& e = events_[k];
        if (!manifold_.contains(e.x)) {
            throw DomainError("path point is not on " + manifold_.name() + at_time(e.t));
        }
        if (k == 0) continue;
        const PathEvent& prev = events_[k - 1];
        if (!(e.t > prev.t)) throw DomainError("event times must increase strictly" + at_time(e.t));
        if (e.mark) {
            if (e.mark->size() != manifold_.ambient_dim()) {
                throw DomainError("jump mark has wrong dimension" + at_time(e.t));
            }
            const Vector& v = *e.mark;
            if ((manifold_.project(prev.x, v) - v).norm() > 1e-10 * std::max(1.0, v.norm())) {
                throw DomainError("jump mark is not tangent at the pre-jump point" + at_time(e.t));
            }
        } else if (interpolation_ == Interpolation::PiecewiseConstant && e.x != prev.x &&
                   geodesic_distance(manifold_, prev.x, e.x) > kJumpThreshold) {
            throw DomainError("pure-jump path has an unmarked jump" + at_time(e.t));
        }
    }
}

DeltaPath DeltaPath::from_skeleton(const ConnectionRule& rule, std::span<const double> times,
                                   std::span<const Vector> points, double horizon) {
    if (times.size() != points.size()) throw DomainError("times and points differ in length");
    const Manifold& m = rule.manifold();
    std::vector<PathEvent> events;
    events.reserve(times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        PathEvent e{times[k], points[k], std::nullopt};
        if (k > 0) {
            const Vector& prev = points[k - 1];
            if (geodesic_distance(m, prev, points[k]) > kJumpThreshold) {
                e.mark = evaluate(rule, prev, points[k]).vec;
            }
        }
        events.push_back(std::move(e));
    }
    return DeltaPath(m, std::move(events), horizon, Interpolation::PiecewiseConstant);
}

DeltaPath DeltaPath::constant(Manifold manifold, Vector x, double horizon) {
    std::vector<PathEvent> events{{0.0, std::move(x), std::nullopt}};
    return DeltaPath(std::move(manifold), std::move(events), horizon);
}

std::vector<double> DeltaPath::jump_times() const {
    std::vector<double> out;
    for (const auto& e : events_) {
        if (e.mark) out.push_back(e.t);
    }
    return out;
}

std::size_t DeltaPath::index_at(double t) const {
    auto it = std::upper_bound(events_.begin(), events_.end(), t,
                               [](double value, const PathEvent& e) { return value < e.t; });
    return static_cast<std::size_t>(it - events_.begin()) - 1;
}

DeltaPath DeltaPath::with_marks(std::vector<std::optional<Vector>> marks) const {
    if (marks.size() != events_.size()) throw DomainError("one mark slot per event expected");
    std::vector<PathEvent> events = events_;
    for (std::size_t k = 0; k < events.size(); ++k) events[k].mark = std::move(marks[k]);
    return DeltaPath(manifold_, std::move(events), horizon_, interpolation_);
}

CadlagValue sample_at(const DeltaPath& path, double t) {
    if (!(t >= 0.0 && t <= path.horizon())) {
        throw DomainError("sample_at: t = " + format_double(t) + " outside [0, horizon]");
    }
    const std::size_t k = path.index_at(t);
    const auto& events = path.events();
    if (k > 0 && events[k].t == t) return {events[k].x, events[k - 1].x};
    return {events[k].x, events[k].x};
}

Partition::Partition(std::vector<double> times) : times_(std::move(times)) {
    if (times_.empty() || times_.front() != 0.0) throw DomainError("partition must start at 0");
    for (std::size_t i = 1; i < times_.size(); ++i) {
        if (!(times_[i] > times_[i - 1])) throw DomainError("partition times must increase");
    }
}

double Partition::mesh() const {
    double mesh = 0.0;
    for (std::size_t i = 1; i < times_.size(); ++i) mesh = std::max(mesh, times_[i] - times_[i - 1]);
    return mesh;
}

bool Partition::contains(double t, double tol) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t - tol);
    return it != times_.end() && std::abs(*it - t) <= tol;
}

Partition build_partition(double horizon, double mesh, std::span<const double> mandatory) {
    if (!(mesh > 0.0)) throw DomainError("build_partition: mesh must be positive");
    if (!(horizon >= 0.0)) throw DomainError("build_partition: horizon must be nonnegative");
    struct Tagged {
        double t;
        bool mandatory;
    };
    std::vector<Tagged> all;
    const auto cells = static_cast<std::size_t>(std::max(1.0, std::ceil(horizon / mesh - 1e-12)));
    all.reserve(cells + 1 + mandatory.size());
    if (horizon == 0.0) {
        all.push_back({0.0, false});
    } else {
        for (std::size_t i = 0; i <= cells; ++i) {
            all.push_back({i == cells ? horizon : horizon * static_cast<double>(i) / cells, false});
        }
    }
    for (double t : mandatory) {
        if (!(t >= 0.0 && t <= horizon)) {
            throw DomainError("build_partition: mandatory time " + format_double(t) +
                              " outside [0, horizon]");
        }
        all.push_back({t, true});
    }
    std::stable_sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) { return a.t < b.t; });
    std::vector<Tagged> merged;
    for (const Tagged& x : all) {
        if (!merged.empty() && x.t - merged.back().t <= kTimeDedupTol) {
            if (x.mandatory && !merged.back().mandatory && merged.back().t != 0.0) merged.back() = x;
            continue;
        }
        merged.push_back(x);
    }
    std::vector<double> times;
    times.reserve(merged.size());
    for (const Tagged& x : merged) times.push_back(x.t);
    return Partition(std::move(times));
}

Partition refine(const Partition& p, int factor) {
    if (factor < 2) throw DomainError("refine: factor must be >= 2");
    const auto& t = p.times();
    std::vector<double> out;
    out.reserve((t.size() - 1) * static_cast<std::size_t>(factor) + 1);
    out.push_back(t.front());
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double a = t[i - 1];
        const double b = t[i];
        for (int j = 1; j < factor; ++j) out.push_back(a + (b - a) * j / factor);
        out.push_back(b);
    }
    return Partition(std::move(out));
}

Partition partition_for(const DeltaPath& path, double mesh) {
    std::vector<double> times;
    times.reserve(path.size());
    for (const auto& e : path.events()) times.push_back(e.t);
    return build_partition(path.horizon(), mesh, times);
}

void write_path_csv(std::ostream& os, const DeltaPath& path) {
    const int a = path.manifold().ambient_dim();
    os << 't';
    for (int i = 0; i < a; ++i) os << ",x_" << i;
    os << ",jump";
    for (int i = 0; i < a; ++i) os << ",dx_" << i;
    os << '\n';
    for (const auto& e : path.events()) {
        os << format_double(e.t);
        for (int i = 0; i < a; ++i) os << ',' << format_double(e.x[i]);
        os << ',' << (e.mark ? 1 : 0);
        for (int i = 0; i < a; ++i) os << ',' << format_double(e.mark ? (*e.mark)[i] : 0.0);
        os << '\n';
    }
}

DeltaPath read_path_csv(std::istream& is, const Manifold& manifold, std::optional<double> horizon) {
    const int a = manifold.ambient_dim();
    std::string line;
    if (!std::getline(is, line)) throw DomainError("path CSV is empty");
    std::ostringstream expected;
    expected << 't';
    for (int i = 0; i < a; ++i) expected << ",x_" << i;
    expected << ",jump";
    for (int i = 0; i < a; ++i) expected << ",dx_" << i;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected.str()) throw DomainError("path CSV header mismatch: '" + line + "'");

    std::vector<PathEvent> events;
    bool has_unmarked_jump = false;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != static_cast<std::size_t>(2 * a + 2)) {
            throw DomainError("path CSV row has " + std::to_string(fields.size()) + " fields");
        }
        PathEvent e;
        e.t = parse_double(fields[0]);
        e.x.resize(a);
        for (int i = 0; i < a; ++i) e.x[i] = parse_double(fields[1 + i]);
        const double flag = parse_double(fields[1 + a]);
        if (flag != 0.0 && flag != 1.0) throw DomainError("jump flag must be 0 or 1");
        if (flag == 1.0) {
            Vector d(a);
            for (int i = 0; i < a; ++i) d[i] = parse_double(fields[2 + a + i]);
            e.mark = std::move(d);
        } else if (!events.empty() && e.x != events.back().x) {
            has_unmarked_jump = true;
        }
        events.push_back(std::move(e));
    }
    if (events.empty()) throw DomainError("path CSV has no rows");
    const double T = horizon.value_or(events.back().t);
    return DeltaPath(manifold, std::move(events), T,
                     has_unmarked_jump ? Interpolation::RecordedGrid : Interpolation::PiecewiseConstant);
}

}  // namespace jumpgeo
