#include "jumpgeo/experiments.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <variant>

#include "jumpgeo/fractional.hpp"
#include "jumpgeo/integrator.hpp"
#include "jumpgeo/maps.hpp"
#include "jumpgeo/numeric.hpp"
#include "jumpgeo/parallel.hpp"
#include "jumpgeo/processes.hpp"

namespace jumpgeo {

using json = nlohmann::json;

namespace {

const std::vector<std::string> kKinds = {"axioms",       "ito-identity",   "martingale-test",
                                         "convergence",  "counterexample", "stable-tail",
                                         "fractional-residual", "levy-system"};

[[noreturn]] void invalid(const std::string& msg) { throw ValidationError(msg); }

std::string join(const std::string& prefix, const std::string& key) {
    return prefix.empty() ? key : prefix + "." + key;
}

std::string short_num(double x) {
    std::ostringstream os;
    os << std::setprecision(4) << x;
    return os.str();
}

// Typed access to a (resolved) config object; errors name the dotted key path.
class View {
  public:
    View(const json& obj, std::string prefix = "") : obj_(obj), prefix_(std::move(prefix)) {}

    const json& raw(const std::string& key) const {
        auto it = obj_.find(key);
        if (it == obj_.end()) invalid("missing required key '" + join(prefix_, key) + "'");
        return *it;
    }
    double number(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_number()) invalid("key '" + join(prefix_, key) + "' must be a number");
        return v.get<double>();
    }
    double positive(const std::string& key) const {
        const double v = number(key);
        if (!(v > 0.0) || !std::isfinite(v)) invalid("key '" + join(prefix_, key) + "' must be positive");
        return v;
    }
    long long integer(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_number_integer()) invalid("key '" + join(prefix_, key) + "' must be an integer");
        return v.get<long long>();
    }
    int count(const std::string& key, long long lo, long long hi) const {
        const long long v = integer(key);
        if (v < lo || v > hi) {
            invalid("key '" + join(prefix_, key) + "' must lie in [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]");
        }
        return static_cast<int>(v);
    }
    std::string text(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_string()) invalid("key '" + join(prefix_, key) + "' must be a string");
        return v.get<std::string>();
    }
    std::vector<double> numbers(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_array()) invalid("key '" + join(prefix_, key) + "' must be an array of numbers");
        std::vector<double> out;
        for (const json& x : v) {
            if (!x.is_number()) invalid("key '" + join(prefix_, key) + "' must be an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }
    std::vector<std::string> texts(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_array() || v.empty()) invalid("key '" + join(prefix_, key) + "' must be a non-empty array of strings");
        std::vector<std::string> out;
        for (const json& x : v) {
            if (!x.is_string()) invalid("key '" + join(prefix_, key) + "' must be a non-empty array of strings");
            out.push_back(x.get<std::string>());
        }
        return out;
    }
    bool has(const std::string& key) const { return obj_.contains(key); }
    View sub(const std::string& key) const {
        const json& v = raw(key);
        if (!v.is_object()) invalid("key '" + join(prefix_, key) + "' must be an object");
        return View(v, join(prefix_, key));
    }
    const std::string& prefix() const { return prefix_; }

  private:
    const json& obj_;
    std::string prefix_;
};

// ---------------------------------------------------------------------------
// catalogues

Manifold parse_manifold(const std::string& text) {
    if (text == "circle") return Manifold::circle();
    auto dim_of = [&](const std::string& head) -> int {
        const std::string digits = text.substr(head.size());
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos ||
            digits.size() > 3) {
            invalid("manifold '" + text + "': expected " + head + "<dimension>");
        }
        return std::stoi(digits);
    };
    if (text.rfind("sphere:", 0) == 0) {
        const int n = dim_of("sphere:");
        if (n < 1) invalid("manifold '" + text + "': sphere dimension must be >= 1");
        return Manifold::sphere(n);
    }
    if (text.rfind("euclidean:", 0) == 0) {
        const int n = dim_of("euclidean:");
        if (n < 1) invalid("manifold '" + text + "': dimension must be >= 1");
        return Manifold::euclidean(n);
    }
    invalid("unknown manifold '" + text + "' (use circle, sphere:<n> or euclidean:<n>)");
}

// f = prod_{i < min(3, a)} x_i + x_{a-1}^2
ScalarFunction mixed_cubic(int a) {
    const int p = std::min(3, a);
    auto prod_except = [p](const Vector& x, int skip1, int skip2) {
        double r = 1.0;
        for (int i = 0; i < p; ++i) {
            if (i != skip1 && i != skip2) r *= x[i];
        }
        return r;
    };
    ScalarFunction f;
    f.value = [=](const Vector& x) { return prod_except(x, -1, -1) + x[a - 1] * x[a - 1]; };
    f.gradient = [=](const Vector& x) {
        Vector g = Vector::Zero(a);
        for (int i = 0; i < p; ++i) g[i] = prod_except(x, i, -1);
        g[a - 1] += 2.0 * x[a - 1];
        return g;
    };
    f.hessian = [=](const Vector& x) {
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(a, a);
        for (int i = 0; i < p; ++i) {
            for (int j = 0; j < p; ++j) {
                if (i != j) h(i, j) = prod_except(x, i, j);
            }
        }
        h(a - 1, a - 1) += 2.0;
        return h;
    };
    return f;
}

ScalarFunction test_function(const std::string& name, int a) {
    if (name.size() > 1 && name[0] == 'x' && name.find_first_not_of("0123456789", 1) == std::string::npos &&
        name.size() < 5) {
        const int i = std::stoi(name.substr(1));
        if (i >= a) invalid("function '" + name + "' needs ambient dimension > " + std::to_string(i));
        return ScalarFunction::coordinate(a, i);
    }
    if (name == "quadratic") {
        Eigen::MatrixXd q = Eigen::MatrixXd::Zero(a, a);
        for (int i = 0; i < a; ++i) {
            q(i, i) = i + 1.0;
            if (i + 1 < a) q(i, i + 1) = q(i + 1, i) = 0.5;
        }
        return ScalarFunction::quadratic(q);
    }
    if (name == "cubic") return mixed_cubic(a);
    invalid("unknown function '" + name + "' (use x<i>, quadratic or cubic)");
}

MapIntoManifold test_map(const std::string& name, int m) {
    if (name == "gaussian") {
        return MapIntoManifold::scalar(m, [](const Vector& z) { return std::exp(-z.squaredNorm()); });
    }
    if (name == "constant") {
        Vector c(2);
        c << 1.0, 0.0;
        return MapIntoManifold::constant(m, Manifold::circle(), c);
    }
    if (name == "tanh-circle") {
        return MapIntoManifold::circle_valued(m, [](const Vector& z) { return 2.0 * std::tanh(0.5 * z[0]); });
    }
    if (name == "arctan-circle") return arctan_circle_map(m);
    if (name == "kink") {
        // Lipschitz but not C^1; the kernel quadrature cannot certify it near the crease
        return MapIntoManifold::scalar(m, [](const Vector& z) { return std::abs(z[0] - 0.37); });
    }
    invalid("unknown map '" + name + "' (use gaussian, constant, tanh-circle, arctan-circle or kink)");
}

// (-Delta)^{alpha/2} e^{-|z|^2} at the origin from the Fourier side:
// (2 pi)^{-m} int |k|^alpha pi^{m/2} e^{-|k|^2/4} dk = 2^alpha Gamma((m+alpha)/2) / Gamma(m/2).
double gaussian_fourier_value(int m, double alpha) {
    return std::exp(alpha * std::log(2.0) + std::lgamma(0.5 * (m + alpha)) - std::lgamma(0.5 * m));
}

// ---------------------------------------------------------------------------
// defaults

json schedule_defaults(const std::string& mode, double c, double beta) {
    return json{{"mode", mode}, {"rate", 1.0}, {"c", c}, {"beta", beta}, {"times", nullptr}, {"radii", nullptr}};
}

json fractional_defaults(int angular_order) {
    const FractionalConfig d;
    return json{{"inner_cutoff", d.inner_cutoff},
                {"outer_cutoff", d.outer_cutoff},
                {"radial_order", d.radial_order},
                {"angular_order", angular_order}};
}

json kind_defaults(const std::string& kind) {
    json j;
    if (kind == "axioms") {
        j = {{"manifold", "sphere:2"}, {"rules", {"projection", "exponential"}}, {"samples", 1000}, {"tolerance", 1e-5}};
    } else if (kind == "ito-identity") {
        json s = schedule_defaults("poisson", 1.0, 0.3);
        s["rate"] = 25.0;
        j = {{"manifold", "sphere:2"}, {"process", "geodesic"}, {"rule", "exponential"}, {"schedule", s},
             {"horizon", 20.0}, {"replicas", 100}, {"functions", {"x0", "x1", "x2", "quadratic", "cubic"}},
             {"tolerance", 1e-9}};
    } else if (kind == "martingale-test") {
        j = {{"manifold", "sphere:2"}, {"process", "projection"}, {"rule", "projection"},
             {"schedule", schedule_defaults("fixed", 0.5, 0.6)}, {"horizon", 10.0}, {"replicas", 10000},
             {"function", "x0"}, {"classifier", {{"rho", 0.2}, {"eps", nullptr}}}, {"z_threshold", 3.0}};
    } else if (kind == "convergence") {
        j = {{"manifold", "sphere:2"}, {"process", "geodesic"}, {"rule", "exponential"},
             {"schedule", schedule_defaults("fixed", 0.3, 0.6)}, {"horizon", 1000.0}, {"replicas", 1000},
             {"function", "x0"}, {"classifier", {{"rho", 0.2}, {"eps", nullptr}}},
             {"expect", {{"converged_at_least", 0.95}, {"converged_at_most", 0.2}}}};
    } else if (kind == "counterexample") {
        j = {{"rate", 1.0}, {"horizon", 50.0}, {"replicas", 100}, {"functions", {"x0", "x1", "quadratic", "cubic"}},
             {"classifier", {{"rho", 0.2}, {"eps", nullptr}}}};
    } else if (kind == "stable-tail") {
        j = {{"cases", json::array({{{"m", 2}, {"alpha", 1.0}}, {{"m", 2}, {"alpha", 1.5}}, {{"m", 3}, {"alpha", 0.8}}})},
             {"epsilon", 0.05}, {"samples", 10000}};
    } else if (kind == "fractional-residual") {
        j = {{"map", "tanh-circle"}, {"m", 1}, {"alpha", 1.0}, {"point", {0.0}},
             {"fractional", fractional_defaults(16)}, {"accuracy", 1e-6}};
    } else if (kind == "levy-system") {
        j = {{"map", "arctan-circle"}, {"m", 2}, {"alpha", 1.0}, {"point", {0.0, 0.0}}, {"horizon", 1.0},
             {"replicas", 10000}, {"epsilon", 0.1}, {"fractional", fractional_defaults(32)}};
    } else {
        invalid("unknown kind '" + kind + "'");
    }
    return j;
}

void merge_into(json& base, const json& user, const std::string& prefix) {
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string path = join(prefix, it.key());
        auto target = base.find(it.key());
        if (target == base.end()) invalid("unknown key '" + path + "'");
        if (target->is_object() && it.value().is_object()) {
            merge_into(*target, it.value(), path);
        } else {
            *target = it.value();
        }
    }
}

// ---------------------------------------------------------------------------
// parsed parameter sets

struct ProcessSetup {
    Manifold manifold = Manifold::sphere(2);
    std::string process;
    RuleKind rule = RuleKind::Projection;
    JumpSchedule schedule;
    int replicas = 0;
    ClassifierConfig classifier;
};

JumpSchedule parse_schedule(const View& s, double horizon, const Manifold& m) {
    const std::string mode = s.text("mode");
    const double c = s.positive("c");
    const double beta = s.number("beta");
    if (beta < 0.0) invalid("key 'schedule.beta' must be >= 0 (radii c k^-beta must not grow)");
    JumpSchedule sched;
    if (mode == "fixed") {
        std::vector<double> times;
        if (s.raw("times").is_null()) {
            for (int k = 1; k <= static_cast<int>(std::floor(horizon + 1e-12)); ++k) times.push_back(k);
        } else {
            times = s.numbers("times");
        }
        std::vector<double> radii;
        if (!s.raw("radii").is_null()) {
            radii = s.numbers("radii");
            if (radii.size() != times.size()) invalid("key 'schedule.radii' must match 'schedule.times' in length");
        }
        sched = JumpSchedule::fixed(times, radii, horizon);
        sched.c = c;
        sched.beta = beta;
    } else if (mode == "poisson") {
        sched = JumpSchedule::poisson(s.positive("rate"), horizon, c, beta);
        if (!s.raw("times").is_null() || !s.raw("radii").is_null()) {
            invalid("keys 'schedule.times'/'schedule.radii' only apply to mode 'fixed'");
        }
    } else {
        invalid("key 'schedule.mode' must be 'fixed' or 'poisson'");
    }
    sched.validate();
    // radii are non-increasing in k, so r_1 (or the largest explicit radius) is the binding one
    double largest = sched.radius(1);
    for (double r : sched.radii) largest = std::max(largest, r);
    if (!(largest < m.injectivity_radius())) {
        invalid("schedule radius " + short_num(largest) + " reaches the injectivity radius of " + m.name());
    }
    return sched;
}

ClassifierConfig parse_classifier(const View& c, const Manifold& m) {
    ClassifierConfig cfg = ClassifierConfig::defaults_for(m);
    cfg.rho = c.number("rho");
    if (!(cfg.rho > 0.0 && cfg.rho < 1.0)) invalid("key '" + join(c.prefix(), "rho") + "' must lie in (0, 1)");
    if (!c.raw("eps").is_null()) cfg.eps = c.positive("eps");
    return cfg;
}

ProcessSetup parse_process(const View& v) {
    ProcessSetup s;
    s.manifold = parse_manifold(v.text("manifold"));
    s.process = v.text("process");
    if (s.process != "geodesic" && s.process != "projection") {
        invalid("key 'process' must be 'geodesic' or 'projection'");
    }
    if (s.process == "projection" && !s.manifold.is_sphere()) {
        invalid("process 'projection' needs a sphere manifold");
    }
    s.rule = parse_rule_kind(v.text("rule"));
    ConnectionRule(s.rule, s.manifold);
    const double horizon = v.positive("horizon");
    s.schedule = parse_schedule(v.sub("schedule"), horizon, s.manifold);
    s.replicas = v.count("replicas", 1, 100000000);
    if (v.has("classifier")) {
        if (s.manifold.diameter() == std::numeric_limits<double>::infinity()) {
            invalid("the convergence classifier needs a compact manifold");
        }
        s.classifier = parse_classifier(v.sub("classifier"), s.manifold);
    }
    return s;
}

FractionalConfig parse_fractional(const View& v, int m, double alpha) {
    FractionalConfig cfg;
    cfg.m = m;
    cfg.alpha = alpha;
    const View f = v.sub("fractional");
    cfg.inner_cutoff = f.positive("inner_cutoff");
    cfg.outer_cutoff = f.positive("outer_cutoff");
    cfg.radial_order = f.count("radial_order", 4, 4096);
    cfg.angular_order = f.count("angular_order", 4, 4096);
    cfg.validate();
    return cfg;
}

Vector parse_point(const View& v, int m) {
    const std::vector<double> p = v.numbers("point");
    if (static_cast<int>(p.size()) != m) invalid("key 'point' must have m = " + std::to_string(m) + " entries");
    return Eigen::Map<const Vector>(p.data(), m);
}

double parse_alpha(const View& v) {
    const double a = v.number("alpha");
    if (!(a > 0.0 && a < 2.0)) invalid("key 'alpha' must lie in (0, 2)");
    return a;
}

// Validates every parameter of `cfg` (already merged with defaults) and returns
// it with derived values filled in.
json validate_kind(json cfg) {
    const View v(cfg);
    const std::string kind = v.text("kind");
    if (kind == "axioms") {
        const Manifold m = parse_manifold(v.text("manifold"));
        for (const std::string& r : v.texts("rules")) ConnectionRule(parse_rule_kind(r), m);
        v.count("samples", 1, 10000000);
        v.positive("tolerance");
    } else if (kind == "ito-identity" || kind == "martingale-test" || kind == "convergence") {
        const ProcessSetup s = parse_process(v);
        const int a = s.manifold.ambient_dim();
        if (kind == "ito-identity") {
            for (const std::string& f : v.texts("functions")) test_function(f, a);
            v.positive("tolerance");
        } else {
            test_function(v.text("function"), a);
            cfg["classifier"]["eps"] = s.classifier.eps;
            if (kind == "martingale-test") {
                if (s.replicas < 30) invalid("key 'replicas' must be >= 30 for the z-test");
                v.positive("z_threshold");
            } else {
                const View e = v.sub("expect");
                e.number("converged_at_least");
                e.number("converged_at_most");
            }
        }
    } else if (kind == "counterexample") {
        const double rate = v.positive("rate");
        const double horizon = v.positive("horizon");
        if (rate * horizon > 1e7) invalid("rate * horizon exceeds 1e7 expected events");
        v.count("replicas", 1, 10000000);
        for (const std::string& f : v.texts("functions")) test_function(f, 2);
        cfg["classifier"]["eps"] = parse_classifier(v.sub("classifier"), Manifold::circle()).eps;
    } else if (kind == "stable-tail") {
        const json& cases = v.raw("cases");
        if (!cases.is_array() || cases.empty()) invalid("key 'cases' must be a non-empty array");
        const double eps = v.positive("epsilon");
        for (std::size_t i = 0; i < cases.size(); ++i) {
            if (!cases[i].is_object()) invalid("key 'cases' entries must be objects {m, alpha}");
            const View c(cases[i], "cases[" + std::to_string(i) + "]");
            StableProcessConfig sc;
            sc.m = c.count("m", 1, 64);
            sc.alpha = parse_alpha(c);
            sc.epsilon = eps;
            sc.validate();
        }
        v.count("samples", 10, 100000000);
    } else if (kind == "fractional-residual" || kind == "levy-system") {
        const int m = v.count("m", 1, 8);
        const double alpha = parse_alpha(v);
        test_map(v.text("map"), m);
        parse_point(v, m);
        parse_fractional(v, m, alpha);
        if (kind == "fractional-residual") {
            v.positive("accuracy");
        } else {
            if (m < 2) invalid("kind 'levy-system' needs m >= 2 (transient stable process)");
            StableProcessConfig sc;
            sc.m = m;
            sc.alpha = alpha;
            sc.epsilon = v.positive("epsilon");
            sc.horizon = v.positive("horizon");
            sc.validate();
            if (stable_jump_intensity(m, alpha, sc.epsilon) * sc.horizon > sc.max_expected_events) {
                invalid("epsilon " + short_num(sc.epsilon) + " gives more than " + short_num(sc.max_expected_events) +
                        " expected jumps per path; increase 'epsilon'");
            }
            v.count("replicas", 2, 100000000);
        }
    } else {
        invalid("unknown kind '" + kind + "'");
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// output

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::filesystem::path write_table(const RunOptions& opts, const std::string& stem, const Table& t) {
    if (opts.format == TableFormat::Csv) {
        const auto path = opts.out_dir / (stem + ".csv");
        std::ofstream os(path, std::ios::binary);
        if (!os) throw ResourceError("cannot write " + path.string());
        for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
        os << '\n';
        for (const auto& row : t.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) os << ',';
                std::visit(
                    [&](const auto& x) {
                        using T = std::decay_t<decltype(x)>;
                        if constexpr (std::is_same_v<T, double>) {
                            os << format_double(x);
                        } else {
                            os << x;
                        }
                    },
                    row[i]);
            }
            os << '\n';
        }
        return path;
    }
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r = json::array();
        for (const Cell& c : row) std::visit([&](const auto& x) { r.push_back(x); }, c);
        rows.push_back(std::move(r));
    }
    const auto path = opts.out_dir / (stem + ".json");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ResourceError("cannot write " + path.string());
    os << json{{"columns", t.columns}, {"rows", rows}}.dump(2) << '\n';
    return path;
}

std::filesystem::path write_json(const RunOptions& opts, const std::string& file, const json& j) {
    const auto path = opts.out_dir / file;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ResourceError("cannot write " + path.string());
    os << j.dump(2) << '\n';
    return path;
}

std::filesystem::path write_path(const RunOptions& opts, const std::string& stem, const DeltaPath& p) {
    const auto path = opts.out_dir / (stem + ".path.csv");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ResourceError("cannot write " + path.string());
    write_path_csv(os, p);
    return path;
}

Clause clause(std::string name, bool pass, std::string detail) {
    return {std::move(name), pass, std::move(detail)};
}

// ---------------------------------------------------------------------------
// kinds

struct Context {
    const json& cfg;
    View v;
    std::string name;
    std::uint64_t seed;
    const RunOptions& opts;
    ExperimentResult& out;
};

void run_axioms(Context& ctx) {
    const Manifold m = parse_manifold(ctx.v.text("manifold"));
    const int samples = ctx.v.count("samples", 1, 10000000);
    const double tol = ctx.v.positive("tolerance");
    Table t{{"rule", "manifold", "samples", "max_tangency", "max_diagonal", "max_differential"}, {}};
    const auto rules = ctx.v.texts("rules");
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const ConnectionRule rule(parse_rule_kind(rules[i]), m);
        const AxiomReport r = check_axioms(rule, samples, split_seed(ctx.seed, i));
        t.rows.push_back({to_string(rule.kind()), m.name(), static_cast<long long>(samples), r.max_tangency,
                          r.max_diagonal, r.max_differential});
        ctx.out.clauses.push_back(clause("axioms[" + to_string(rule.kind()) + " on " + m.name() + "]",
                                         r.max_diagonal == 0.0 && r.worst() <= tol,
                                         "max deviation " + short_num(r.worst()) + " (tolerance " + short_num(tol) +
                                             "), gamma(x,x) max " + short_num(r.max_diagonal)));
    }
    ctx.out.artifacts.push_back(write_table(ctx.opts, ctx.name, t));
}

DeltaPath make_process_path(const ProcessSetup& s, std::uint64_t seed) {
    return s.process == "geodesic" ? geodesic_jump_martingale(s.manifold, s.schedule, seed)
                                   : projection_martingale(s.manifold, s.schedule, seed);
}

void run_ito_identity(Context& ctx) {
    const ProcessSetup s = parse_process(ctx.v);
    const ConnectionRule rule(s.rule, s.manifold);
    const auto names = ctx.v.texts("functions");
    const double tol = ctx.v.positive("tolerance");
    std::vector<ScalarFunction> fs;
    for (const auto& n : names) fs.push_back(test_function(n, s.manifold.ambient_dim()));

    const std::size_t nf = fs.size();
    std::vector<double> residual(static_cast<std::size_t>(s.replicas) * nf);
    std::vector<double> increment(residual.size());
    std::vector<long long> jumps(static_cast<std::size_t>(s.replicas));
    parallel_for(static_cast<std::size_t>(s.replicas), ctx.opts.threads, [&](std::size_t i) {
        const DeltaPath p = make_process_path(s, split_seed(ctx.seed, i));
        const Partition part = partition_for(p, p.horizon());
        jumps[i] = static_cast<long long>(p.jump_times().size());
        for (std::size_t j = 0; j < nf; ++j) {
            const ItoDecomposition d = ito_decompose(fs[j], p, rule, part);
            residual[i * nf + j] = d.residual;
            increment[i * nf + j] = d.f.back() - d.f.v.front();
        }
    });

    Table t{{"replica", "function", "jumps", "f_increment", "residual"}, {}};
    for (std::size_t i = 0; i < static_cast<std::size_t>(s.replicas); ++i) {
        for (std::size_t j = 0; j < nf; ++j) {
            t.rows.push_back({static_cast<long long>(i), names[j], jumps[i], increment[i * nf + j], residual[i * nf + j]});
        }
    }
    for (std::size_t j = 0; j < nf; ++j) {
        double worst = 0.0;
        for (std::size_t i = 0; i < static_cast<std::size_t>(s.replicas); ++i) worst = std::max(worst, residual[i * nf + j]);
        ctx.out.clauses.push_back(clause("telescoping Ito identity[" + names[j] + "]", worst <= tol,
                                         "max |f(X_T) - f(X_0) - N_T - B_T| = " + short_num(worst) + " over " +
                                             std::to_string(s.replicas) + " paths (tolerance " + short_num(tol) + ")"));
    }
    ctx.out.artifacts.push_back(write_table(ctx.opts, ctx.name, t));

    const DeltaPath first = make_process_path(s, split_seed(ctx.seed, 0));
    const auto dpath = ctx.opts.out_dir / (ctx.name + ".decomposition.csv");
    std::ofstream os(dpath, std::ios::binary);
    write_decomposition_csv(os, ito_decompose(fs.front(), first, rule, partition_for(first, first.horizon())));
    ctx.out.artifacts.push_back(dpath);
    ctx.out.artifacts.push_back(write_path(ctx.opts, ctx.name, first));
}

struct ReplicaRow {
    bool converged = false;
    double qv_total = 0.0;
    double nf_terminal = 0.0;
};

Table replica_table(const std::vector<ReplicaRow>& rows) {
    Table t{{"replica", "converged", "qv_total", "Nf_terminal"}, {}};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        t.rows.push_back({static_cast<long long>(i), static_cast<long long>(rows[i].converged), rows[i].qv_total,
                          rows[i].nf_terminal});
    }
    return t;
}

std::vector<ReplicaRow> simulate_replicas(const Context& ctx, const ProcessSetup& s, const ScalarFunction& f) {
    const ConnectionRule rule(s.rule, s.manifold);
    const CotangentField df = CotangentField::differential(f);
    std::vector<ReplicaRow> rows(static_cast<std::size_t>(s.replicas));
    parallel_for(rows.size(), ctx.opts.threads, [&](std::size_t i) {
        const DeltaPath p = make_process_path(s, split_seed(ctx.seed, i));
        const Partition part = partition_for(p, p.horizon());
        rows[i].qv_total = riemannian_qv(p, part, rule).total.back();
        rows[i].nf_terminal = ito_integral_delta(df, p, rule, part).back();
        rows[i].converged = classify_convergence(p, s.classifier.rho, s.classifier.eps) == Convergence::Converged;
    });
    return rows;
}

void run_martingale_test(Context& ctx) {
    const ProcessSetup s = parse_process(ctx.v);
    const std::string fname = ctx.v.text("function");
    const double threshold = ctx.v.positive("z_threshold");
    const auto rows = simulate_replicas(ctx, s, test_function(fname, s.manifold.ambient_dim()));
    std::vector<double> nf;
    for (const auto& r : rows) nf.push_back(r.nf_terminal);
    const ZTest z = martingale_ztest(nf);
    ctx.out.clauses.push_back(clause("martingale z-test[" + s.process + ", " + fname + "]",
                                     std::abs(z.z) <= threshold,
                                     "mean " + short_num(z.mean) + ", se " + short_num(z.std_error) + ", z " +
                                         short_num(z.z) + " (|z| <= " + short_num(threshold) + ", n = " +
                                         std::to_string(z.n) + ")"));
    ctx.out.artifacts.push_back(write_table(ctx.opts, ctx.name, replica_table(rows)));
    ctx.out.artifacts.push_back(write_path(ctx.opts, ctx.name, make_process_path(s, split_seed(ctx.seed, 0))));
}

void run_convergence(Context& ctx) {
    const ProcessSetup s = parse_process(ctx.v);
    const View e = ctx.v.sub("expect");
    const auto rows = simulate_replicas(ctx, s, test_function(ctx.v.text("function"), s.manifold.ambient_dim()));
    double conv = 0.0;
    for (const auto& r : rows) conv += r.converged;
    const double frac = conv / static_cast<double>(rows.size());
    const double se = std::sqrt(frac * (1.0 - frac) / static_cast<double>(rows.size()));
    const bool summable = s.schedule.square_summable();
    const std::string head = "converged fraction " + short_num(frac) + " (se " + short_num(se) + ", beta " +
                             short_num(s.schedule.beta) + ", rho " + short_num(s.classifier.rho) + ", eps " +
                             short_num(s.classifier.eps) + ")";
    if (summable) {
        const double lo = e.number("converged_at_least");
        ctx.out.clauses.push_back(clause("convergence[square-summable radii]", frac >= lo, head + " >= " + short_num(lo)));
    } else {
        const double hi = e.number("converged_at_most");
        ctx.out.clauses.push_back(clause("convergence[divergent radii]", frac <= hi, head + " <= " + short_num(hi)));
    }
    ctx.out.artifacts.push_back(write_table(ctx.opts, ctx.name, replica_table(rows)));
    ctx.out.artifacts.push_back(write_path(ctx.opts, ctx.name, make_process_path(s, split_seed(ctx.seed, 0))));
}

void run_counterexample(Context& ctx) {
    const double rate = ctx.v.positive("rate");
    const double horizon = ctx.v.positive("horizon");
    const int replicas = ctx.v.count("replicas", 1, 10000000);
    const Manifold circle = Manifold::circle();
    const ClassifierConfig cl = parse_classifier(ctx.v.sub("classifier"), circle);
    const ConnectionRule eta(RuleKind::Projection, circle);
    const auto names = ctx.v.texts("functions");
    std::vector<CotangentField> dfs;
    for (const auto& n : names) dfs.push_back(CotangentField::differential(test_function(n, 2)));

    std::vector<ReplicaRow> rows(static_cast<std::size_t>(replicas));
    std::vector<double> qv_max(rows.size()), nf_max(rows.size());
    std::vector<int> tail_events(rows.size());
    parallel_for(rows.size(), ctx.opts.threads, [&](std::size_t i) {
        const DeltaPath p = antipodal_poisson_circle(rate, horizon, split_seed(ctx.seed, i));
        const Partition part = partition_for(p, horizon);
        const auto qv = riemannian_qv(p, part, eta);
        qv_max[i] = qv.total.max_abs();
        rows[i].qv_total = qv.total.back();
        for (std::size_t j = 0; j < dfs.size(); ++j) {
            const TimeSeries n = ito_integral_delta(dfs[j], p, eta, part);
            nf_max[i] = std::max(nf_max[i], n.max_abs());
            if (j == 0) rows[i].nf_terminal = n.back();
        }
        rows[i].converged = classify_convergence(p, cl.rho, cl.eps) == Convergence::Converged;
        for (double t : p.jump_times()) tail_events[i] += t >= (1.0 - cl.rho) * horizon;
    });

    double worst_qv = 0.0, worst_nf = 0.0;
    int eligible = 0, oscillating = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        worst_qv = std::max(worst_qv, qv_max[i]);
        worst_nf = std::max(worst_nf, nf_max[i]);
        if (tail_events[i] >= 2) {
            ++eligible;
            oscillating += !rows[i].converged;
        }
    }
    ctx.out.clauses.push_back(clause("counterexample[Riemannian QV identically 0]", worst_qv == 0.0,
                                     "max |[X,X]_t| = " + short_num(worst_qv) + " over " + std::to_string(replicas) + " paths"));
    ctx.out.clauses.push_back(clause("counterexample[N^f identically 0]", worst_nf == 0.0,
                                     "max |N^f_t| = " + short_num(worst_nf) + " over " + std::to_string(names.size()) +
                                         " functions"));
    ctx.out.clauses.push_back(clause("counterexample[oscillating with >= 2 tail events]", oscillating == eligible,
                                     std::to_string(oscillating) + " of " + std::to_string(eligible) +
                                         " eligible paths classified oscillating"));
    ctx.out.artifacts.push_back(write_table(ctx.opts, ctx.name, replica_table(rows)));
    ctx.out.artifacts.push_back(write_path(ctx.opts, ctx.name, antipodal_poisson_circle(rate, horizon, split_seed(ctx.seed, 0))));
}

void run_stable_tail(Context& ctx) {
    const double eps = ctx.v.positive("epsilon");
    const int n = ctx.v.count("samples", 10, 100000000);
    const json& cases = ctx.v.raw("cases");
    const double critical = 1.63 / std::sqrt(static_cast<double>(n));
    Table t{{"m", "alpha", "epsilon", "n", "ks_statistic", "critical_value"}, {}};
    for (std::size_t c = 0; c < cases.size(); ++c) {
        const View cv(cases[c], "cases[" + std::to_string(c) + "]");
        StableProcessConfig sc;
        sc.m = cv.count("m", 1, 64);
        sc.alpha = parse_alpha(cv);
        sc.epsilon = eps;
        // about n jumps per path; further paths top up if a path falls short
        sc.horizon = static_cast<double>(n) / stable_jump_intensity(sc.m, sc.alpha, eps);
        std::vector<double> mags;
        for (std::uint64_t k = 0; mags.size() < static_cast<std::size_t>(n); ++k) {
            const DeltaPath p = simulate_stable(sc, split_seed(split_seed(ctx.seed, c), k));
            for (const PathEvent& e : p.events()) {
                if (e.mark && mags.size() < static_cast<std::size_t>(n)) mags.push_back(e.mark->norm());
            }
        }
        const double alpha = sc.alpha;
        const double d = ks_statistic(mags, [&](double r) { return stable_jump_magnitude_cdf(r, alpha, eps); });
        t.rows.push_back({static_cast<long long>(sc.m), sc.alpha, eps, static_cast<long long>(n), d, critical});
        ctx.out.clauses.push_back(clause("stable tail KS[m=" + std::to_string(sc.m) + ", alpha=" + short_num(sc.alpha) + "]",
                                         d <= critical,
                                         "D = " + short_num(d) + " vs 1% critical value " + short_num(critical)));
    }
    ctx.out.artifacts.push_back(write_table(ctx.opts, ctx.name, t));
}

json report_skeleton(double alpha, int m, const Vector& point) {
    return json{{"alpha", alpha},        {"m", m},          {"point", std::vector<double>(point.data(), point.data() + m)},
                {"operator_value", nullptr}, {"residual", nullptr}, {"phi", nullptr},
                {"lhs", nullptr},        {"rhs", nullptr},  {"se_lhs", nullptr},
                {"se_rhs", nullptr},     {"compatible", nullptr}};
}

void run_fractional_residual(Context& ctx) {
    const int m = ctx.v.count("m", 1, 8);
    const double alpha = parse_alpha(ctx.v);
    const std::string map_name = ctx.v.text("map");
    const MapIntoManifold h = test_map(map_name, m);
    const Vector x = parse_point(ctx.v, m);
    const FractionalConfig cfg = parse_fractional(ctx.v, m, alpha);
    const double accuracy = ctx.v.positive("accuracy");

    const LagrangeResidual lr = lagrange_residual(h, x, cfg);
    const PhiValue phi = jump_energy_phi(h, x, cfg);
    json rep = report_skeleton(alpha, m, x);
    rep["operator_value"] = std::vector<double>(lr.operator_value.data(), lr.operator_value.data() + lr.operator_value.size());
    rep["residual"] = lr.residual;
    rep["phi"] = phi.value;

    const double scale = std::max(1.0, lr.operator_norm);
    ctx.out.clauses.push_back(clause("fractional quadrature certified", lr.error_estimate <= accuracy * scale,
                                     "order-doubling error " + short_num(lr.error_estimate) + " (operator norm " +
                                         short_num(lr.operator_norm) + ", residual " + short_num(lr.residual) + ")"));
    if (map_name == "constant") {
        ctx.out.clauses.push_back(clause("constant map annihilated", lr.operator_norm <= 1e-8,
                                         "|operator| = " + short_num(lr.operator_norm)));
    }
    if (map_name == "gaussian" && x.norm() == 0.0) {
        const double oracle = gaussian_fourier_value(m, alpha);
        const double rel = std::abs(lr.operator_value[0] - oracle) / oracle;
        ctx.out.clauses.push_back(clause("Gaussian vs Fourier side", rel <= 1e-4,
                                         "kernel " + short_num(lr.operator_value[0]) + ", Fourier " + short_num(oracle) +
                                             ", relative difference " + short_num(rel)));
    }
    ctx.out.artifacts.push_back(write_json(ctx.opts, ctx.name + ".json", rep));
}

void run_levy_system(Context& ctx) {
    const int m = ctx.v.count("m", 1, 8);
    const double alpha = parse_alpha(ctx.v);
    const MapIntoManifold h = test_map(ctx.v.text("map"), m);
    const Vector z = parse_point(ctx.v, m);
    const FractionalConfig cfg = parse_fractional(ctx.v, m, alpha);
    const double horizon = ctx.v.positive("horizon");
    const int replicas = ctx.v.count("replicas", 2, 100000000);
    const double eps = ctx.v.positive("epsilon");

    const LevySystemReport r = levy_system_check(h, z, cfg, horizon, replicas, ctx.seed, eps, ctx.opts.threads);
    const LagrangeResidual lr = lagrange_residual(h, z, cfg);
    json rep = report_skeleton(alpha, m, z);
    rep["operator_value"] = std::vector<double>(lr.operator_value.data(), lr.operator_value.data() + lr.operator_value.size());
    rep["residual"] = lr.residual;
    rep["phi"] = jump_energy_phi(h, z, cfg).value;
    rep["lhs"] = r.lhs;
    rep["rhs"] = r.rhs;
    rep["se_lhs"] = r.se_lhs;
    rep["se_rhs"] = r.se_rhs;
    rep["compatible"] = r.compatible;
    ctx.out.clauses.push_back(clause("Levy system identity", r.compatible,
                                     "jumps " + short_num(r.lhs) + " +- " + short_num(r.se_lhs) + ", occupation " +
                                         short_num(r.rhs) + " +- " + short_num(r.se_rhs) + ", bias bound " +
                                         short_num(r.bias_bound) + " (eps " + short_num(eps) + ", n " +
                                         std::to_string(replicas) + ")"));
    ctx.out.artifacts.push_back(write_json(ctx.opts, ctx.name + ".json", rep));
}

}  // namespace

bool ExperimentResult::all_pass() const {
    for (const Clause& c : clauses) {
        if (!c.pass) return false;
    }
    return !clauses.empty();
}

std::vector<std::string> experiment_kinds() { return kKinds; }

json default_config(const std::string& kind) {
    json j = kind_defaults(kind);
    j["name"] = kind;
    j["kind"] = kind;
    j["seed"] = 1;
    return j;
}

json resolve_config(const json& raw, std::optional<std::uint64_t> seed_override) {
    if (!raw.is_object()) invalid("config must be a JSON object");
    const View top(raw);
    const std::string kind = top.text("kind");
    json cfg = kind_defaults(kind);
    cfg["name"] = nullptr;
    cfg["kind"] = kind;
    cfg["seed"] = nullptr;
    merge_into(cfg, raw, "");

    const std::string name = View(cfg).text("name");
    if (name.empty() || name.find_first_not_of("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789._-") !=
                            std::string::npos) {
        invalid("key 'name' must be a non-empty file stem of [A-Za-z0-9._-]");
    }
    if (seed_override) {
        cfg["seed"] = *seed_override;
    } else {
        const json& s = View(cfg).raw("seed");
        if (s.is_null()) invalid("missing required key 'seed'");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
            invalid("key 'seed' must be a non-negative integer");
        }
    }
    try {
        return validate_kind(std::move(cfg));
    } catch (const ValidationError&) {
        throw;
    } catch (const DomainError& e) {
        throw ValidationError(e.what());
    }
}

ExperimentResult run_experiment(const json& resolved, const RunOptions& opts) {
    const View v(resolved);
    ExperimentResult out;
    out.name = v.text("name");
    out.kind = v.text("kind");
    std::filesystem::create_directories(opts.out_dir);
    out.artifacts.push_back(write_json(opts, out.name + ".config.json", resolved));

    Context ctx{resolved, v, out.name, resolved.at("seed").get<std::uint64_t>(), opts, out};
    const std::map<std::string, void (*)(Context&)> table = {
        {"axioms", run_axioms},
        {"ito-identity", run_ito_identity},
        {"martingale-test", run_martingale_test},
        {"convergence", run_convergence},
        {"counterexample", run_counterexample},
        {"stable-tail", run_stable_tail},
        {"fractional-residual", run_fractional_residual},
        {"levy-system", run_levy_system},
    };
    auto it = table.find(out.kind);
    if (it == table.end()) invalid("unknown kind '" + out.kind + "'");
    it->second(ctx);
    return out;
}

void print_clauses(std::ostream& os, const ExperimentResult& r) {
    for (const Clause& c : r.clauses) {
        os << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    }
}

}  // namespace jumpgeo
