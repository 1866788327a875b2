#include "seqclt/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "seqclt/base_process.hpp"
#include "seqclt/correlation.hpp"
#include "seqclt/coupling.hpp"
#include "seqclt/covariance.hpp"
#include "seqclt/cylinders.hpp"
#include "seqclt/dc_estimate.hpp"
#include "seqclt/decomposition.hpp"
#include "seqclt/errors.hpp"
#include "seqclt/memory_loss.hpp"
#include "seqclt/observable.hpp"
#include "seqclt/orbit.hpp"
#include "seqclt/quenched.hpp"
#include "seqclt/rng.hpp"
#include "seqclt/stein.hpp"
#include "seqclt/transfer.hpp"

namespace seqclt {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

const std::vector<std::string>& experiment_kinds() {
    static const std::vector<std::string> kinds{"memory_loss", "correlation", "stein_check", "ei_identity",
                                                "clt_rate",    "quenched_rate", "shell_check"};
    return kinds;
}

std::string config_hash(const json& config) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config.dump())));
    return buf;
}

namespace {

// ---------------------------------------------------------------------------
// Schema reading with path-qualified error collection.

class Schema {
public:
    explicit Schema(const json& root) : root_(root) {}

    const json* node(const std::string& path) const {
        const json* cur = &root_;
        std::size_t start = 0;
        while (start <= path.size()) {
            const std::size_t dot = path.find('.', start);
            const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
            if (!cur->is_object() || !cur->contains(key)) {
                return nullptr;
            }
            cur = &(*cur)[key];
            if (dot == std::string::npos) {
                break;
            }
            start = dot + 1;
        }
        return cur;
    }

    bool has(const std::string& path) const { return node(path) != nullptr; }

    double number(const std::string& path, std::optional<double> fallback = std::nullopt) {
        const json* n = node(path);
        if (n == nullptr) {
            if (!fallback) {
                missing(path);
                return 0.0;
            }
            return *fallback;
        }
        if (!n->is_number()) {
            wrong(path, "a number");
            return 0.0;
        }
        return n->get<double>();
    }

    std::size_t count(const std::string& path, std::optional<std::size_t> fallback = std::nullopt,
                      std::size_t min_value = 0) {
        const json* n = node(path);
        if (n == nullptr) {
            if (!fallback) {
                missing(path);
                return min_value;
            }
            return *fallback;
        }
        if (!n->is_number_integer() || n->get<long long>() < static_cast<long long>(min_value)) {
            wrong(path, "an integer >= " + std::to_string(min_value));
            return min_value;
        }
        return n->get<std::size_t>();
    }

    std::uint64_t seed(const std::string& path) {
        const json* n = node(path);
        if (n == nullptr) {
            missing(path);
            return 0;
        }
        if (!n->is_number_unsigned() && !(n->is_number_integer() && n->get<long long>() >= 0)) {
            wrong(path, "a nonnegative integer");
            return 0;
        }
        return n->get<std::uint64_t>();
    }

    bool boolean(const std::string& path, bool fallback) {
        const json* n = node(path);
        if (n == nullptr) {
            return fallback;
        }
        if (!n->is_boolean()) {
            wrong(path, "a boolean");
            return fallback;
        }
        return n->get<bool>();
    }

    std::string text(const std::string& path, std::optional<std::string> fallback = std::nullopt) {
        const json* n = node(path);
        if (n == nullptr) {
            if (!fallback) {
                missing(path);
                return {};
            }
            return *fallback;
        }
        if (!n->is_string()) {
            wrong(path, "a string");
            return {};
        }
        return n->get<std::string>();
    }

    std::vector<double> numbers(const std::string& path, std::optional<std::vector<double>> fallback = std::nullopt) {
        const json* n = node(path);
        if (n == nullptr) {
            if (!fallback) {
                missing(path);
                return {};
            }
            return *fallback;
        }
        std::vector<double> out;
        if (!n->is_array()) {
            wrong(path, "an array of numbers");
            return out;
        }
        for (std::size_t i = 0; i < n->size(); ++i) {
            if (!(*n)[i].is_number()) {
                wrong(path + "[" + std::to_string(i) + "]", "a number");
                continue;
            }
            out.push_back((*n)[i].get<double>());
        }
        return out;
    }

    std::vector<std::size_t> counts(const std::string& path, std::optional<std::vector<std::size_t>> fallback = std::nullopt) {
        const json* n = node(path);
        if (n == nullptr) {
            if (!fallback) {
                missing(path);
                return {};
            }
            return *fallback;
        }
        std::vector<std::size_t> out;
        if (!n->is_array()) {
            wrong(path, "an array of positive integers");
            return out;
        }
        for (std::size_t i = 0; i < n->size(); ++i) {
            if (!(*n)[i].is_number_integer() || (*n)[i].get<long long>() < 1) {
                wrong(path + "[" + std::to_string(i) + "]", "a positive integer");
                continue;
            }
            out.push_back((*n)[i].get<std::size_t>());
        }
        return out;
    }

    std::vector<std::string> texts(const std::string& path, std::optional<std::vector<std::string>> fallback = std::nullopt) {
        const json* n = node(path);
        if (n == nullptr) {
            if (!fallback) {
                missing(path);
                return {};
            }
            return *fallback;
        }
        std::vector<std::string> out;
        if (!n->is_array()) {
            wrong(path, "an array of strings");
            return out;
        }
        for (std::size_t i = 0; i < n->size(); ++i) {
            if (!(*n)[i].is_string()) {
                wrong(path + "[" + std::to_string(i) + "]", "a string");
                continue;
            }
            out.push_back((*n)[i].get<std::string>());
        }
        return out;
    }

    void error(const std::string& path, const std::string& message) { errors_.push_back(path + ": " + message); }
    void missing(const std::string& path) { error(path, "required field is missing"); }
    void wrong(const std::string& path, const std::string& expected) { error(path, "expected " + expected); }

    void finish() const {
        if (errors_.empty()) {
            return;
        }
        std::string msg = "invalid config:";
        for (const auto& e : errors_) {
            msg += "\n  " + e;
        }
        throw ConfigError(msg);
    }

    bool ok() const { return errors_.empty(); }

private:
    const json& root_;
    std::vector<std::string> errors_;
};

Atlas default_atlas() {
    return Atlas{{"doubling", make_affine(2)},
                 {"tripling", make_affine(3)},
                 {"c0", make_perturbed(0.0)},
                 {"c0.05", make_perturbed(0.05)},
                 {"c0.1", make_perturbed(0.1)}};
}

Atlas read_atlas(Schema& schema) {
    Atlas atlas = default_atlas();
    const json* maps = schema.node("maps");
    if (maps == nullptr) {
        return atlas;
    }
    if (!maps->is_object()) {
        schema.wrong("maps", "an object of label -> map spec");
        return atlas;
    }
    for (const auto& [label, spec] : maps->items()) {
        const std::string path = "maps." + label;
        const std::string type = schema.text(path + ".type");
        try {
            if (type == "affine") {
                const double m = schema.number(path + ".m");
                if (m != std::floor(m) || m < 2) {
                    schema.wrong(path + ".m", "an integer slope >= 2");
                    continue;
                }
                atlas[label] = make_affine(static_cast<int>(m), label);
            } else if (type == "perturbed") {
                atlas[label] = make_perturbed(schema.number(path + ".c"), label);
            } else if (type == "circle_diffeo") {
                atlas[label] = make_circle_diffeo(schema.number(path + ".c"), label);
            } else if (!type.empty()) {
                schema.error(path + ".type", "unknown map type '" + type + "'");
            }
        } catch (const Error& e) {
            schema.error(path, e.what());
        }
        (void)spec;
    }
    return atlas;
}

std::optional<SequentialSchedule> read_schedule(Schema& schema, const Atlas& atlas) {
    if (!schema.has("schedule")) {
        schema.missing("schedule");
        return std::nullopt;
    }
    const std::string type = schema.text("schedule.type", "cyclic");
    const auto labels = schema.texts("schedule.labels");
    if (labels.empty()) {
        schema.error("schedule.labels", "must list at least one map label");
        return std::nullopt;
    }
    for (const auto& l : labels) {
        if (!atlas.contains(l)) {
            schema.error("schedule.labels", "unresolved map label '" + l + "'");
        }
    }
    if (!schema.ok()) {
        return std::nullopt;
    }
    double a = std::numeric_limits<double>::infinity();
    for (const auto& l : labels) {
        a = std::min(a, atlas.at(l)->min_slope());
    }
    const auto p = static_cast<int>(schema.count("schedule.p", 1, 1));
    const double Lambda = schema.number("schedule.Lambda", std::pow(a, p));
    const double Kprime = schema.number("schedule.Kprime", 1.0);
    ScheduleRule rule;
    if (type == "cyclic") {
        rule = CyclicRule{labels};
    } else if (type == "explicit") {
        rule = ExplicitRule{labels};
    } else {
        schema.error("schedule.type", "expected 'cyclic' or 'explicit'");
        return std::nullopt;
    }
    try {
        return SequentialSchedule(rule, atlas, p, Lambda, Kprime);
    } catch (const Error& e) {
        schema.error("schedule", e.what());
        return std::nullopt;
    }
}

std::optional<BaseProcess> read_base(Schema& schema, const Atlas& atlas) {
    if (!schema.has("base")) {
        schema.missing("base");
        return std::nullopt;
    }
    const std::string type = schema.text("base.type");
    const auto alphabet = schema.texts("base.alphabet");
    for (const auto& l : alphabet) {
        if (!atlas.contains(l)) {
            schema.error("base.alphabet", "unresolved map label '" + l + "'");
        }
    }
    const auto n = static_cast<Eigen::Index>(alphabet.size());
    try {
        if (type == "iid") {
            const auto w = schema.numbers("base.weights");
            if (!schema.ok()) {
                return std::nullopt;
            }
            return BaseProcess(alphabet, IidBase{w});
        }
        if (type == "markov") {
            const json* rows = schema.node("base.transition");
            const auto init = schema.numbers("base.initial");
            if (rows == nullptr || !rows->is_array() || static_cast<Eigen::Index>(rows->size()) != n) {
                schema.wrong("base.transition", "a square array matching the alphabet");
                return std::nullopt;
            }
            Eigen::MatrixXd P(n, n);
            for (Eigen::Index r = 0; r < n; ++r) {
                const auto row = schema.numbers("base.transition." + std::to_string(r), std::vector<double>{});
                const json& jr = (*rows)[static_cast<std::size_t>(r)];
                if (!jr.is_array() || static_cast<Eigen::Index>(jr.size()) != n) {
                    schema.wrong("base.transition[" + std::to_string(r) + "]", "a row of length " + std::to_string(n));
                    return std::nullopt;
                }
                (void)row;
                for (Eigen::Index c = 0; c < n; ++c) {
                    P(r, c) = jr[static_cast<std::size_t>(c)].get<double>();
                }
            }
            if (static_cast<Eigen::Index>(init.size()) != n || !schema.ok()) {
                schema.wrong("base.initial", "a distribution matching the alphabet");
                return std::nullopt;
            }
            return BaseProcess(alphabet, MarkovBase{P, Eigen::Map<const Eigen::VectorXd>(init.data(), n)});
        }
        if (!type.empty()) {
            schema.error("base.type", "expected 'iid' or 'markov'");
        }
    } catch (const Error& e) {
        schema.error("base", e.what());
    }
    return std::nullopt;
}

std::optional<VectorObservable> read_observable(Schema& schema, double alpha) {
    const auto comps = schema.texts("observable");
    if (comps.empty()) {
        if (schema.has("observable")) {
            schema.error("observable", "needs at least one component");
        }
        return std::nullopt;
    }
    std::vector<ObservableComponent> parsed;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        try {
            parsed.push_back(parse_component(comps[i]));
        } catch (const Error& e) {
            schema.error("observable[" + std::to_string(i) + "]", e.what());
        }
    }
    if (!schema.ok()) {
        return std::nullopt;
    }
    return VectorObservable(std::move(parsed), alpha);
}

std::optional<GridDensity> read_density(Schema& schema, std::size_t G, double alpha) {
    const json* n = schema.node("density");
    if (n == nullptr || (n->is_string() && n->get<std::string>() == "uniform")) {
        return GridDensity::uniform(G, alpha);
    }
    if (n->is_object() && n->contains("type") && (*n)["type"] == "exp_cos") {
        const double amp = schema.number("density.amplitude", 1.0);
        return GridDensity::normalized([amp](double x) { return std::exp(amp * std::cos(2.0 * std::numbers::pi * x)); },
                                       G, alpha);
    }
    schema.wrong("density", "\"uniform\" or {\"type\": \"exp_cos\", \"amplitude\": a}");
    return std::nullopt;
}

std::optional<ConvexSet> read_set(Schema& schema, const std::string& path, std::size_t d) {
    const std::string type = schema.text(path + ".type");
    auto vec = [&](const std::string& key) {
        const auto v = schema.numbers(path + "." + key);
        if (v.size() != d) {
            schema.wrong(path + "." + key, "a vector of length " + std::to_string(d));
        }
        return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())));
    };
    try {
        if (type == "halfspace") {
            Eigen::VectorXd a = vec("a");
            const double b = schema.number(path + ".b");
            if (!schema.ok()) {
                return std::nullopt;
            }
            return ConvexSet::half_space(a, b);
        }
        if (type == "ball") {
            Eigen::VectorXd c = vec("c");
            const double r = schema.number(path + ".r");
            if (!schema.ok()) {
                return std::nullopt;
            }
            return ConvexSet::ball(c, r);
        }
        if (type == "box") {
            Eigen::VectorXd lo = vec("lo");
            Eigen::VectorXd hi = vec("hi");
            if (!schema.ok()) {
                return std::nullopt;
            }
            return ConvexSet::box(lo, hi);
        }
        schema.error(path + ".type", "expected 'halfspace', 'ball' or 'box'");
    } catch (const Error& e) {
        schema.error(path, e.what());
    }
    return std::nullopt;
}

FamilySpec read_family(Schema& schema, std::uint64_t seed) {
    FamilySpec f;
    f.halfspaces = schema.count("family.halfspaces", f.halfspaces);
    f.directions = schema.count("family.directions", f.directions, 1);
    f.quantiles = schema.numbers("family.quantiles", f.quantiles);
    f.balls = schema.count("family.balls", f.balls);
    f.boxes = schema.count("family.boxes", f.boxes);
    f.seed = schema.has("family.seed") ? schema.seed("family.seed") : derive_seed(seed, 0xfa);
    for (double q : f.quantiles) {
        if (!(q > 0.0 && q < 1.0)) {
            schema.error("family.quantiles", "quantile levels must lie in (0,1)");
        }
    }
    if (f.halfspaces + f.balls + f.boxes == 0) {
        schema.error("family", "family must contain at least one set");
    }
    return f;
}

// ---------------------------------------------------------------------------
// Output helpers.

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    return out + "\"";
}

class Csv {
public:
    Csv(const fs::path& path, const std::vector<std::string>& header) : out_(path, std::ios::binary) {
        if (!out_) {
            throw ConfigError("cannot write " + path.string());
        }
        row(header);
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            out_ << (i ? "," : "") << csv_field(cells[i]);
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }
std::string fmt_bool(bool b) { return b ? "true" : "false"; }

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            row.push_back(m(r, c));
        }
        rows.push_back(row);
    }
    return rows;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Context {
    json config;
    std::string kind;
    std::uint64_t seed = 0;
    std::size_t G = 4096;
    double alpha = 1.0;
    unsigned threads = 1;
    fs::path out_dir;
    RunResult* result = nullptr;
    json results = json::object();

    fs::path file(const std::string& name) {
        result->files.push_back(name);
        return out_dir / name;
    }
    void check(const std::string& name, bool pass, const std::string& detail) {
        result->checks.push_back({name, pass, detail});
    }
};

std::string describe_fit(const RateFit& f) {
    std::ostringstream os;
    os << "slope " << format_double(f.slope) << " CI [" << format_double(f.ci_lo) << ", " << format_double(f.ci_hi)
       << "]";
    return os.str();
}

json fit_json(const RateFit& f) {
    return json{{"slope", f.slope},     {"intercept", f.intercept}, {"slope_se", f.slope_se},
                {"ci_lo", f.ci_lo},     {"ci_hi", f.ci_hi},         {"chi2", f.chi2},
                {"birge", f.birge},     {"weighted", f.weighted},   {"points", f.points}};
}

json growth_json(const GrowthReport& g) {
    return json{{"C0_fit", finite_or_null(g.C0_fit)},
                {"C0prime_fit", finite_or_null(g.C0prime_fit)},
                {"K0_fit", g.K0_fit},
                {"K0_grid", g.kK0Grid},
                {"C0_by_K0", {finite_or_null(g.C0_by_K0[0]), finite_or_null(g.C0_by_K0[1]), finite_or_null(g.C0_by_K0[2])}},
                {"skipped", g.skipped},
                {"failed", g.failed},
                {"pass", g.pass()}};
}

// ---------------------------------------------------------------------------
// Runners.

void run_memory_loss(Context& ctx, Schema& schema, const SequentialSchedule& schedule) {
    const std::size_t n_max = schema.count("params.n_max");
    const std::string u_text = schema.text("params.u", "cos:1");
    MemoryLossOptions opts;
    opts.start = schema.count("params.start", 1, 1);
    opts.alpha = ctx.alpha;
    opts.drift_correction = schema.boolean("params.drift_correction", true);
    const std::size_t ue_horizon = schema.count("params.ue_horizon", 8, 1);
    schema.finish();

    const ObservableComponent u = parse_component(u_text);
    const TransferChain chain(schedule, ctx.G);
    GridFunction ug = GridFunction::from([&](double x) { return u(x); }, ctx.G, ctx.alpha);
    const UeReport ue = verify_ue(schedule, ue_horizon);
    const CouplingConstants cc = coupling_bound(ue.K(), schedule.Lambda(), ctx.alpha, schedule.Kprime(), schedule.p());
    opts.coupling = cc;
    const DecayCurve curve = memory_loss_decay(chain, ug, n_max, opts);

    Csv csv(ctx.file("decay.csv"), {"n", "sup", "seminorm", "norm", "bound"});
    for (const auto& p : curve.points) {
        csv.row({fmt(p.n), fmt(p.sup), fmt(p.seminorm), fmt(p.norm), fmt(p.bound)});
    }
    ctx.results["ue"] = {{"p", ue.p}, {"Lambda", ue.Lambda}, {"Kprime", ue.Kprime}, {"a", ue.a}, {"B", ue.B},
                         {"C_star", ue.C_star}, {"mesh_per_branch", ue.mesh_per_branch}, {"ok", ue.ok()},
                         {"violations", ue.violations.size()}};
    ctx.results["coupling"] = {{"R", cc.R}, {"xi", cc.xi}, {"p_tilde", cc.p_tilde}, {"q", cc.q},
                               {"log_q", cc.log_q}, {"C_sharp", cc.C_sharp}};
    ctx.results["q_emp"] = curve.q_emp;
    ctx.results["r_squared"] = curve.r_squared;
    ctx.results["fit_points"] = curve.fit_points;
    ctx.results["intervals"] = curve.intervals;

    ctx.check("ue", ue.ok(), ue.ok() ? "UE checks hold" : std::to_string(ue.violations.size()) + " violations");
    if (curve.fit_points >= 2) {
        ctx.check("q_emp<=q", curve.q_emp <= cc.q,
                  "q_emp " + format_double(curve.q_emp) + " vs q " + format_double(cc.q));
    }
    bool within = true;
    for (const auto& p : curve.points) {
        within = within && p.norm <= 1.1 * p.bound + 1e-12;
    }
    ctx.check("decay_certificate", within, "norm <= 1.1 * C_# q^{n/p~} |u|_alpha");
}

void run_correlation(Context& ctx, Schema& schema, const SequentialSchedule& schedule, const GridDensity& mu) {
    const std::size_t n = schema.count("params.n", 0);
    const std::size_t m_max = schema.count("params.m_max", std::nullopt, 1);
    const auto psi1 = parse_component(schema.text("params.psi1", "cos:1"));
    const auto psi2 = parse_component(schema.text("params.psi2", "cos:1"));
    const std::size_t steps = schema.count("params.max_orbit_steps", 16);
    const double tol = schema.number("params.tol", 1e-5);
    schema.finish();

    const TransferChain chain(schedule, ctx.G);
    Csv csv(ctx.file("correlation.csv"), {"m", "transfer", "orbit", "orbit_available", "difference"});
    std::vector<double> ms, vals;
    double worst = 0.0;
    for (std::size_t m = 0; m <= m_max; ++m) {
        const auto r = correlation2(chain, [&](double x) { return psi1(x); }, [&](double x) { return psi2(x); }, n, m,
                                    mu, steps);
        csv.row({fmt(m), fmt(r.transfer), r.orbit_available ? fmt(r.orbit) : "", fmt_bool(r.orbit_available),
                 r.orbit_available ? fmt(r.difference()) : ""});
        if (r.orbit_available) {
            worst = std::max(worst, std::abs(r.difference()));
        }
        if (m >= 1) {
            ms.push_back(static_cast<double>(m));
            vals.push_back(std::abs(r.transfer));
        }
    }
    const LogLinearFit fit = fit_log_linear(ms, vals, 1e-13);
    ctx.results["q_emp"] = fit.points >= 2 ? json(std::exp(fit.slope)) : json(nullptr);
    ctx.results["fit_points"] = fit.points;
    ctx.results["max_method_difference"] = worst;
    ctx.check("methods_agree", worst <= tol, "max |orbit - transfer| " + format_double(worst));
    if (fit.points >= 2) {
        ctx.check("q_emp<1", std::exp(fit.slope) < 1.0, "q_emp " + format_double(std::exp(fit.slope)));
    }
}

void run_stein_check(Context& ctx, Schema& schema) {
    const std::size_t d = schema.count("params.d", std::nullopt, 1);
    const auto eps_list = schema.numbers("params.eps", std::vector<double>{0.1, 0.3});
    const std::size_t points = schema.count("params.points", 20, 1);
    const double tol = schema.number("params.tol", 1e-3);
    const double linear_tol = schema.number("params.linear_tol", 1e-6);
    std::vector<ConvexSet> sets;
    if (const json* js = schema.node("params.sets"); js != nullptr) {
        if (!js->is_array()) {
            schema.wrong("params.sets", "an array of set specs");
        } else {
            for (std::size_t i = 0; i < js->size(); ++i) {
                const std::string p = "params.sets." + std::to_string(i);
                if (auto s = read_set(schema, p, d)) {
                    sets.push_back(*s);
                }
            }
        }
    } else if (d > 0) {
        Eigen::VectorXd e1 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
        e1(0) = 1.0;
        sets.push_back(ConvexSet::ball(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d)), 1.0));
        sets.push_back(ConvexSet::half_space(e1, 0.3));
        if (d <= 2) {
            sets.push_back(ConvexSet::box(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d), -1.0),
                                          Eigen::VectorXd::Constant(static_cast<Eigen::Index>(d), 0.5)));
        }
    }
    schema.finish();

    const SteinQuadrature quad = SteinQuadrature::defaults(d);
    std::vector<Eigen::VectorXd> ws;
    for (std::size_t k = 0; k < points; ++k) {
        Rng rng(derive_seed(ctx.seed, k));
        Eigen::VectorXd w(static_cast<Eigen::Index>(d));
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            w(i) = rng.normal();
        }
        ws.push_back(w);
    }
    Csv csv(ctx.file("stein.csv"), {"set", "eps", "point", "w_norm", "residual", "budget", "flagged"});
    double worst = 0.0;
    std::size_t flagged = 0;
    for (const auto& C : sets) {
        for (double eps : eps_list) {
            const SmoothedIndicatorFunction h(C, eps);
            for (std::size_t k = 0; k < ws.size(); ++k) {
                const ResidualReport r = stein_residual(h, ws[k], quad);
                worst = std::max(worst, r.residual);
                flagged += r.flagged ? 1 : 0;
                csv.row({C.kind() + " " + C.describe(), fmt(eps), fmt(k), fmt(ws[k].norm()), fmt(r.residual),
                         fmt(r.budget), fmt_bool(r.flagged)});
            }
        }
    }
    Eigen::VectorXd e1 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    e1(0) = 1.0;
    const LinearTestFunction lin(e1);
    double lin_worst = 0.0;
    Csv lcsv(ctx.file("linear.csv"), {"point", "w1", "f", "error"});
    for (std::size_t k = 0; k < ws.size(); ++k) {
        const double f = stein_solution(lin, ws[k], quad).value;
        const double err = std::abs(f + ws[k](0));
        lin_worst = std::max(lin_worst, err);
        lcsv.row({fmt(k), fmt(ws[k](0)), fmt(f), fmt(err)});
    }
    ctx.results["max_residual"] = worst;
    ctx.results["flagged"] = flagged;
    ctx.results["linear_max_error"] = lin_worst;
    ctx.results["gaussian_scheme"] = quad.gauss.scheme;
    ctx.results["tau_nodes"] = quad.tau.size();
    ctx.check("residual", worst <= tol, "max residual " + format_double(worst));
    ctx.check("linear_solution", lin_worst <= linear_tol, "max |f + w1| " + format_double(lin_worst));
}

void run_ei_identity(Context& ctx, Schema& schema, const SequentialSchedule& schedule, const VectorObservable& phi,
                     const GridDensity& mu) {
    const std::size_t N = schema.count("params.N", std::nullopt, 1);
    const std::size_t M = schema.count("params.M", std::nullopt, 2);
    const double eps = schema.number("params.eps", 0.3);
    const std::size_t gl_order = schema.count("params.gl_order", 8, 1);
    const std::size_t degree = schema.count("params.cheb_degree", 256, 8);
    const double fd_step = schema.number("params.fd_step", 1e-3);
    const std::size_t d = phi.dim();
    std::optional<ConvexSet> set;
    if (schema.has("params.set")) {
        set = read_set(schema, "params.set", d);
    } else {
        Eigen::VectorXd e1 = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
        e1(0) = 1.0;
        set = ConvexSet::half_space(e1, 0.5);
    }
    schema.finish();

    const TransferChain chain(schedule, ctx.G);
    const ObservableSequence seq = center_sequence(phi, chain, N, mu);
    std::vector<std::size_t> breaks(N + 1);
    for (std::size_t i = 0; i <= N; ++i) {
        breaks[i] = i;
    }
    const SegmentSums sums = simulate_segments(schedule, seq, mu, breaks, M, ctx.seed, {ctx.threads});
    const CovarianceReport cov = covariance_from_samples(sums.window_matrix(0, N), 0.0, 1.0, N);
    if (!cov.invertible) {
        throw SingularCovarianceError("Sigma_N is singular; W is undefined");
    }
    const PuncturedSums ps = PuncturedSums::from_segments(sums, cov.inv_sqrt);

    const auto h = std::make_shared<SmoothedIndicatorFunction>(*set, eps);
    const auto quad = std::make_shared<SteinQuadrature>(SteinQuadrature::defaults(d));
    std::function<double(const Eigen::VectorXd&)> f;
    if (d == 1) {
        double R = 0.0;
        for (std::size_t s = 0; s < ps.samples(); ++s) {
            double acc = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                acc += std::abs(ps.Y(s, i)(0));
            }
            R = std::max(R, acc);
        }
        R = R * (1.0 + 2.0 * fd_step) + 1.0;
        const auto cheb = std::make_shared<ChebyshevInterpolant>(
            [&](double x) { return stein_solution(*h, Eigen::VectorXd::Constant(1, x), *quad).value; }, -R, R, degree);
        ctx.results["chebyshev"] = {{"radius", R}, {"degree", degree}, {"tail", cheb->tail()}};
        f = [cheb](const Eigen::VectorXd& w) { return (*cheb)(w(0)); };
    } else {
        f = [h, quad](const Eigen::VectorXd& w) { return stein_solution(*h, w, *quad).value; };
    }
    const EiReport rep = ei_decomposition(FdDerivatives(f, fd_step), ps, ctx.threads, gl_order);

    Csv csv(ctx.file("ei.csv"), {"term", "value"});
    for (std::size_t i = 0; i < 7; ++i) {
        csv.row({"E" + std::to_string(i + 1), fmt(rep.E[i])});
    }
    for (const auto& [name, v] : std::vector<std::pair<std::string, double>>{
             {"total", rep.total}, {"lhs", rep.lhs}, {"residual", rep.residual}, {"mean_r", rep.mean_r},
             {"defect", rep.defect}, {"se", rep.se}, {"budget", rep.budget}, {"algebraic_gap", rep.algebraic_gap}}) {
        csv.row({name, fmt(v)});
    }
    ctx.results["E"] = rep.E;
    ctx.results["total"] = rep.total;
    ctx.results["lhs"] = rep.lhs;
    ctx.results["residual"] = rep.residual;
    ctx.results["se"] = rep.se;
    ctx.results["defect"] = rep.defect;
    ctx.results["budget"] = rep.budget;
    ctx.results["dominant_error"] = rep.dominant_error;
    ctx.results["set"] = set->kind() + " " + set->describe();
    ctx.results["eps"] = eps;
    ctx.check("identity", rep.pass,
              "|sum E - lhs| " + format_double(rep.residual) + " vs budget " + format_double(rep.budget) + " (" +
                  rep.dominant_error + ")");
}

RateOptions read_rate_options(Context& ctx, Schema& schema) {
    RateOptions o;
    if (schema.has("params.log2_N")) {
        const auto range = schema.counts("params.log2_N");
        if (range.size() != 2 || range[0] > range[1] || range[1] > 30) {
            schema.wrong("params.log2_N", "[lo, hi] with lo <= hi <= 30");
        } else {
            for (std::size_t k = range[0]; k <= range[1]; ++k) {
                o.Ns.push_back(std::size_t{1} << k);
            }
        }
    } else {
        o.Ns = schema.counts("params.Ns");
    }
    o.M = schema.count("params.M", std::nullopt, 2);
    o.seed = ctx.seed;
    o.family = read_family(schema, ctx.seed);
    o.G = ctx.G;
    o.threads = ctx.threads;
    return o;
}

void write_rate_rows(Csv& csv, const RateReport& rep, const std::string& tag) {
    for (const auto& p : rep.points) {
        std::vector<std::string> row;
        if (!tag.empty()) {
            row.push_back(tag);
        }
        for (const auto& cell : {fmt(p.N), fmt_bool(p.singular), fmt(p.dc), fmt(p.se), fmt(p.max_se),
                                 fmt(p.lambda_min), fmt(p.lambda_max)}) {
            row.push_back(cell);
        }
        row.push_back(p.argmax);
        csv.row(row);
    }
}

void write_covariance_rows(Csv& csv, const RateReport& rep, const std::string& tag) {
    for (const auto& p : rep.points) {
        for (Eigen::Index r = 0; r < p.Sigma.rows(); ++r) {
            for (Eigen::Index s = 0; s < p.Sigma.cols(); ++s) {
                std::vector<std::string> row;
                if (!tag.empty()) {
                    row.push_back(tag);
                }
                for (const auto& cell : {fmt(p.N), fmt(static_cast<std::size_t>(r)), fmt(static_cast<std::size_t>(s)),
                                         fmt(p.Sigma(r, s)), fmt(p.Sigma_se(r, s))}) {
                    row.push_back(cell);
                }
                csv.row(row);
            }
        }
    }
}

json rate_points_json(const RateReport& rep) {
    json pts = json::array();
    for (const auto& p : rep.points) {
        pts.push_back({{"N", p.N}, {"singular", p.singular}, {"dc", p.dc}, {"se", p.se}, {"max_se", p.max_se},
                       {"argmax", p.argmax}, {"lambda_min", p.lambda_min}, {"lambda_max", p.lambda_max},
                       {"Sigma", matrix_json(p.Sigma)}, {"Sigma_se", matrix_json(p.Sigma_se)}});
    }
    return pts;
}

void rate_checks(Context& ctx, const RateReport& rep, const std::vector<double>& window, double target,
                 const std::string& prefix, bool require_ci) {
    if (!rep.fit) {
        ctx.check(prefix + "slope", false, "fewer than 3 nonsingular N");
        return;
    }
    const RateFit& f = *rep.fit;
    ctx.check(prefix + "slope_window", f.slope >= window[0] && f.slope <= window[1],
              describe_fit(f) + " vs window [" + format_double(window[0]) + ", " + format_double(window[1]) + "]");
    if (require_ci) {
        ctx.check(prefix + "ci_covers_target", f.ci_covers(target),
                  describe_fit(f) + " vs " + format_double(target));
    }
}

void run_clt_rate(Context& ctx, Schema& schema, const SequentialSchedule& schedule, const VectorObservable& phi,
                  const GridDensity& mu) {
    RateOptions o = read_rate_options(ctx, schema);
    o.growth_grid = schema.count("params.growth_grid", 4);
    const auto window = schema.numbers("params.slope_window", std::vector<double>{-0.65, -0.35});
    const double target = schema.number("params.target_slope", -0.5);
    const double lin_tol = schema.number("params.linear_growth_tol", 0.2);
    if (window.size() != 2) {
        schema.wrong("params.slope_window", "[lo, hi]");
    }
    schema.finish();

    const RateReport rep = rate_experiment(schedule, phi, mu, o);
    Csv csv(ctx.file("rate.csv"), {"N", "singular", "dc", "se", "max_se", "lambda_min", "lambda_max", "argmax"});
    write_rate_rows(csv, rep, "");
    Csv ccsv(ctx.file("covariance.csv"), {"N", "r", "s", "sigma", "se"});
    write_covariance_rows(ccsv, rep, "");
    if (rep.growth) {
        Csv tcsv(ctx.file("triples.csv"),
                 {"delta1", "delta", "delta2", "branch", "skipped", "lambda_max", "lambda_min_sub", "required_C0", "pass"});
        for (const auto& t : rep.growth->triples) {
            tcsv.row({fmt(t.triple.delta1), fmt(t.triple.delta), fmt(t.triple.delta2), t.branch, fmt_bool(t.skipped),
                      fmt(t.lambda_max), fmt(t.lambda_min_sub), fmt(t.required_C0), fmt_bool(t.pass)});
        }
        ctx.results["growth"] = growth_json(*rep.growth);
        ctx.check("c1_c2", rep.growth->pass(), "C0_fit " + format_double(rep.growth->C0_fit) + " at K0 = 1");
    }
    ctx.results["points"] = rate_points_json(rep);
    if (rep.fit) {
        ctx.results["fit"] = fit_json(*rep.fit);
    }
    // Linear growth: Sigma_N / N has comparable trace across N.
    std::vector<double> per_step;
    for (const auto& p : rep.points) {
        if (!p.singular) {
            per_step.push_back(p.Sigma.trace() / static_cast<double>(p.N));
        }
    }
    if (!per_step.empty()) {
        const double ratio = per_step.back() / per_step.front();
        ctx.results["linear_growth_ratio"] = ratio;
        ctx.check("linear_growth", std::abs(ratio - 1.0) <= lin_tol,
                  "tr(Sigma_N)/N ratio largest/smallest N " + format_double(ratio));
    }
    rate_checks(ctx, rep, window, target, "", true);
    json rows = json::array();
    for (const auto& p : rep.points) {
        if (!p.singular) {
            rows.push_back({{"experiment", "clt_rate"}, {"N", p.N}, {"dc", p.dc}, {"se", p.se}});
        }
    }
    if (rep.fit) {
        rows.push_back({{"experiment", "clt_rate"}, {"slope", rep.fit->slope}, {"ci_lo", rep.fit->ci_lo},
                        {"ci_hi", rep.fit->ci_hi}});
    }
    ctx.results["summary_rows"] = rows;
}

void run_quenched_rate(Context& ctx, Schema& schema, const BaseProcess& base, const Atlas& atlas,
                       const VectorObservable& phi, const GridDensity& mu) {
    RateOptions o = read_rate_options(ctx, schema);
    std::vector<std::uint64_t> omega_seeds;
    if (const json* js = schema.node("params.omega_seeds"); js != nullptr && js->is_array() && !js->empty()) {
        for (std::size_t i = 0; i < js->size(); ++i) {
            if (!(*js)[i].is_number_integer() || (*js)[i].get<long long>() < 0) {
                schema.wrong("params.omega_seeds[" + std::to_string(i) + "]", "a nonnegative integer");
            } else {
                omega_seeds.push_back((*js)[i].get<std::uint64_t>());
            }
        }
    } else {
        schema.wrong("params.omega_seeds", "a nonempty array of seeds");
    }
    const auto window = schema.numbers("params.slope_window", std::vector<double>{-0.65, -0.35});
    const double target = schema.number("params.target_slope", -0.5);
    const double agree_se = schema.number("params.sigma_agreement_se", 5.0);
    if (window.size() != 2) {
        schema.wrong("params.slope_window", "[lo, hi]");
    }
    schema.finish();

    Csv csv(ctx.file("rate.csv"),
            {"omega_seed", "N", "singular", "dc", "se", "max_se", "lambda_min", "lambda_max", "argmax"});
    Csv ccsv(ctx.file("covariance.csv"), {"omega_seed", "N", "r", "s", "sigma", "se"});
    Csv ocsv(ctx.file("omega.csv"), {"omega_seed", "n", "label"});
    std::vector<RateReport> reports;
    json per_omega = json::array();
    json rows = json::array();
    for (std::size_t i = 0; i < omega_seeds.size(); ++i) {
        RateOptions oi = o;
        oi.seed = derive_seed(ctx.seed, i);
        const RateReport rep = quenched_experiment(base, atlas, phi, mu, omega_seeds[i], oi);
        const std::string tag = std::to_string(omega_seeds[i]);
        write_rate_rows(csv, rep, tag);
        write_covariance_rows(ccsv, rep, tag);
        for (std::size_t n = 0; n < rep.omega.size(); ++n) {
            ocsv.row({tag, fmt(n + 1), base.alphabet()[rep.omega[n]]});
        }
        json entry = {{"omega_seed", omega_seeds[i]}, {"mc_seed", oi.seed}, {"points", rate_points_json(rep)}};
        if (rep.fit) {
            entry["fit"] = fit_json(*rep.fit);
        }
        per_omega.push_back(entry);
        rate_checks(ctx, rep, window, target, "omega " + tag + " ", false);
        for (const auto& p : rep.points) {
            if (!p.singular) {
                rows.push_back({{"experiment", "quenched_rate/omega=" + tag}, {"N", p.N}, {"dc", p.dc}, {"se", p.se}});
            }
        }
        if (rep.fit) {
            rows.push_back({{"experiment", "quenched_rate/omega=" + tag}, {"slope", rep.fit->slope},
                            {"ci_lo", rep.fit->ci_lo}, {"ci_hi", rep.fit->ci_hi}});
        }
        reports.push_back(rep);
    }

    // Sigma_N(omega)/N at the largest N across omega draws.
    const RatePoint& ref = reports.front().points.back();
    const std::size_t N = ref.N;
    const auto d = ref.Sigma.rows();
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(d, d);
    Eigen::MatrixXd se2 = Eigen::MatrixXd::Zero(d, d);
    for (const auto& r : reports) {
        mean += r.points.back().Sigma / static_cast<double>(N);
        se2 += (r.points.back().Sigma_se / static_cast<double>(N)).cwiseAbs2();
    }
    const double k = static_cast<double>(reports.size());
    mean /= k;
    Csv scsv(ctx.file("sigma_inf.csv"), {"r", "s", "value", "se"});
    for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index s = 0; s < d; ++s) {
            scsv.row({fmt(static_cast<std::size_t>(r)), fmt(static_cast<std::size_t>(s)), fmt(mean(r, s)),
                      fmt(std::sqrt(se2(r, s)) / k)});
        }
    }
    double worst_z = 0.0;
    for (std::size_t a = 0; a < reports.size(); ++a) {
        for (std::size_t b = a + 1; b < reports.size(); ++b) {
            const auto& pa = reports[a].points.back();
            const auto& pb = reports[b].points.back();
            for (Eigen::Index r = 0; r < d; ++r) {
                for (Eigen::Index s = 0; s < d; ++s) {
                    const double diff = std::abs(pa.Sigma(r, s) - pb.Sigma(r, s));
                    const double comb = std::hypot(pa.Sigma_se(r, s), pb.Sigma_se(r, s));
                    worst_z = std::max(worst_z, comb > 0.0 ? diff / comb : (diff > 0.0 ? INFINITY : 0.0));
                }
            }
        }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mean);
    const double lambda_min = es.eigenvalues().minCoeff();
    ctx.results["omegas"] = per_omega;
    ctx.results["sigma_inf"] = matrix_json(mean);
    ctx.results["sigma_inf_lambda_min"] = lambda_min;
    ctx.results["sigma_agreement_max_z"] = finite_or_null(worst_z);
    ctx.results["base"] = {{"kind", base.kind_name()}, {"spectral_gap", base.spectral_gap()},
                           {"primitive", base.primitive()}};
    ctx.results["summary_rows"] = rows;
    if (reports.size() > 1) {
        ctx.check("sigma_agreement", worst_z <= agree_se,
                  "max pairwise |diff|/combined se " + format_double(worst_z) + " at N = " + std::to_string(N));
    }
    ctx.check("sigma_inf_lambda_min>0", lambda_min > 0.0, "lambda_min " + format_double(lambda_min));
}

void run_shell_check(Context& ctx, Schema& schema) {
    const auto dims = schema.counts("params.dims", std::vector<std::size_t>{1, 2, 3});
    const auto eps_list = schema.numbers("params.eps", std::vector<double>{0.05, 0.1});
    const std::size_t mc = schema.count("params.mc_points", 100000, 1);
    const FamilySpec spec = read_family(schema, ctx.seed);
    for (double e : eps_list) {
        if (!(e > 0.0)) {
            schema.error("params.eps", "widths must be positive");
        }
    }
    schema.finish();

    Csv csv(ctx.file("shell.csv"), {"d", "eps", "shape", "params", "outer", "outer_se", "inner", "inner_se",
                                    "outer_exact", "bound", "pass"});
    std::size_t failed = 0;
    std::size_t total = 0;
    std::size_t run = 0;
    for (std::size_t d : dims) {
        const ConvexFamily family = ConvexFamily::generate(spec, d);
        for (double eps : eps_list) {
            const ShellReport rep = shell_bound_check(family, eps, mc, derive_seed(ctx.seed, run++), ctx.threads);
            for (const auto& r : rep.rows) {
                csv.row({fmt(d), fmt(eps), r.shape, r.params, fmt(r.outer), fmt(r.outer_se), fmt(r.inner),
                         fmt(r.inner_se), r.outer_exact ? fmt(*r.outer_exact) : "", fmt(r.bound), fmt_bool(r.pass)});
            }
            failed += rep.failed;
            total += rep.rows.size();
        }
    }
    ctx.results["sets_checked"] = total;
    ctx.results["failed"] = failed;
    ctx.check("shell_bound", failed == 0, std::to_string(failed) + " of " + std::to_string(total) + " rows fail");
}

fs::path resolve_out_dir(const json& config, const RunOptions& options, const std::string& kind) {
    if (options.out_dir) {
        return *options.out_dir;
    }
    if (const char* env = std::getenv("SEQCLT_OUT_DIR"); env != nullptr && *env != '\0') {
        return fs::path(env);
    }
    if (config.contains("out_dir") && config["out_dir"].is_string()) {
        return fs::path(config["out_dir"].get<std::string>());
    }
    return fs::path("out") / kind;
}

}  // namespace

RunResult run_experiment(const json& input, const RunOptions& options) {
    if (!input.is_object()) {
        throw ConfigError("invalid config:\n  (root): expected an object");
    }
    json config = input;
    if (options.seed_override) {
        config["seed"] = *options.seed_override;
    }
    Schema schema(config);
    const std::string kind = schema.text("kind");
    const auto& kinds = experiment_kinds();
    if (!kind.empty() && std::find(kinds.begin(), kinds.end(), kind) == kinds.end()) {
        schema.error("kind", "unknown experiment kind '" + kind + "'");
    }
    Context ctx;
    ctx.seed = schema.seed("seed");
    ctx.G = schema.count("grid.G", 4096, 4);
    ctx.alpha = schema.number("grid.alpha", 1.0);
    if (!(ctx.alpha > 0.0 && ctx.alpha <= 1.0)) {
        schema.wrong("grid.alpha", "a Hölder exponent in (0,1]");
    }
    schema.finish();

    const Atlas atlas = read_atlas(schema);
    const bool needs_schedule = kind == "memory_loss" || kind == "correlation" || kind == "ei_identity" ||
                                kind == "clt_rate";
    const bool needs_observable = kind == "ei_identity" || kind == "clt_rate" || kind == "quenched_rate";
    std::optional<SequentialSchedule> schedule;
    std::optional<BaseProcess> base;
    std::optional<VectorObservable> phi;
    if (needs_schedule) {
        schedule = read_schedule(schema, atlas);
    }
    if (kind == "quenched_rate") {
        base = read_base(schema, atlas);
    }
    if (needs_observable) {
        phi = read_observable(schema, ctx.alpha);
        if (!phi && schema.ok()) {
            schema.missing("observable");
        }
    }
    const std::optional<GridDensity> mu = read_density(schema, ctx.G, ctx.alpha);
    schema.finish();

    RunResult result;
    result.kind = kind;
    result.config_hash = config_hash(config);
    result.out_dir = resolve_out_dir(config, options, kind);
    std::error_code ec;
    fs::create_directories(result.out_dir, ec);
    if (ec) {
        throw ConfigError("cannot create output directory " + result.out_dir.string() + ": " + ec.message());
    }
    ctx.config = config;
    ctx.kind = kind;
    ctx.threads = std::max(1u, options.threads);
    ctx.out_dir = result.out_dir;
    ctx.result = &result;

    if (kind == "memory_loss") {
        run_memory_loss(ctx, schema, *schedule);
    } else if (kind == "correlation") {
        run_correlation(ctx, schema, *schedule, *mu);
    } else if (kind == "stein_check") {
        run_stein_check(ctx, schema);
    } else if (kind == "ei_identity") {
        run_ei_identity(ctx, schema, *schedule, *phi, *mu);
    } else if (kind == "clt_rate") {
        run_clt_rate(ctx, schema, *schedule, *phi, *mu);
    } else if (kind == "quenched_rate") {
        run_quenched_rate(ctx, schema, *base, atlas, *phi, *mu);
    } else {
        run_shell_check(ctx, schema);
    }

    bool all_pass = true;
    json checks = json::array();
    for (const auto& c : result.checks) {
        all_pass = all_pass && c.pass;
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    result.exit_code = all_pass ? kExitOk : kExitCheckFailed;
    result.files.push_back("report.json");
    result.report = {{"kind", kind},
                     {"config_hash", result.config_hash},
                     {"config", config},
                     {"seed", ctx.seed},
                     {"mesh", {{"G", ctx.G}, {"alpha", ctx.alpha}}},
                     {"checks", checks},
                     {"pass", all_pass},
                     {"files", result.files},
                     {"results", ctx.results}};
    std::ofstream out(result.out_dir / "report.json", std::ios::binary);
    out << result.report.dump(2) << '\n';
    return result;
}

RunResult run_experiment_file(const fs::path& config_path, const RunOptions& options) {
    std::ifstream in(config_path);
    if (!in) {
        throw ConfigError("cannot read config " + config_path.string());
    }
    json config;
    try {
        config = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + config_path.string() + " is not valid JSON: " + e.what());
    }
    return run_experiment(config, options);
}

std::vector<SummaryRow> summarize(const std::vector<fs::path>& reports) {
    if (reports.empty()) {
        throw ConfigError("summarize needs at least one report");
    }
    std::vector<SummaryRow> rows;
    for (const auto& path : reports) {
        std::ifstream in(path);
        if (!in) {
            throw ConfigError("cannot read report " + path.string());
        }
        json rep;
        try {
            rep = json::parse(in);
        } catch (const json::parse_error& e) {
            throw ConfigError("report " + path.string() + " is not valid JSON: " + e.what());
        }
        const std::string kind = rep.value("kind", "");
        if (kind != "clt_rate" && kind != "quenched_rate") {
            throw ConfigError("cannot combine report " + path.string() + " of kind '" + kind +
                              "'; only clt_rate and quenched_rate reports carry rate tables");
        }
        for (const auto& r : rep["results"].value("summary_rows", json::array())) {
            SummaryRow row;
            row.experiment = r.value("experiment", kind);
            if (r.contains("N")) {
                row.N = r["N"].get<std::size_t>();
                row.dc = r["dc"].get<double>();
                row.se = r["se"].get<double>();
            } else {
                row.slope = r["slope"].get<double>();
                row.ci_lo = r["ci_lo"].get<double>();
                row.ci_hi = r["ci_hi"].get<double>();
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    out << "experiment,N,dc,se,slope,ci_lo,ci_hi\n";
    for (const auto& r : rows) {
        out << csv_field(r.experiment) << ',' << (r.N ? std::to_string(*r.N) : "") << ',' << opt(r.dc) << ','
            << opt(r.se) << ',' << opt(r.slope) << ',' << opt(r.ci_lo) << ',' << opt(r.ci_hi) << '\n';
    }
}

}  // namespace seqclt
