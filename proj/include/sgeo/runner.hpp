#ifndef SGEO_RUNNER_HPP
#define SGEO_RUNNER_HPP

// Declarative runner: a JSON config names a geometry and a list of checks,
// the runner executes them on a capped thread pool and emits a JSON report.

#include "sgeo/charts.hpp"
#include "sgeo/geometries.hpp"
#include "sgeo/metric.hpp"
#include "sgeo/voiculescu.hpp"

#include "json.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>
#include <thread>

namespace sgeo::cli {

using json = nlohmann::json;

inline constexpr const char* kSchema = "sgeo-report/1";
inline constexpr const char* kVersion = "0.3.0";

/// Raised for anything wrong with the config itself (exit status 2).
struct ConfigError : Error {
    using Error::Error;
};

struct CheckRequest {
    std::string name;
    json params = json::object();
};

struct RunConfig {
    GeometrySpec geometry;
    std::vector<CheckRequest> checks;
    std::map<std::string, double> tolerances;
    std::uint64_t seed = 7;
    std::string output_path;
    int jobs = 1;
    std::size_t eigenvalues = 64;  // length of the eigenvalue list in the report
};

struct CheckContext {
    const Model& model;
    const json& params;
    std::uint64_t seed;
    std::optional<double> tol;

    const TruncatedTriple& triple() const { return model.triple; }

    template <class T>
    T get(const std::string& key, T fallback) const {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->get<T>();
    }
    double tol_or(double fallback) const { return tol ? *tol : fallback; }
};

struct CheckEntry {
    std::string name;
    std::string summary;
    std::string tolerance;  // human-readable default
    std::function<CheckReport(const CheckContext&)> run;
};

// ---------------------------------------------------------------------------

namespace detail {

/// A generator to use when a check is not told which one.
inline std::string default_element(const TruncatedTriple& t) {
    for (const char* n : {"cos", "cos1", "x"})
        if (t.generators.count(n)) return n;
    if (t.generators.empty()) throw Error("triple has no generators");
    return t.generators.begin()->first;
}

inline std::string element_param(const CheckContext& c, const std::string& key = "element") {
    const auto n = c.get<std::string>(key, default_element(c.triple()));
    if (!c.triple().generators.count(n)) throw Error("unknown generator '" + n + "'");
    return n;
}

inline Point point_param(const json& v) {
    Point x{0.0, 0.0, 0.0};
    if (v.is_number()) {
        x[0] = v.get<double>();
        return x;
    }
    if (!v.is_array() || v.size() > 3) throw Error("a point is a number or an array of up to 3 numbers");
    for (std::size_t i = 0; i < v.size(); ++i) x[i] = v[i].get<double>();
    return x;
}

inline Cutoff cutoff_param(const CheckContext& c, const std::string& fallback) {
    const auto n = c.get<std::string>("cutoff", fallback);
    if (n == "bump") return bump_cutoff();
    if (n == "triangle") return triangle_cutoff();
    throw Error("unknown cutoff '" + n + "'");
}

/// "identity" or a generator name; a generator a enters as the positive a* a.
inline MatrixOperator operator_param(const CheckContext& c) {
    const auto& t = c.triple();
    const auto n = c.get<std::string>("operator", "identity");
    if (n == "identity") return MatrixOperator::identity(t.hilbert_dim());
    const auto& a = t.generator(n).op;
    return MatrixOperator((a.adjoint() * a).sparse(), true);
}

inline std::vector<ChartCandidate> charts_for(const TruncatedTriple& t) {
    if (t.label == "circle") return circle_charts(t);
    if (t.label == "torus" && t.p == 2) return torus_charts(t);
    throw Error("charts are provided for the circle and the 2-torus only");
}

/// Random vector supported on modes |k|_inf <= b.
inline Vector low_mode_vector(const FourierSpace& fs, int b, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    Vector v = Vector::Zero(fs.dim());
    const int N = fs.spinor_dim();
    const auto& modes = fs.mode_labels();
    for (std::size_t m = 0; m < modes.size(); ++m) {
        if (linf(modes[m]) > b) continue;
        for (int s = 0; s < N; ++s) v[static_cast<Eigen::Index>(m) * N + s] = cd(nd(rng), nd(rng));
    }
    return v.normalized();
}

inline CheckReport inconclusive(const std::string& name, const std::string& why) {
    CheckReport r;
    r.name = name;
    r.verdict = Verdict::inconclusive;
    r.diagnostics.push_back(why);
    return r;
}

inline std::vector<double> doubles_param(const CheckContext& c, const std::string& key, std::vector<double> fallback) {
    auto it = c.params.find(key);
    return it == c.params.end() ? fallback : it->get<std::vector<double>>();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Check registry

inline const std::vector<CheckEntry>& check_registry() {
    using detail::inconclusive;
    static const std::vector<CheckEntry> reg{
        {"triple_invariants", "D Hermitian, generators commute, grading relations", "1e-12 (fixed)",
         [](const CheckContext& c) { return validate_triple(c.triple()); }},
        {"dimension", "slope of log mu_n(|D|^-1) against log n", "0.05 on the slope",
         [](const CheckContext& c) { return dimension_check(c.triple(), c.tol_or(0.05)); }},
        {"order_one", "[[D,a],b] on the inner band", "1e-10",
         [](const CheckContext& c) {
             OrderOneOptions o;
             o.tol = c.tol_or(o.tol);
             return order_one_check(c.triple(), o);
         }},
        {"regularity", "delta and delta_1 towers under one refinement", "ratio 1.5 per doubling",
         [](const CheckContext& c) {
             RegularityOptions o;
             o.pass_ratio = c.tol_or(o.pass_ratio);
             o.m_max = c.get<int>("m_max", o.m_max);
             return regularity_check(c.triple(), o);
         }},
        {"orientability", "pi_D of the orientation cycle equals 1 or gamma", "1e-10",
         [](const CheckContext& c) {
             const auto& t = c.triple();
             ElementRegistry reg(t);
             const auto source = c.get<std::string>("cycle", "model");
             if (source == "charts") {
                 auto ch = detail::charts_for(t);
                 return orientability_check(t, chart_cycle(ch, reg), reg);
             }
             if (source != "model") throw Error("cycle must be 'model' or 'charts'");
             if (!c.model.cycle) return inconclusive("orientability", "geometry has no orientation cycle");
             return orientability_check(t, *c.model.cycle, reg);
         }},
        {"max_principle", "||[D,h] b_n|| for bumps concentrating at the argmax of h", "factor 0.8 per scale",
         [](const CheckContext& c) {
             MaxPrincipleOptions o;
             o.factor = c.tol_or(o.factor);
             o.scales = detail::doubles_param(c, "scales", o.scales);
             return max_principle_check(c.triple().generator(detail::element_param(c)), c.triple(), o);
         }},
        {"symbol_commutation", "[|D|, h] against a multiplication operator", "1e-6",
         [](const CheckContext& c) {
             const auto& t = c.triple();
             return symbol_commutation_check(t.generator(detail::element_param(c, "h")), t.generator(detail::element_param(c, "a")), t,
                                             c.tol_or(1e-6));
         }},
        {"geodesic_flow", "Taylor remainder of exp(is|D|) T exp(-is|D|)", "order >= 0.9",
         [](const CheckContext& c) {
             GeodesicOptions o;
             o.min_order = c.tol_or(o.min_order);
             return geodesic_flow_derivative_check(c.triple().generator(detail::element_param(c)).op, c.triple(), o);
         }},
        {"dixmier", "Dixmier trace of T |D|^-p; T = identity or a* a", "relative 0.05 to 'expected'",
         [](const CheckContext& c) {
             CheckReport r;
             r.name = "dixmier";
             const auto e = dixmier_estimate(detail::operator_param(c), c.triple());
             r.residuals["value"] = e.value;
             r.residuals["estimator_i"] = e.extras.count("estimator_i") ? e.extras.at("estimator_i") : std::nan("");
             r.residuals["drift_per_doubling"] = e.trend_slope;
             r.series["window"] = e.window_values;
             if (auto it = c.params.find("expected"); it != c.params.end()) {
                 const double want = it->get<double>();
                 r.residual("relative_error", std::abs(e.value - want) / std::abs(want), c.tol_or(0.05));
                 r.decide_from_residuals();
             } else {
                 r.verdict = e.converged ? Verdict::pass : Verdict::inconclusive;
             }
             if (!e.converged) r.diagnostics.push_back("drift above 1% per doubling");
             return r;
         }},
        {"heat_vs_dixmier", "eps^p Tr(f(eps|D|) T) against rho_f times the Dixmier trace", "relative gap 0.07",
         [](const CheckContext& c) {
             HeatDixmierOptions o;
             o.gap_tol = c.tol_or(o.gap_tol);
             return heat_vs_dixmier(detail::operator_param(c), detail::cutoff_param(c, "triangle"), c.triple(), o);
         }},
        {"absolute_continuity", "one kappa for <xi, a eta> against the Dixmier functional", "spread 0.05",
         [](const CheckContext& c) {
             const auto& t = c.triple();
             const auto& fs = t.require_fourier("absolute_continuity");
             std::mt19937_64 rng(c.seed);
             std::vector<std::string> names;
             for (const auto& [n, e] : t.generators) names.push_back(n);
             const int n = c.get<int>("samples", 8);
             const int b = std::max(1, fs.lambda() / 4);
             std::vector<ContinuitySample> s;
             for (int i = 0; i < n; ++i) {
                 ContinuitySample x;
                 x.xi = detail::low_mode_vector(fs, b, rng);
                 x.eta = detail::low_mode_vector(fs, b, rng);
                 x.a = names[std::uniform_int_distribution<std::size_t>(0, names.size() - 1)(rng)];
                 s.push_back(std::move(x));
             }
             auto r = absolute_continuity_fit(t, s, c.tol_or(0.05));
             if (auto it = c.params.find("expected_kappa"); it != c.params.end()) {
                 const double want = it->get<double>();
                 r.residual("kappa_error", std::abs(r.residuals.at("kappa") - want) / std::abs(want), c.get<double>("kappa_tol", 0.03));
                 r.decide_from_residuals();
             }
             return r;
         }},
        {"cover", "the chart family covers and resolves the identity", "1e-6",
         [](const CheckContext& c) {
             CoverOptions o;
             o.identity_tol = c.tol_or(o.identity_tol);
             auto ch = detail::charts_for(c.triple());
             return cover_check(c.triple(), ch, o);
         }},
        {"kj", "Voiculescu obstruction min_eps max_j ||[f(eps|D|), a_j]||_(p,1)", "reported; pass when the regime is identified",
         [](const CheckContext& c) {
             const auto& t = c.triple();
             std::vector<Element> as;
             for (const auto& n : c.get<std::vector<std::string>>("elements", {detail::default_element(t)})) as.push_back(t.generator(n));
             const auto e = kj_estimate(as, t, detail::cutoff_param(c, "bump"));
             CheckReport r;
             r.name = "kj";
             r.residuals["value"] = e.value;
             std::vector<double> eps, vals;
             for (const auto& [x, v] : e.per_epsilon) {
                 eps.push_back(x);
                 vals.push_back(v);
             }
             r.series["eps"] = eps;
             r.series["value"] = vals;
             r.verdict = e.regime_ok ? Verdict::pass : Verdict::inconclusive;
             return r;
         }},
        {"voiculescu_scaling", "localized obstruction against arc length on the circle", "slope 1 +- 0.15",
         [](const CheckContext& c) {
             const auto& t = c.triple();
             if (t.label != "circle") return inconclusive("voiculescu_scaling", "arc sweep is defined on the circle");
             const auto a = t.generator(detail::element_param(c));
             const auto f = detail::cutoff_param(c, "bump");
             CheckReport r;
             r.name = "voiculescu_scaling";
             std::vector<double> ls, lv, vals;
             for (double len : detail::doubles_param(c, "arcs", {kPi / 2, kPi / 4, kPi / 8})) {
                 const auto e = localized_kj({a}, arc(kPi / 2, len), t, f);
                 vals.push_back(e.value);
                 ls.push_back(std::log(len));
                 lv.push_back(std::log(e.value));
             }
             r.series["value"] = vals;
             const double slope = sgeo::detail::least_squares(ls, lv).slope;
             r.residuals["slope"] = slope;
             r.residual("slope_error", std::abs(slope - 1.0), c.tol_or(0.15));
             r.decide_from_residuals();
             return r;
         }},
        {"commutator_decay", "||[f(eps|D|), a]|| <= C_f eps ||[D,a]||", "slack 0.1",
         [](const CheckContext& c) {
             CommutatorDecayOptions o;
             o.slack = c.tol_or(o.slack);
             return commutator_decay_check(c.triple().generator(detail::element_param(c, "element")), c.triple(),
                                           detail::cutoff_param(c, "bump"), o);
         }},
        {"distance", "certified lower bound on the spectral distance", "ratio to geodesic >= 'min_ratio'",
         [](const CheckContext& c) {
             const auto& t = c.triple();
             DistanceOptions o;
             o.budget = c.get<int>("budget", o.budget);
             o.bandwidth = c.get<int>("bandwidth", o.bandwidth);
             const Point x = detail::point_param(c.params.value("from", json(0.0)));
             const Point y = detail::point_param(c.params.value("to", json(1.0)));
             const auto d = connes_distance(x, y, t, o);
             CheckReport r;
             r.name = "distance";
             const double geo = t.space->distance(x, y);
             r.residuals["lower_bound"] = d.lower_bound;
             r.residuals["geodesic"] = geo;
             r.residuals["iterations"] = d.iterations;
             r.residual("constraint_violation", -d.constraint_slack, 0.0);
             r.residual("ratio_shortfall", c.get<double>("min_ratio", 0.0) - d.lower_bound / geo, 0.0);
             r.series["history"] = d.history;
             r.notes["start"] = d.start;
             r.notes["converged"] = d.converged ? "yes" : "no";
             r.decide_from_residuals();
             return r;
         }},
        {"finite_propagation", "leaked mass of exp(itD) outside the light cone", "leakage 0.01",
         [](const CheckContext& c) {
             PropagationOptions o;
             o.leak_tol = c.tol_or(o.leak_tol);
             o.refine = c.get<bool>("refine", o.refine);
             return finite_propagation_check(c.triple(), detail::doubles_param(c, "times", {0.0, 0.1, 0.3}), o);
         }},
    };
    return reg;
}

inline const CheckEntry* find_check(const std::string& name) {
    for (const auto& e : check_registry())
        if (e.name == name) return &e;
    return nullptr;
}

inline std::string list_targets() {
    std::ostringstream os;
    os << "geometries:\n";
    os << "  circle      p=1, D = -i d/dtheta on modes |n| <= lambda\n";
    os << "  torus       p=2 or 3, variant dirac | signature (p=2)\n";
    os << "  interval    p=1, boundary-condition counterexample\n";
    os << "  product     2-torus times a finite ladder\n";
    os << "corruptions (geometry option \"corrupt\"):\n";
    for (const auto& m : corruption_modes()) os << "  " << m << "\n";
    os << "checks (default tolerance):\n";
    for (const auto& e : check_registry()) os << "  " << std::left << std::setw(20) << e.name << e.summary << " [" << e.tolerance << "]\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Config

inline RunConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    static const std::set<std::string> known{"geometry", "checks", "tolerances", "seed", "output", "jobs", "eigenvalues"};
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) throw ConfigError("config: unknown key '" + k + "'");
    RunConfig c;
    try {
        const auto& g = j.at("geometry");
        c.geometry.kind = g.value("kind", std::string("circle"));
        c.geometry.p = g.value("p", c.geometry.kind == "circle" || c.geometry.kind == "interval" ? 1 : 2);
        c.geometry.lambda = g.value("lambda", 64);
        if (auto o = g.find("options"); o != g.end())
            for (const auto& [k, v] : o->items()) c.geometry.options[k] = v.is_string() ? v.get<std::string>() : v.dump();
        if (auto ch = j.find("checks"); ch != j.end()) {
            for (const auto& item : *ch) {
                CheckRequest r;
                if (item.is_string()) {
                    r.name = item.get<std::string>();
                } else {
                    r.name = item.at("name").get<std::string>();
                    if (auto p = item.find("params"); p != item.end()) r.params = *p;
                }
                c.checks.push_back(std::move(r));
            }
        }
        if (auto t = j.find("tolerances"); t != j.end())
            for (const auto& [k, v] : t->items()) c.tolerances[k] = v.get<double>();
        c.seed = j.value("seed", c.seed);
        c.output_path = j.value("output", std::string());
        c.jobs = j.value("jobs", 1);
        c.eigenvalues = j.value("eigenvalues", c.eigenvalues);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    for (const auto& r : c.checks)
        if (!find_check(r.name)) throw ConfigError("config: unknown check '" + r.name + "'");
    for (const auto& [k, v] : c.tolerances)
        if (!find_check(k)) throw ConfigError("config: tolerance for unknown check '" + k + "'");
    if (c.jobs < 1) throw ConfigError("config: jobs must be at least 1");
    return c;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config '" + path + "'");
    try {
        // comments are allowed in config files
        return parse_config(json::parse(in, nullptr, true, true));
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

inline json to_json(const GeometrySpec& g) {
    json j{{"kind", g.kind}, {"p", g.p}, {"lambda", g.lambda}};
    j["options"] = json::object();
    for (const auto& [k, v] : g.options) j["options"][k] = v;
    return j;
}

inline json to_json(const RunConfig& c) {
    json checks = json::array();
    for (const auto& r : c.checks) checks.push_back({{"name", r.name}, {"params", r.params}});
    return {{"geometry", to_json(c.geometry)}, {"checks", checks}, {"tolerances", c.tolerances}, {"seed", c.seed},
            {"output", c.output_path}, {"eigenvalues", c.eigenvalues}};
}

// ---------------------------------------------------------------------------
// Report

inline json to_json(const CheckReport& r) {
    json j{{"name", r.name}, {"verdict", to_string(r.verdict)}};
    j["residuals"] = json::object();
    for (const auto& [k, v] : r.residuals) j["residuals"][k] = std::isfinite(v) ? json(v) : json(nullptr);
    j["tolerances"] = r.tolerances;
    j["series"] = json::object();
    for (const auto& [k, s] : r.series) {
        json a = json::array();
        for (double v : s) a.push_back(std::isfinite(v) ? json(v) : json(nullptr));
        j["series"][k] = a;
    }
    j["notes"] = r.notes;
    j["diagnostics"] = r.diagnostics;
    return j;
}

/// FNV-1a, 64 bit.
inline std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex(std::uint64_t h) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

/// Eigenvalues of D (ordered by |lambda|, truncated) and a fingerprint of the
/// eigenbasis that does not depend on the choice of basis inside a degenerate
/// eigenspace: the diagonals of the spectral projectors, rounded.
inline json two_pieces(const TruncatedTriple& t, std::size_t max_eigenvalues) {
    const auto& es = t.eigensystem();
    std::vector<double> vals = es.values;
    std::stable_sort(vals.begin(), vals.end(), [](double a, double b) { return std::abs(a) < std::abs(b) || (std::abs(a) == std::abs(b) && a < b); });
    if (vals.size() > max_eigenvalues) vals.resize(max_eigenvalues);
    const Sparse& v = es.basis.sparse();
    const auto n = v.rows();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    std::size_t clusters = 0;
    std::size_t i = 0;
    while (i < es.values.size()) {
        std::size_t j = i + 1;
        const double tol = 1e-9 * std::max(1.0, std::abs(es.values[i]));
        while (j < es.values.size() && es.values[j] - es.values[i] <= tol) ++j;
        Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
        for (std::size_t c = i; c < j; ++c)
            for (Sparse::InnerIterator it(v, static_cast<Eigen::Index>(c)); it; ++it) diag[it.row()] += std::norm(it.value());
        std::ostringstream os;
        os << std::llround(es.values[i] * 1e9) << ':';
        for (Eigen::Index r = 0; r < n; ++r) os << std::llround(diag[r] * 1e9) << ',';
        h = fnv1a(os.str(), h);
        ++clusters;
        i = j;
    }
    return {{"eigenvalues", vals}, {"dimension", es.values.size()}, {"eigenspaces", clusters}, {"basis_fingerprint", hex(h)}};
}

/// Hash of the report with the environment block (timings) and the hash itself removed.
inline std::string determinism_hash(json report) {
    report.erase("environment");
    report.erase("determinism_hash");
    return hex(fnv1a(report.dump()));
}

struct RunReport {
    json body;
    int passed = 0, failed = 0, inconclusive = 0;
    bool any_fail() const { return failed > 0; }
};

inline Model build_model(const RunConfig& c) {
    GeometrySpec g = c.geometry;
    std::optional<std::string> mode;
    if (auto it = g.options.find("corrupt"); it != g.options.end()) {
        mode = it->second;
        g.options.erase(it);
    }
    Model m = build(g);
    if (mode) m = corrupt(m, *mode, c.seed);
    return m;
}

inline RunReport run(const RunConfig& c) {
    Model model;
    try {
        model = build_model(c);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    const auto n = c.checks.size();
    std::vector<CheckReport> out(n);
    std::vector<double> ms(n, 0.0);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            const auto& req = c.checks[i];
            const auto* entry = find_check(req.name);
            std::optional<double> tol;
            if (auto it = c.tolerances.find(req.name); it != c.tolerances.end()) tol = it->second;
            if (auto it = req.params.find("tol"); it != req.params.end()) tol = it->get<double>();
            const CheckContext ctx{model, req.params, c.seed + i, tol};
            const auto t0 = std::chrono::steady_clock::now();
            try {
                out[i] = entry->run(ctx);
            } catch (const std::exception& e) {
                out[i] = CheckReport{};
                out[i].verdict = Verdict::fail;
                out[i].diagnostics.push_back(std::string("exception: ") + e.what());
            }
            out[i].name = req.name;
            ms[i] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        }
    };
    const auto jobs = std::min<std::size_t>(static_cast<std::size_t>(c.jobs), std::max<std::size_t>(n, 1));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t k = 0; k < jobs; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    RunReport r;
    json checks = json::array();
    json timing = json::object();
    for (std::size_t i = 0; i < n; ++i) {
        checks.push_back(to_json(out[i]));
        timing[std::to_string(i) + ":" + out[i].name] = ms[i];
        if (out[i].verdict == Verdict::pass) ++r.passed;
        else if (out[i].verdict == Verdict::fail) ++r.failed;
        else ++r.inconclusive;
    }
    r.body = {{"schema", kSchema},
              {"config", to_json(c)},
              {"geometry", {{"label", model.triple.label}, {"provenance", model.provenance}}},
              {"checks", checks},
              {"summary", {{"pass", r.passed}, {"fail", r.failed}, {"inconclusive", r.inconclusive}}},
              {"two_pieces", two_pieces(model.triple, c.eigenvalues)}};
    r.body["determinism_hash"] = determinism_hash(r.body);
    r.body["environment"] = {{"version", kVersion}, {"jobs", jobs}, {"timing_ms", timing}};
    return r;
}

inline void write_report(const RunReport& r, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write report '" + path + "'");
    os << r.body.dump(2) << "\n";
    if (!os) throw Error("write failed for '" + path + "'");
}

}  // namespace sgeo::cli

#endif  // SGEO_RUNNER_HPP
