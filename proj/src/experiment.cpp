#include "gcilab/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <boost/version.hpp>

#include "gcilab/blconst.hpp"
#include "gcilab/error.hpp"
#include "gcilab/flow.hpp"
#include "gcilab/gcicheck.hpp"
#include "gcilab/json_io.hpp"

namespace gcilab::experiment {

using nlohmann::json;
using namespace json_io;

namespace {

struct Context {
    std::string kind;
    std::uint64_t seed = 0;
    SamplerOptions opts;
    double tol = 0.0;
    const json* params = nullptr;
    json series = json::object();

    bool has(const char* key) const { return params->contains(key); }
    const json& at(const char* key) const {
        if (!has(key)) throw Error(ErrorCode::SchemaError, std::string("params.") + key + ": missing required field");
        return (*params)[key];
    }
    std::string path(const char* key) const { return std::string("params.") + key; }
    bool flag(const char* key) const {
        if (!has(key)) return false;
        if (!at(key).is_boolean()) throw Error(ErrorCode::SchemaError, path(key) + ": expected true or false");
        return at(key).get<bool>();
    }
    std::string text(const char* key, const char* fallback) const {
        if (!has(key)) return fallback;
        if (!at(key).is_string()) throw Error(ErrorCode::SchemaError, path(key) + ": expected a string");
        return at(key).get<std::string>();
    }
};

json series_table(const std::vector<std::string>& columns, const std::vector<std::vector<json>>& rows) {
    json r = json::array();
    for (const auto& row : rows) r.push_back(row);
    return {{"columns", columns}, {"rows", r}};
}

SymMatrix sigma_or_identity(const Context& c, const char* key, std::size_t n) {
    if (!c.has(key)) return SymMatrix::identity(n);
    SymMatrix s = read_sym(c.at(key), c.path(key));
    if (s.n() != n) throw Error(ErrorCode::SchemaError, c.path(key) + ": dimension does not match the sets");
    return s;
}

// ---- kinds -------------------------------------------------------------

int run_center(Context& c, json& results) {
    const ConvexSet k = read_set(c.at("set"), c.path("set"));
    const GaussianSpec spec(sigma_or_identity(c, "sigma", k.dim()));
    const auto r = gcicheck::center_set(k, spec, c.opts, c.tol);
    results = to_json(r);
    return r.converged ? 0 : 2;
}

int run_measure(Context& c, json& results) {
    const ConvexSet k = read_set(c.at("set"), c.path("set"));
    const GaussianSpec spec(sigma_or_identity(c, "sigma", k.dim()));
    results = to_json(gaussmc::restricted_stats(k, spec, c.opts, true));
    return 0;
}

int run_verify(Context& c, json& results) {
    const json& sj = c.at("sets");
    if (!sj.is_array() || sj.empty()) throw Error(ErrorCode::SchemaError, "params.sets: expected a non-empty array");
    std::vector<ConvexSet> ks;
    for (std::size_t i = 0; i < sj.size(); ++i) ks.push_back(read_set(sj[i], "params.sets[" + std::to_string(i) + "]"));
    const std::size_t n = ks.front().dim();
    for (std::size_t i = 1; i < ks.size(); ++i)
        if (ks[i].dim() != n) throw Error(ErrorCode::SchemaError, "params.sets: sets differ in dimension");
    const SymMatrix sigma0 = sigma_or_identity(c, "sigma0", n);
    std::vector<SymMatrix> sigmas;
    if (c.has("sigmas")) {
        const json& ss = c.at("sigmas");
        if (!ss.is_array() || ss.size() != ks.size())
            throw Error(ErrorCode::SchemaError, "params.sigmas: expected one matrix per set");
        for (std::size_t i = 0; i < ss.size(); ++i)
            sigmas.push_back(read_sym(ss[i], "params.sigmas[" + std::to_string(i) + "]"));
    } else {
        sigmas.assign(ks.size(), SymMatrix::identity(n));
    }
    const bool center = c.flag("center");
    const bool matched = c.flag("matched");
    json centering = json::array();
    if (center) {
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const auto r = gcicheck::center_set(ks[i], GaussianSpec(sigmas[i]), c.opts, c.tol);
            centering.push_back({{"b0", to_json(r.b0)}, {"converged", r.converged}, {"iterations", r.iterations}});
            ks[i] = r.centered;
        }
    }
    GciReport rep;
    if (matched) {
        if (ks.size() != 2) throw Error(ErrorCode::SchemaError, "params.matched: needs exactly two sets");
        rep = gcicheck::verify_gci_matched(ks[0], ks[1], c.opts);
    } else {
        rep = gcicheck::verify_gci(ks, sigma0, sigmas, c.opts);
    }
    results = to_json(rep);
    if (center) results["centering"] = centering;
    return rep.verdict == Verdict::violated ? 2 : 0;
}

int run_equality(Context& c, json& results) {
    const ConvexSet k1 = read_set(c.at("k1"), c.path("k1"));
    const ConvexSet k2 = read_set(c.at("k2"), c.path("k2"));
    const auto r = gcicheck::detect_equality_structure(k1, k2, c.opts, c.tol);
    results = to_json(r);
    if (c.flag("verify")) results["gci"] = to_json(gcicheck::verify_gci_matched(k1, k2, c.opts));
    return r.verdict == StructureVerdict::product ? 0 : 2;
}

int run_translate(Context& c, json& results) {
    const ConvexSet k1 = read_set(c.at("k1"), c.path("k1"));
    const ConvexSet k2 = read_set(c.at("k2"), c.path("k2"));
    const GaussianSpec spec(sigma_or_identity(c, "sigma", k1.dim()));
    const auto r = gcicheck::find_independent_translations(k1, k2, spec, c.opts, c.tol);
    results = to_json(r);
    return r.converged ? 0 : 2;
}

OptimizerOptions optimizer_options(const Context& c) {
    OptimizerOptions o;
    o.seed = c.seed;
    o.threads = c.opts.threads;
    if (c.has("random_starts")) o.random_starts = read_uint(c.at("random_starts"), c.path("random_starts"));
    if (c.has("max_iterations")) o.max_iterations = read_uint(c.at("max_iterations"), c.path("max_iterations"));
    return o;
}

int run_bl(Context& c, json& results) {
    const OptimizerOptions o = optimizer_options(c);
    if (c.has("gci")) {
        const json& g = c.at("gci");
        const SymMatrix s0 = read_sym(g.at("sigma0"), "params.gci.sigma0");
        std::vector<SymMatrix> ss;
        const json& arr = g.at("sigmas");
        for (std::size_t i = 0; i < arr.size(); ++i) ss.push_back(read_sym(arr[i], "params.gci.sigmas[" + std::to_string(i) + "]"));
        const auto r = blconst::gci_constant(s0, ss, o);
        results = to_json(r.infimum);
        results["datum"] = to_json(blconst::gci_datum(s0, ss));
        results["gci_constant"] = number(r.constant);
        results["ordering_holds"] = r.ordering_holds;
        return r.infimum.converged ? 0 : 2;
    }
    const BLDatum d = read_datum(c.at("datum"), c.path("datum"));
    const ConstraintBand band = c.has("band") ? read_band(c.at("band"), c.path("band"), d) : ConstraintBand::identity(d);
    const auto r = blconst::gaussian_bl_infimum(d, band, o);
    results = to_json(r);
    results["datum"] = to_json(d);
    if (r.classification == Classification::infinite_constant) return 0;
    if (r.classification == Classification::zero_constant) {
        const double lambda0 = blconst::find_lambda0(d);
        std::vector<std::vector<json>> rows;
        json fam = json::array();
        for (int k = 1; k <= 6; ++k) {
            const double eps = std::pow(10.0, -k);
            const auto v = blconst::gaussian_bl_value(d, blconst::zero_constant_family(d, r.zero_index, eps, lambda0));
            const json val = v.is_finite() ? number(v.value()) : json("+inf");
            fam.push_back({{"eps", eps}, {"value", val}});
            rows.push_back({eps, val});
        }
        results["lambda0"] = lambda0;
        results["eps_family"] = fam;
        c.series["eps_family"] = series_table({"eps", "value"}, rows);
        return 0;
    }
    return r.converged ? 0 : 2;
}

GridDensity read_density(const json& j, const std::string& path, double half_width, std::size_t points,
                         std::uint64_t seed) {
    if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
        throw Error(ErrorCode::SchemaError, path + ".family: missing required field");
    const std::string fam = j["family"].get<std::string>();
    if (fam == "uniform") {
        const double lo = j.contains("lo") ? read_number(j["lo"], path + ".lo") : -1.0;
        const double hi = j.contains("hi") ? read_number(j["hi"], path + ".hi") : 1.0;
        if (!(hi > lo)) throw Error(ErrorCode::SchemaError, path + ": need lo < hi");
        if (lo == -hi)
            return flow::grid_from_function([=](double x) { return (x > lo && x < hi) ? 1.0 : 0.0; }, half_width, points)
                .normalized();
        return flow::centered_grid_from_cell_mass(
            [=](double a, double b) { return std::max(0.0, std::min(b, hi) - std::max(a, lo)); }, half_width, points);
    }
    if (fam == "gaussian") {
        const double s = j.contains("sigma") ? read_number(j["sigma"], path + ".sigma") : 1.0;
        return flow::grid_from_function([=](double x) { return std::exp(-0.5 * x * x / (s * s)); }, half_width, points)
            .normalized();
    }
    if (fam == "exponential") {
        const double rate = j.contains("rate") ? read_number(j["rate"], path + ".rate") : 1.0;
        return flow::centered_grid_from_cell_mass(
            [=](double a, double b) {
                a = std::max(a, 0.0);
                if (!(b > a)) return 0.0;
                return std::exp(-rate * a) * -std::expm1(-rate * (b - a));
            },
            half_width, points);
    }
    if (fam == "random") {
        const std::uint64_t s = j.contains("seed") ? read_uint(j["seed"], path + ".seed") : seed;
        return flow::random_log_concave(s, half_width, points);
    }
    throw Error(ErrorCode::SchemaError, path + ".family: unknown family '" + fam + "'");
}

int run_flow(Context& c, json& results) {
    const double hw = c.has("half_width") ? read_number(c.at("half_width"), c.path("half_width")) : 8.0;
    const std::size_t points =
        c.has("points") ? read_uint(c.at("points"), c.path("points")) : flow::aligned_points(hw, 128);
    const std::string mode = c.text("mode", "ball");
    const GridDensity f1 = read_density(c.at("f1"), "params.f1", hw, points, gaussmc::substream_seed(c.seed, 1));
    if (mode == "ball") {
        const GridDensity f2 =
            c.has("f2") ? read_density(c.at("f2"), "params.f2", hw, points, gaussmc::substream_seed(c.seed, 2)) : f1;
        const std::size_t steps = c.has("steps") ? read_uint(c.at("steps"), c.path("steps")) : 6;
        const BLDatum d = c.has("datum") ? read_datum(c.at("datum"), c.path("datum")) : blconst::gci_datum(1, 2);
        const auto rep = flow::ball_iterate(f1, f2, steps, d);
        results = to_json(rep);
        std::vector<std::vector<json>> rows, dens;
        for (const auto& s : rep.steps) rows.push_back({s.k, number(s.bl_value), number(s.l1_to_gaussian), number(s.mass)});
        const GridDensity& last = rep.history_1.back();
        for (std::size_t i = 0; i < last.size(); ++i) dens.push_back({number(last.x(i)), number(last[i])});
        c.series["steps"] = series_table({"k", "bl_value", "l1", "mass"}, rows);
        c.series["density"] = series_table({"x", "f"}, dens);
        return rep.one_step_holds ? 0 : 2;
    }
    if (mode == "fokker-planck") {
        const double beta = c.has("beta") ? read_number(c.at("beta"), c.path("beta")) : 1.0;
        Vector ts{0.1, 0.5, 2.0};
        if (c.has("t")) ts = read_vector(c.at("t"), c.path("t"));
        json outs = json::array();
        std::vector<GridDensity> gs;
        bool all_ok = true;
        for (double t : ts) {
            const GridDensity g = flow::fokker_planck_step(f1, beta, t);
            const double h = 1.0 / (-beta * std::expm1(-2.0 * t));
            const bool slc = flow::semilogconvexity_check(g, h);
            const double rel = std::fabs(g.mass() - f1.mass()) / f1.mass();
            all_ok = all_ok && slc && rel <= 1e-6;
            outs.push_back({{"t", t},
                            {"h", number(h)},
                            {"mass", number(g.mass())},
                            {"mass_rel_change", number(rel)},
                            {"barycenter", number(g.barycenter())},
                            {"semilogconvex", slc}});
            gs.push_back(g);
        }
        results = {{"beta", beta}, {"input_mass", number(f1.mass())}, {"input_barycenter", number(f1.barycenter())},
                   {"outputs", outs}};
        std::vector<std::string> cols{"x", "f"};
        for (double t : ts) {
            std::ostringstream os;
            os << "f_t" << t;
            cols.push_back(os.str());
        }
        std::vector<std::vector<json>> dens;
        for (std::size_t i = 0; i < f1.size(); ++i) {
            std::vector<json> row{number(f1.x(i)), number(f1[i])};
            for (const auto& g : gs) row.push_back(number(g[i]));
            dens.push_back(row);
        }
        c.series["density"] = series_table(cols, dens);
        return all_ok ? 0 : 2;
    }
    if (mode == "fradelizi") {
        const auto r = flow::fradelizi_check(f1);
        results = to_json(r);
        std::vector<std::vector<json>> dens;
        for (std::size_t i = 0; i < f1.size(); ++i) dens.push_back({number(f1.x(i)), number(f1[i])});
        c.series["density"] = series_table({"x", "f"}, dens);
        return r.ok ? 0 : 2;
    }
    throw Error(ErrorCode::SchemaError, "params.mode: unknown flow mode '" + mode + "'");
}

int run_counterexample(Context& c, json& results) {
    Vector grid;
    if (c.has("r2_grid"))
        grid = read_vector(c.at("r2_grid"), c.path("r2_grid"));
    else if (c.has("r2"))
        grid = {read_number(c.at("r2"), c.path("r2"))};
    else
        grid = {3.0};
    json pts = json::array();
    std::vector<std::vector<json>> rows;
    bool monotone = true;
    double prev = -1.0;
    for (double r2 : grid) {
        const auto r = gcicheck::bary_gci_counterexample(r2);
        pts.push_back(to_json(r));
        rows.push_back({number(r2), number(r.lhs)});
        if (r.lhs <= prev) monotone = false;
        prev = r.lhs;
    }
    results = {{"points", pts}, {"monotone_increasing", monotone}};
    if (grid.size() == 1) results["violated"] = pts[0]["violated"];
    c.series["sweep"] = series_table({"r2", "value"}, rows);
    // the violation is the expected outcome of this construction
    return 0;
}

std::string csv_cell(const json& v) {
    if (v.is_null()) return "nan";
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return v.dump();
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
}

}  // namespace

RunOutcome run_spec(const json& spec, const RunFlags& flags) {
    const auto start = std::chrono::steady_clock::now();
    RunOutcome out;
    json report = {{"spec", spec},
                   {"versions",
                    {{"gcilab", GCILAB_VERSION},
                     {"boost", BOOST_LIB_VERSION},
                     {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}}};
    Context c;
    try {
        if (!spec.is_object()) throw Error(ErrorCode::SchemaError, "(root): expected an object");
        if (!spec.contains("kind") || !spec["kind"].is_string())
            throw Error(ErrorCode::SchemaError, "kind: missing required field");
        c.kind = spec["kind"].get<std::string>();
        report["kind"] = c.kind;
        if (spec.contains("seed"))
            c.seed = read_uint(spec["seed"], "seed");
        else if (flags.seed)
            c.seed = *flags.seed;
        else
            throw Error(ErrorCode::SchemaError, "seed: missing required field");
        report["seed"] = c.seed;
        static const json empty = json::object();
        c.params = spec.contains("params") ? &spec["params"] : &empty;
        if (!c.params->is_object()) throw Error(ErrorCode::SchemaError, "params: expected an object");

        c.opts.seed = c.seed;
        c.opts.budget = c.has("budget") ? read_uint(c.at("budget"), "params.budget") : flags.budget;
        c.opts.threads = c.has("threads") ? static_cast<unsigned>(read_uint(c.at("threads"), "params.threads")) : flags.threads;
        if (c.opts.threads == 0) c.opts.threads = 1;
        c.opts.method = flags.method;
        if (c.has("method")) {
            if (!c.at("method").is_string()) throw Error(ErrorCode::SchemaError, "params.method: expected a string");
            try {
                c.opts.method = method_from_string(c.at("method").get<std::string>());
            } catch (const Error& e) {
                throw Error(ErrorCode::SchemaError, std::string("params.method: ") + e.detail());
            }
        }
        c.tol = c.has("tol") ? read_number(c.at("tol"), "params.tol") : flags.tol;
        report["settings"] = {{"budget", c.opts.budget}, {"method", std::string(to_string(c.opts.method))},
                              {"tol", c.tol}};

        json results;
        int code;
        if (c.kind == "center")
            code = run_center(c, results);
        else if (c.kind == "measure")
            code = run_measure(c, results);
        else if (c.kind == "verify-gci")
            code = run_verify(c, results);
        else if (c.kind == "equality")
            code = run_equality(c, results);
        else if (c.kind == "translate-independent")
            code = run_translate(c, results);
        else if (c.kind == "bl-constant")
            code = run_bl(c, results);
        else if (c.kind == "flow")
            code = run_flow(c, results);
        else if (c.kind == "counterexample")
            code = run_counterexample(c, results);
        else
            throw Error(ErrorCode::SchemaError, "kind: unknown kind '" + c.kind + "'");
        report["status"] = "ok";
        report["results"] = results;
        if (!c.series.empty()) report["series"] = c.series;
        out.exit_code = code;
    } catch (const Error& e) {
        report["status"] = "error";
        report["error"] = {{"code", std::string(to_string(e.code()))}, {"message", e.detail()}, {"module", c.kind}};
        out.exit_code = 1;
    } catch (const std::exception& e) {
        report["status"] = "error";
        report["error"] = {{"code", "InternalError"}, {"message", e.what()}, {"module", c.kind}};
        out.exit_code = 1;
    }
    report["exit_code"] = out.exit_code;
    if (!report.contains("kind")) report["kind"] = nullptr;
    if (!report.contains("seed")) report["seed"] = nullptr;
    report["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.report = std::move(report);
    return out;
}

std::vector<std::string> emit_plot_data(const json& report, const std::string& stem) {
    if (!report.contains("series") || report["series"].empty())
        throw Error(ErrorCode::NoSeries, "report of kind '" + report.value("kind", std::string("?")) + "' has no series");
    std::vector<std::string> written;
    const json& series = report["series"];
    // the kind's primary series first
    std::vector<std::string> names;
    for (const char* primary : {"steps", "sweep", "eps_family", "density"})
        if (series.contains(primary)) {
            names.push_back(primary);
            break;
        }
    for (auto it = series.begin(); it != series.end(); ++it)
        if (names.empty() || it.key() != names.front()) names.push_back(it.key());
    for (std::size_t s = 0; s < names.size(); ++s) {
        const json& table = series[names[s]];
        const std::string file = s == 0 ? stem + ".csv" : stem + "." + names[s] + ".csv";
        std::ofstream os(file, std::ios::binary);
        if (!os) throw Error(ErrorCode::InvalidInput, "cannot write " + file);
        const json& cols = table["columns"];
        for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i].get<std::string>();
        os << '\n';
        for (const auto& row : table["rows"]) {
            for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
            os << '\n';
        }
        written.push_back(file);
    }
    return written;
}

std::string report_body(const json& report) {
    json copy = report;
    copy.erase("wall_clock_seconds");
    return copy.dump(2);
}

RunOutcome run_experiment(const std::string& path, const RunFlags& flags) {
    namespace fs = std::filesystem;
    json spec;
    std::string parse_error;
    {
        std::ifstream is(path);
        if (!is) {
            parse_error = "cannot read spec file " + path;
        } else {
            try {
                spec = json::parse(is);
            } catch (const json::parse_error& e) {
                parse_error = std::string("spec is not valid JSON: ") + e.what();
            }
        }
    }
    RunOutcome out;
    if (!parse_error.empty()) {
        out.exit_code = 1;
        out.report = {{"kind", nullptr}, {"seed", nullptr}, {"spec", nullptr}, {"status", "error"},
                      {"error", {{"code", "SchemaError"}, {"message", parse_error}, {"module", ""}}},
                      {"exit_code", 1}, {"wall_clock_seconds", 0.0},
                      {"versions", {{"gcilab", GCILAB_VERSION}, {"boost", BOOST_LIB_VERSION}}}};
    } else {
        out = run_spec(spec, flags);
    }
    std::string stem;
    if (flags.out)
        stem = *flags.out;
    else if (spec.is_object() && spec.contains("out") && spec["out"].is_string())
        stem = spec["out"].get<std::string>();
    else
        stem = (fs::path(path).parent_path() / fs::path(path).stem()).string();
    const std::string rfile = stem + ".report.json";
    {
        std::ofstream os(rfile, std::ios::binary);
        if (!os) {
            out.exit_code = 1;
            return out;
        }
        os << out.report.dump(2) << '\n';
    }
    out.written.push_back(rfile);
    if (out.report.contains("series")) {
        const auto files = emit_plot_data(out.report, stem);
        out.written.insert(out.written.end(), files.begin(), files.end());
    }
    return out;
}

}  // namespace gcilab::experiment
