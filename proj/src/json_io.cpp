#include "gcilab/json_io.hpp"

#include <cmath>
#include <random>

#include "gcilab/error.hpp"

namespace gcilab::json_io {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw Error(ErrorCode::SchemaError, path + ": " + what);
}

const json& field(const json& j, const std::string& path, const char* key) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing required field");
    return *it;
}

std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

std::vector<Vector> read_vectors(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of vectors");
    std::vector<Vector> out;
    std::size_t n = 0;
    for (std::size_t i = 0; i < j.size(); ++i) {
        out.push_back(read_vector(j[i], idx(path, i), n));
        n = out.back().size();
    }
    return out;
}

}  // namespace

double read_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "expected a finite number");
    return v;
}

std::uint64_t read_uint(const json& j, const std::string& path) {
    if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() && j.get<std::int64_t>() < 0))
        fail(path, "expected a non-negative integer");
    return j.get<std::uint64_t>();
}

Vector read_vector(const json& j, const std::string& path, std::size_t expected) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    if (expected > 0 && j.size() != expected) fail(path, "expected length " + std::to_string(expected));
    if (j.empty()) fail(path, "expected a non-empty array");
    Vector v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(read_number(j[i], idx(path, i)));
    return v;
}

std::vector<Vector> read_rows(const json& j, const std::string& path) {
    if (j.empty()) fail(path, "expected a non-empty array of rows");
    return read_vectors(j, path);
}

SymMatrix read_sym(const json& j, const std::string& path) {
    if (j.is_array()) {
        const auto rows = read_rows(j, path);
        if (rows.size() != rows.front().size()) fail(path, "expected a square matrix");
        try {
            return SymMatrix::from_rows(rows);
        } catch (const Error& e) {
            fail(path, e.what());
        }
    }
    const std::size_t n = read_uint(field(j, path, "n"), path + ".n");
    if (n == 0) fail(path + ".n", "must be positive");
    const Vector data = read_vector(field(j, path, "data"), path + ".data", n * n);
    std::vector<Vector> rows(n, Vector(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) rows[i][k] = data[i * n + k];
    try {
        return SymMatrix::from_rows(rows);
    } catch (const Error& e) {
        fail(path, e.what());
    }
}

Matrix read_matrix(const json& j, const std::string& path) {
    if (j.is_array()) {
        const auto rows = read_rows(j, path);
        Matrix m(rows.size(), rows.front().size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
        return m;
    }
    const std::size_t r = read_uint(field(j, path, "rows"), path + ".rows");
    const std::size_t c = read_uint(field(j, path, "cols"), path + ".cols");
    if (r == 0 || c == 0) fail(path, "rows and cols must be positive");
    const Vector data = read_vector(field(j, path, "data"), path + ".data", r * c);
    Matrix m(r, c);
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t k = 0; k < c; ++k) m(i, k) = data[i * c + k];
    return m;
}

ConvexSet read_set(const json& j, const std::string& path) {
    const json& t = field(j, path, "type");
    if (!t.is_string()) fail(path + ".type", "expected a string");
    const std::string type = t.get<std::string>();
    try {
        if (type == "polytope") {
            auto normals = read_vectors(field(j, path, "normals"), path + ".normals");
            auto offsets = read_vector(field(j, path, "offsets"), path + ".offsets", normals.size());
            return convex::polytope(std::move(normals), std::move(offsets));
        }
        if (type == "box") {
            const Vector lo = read_vector(field(j, path, "lo"), path + ".lo");
            const Vector hi = read_vector(field(j, path, "hi"), path + ".hi", lo.size());
            return convex::box(lo, hi);
        }
        if (type == "ellipsoid") {
            Vector c = read_vector(field(j, path, "center"), path + ".center");
            return convex::ellipsoid(std::move(c), read_sym(field(j, path, "shape"), path + ".shape"));
        }
        if (type == "ball") {
            Vector c = read_vector(field(j, path, "center"), path + ".center");
            return convex::ball(std::move(c), read_number(field(j, path, "radius"), path + ".radius"));
        }
        if (type == "slab") {
            Vector u = read_vector(field(j, path, "u"), path + ".u");
            return convex::slab(std::move(u), read_number(field(j, path, "lo"), path + ".lo"),
                                read_number(field(j, path, "hi"), path + ".hi"));
        }
        if (type == "full") return convex::full_space(read_uint(field(j, path, "dim"), path + ".dim"));
        if (type == "product") {
            const std::size_t n = read_uint(field(j, path, "dim"), path + ".dim");
            const json& fj = field(j, path, "free");
            const auto free = fj.empty() ? std::vector<Vector>{} : read_vectors(fj, path + ".free");
            const Subspace e = Subspace::span(n, free);
            const ConvexSet base = read_set(field(j, path, "base"), path + ".base");
            if (j.contains("complement")) {
                const auto comp = read_vectors(j["complement"], path + ".complement");
                return convex::product_set(base, e, Subspace::span(n, comp));
            }
            return convex::product_set(base, e);
        }
        if (type == "intersection") {
            const json& parts = field(j, path, "parts");
            if (!parts.is_array() || parts.empty()) fail(path + ".parts", "expected a non-empty array");
            std::vector<ConvexSet> ks;
            for (std::size_t i = 0; i < parts.size(); ++i) ks.push_back(read_set(parts[i], idx(path + ".parts", i)));
            return convex::intersect(ks);
        }
        if (type == "translate") {
            const ConvexSet inner = read_set(field(j, path, "inner"), path + ".inner");
            return convex::translate(inner, read_vector(field(j, path, "shift"), path + ".shift", inner.dim()));
        }
        if (type == "random_polytope") {
            const std::size_t n = read_uint(field(j, path, "dim"), path + ".dim");
            std::mt19937_64 rng(read_uint(field(j, path, "seed"), path + ".seed"));
            const double r = j.contains("max_radius") ? read_number(j["max_radius"], path + ".max_radius") : 5.0;
            return convex::random_polytope(n, rng, r);
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::SchemaError) throw;
        fail(path, e.what());
    }
    fail(path + ".type", "unknown set type '" + type + "'");
}

BLDatum read_datum(const json& j, const std::string& path) {
    BLDatum d;
    d.big_n = read_uint(field(j, path, "N"), path + ".N");
    const json& bs = field(j, path, "B");
    if (!bs.is_array() || bs.empty()) fail(path + ".B", "expected a non-empty array of matrices");
    for (std::size_t i = 0; i < bs.size(); ++i) d.maps.push_back(read_matrix(bs[i], idx(path + ".B", i)));
    d.weights = read_vector(field(j, path, "c"), path + ".c", d.maps.size());
    d.q = read_sym(field(j, path, "Q"), path + ".Q");
    try {
        d.validate();
    } catch (const Error& e) {
        fail(path, e.what());
    }
    return d;
}

ConstraintBand read_band(const json& j, const std::string& path, const BLDatum& d) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "identity") return ConstraintBand::identity(d);
        if (s == "zero") return ConstraintBand::zero(d);
        fail(path, "unknown band preset '" + s + "'");
    }
    const json& lower = field(j, path, "lower");
    if (!lower.is_array() || lower.size() != d.m()) fail(path + ".lower", "expected one matrix per map");
    ConstraintBand b;
    for (std::size_t i = 0; i < lower.size(); ++i) b.lower.push_back(read_sym(lower[i], idx(path + ".lower", i)));
    b.upper.assign(d.m(), std::nullopt);
    if (j.contains("upper")) {
        const json& upper = j["upper"];
        if (!upper.is_array() || upper.size() != d.m()) fail(path + ".upper", "expected one entry per map");
        for (std::size_t i = 0; i < upper.size(); ++i)
            if (!upper[i].is_null()) b.upper[i] = read_sym(upper[i], idx(path + ".upper", i));
    }
    return b;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const Vector& v) {
    json a = json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

json to_json(const SymMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.n(); ++i) {
        json r = json::array();
        for (std::size_t k = 0; k < m.n(); ++k) r.push_back(number(m(i, k)));
        rows.push_back(r);
    }
    return rows;
}

json to_json(const Matrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) r.push_back(number(m(i, k)));
        rows.push_back(r);
    }
    return rows;
}

json to_json(const Subspace& s) {
    json basis = json::array();
    for (std::size_t k = 0; k < s.dim(); ++k) basis.push_back(to_json(s.vector(k)));
    return {{"ambient_dim", s.ambient_dim()}, {"dim", s.dim()}, {"basis", basis}};
}

json to_json(const ConvexSet& k) {
    return std::visit(
        overloaded{
            [&](const convex::Polytope& p) -> json {
                json normals = json::array();
                for (const auto& a : p.normals) normals.push_back(to_json(a));
                return {{"type", "polytope"}, {"normals", normals}, {"offsets", to_json(p.offsets)}};
            },
            [&](const convex::Ellipsoid& e) -> json {
                return {{"type", "ellipsoid"}, {"center", to_json(e.center)}, {"shape", to_json(e.shape)}};
            },
            [&](const convex::Slab& s) -> json {
                return {{"type", "slab"}, {"u", to_json(s.u)}, {"lo", number(s.lo)}, {"hi", number(s.hi)}};
            },
            [&](const convex::Product& p) -> json {
                json free = json::array(), comp = json::array();
                for (std::size_t i = 0; i < p.free.dim(); ++i) free.push_back(to_json(p.free.vector(i)));
                for (std::size_t i = 0; i < p.complement.dim(); ++i) comp.push_back(to_json(p.complement.vector(i)));
                return {{"type", "product"}, {"dim", k.dim()}, {"free", free}, {"complement", comp},
                        {"base", to_json(p.base)}};
            },
            [&](const convex::Intersection& it) -> json {
                json parts = json::array();
                for (const auto& q : it.parts) parts.push_back(to_json(q));
                return {{"type", "intersection"}, {"parts", parts}};
            },
            [&](const convex::Translate& t) -> json {
                return {{"type", "translate"}, {"inner", to_json(t.inner)}, {"shift", to_json(t.shift)}};
            },
            [&](const convex::FullSpace& f) -> json { return {{"type", "full"}, {"dim", f.dim}}; },
        },
        k.node().body);
}

json to_json(const BLDatum& d) {
    json bs = json::array();
    for (const auto& b : d.maps) bs.push_back(to_json(b));
    return {{"N", d.big_n}, {"B", bs}, {"c", to_json(d.weights)}, {"Q", to_json(d.q)}};
}

json to_json(const Estimate& e) {
    return {{"value", number(e.value)}, {"stderr", number(e.std_error)}, {"n_samples", e.n_samples},
            {"method", std::string(to_string(e.method))}};
}

json to_json(const RestrictedGaussianStats& s) {
    json bar = json::array();
    for (const auto& b : s.barycenter) bar.push_back(to_json(b));
    json out = {{"mass", to_json(s.mass)}, {"barycenter", bar}};
    if (s.covariance.n() > 0) {
        out["covariance"] = to_json(s.covariance);
        out["covariance_stderr"] = to_json(s.covariance_stderr);
    }
    return out;
}

json to_json(const CenterResult& r) {
    return {{"b0", to_json(r.b0)},
            {"centered", to_json(r.centered)},
            {"residual", to_json(r.residual)},
            {"residual_stderr", to_json(r.residual_stderr)},
            {"residual_norm", number(r.residual_norm)},
            {"threshold", number(r.threshold)},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"warnings", r.warnings}};
}

json to_json(const GciReport& r) {
    json rhs = json::array();
    for (const auto& e : r.rhs_factors) rhs.push_back(to_json(e));
    json bars = json::array();
    for (const auto& b : r.barycenters) bars.push_back(to_json(b));
    return {{"lhs", to_json(r.lhs)},
            {"rhs_factors", rhs},
            {"rhs_product", number(r.rhs_product)},
            {"ratio", number(r.ratio)},
            {"difference", number(r.difference)},
            {"combined_stderr", number(r.combined_stderr)},
            {"margin_sigmas", number(r.margin_sigmas)},
            {"verdict", std::string(to_string(r.verdict))},
            {"ordering_holds", r.ordering_holds},
            {"barycenters", bars},
            {"warnings", r.warnings}};
}

json to_json(const EqualityStructure& r) {
    return {{"e", to_json(r.e)},
            {"eig_gap", r.eig_gap ? number(*r.eig_gap) : json(nullptr)},
            {"eig_tolerance", number(r.eig_tolerance)},
            {"eigenvalues", to_json(r.eigenvalues)},
            {"product_residual", number(r.product_residual)},
            {"residual_k1", number(r.residual_1)},
            {"residual_k2", number(r.residual_2)},
            {"barycenter_k1", to_json(r.barycenter_1)},
            {"barycenter_k2", to_json(r.barycenter_2)},
            {"verdict", std::string(to_string(r.verdict))}};
}

json to_json(const TranslationResult& r) {
    return {{"a1", to_json(r.a1)},
            {"a2", to_json(r.a2)},
            {"phi", number(r.phi)},
            {"phi_initial", number(r.phi_initial)},
            {"phi_centered", number(r.phi_centered)},
            {"stage", r.stage},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"warnings", r.warnings}};
}

json to_json(const CounterexampleResult& r) {
    return {{"r2", number(r.r2)},          {"bar_h1", number(r.bar_1)}, {"bar_h2", number(r.bar_2)},
            {"gamma_a1", number(r.gamma_a1)}, {"value", number(r.lhs)},  {"bound", number(r.bound)},
            {"violated", r.violated}};
}

json to_json(const GaussianBLResult& r) {
    json out = {{"classification", std::string(to_string(r.classification))}};
    if (r.value.is_infinite())
        out["value"] = "+inf";
    else
        out["value"] = number(r.value.value());
    out["log_value"] = number(r.log_value);
    json argmin = json::array();
    for (const auto& a : r.argmin) argmin.push_back(to_json(a));
    out["argmin"] = argmin;
    out["stationarity_residual"] = number(r.stationarity_residual);
    out["converged"] = r.converged;
    out["winning_start"] = r.winning_start;
    out["iterations"] = r.iterations;
    out["start_log_values"] = to_json(r.start_log_values);
    out["witness"] = r.witness.empty() ? json(nullptr) : to_json(r.witness);
    if (r.classification == Classification::zero_constant) out["zero_index"] = r.zero_index;
    return out;
}

json to_json(const FlowReport& r) {
    json steps = json::array();
    for (const auto& s : r.steps) {
        steps.push_back({{"k", s.k},
                         {"bl_value", number(s.bl_value)},
                         {"l1_to_gaussian", number(s.l1_to_gaussian)},
                         {"l1_to_gaussian_2", number(s.l1_to_gaussian_2)},
                         {"mass", number(s.mass)},
                         {"mass_2", number(s.mass_2)},
                         {"barycenter", number(s.barycenter)},
                         {"barycenter_2", number(s.barycenter_2)},
                         {"one_step_gap", s.one_step_gap ? number(*s.one_step_gap) : json(nullptr)}});
    }
    return {{"constant", number(r.constant)},
            {"slack", number(r.slack)},
            {"steps", steps},
            {"one_step_holds", r.one_step_holds},
            {"warnings", r.warnings}};
}

json to_json(const FradeliziResult& r) {
    return {{"ok", r.ok},
            {"f0", number(r.f0)},
            {"fmax", number(r.fmax)},
            {"ratio", number(r.ratio)},
            {"bound", number(r.bound)},
            {"location", number(r.location)}};
}

}  // namespace gcilab::json_io
