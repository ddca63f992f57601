#include "gcilab/convex.hpp"

#include <array>
#include <cmath>

#include <boost/random/normal_distribution.hpp>

#include "gcilab/error.hpp"

namespace gcilab {

using convex::Node;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

ConvexSet make(std::size_t dim, auto body) {
    if (dim == 0 || dim > kMaxDim) throw Error(ErrorCode::DimensionError, "unsupported ambient dimension");
    return ConvexSet(std::make_shared<const Node>(Node{dim, std::move(body)}));
}

bool member(const Node& node, const double* x) {
    const std::size_t n = node.dim;
    return std::visit(
        overloaded{
            [&](const convex::Polytope& p) {
                for (std::size_t j = 0; j < p.normals.size(); ++j) {
                    const double* a = p.normals[j].data();
                    double s = 0.0;
                    for (std::size_t i = 0; i < n; ++i) s += a[i] * x[i];
                    if (s > p.offsets[j]) return false;
                }
                return true;
            },
            [&](const convex::Ellipsoid& e) {
                std::array<double, kMaxDim> d;
                for (std::size_t i = 0; i < n; ++i) d[i] = x[i] - e.center[i];
                double q = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < n; ++j) s += e.shape_inv(i, j) * d[j];
                    q += d[i] * s;
                }
                return q <= 1.0;
            },
            [&](const convex::Slab& s) {
                double t = 0.0;
                for (std::size_t i = 0; i < n; ++i) t += s.u[i] * x[i];
                return t >= s.lo && t <= s.hi;
            },
            [&](const convex::Product& p) {
                std::array<double, kMaxDim> c;
                const Matrix& w = p.complement.basis();
                for (std::size_t k = 0; k < w.cols(); ++k) {
                    double s = 0.0;
                    for (std::size_t i = 0; i < n; ++i) s += w(i, k) * x[i];
                    c[k] = s;
                }
                return p.base.contains_raw(c.data());
            },
            [&](const convex::Intersection& it) {
                for (const auto& part : it.parts)
                    if (!part.contains_raw(x)) return false;
                return true;
            },
            [&](const convex::Translate& t) {
                std::array<double, kMaxDim> y;
                for (std::size_t i = 0; i < n; ++i) y[i] = x[i] - t.shift[i];
                return t.inner.contains_raw(y.data());
            },
            [&](const convex::FullSpace&) { return true; },
        },
        node.body);
}

void require_dim(const Vector& v, std::size_t n, const char* what) {
    if (v.size() != n) throw Error(ErrorCode::DimensionError, std::string(what) + " has wrong dimension");
}

}  // namespace

ConvexSet::ConvexSet(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

std::size_t ConvexSet::dim() const { return node_ ? node_->dim : 0; }

bool ConvexSet::contains(const Vector& x) const {
    if (!node_) throw Error(ErrorCode::InvalidInput, "empty convex set handle");
    if (x.size() != node_->dim) throw Error(ErrorCode::DimensionError, "point dimension does not match set");
    return member(*node_, x.data());
}

bool ConvexSet::contains_raw(const double* x) const { return member(*node_, x); }

namespace convex {

ConvexSet polytope(std::vector<Vector> normals, Vector offsets) {
    if (normals.empty() || normals.size() != offsets.size())
        throw Error(ErrorCode::InvalidInput, "polytope needs matching normals and offsets");
    const std::size_t n = normals[0].size();
    for (const auto& a : normals) require_dim(a, n, "polytope normal");
    for (double b : offsets)
        if (!std::isfinite(b)) throw Error(ErrorCode::InvalidInput, "polytope offset must be finite");
    return make(n, Polytope{std::move(normals), std::move(offsets)});
}

ConvexSet box(const Vector& lo, const Vector& hi) {
    require_dim(hi, lo.size(), "box upper corner");
    std::vector<Vector> normals;
    Vector offsets;
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(lo[i] < hi[i])) throw Error(ErrorCode::InvalidInput, "box requires lo < hi");
        Vector e(lo.size(), 0.0);
        e[i] = 1.0;
        normals.push_back(e);
        offsets.push_back(hi[i]);
        e[i] = -1.0;
        normals.push_back(e);
        offsets.push_back(-lo[i]);
    }
    return polytope(std::move(normals), std::move(offsets));
}

ConvexSet ellipsoid(Vector center, const SymMatrix& shape) {
    require_dim(center, shape.n(), "ellipsoid center");
    SymMatrix inv = inverse_pd(shape);
    const std::size_t n = center.size();
    return make(n, Ellipsoid{std::move(center), shape, std::move(inv)});
}

ConvexSet ball(Vector center, double radius) {
    if (!(radius > 0.0)) throw Error(ErrorCode::InvalidInput, "ball radius must be positive");
    const std::size_t n = center.size();
    return ellipsoid(std::move(center), SymMatrix::scaled_identity(n, radius * radius));
}

ConvexSet slab(Vector u, double lo, double hi) {
    if (!(lo < hi)) throw Error(ErrorCode::InvalidInput, "slab requires lo < hi");
    if (std::fabs(norm(u) - 1.0) > 1e-12) throw Error(ErrorCode::InvalidInput, "slab direction must be a unit vector");
    const std::size_t n = u.size();
    return make(n, Slab{std::move(u), lo, hi});
}

ConvexSet full_space(std::size_t dim) { return make(dim, FullSpace{dim}); }

ConvexSet product_set(const ConvexSet& base, const Subspace& e) { return product_set(base, e, e.complement()); }

ConvexSet product_set(const ConvexSet& base, const Subspace& e, const Subspace& complement) {
    const std::size_t n = e.ambient_dim();
    if (complement.ambient_dim() != n || complement.dim() + e.dim() != n)
        throw Error(ErrorCode::DimensionError, "complement does not match the free subspace");
    if (e.contains(complement, 1e-10) && complement.dim() > 0)
        throw Error(ErrorCode::InvalidInput, "complement overlaps the free subspace");
    if (e.dim() == n) return full_space(n);
    if (base.dim() != complement.dim())
        throw Error(ErrorCode::DimensionError, "base dimension plus free dimension must equal ambient dimension");
    return make(n, Product{base, e, complement});
}

ConvexSet intersect(const ConvexSet& k1, const ConvexSet& k2) { return intersect(std::vector<ConvexSet>{k1, k2}); }

ConvexSet intersect(const std::vector<ConvexSet>& parts) {
    if (parts.empty()) throw Error(ErrorCode::InvalidInput, "intersection of nothing");
    const std::size_t n = parts[0].dim();
    for (const auto& p : parts)
        if (p.dim() != n) throw Error(ErrorCode::DimensionError, "intersection parts differ in dimension");
    return make(n, Intersection{parts});
}

ConvexSet translate(const ConvexSet& k, const Vector& a) {
    require_dim(a, k.dim(), "translation");
    return make(k.dim(), Translate{k, a});
}

ConvexSet linear_preimage(const ConvexSet& k, const Matrix& m) {
    const std::size_t n = k.dim();
    if (m.rows() != n || m.cols() != n) throw Error(ErrorCode::DimensionError, "preimage map must be square");
    return std::visit(
        overloaded{
            [&](const Polytope& p) {
                const Matrix mt = m.transpose();
                std::vector<Vector> normals;
                for (const auto& a : p.normals) normals.push_back(mt * a);
                return polytope(std::move(normals), p.offsets);
            },
            [&](const Ellipsoid& e) {
                // {x : (Mx − c)ᵀS⁻¹(Mx − c) ≤ 1} has shape M⁻¹ S M⁻ᵀ and center M⁻¹c
                const SymMatrix mtm = congruence(m, e.shape_inv);
                const SymMatrix shape = inverse_pd(mtm);
                const Vector center = shape.apply(m.transpose() * e.shape_inv.apply(e.center));
                return ellipsoid(center, shape);
            },
            [&](const Slab& s) {
                Vector v = m.transpose() * s.u;
                const double len = norm(v);
                if (len == 0.0) throw Error(ErrorCode::InvalidInput, "singular preimage map");
                return slab(scaled(v, 1.0 / len), s.lo / len, s.hi / len);
            },
            [&](const Intersection& it) {
                std::vector<ConvexSet> parts;
                for (const auto& p : it.parts) parts.push_back(linear_preimage(p, m));
                return intersect(parts);
            },
            [&](const Translate& t) {
                // M⁻¹(K + a) = M⁻¹K + M⁻¹a; solve via normal equations of the square map
                const SymMatrix mtm = congruence(m, SymMatrix::identity(n));
                const Vector shift = inverse_pd(mtm).apply(m.transpose() * t.shift);
                return translate(linear_preimage(t.inner, m), shift);
            },
            [&](const FullSpace& f) { return full_space(f.dim); },
            [&](const Product&) -> ConvexSet {
                throw Error(ErrorCode::InvalidInput, "linear preimage of a product set is not supported");
            },
        },
        k.node().body);
}

bool contains(const ConvexSet& k, const Vector& x) { return k.contains(x); }

void check_origin_interior(const ConvexSet& k) {
    const std::size_t n = k.dim();
    Vector p(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (double s : {1e-6, -1e-6}) {
            p[i] = s;
            if (!k.contains(p)) throw Error(ErrorCode::OriginNotInterior, "origin is not an interior point");
            p[i] = 0.0;
        }
}

double minkowski_gauge(const ConvexSet& k, const Vector& x, double tol) {
    if (x.size() != k.dim()) throw Error(ErrorCode::DimensionError, "point dimension does not match set");
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidTolerance, "tolerance must be positive");
    check_origin_interior(k);
    if (norm(x) == 0.0) return 0.0;
    auto inside = [&](double r) { return k.contains(scaled(x, 1.0 / r)); };
    // x ∈ rK is monotone in r; bracket (lo outside, hi inside)
    double hi = 1.0;
    while (!inside(hi)) {
        hi *= 2.0;
        if (hi > kGaugeCap) throw Error(ErrorCode::OriginNotInterior, "ray never enters the set");
    }
    double lo = hi / 2.0;
    while (inside(lo)) {
        lo /= 2.0;
        if (lo < 1.0 / kGaugeCap) return 0.0;
    }
    if (lo * 2.0 < hi) hi = lo * 2.0;
    for (int it = 0; it < 400 && hi - lo > std::min(tol, 1e-9 * hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (inside(mid))
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

std::optional<Vector> chebyshev_like_center(const Polytope& p, std::size_t n) {
    Vector x(n, 0.0);
    auto depth = [&](const Vector& y, std::size_t* arg) {
        double best = 1e300;
        for (std::size_t j = 0; j < p.normals.size(); ++j) {
            const double d = (p.offsets[j] - dot(p.normals[j], y)) / norm(p.normals[j]);
            if (d < best) {
                best = d;
                if (arg) *arg = j;
            }
        }
        return best;
    };
    double step = 1.0;
    Vector best_x = x;
    double best_d = depth(x, nullptr);
    for (int it = 0; it < 4000; ++it) {
        std::size_t j = 0;
        depth(x, &j);
        const Vector& a = p.normals[j];
        x = axpy(-step / norm(a), a, x);
        const double d = depth(x, nullptr);
        if (d > best_d) {
            best_d = d;
            best_x = x;
        }
        step *= 0.998;
    }
    if (best_d > 0.0) return best_x;
    return std::nullopt;
}

}  // namespace

std::optional<Vector> interior_hint(const ConvexSet& k) {
    const std::size_t n = k.dim();
    return std::visit(
        overloaded{
            [&](const Polytope& p) -> std::optional<Vector> {
                bool zero_ok = true;
                for (double b : p.offsets) zero_ok = zero_ok && b > 0.0;
                if (zero_ok) return Vector(n, 0.0);
                return chebyshev_like_center(p, n);
            },
            [&](const Ellipsoid& e) -> std::optional<Vector> { return e.center; },
            [&](const Slab& s) -> std::optional<Vector> { return scaled(s.u, 0.5 * (s.lo + s.hi)); },
            [&](const Product& p) -> std::optional<Vector> {
                auto h = interior_hint(p.base);
                if (!h) return std::nullopt;
                return p.complement.embed(*h);
            },
            [&](const Intersection& it) -> std::optional<Vector> {
                std::vector<Vector> candidates{Vector(n, 0.0)};
                Vector mean(n, 0.0);
                std::size_t count = 0;
                for (const auto& part : it.parts)
                    if (auto h = interior_hint(part)) {
                        candidates.push_back(*h);
                        mean = axpy(1.0, *h, mean);
                        ++count;
                    }
                if (count > 0) candidates.push_back(scaled(mean, 1.0 / count));
                for (const auto& c : candidates)
                    if (k.contains(c)) return c;
                return std::nullopt;
            },
            [&](const Translate& t) -> std::optional<Vector> {
                auto h = interior_hint(t.inner);
                if (!h) return std::nullopt;
                return axpy(1.0, t.shift, *h);
            },
            [&](const FullSpace&) -> std::optional<Vector> { return Vector(n, 0.0); },
        },
        k.node().body);
}

ConvexSet random_polytope(std::size_t n, std::mt19937_64& rng, double max_radius) {
    boost::random::normal_distribution<double> gauss;
    auto unit = [&]() {
        Vector v(n);
        double len = 0.0;
        while (len < 1e-12) {
            for (double& x : v) x = gauss(rng);
            len = norm(v);
        }
        return scaled(v, 1.0 / len);
    };
    const std::size_t m = 2 * n + 4;
    for (;;) {
        std::vector<Vector> normals;
        for (std::size_t j = 0; j < m; ++j) normals.push_back(unit());
        bool bounded = true;
        for (int probe = 0; probe < 4000 && bounded; ++probe) {
            const Vector d = unit();
            double h = -1.0;
            for (const auto& a : normals) h = std::max(h, dot(a, d));
            bounded = h * max_radius >= 1.0;
        }
        if (bounded) return polytope(std::move(normals), Vector(m, 1.0));
    }
}

}  // namespace convex
}  // namespace gcilab
