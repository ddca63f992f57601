// Deterministic Gaussian integrals over a convex set for n ≤ 2.
//
// Work happens in whitened coordinates z = L⁻¹x. In 1-D the set is an
// interval whose ends are found by bisection. In 2-D the set is written in
// polar form around an interior point p, z = p + r·u(θ), and the radial
// integrals of r^j·exp(−|p + r u|²/2) are done in closed form, leaving an
// angular integral done by adaptive Gauss-Kronrod between the corner angles.
// The Kronrod/Gauss disagreement is the error surrogate.
#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <type_traits>
#include <variant>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gcilab/convex.hpp"
#include "gcilab/error.hpp"
#include "gcilab/gaussmc.hpp"
#include "gcilab/normal.hpp"

namespace gcilab::gaussmc {

namespace {

constexpr double kFar = 40.0;

struct Moments {
    double m0 = 0.0;
    Vector m1;
    SymMatrix m2;
    explicit Moments(std::size_t n) : m1(n, 0.0), m2(n) {}
};

// ∫_a^b w^k e^{−w²/2} dw for k = 0..3, b may be +inf.
std::array<double, 4> power_gauss(double a, double b) {
    const double ea = std::exp(-0.5 * a * a);
    const double eb = std::isinf(b) ? 0.0 : std::exp(-0.5 * b * b);
    const double bb = std::isinf(b) ? 0.0 : b;
    std::array<double, 4> m{};
    m[0] = std::sqrt(2.0 * std::numbers::pi) * normal::interval(a, b);
    m[1] = ea - eb;
    m[2] = a * ea - bb * eb + m[0];
    m[3] = (a * a + 2.0) * ea - (std::isinf(b) ? 0.0 : (bb * bb + 2.0) * eb);
    return m;
}

// ∫_0^ρ r^j e^{−(r+s)²/2} dr for j = 1..3
std::array<double, 3> radial(double rho, double s) {
    const auto m = power_gauss(s, std::isinf(rho) ? rho : rho + s);
    std::array<double, 3> j{};
    j[0] = m[1] - s * m[0];
    j[1] = m[2] - 2.0 * s * m[1] + s * s * m[0];
    j[2] = m[3] - 3.0 * s * m[2] + 3.0 * s * s * m[1] - s * s * s * m[0];
    return j;
}

class WhitenedSet {
public:
    WhitenedSet(const ConvexSet& k, const GaussianSpec& spec) : k_(k), spec_(spec) {}
    bool operator()(const double* z) const {
        std::array<double, kMaxDim> x;
        spec_.map(z, x.data());
        return k_.contains_raw(x.data());
    }

private:
    const ConvexSet& k_;
    const GaussianSpec& spec_;
};

// boundary crossing along p + r·u, r ≥ 0, with p inside
double boundary_distance(const WhitenedSet& inside, const Vector& p, const Vector& u) {
    const std::size_t n = p.size();
    std::array<double, 2> q{};
    auto at = [&](double r) {
        for (std::size_t i = 0; i < n; ++i) q[i] = p[i] + r * u[i];
        return inside(q.data());
    };
    const double cap = kFar + norm(p);
    if (at(cap)) return INFINITY;
    double lo = 0.0, hi = cap;
    while (hi - lo > 1e-13 * (1.0 + hi)) {
        const double mid = 0.5 * (lo + hi);
        if (at(mid))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::optional<Vector> find_interior(const ConvexSet& k, const GaussianSpec& spec, const WhitenedSet& inside) {
    const std::size_t n = spec.dim();
    if (auto h = convex::interior_hint(k)) {
        const Vector z = forward_solve(spec.chol(), *h);
        if (inside(z.data())) return z;
    }
    // scan a grid; the centroid of grid members of a convex set is a member
    const int m = n == 1 ? 4097 : 257;
    const double w = 9.0;
    Vector sum(n, 0.0);
    std::size_t count = 0;
    std::array<double, 2> z{};
    if (n == 1) {
        for (int i = 0; i < m; ++i) {
            z[0] = -w + 2.0 * w * i / (m - 1);
            if (inside(z.data())) {
                sum[0] += z[0];
                ++count;
            }
        }
    } else {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                z[0] = -w + 2.0 * w * i / (m - 1);
                z[1] = -w + 2.0 * w * j / (m - 1);
                if (inside(z.data())) {
                    sum[0] += z[0];
                    sum[1] += z[1];
                    ++count;
                }
            }
    }
    if (count == 0) return std::nullopt;
    Vector c = scaled(sum, 1.0 / static_cast<double>(count));
    if (inside(c.data())) return c;
    return std::nullopt;
}

void integrate_1d(const WhitenedSet& inside, const Vector& p, Moments& out) {
    const double hi = boundary_distance(inside, p, Vector{1.0});
    const double lo = boundary_distance(inside, p, Vector{-1.0});
    const double a = p[0] - lo, b = p[0] + hi;  // may be ±inf
    const double pa = std::isinf(a) ? 0.0 : normal::pdf(a);
    const double pb = std::isinf(b) ? 0.0 : normal::pdf(b);
    out.m0 = normal::interval(a, b);
    out.m1[0] = pa - pb;
    out.m2.set(0, 0, out.m0 + (std::isinf(a) ? 0.0 : a * pa) - (std::isinf(b) ? 0.0 : b * pb));
}

// A set is cut into primitives whose radial function is smooth: halfspaces
// (closed form) and everything else (bisection). The radial function of the
// set is the minimum over primitives; its kinks sit where the active
// primitive changes, and those angles become panel breakpoints.
struct Piece {
    bool halfspace = false;
    Vector normal;  // ⟨normal, x⟩ ≤ offset
    double offset = 0.0;
    ConvexSet generic;
};

void decompose(const ConvexSet& k, std::vector<Piece>& out) {
    const std::size_t first = out.size();
    auto half = [&](Vector nrm, double off) { out.push_back({true, std::move(nrm), off, {}}); };
    std::visit(
        [&](const auto& body) {
            using T = std::decay_t<decltype(body)>;
            if constexpr (std::is_same_v<T, convex::Polytope>) {
                for (std::size_t j = 0; j < body.normals.size(); ++j) half(body.normals[j], body.offsets[j]);
            } else if constexpr (std::is_same_v<T, convex::Slab>) {
                half(body.u, body.hi);
                half(scaled(body.u, -1.0), -body.lo);
            } else if constexpr (std::is_same_v<T, convex::Intersection>) {
                for (const auto& part : body.parts) decompose(part, out);
            } else if constexpr (std::is_same_v<T, convex::Translate>) {
                decompose(body.inner, out);
                for (std::size_t i = first; i < out.size(); ++i) {
                    if (out[i].halfspace)
                        out[i].offset += dot(out[i].normal, body.shift);
                    else
                        out[i].generic = convex::translate(out[i].generic, body.shift);
                }
            } else if constexpr (std::is_same_v<T, convex::Product>) {
                decompose(body.base, out);
                const Matrix& w = body.complement.basis();
                for (std::size_t i = first; i < out.size(); ++i) {
                    if (out[i].halfspace)
                        out[i].normal = w * out[i].normal;
                    else
                        out[i].generic = convex::product_set(out[i].generic, body.free, body.complement);
                }
            } else if constexpr (std::is_same_v<T, convex::FullSpace>) {
            } else {
                out.push_back({false, {}, 0.0, k});
            }
        },
        k.node().body);
}

class Radial {
public:
    Radial(const ConvexSet& k, const GaussianSpec& spec, Vector p) : spec_(spec), p_(std::move(p)) {
        std::vector<Piece> raw;
        decompose(k, raw);
        for (auto& piece : raw) {
            if (piece.halfspace) {
                // ⟨n, L z⟩ ≤ b  ⇔  ⟨Lᵀn, z⟩ ≤ b; slack measured from p
                const Vector nz = spec.chol().transpose() * piece.normal;
                halfspaces_.push_back({nz, piece.offset - dot(nz, p_)});
            } else {
                generic_.push_back(std::move(piece.generic));
            }
        }
    }

    // distance to the boundary along u and the index of the active primitive (-1 if unbounded)
    double operator()(const Vector& u, int* which) const {
        double best = INFINITY;
        int arg = -1;
        for (std::size_t j = 0; j < halfspaces_.size(); ++j) {
            const double d = dot(halfspaces_[j].first, u);
            if (d > 0.0) {
                const double r = std::max(0.0, halfspaces_[j].second) / d;
                if (r < best) {
                    best = r;
                    arg = static_cast<int>(j);
                }
            }
        }
        for (std::size_t j = 0; j < generic_.size(); ++j) {
            const WhitenedSet inside(generic_[j], spec_);
            const double r = boundary_distance(inside, p_, u);
            if (r < best) {
                best = r;
                arg = static_cast<int>(halfspaces_.size() + j);
            }
        }
        if (which) *which = arg;
        return best;
    }
    int active(double theta) const {
        int w;
        (*this)(Vector{std::cos(theta), std::sin(theta)}, &w);
        return w;
    }
    std::size_t pieces() const { return halfspaces_.size() + generic_.size(); }

private:
    const GaussianSpec& spec_;
    Vector p_;
    std::vector<std::pair<Vector, double>> halfspaces_;
    std::vector<ConvexSet> generic_;
};

std::vector<double> breakpoints(const Radial& radial, std::size_t base_panels) {
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> cuts;
    for (std::size_t i = 0; i <= base_panels; ++i) cuts.push_back(two_pi * static_cast<double>(i) / base_panels);
    if (radial.pieces() > 1) {
        const std::size_t scan = 2048;
        std::vector<int> act(scan + 1);
        for (std::size_t i = 0; i <= scan; ++i) act[i] = radial.active(two_pi * static_cast<double>(i) / scan);
        for (std::size_t i = 0; i < scan; ++i) {
            double lo = two_pi * static_cast<double>(i) / scan;
            const double end = two_pi * static_cast<double>(i + 1) / scan;
            int cur = act[i];
            // walk through every switch inside the scan cell
            for (int guard = 0; guard < 8 && cur != act[i + 1]; ++guard) {
                double a = lo, b = end;
                for (int it = 0; it < 64 && b - a > 1e-15; ++it) {
                    const double mid = 0.5 * (a + b);
                    if (radial.active(mid) == cur)
                        a = mid;
                    else
                        b = mid;
                }
                cuts.push_back(b);
                lo = b;
                cur = radial.active(b);
            }
        }
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> out;
    for (double c : cuts)
        if (out.empty() || c - out.back() > 1e-13) out.push_back(c);
    if (out.back() < two_pi) out.back() = two_pi;
    return out;
}

void add_direction(const Vector& p, const Vector& u, double rho, Moments& out) {
    const double s = dot(p, u);
    const double g = std::exp(-0.5 * (dot(p, p) - s * s)) / (2.0 * std::numbers::pi);
    const auto j = radial(rho, s);
    out.m0 += g * j[0];
    for (std::size_t a = 0; a < 2; ++a) {
        out.m1[a] += g * (p[a] * j[0] + u[a] * j[1]);
        for (std::size_t b = 0; b <= a; ++b)
            out.m2.add(a, b, g * (p[a] * p[b] * j[0] + (p[a] * u[b] + u[a] * p[b]) * j[1] + u[a] * u[b] * j[2]));
    }
}

double moment_gap(const Moments& x, const Moments& y) {
    double d = std::fabs(x.m0 - y.m0);
    for (std::size_t a = 0; a < 2; ++a) {
        d = std::max(d, std::fabs(x.m1[a] - y.m1[a]));
        for (std::size_t b = 0; b <= a; ++b) d = std::max(d, std::fabs(x.m2(a, b) - y.m2(a, b)));
    }
    return d;
}

void accumulate(Moments& into, const Moments& x, double w = 1.0) {
    into.m0 += w * x.m0;
    for (std::size_t a = 0; a < 2; ++a) {
        into.m1[a] += w * x.m1[a];
        for (std::size_t b = 0; b <= a; ++b) into.m2.add(a, b, w * x.m2(a, b));
    }
}

struct Adaptive {
    const Radial& rho;
    const Vector& p;
    Moments kronrod{2}, gauss{2};
    std::size_t evaluations = 0;

    // Kronrod 15 / Gauss 7 on [a, b]; split until the rules agree and one primitive is active throughout
    void panel(double a, double b, int depth) {
        using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
        using G = boost::math::quadrature::gauss<double, 7>;
        const auto& x = GK::abscissa();
        const auto& wk = GK::weights();
        const auto& wg = G::weights();
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        Moments k(2), g(2);
        bool mixed = false;
        int first = -2;
        for (std::size_t i = 0; i < x.size(); ++i) {
            for (int sgn : {1, -1}) {
                if (i == 0 && sgn < 0) continue;
                const double theta = c + sgn * h * x[i];
                const Vector u{std::cos(theta), std::sin(theta)};
                int which;
                const double r = rho(u, &which);
                if (first == -2) first = which;
                mixed = mixed || which != first;
                Moments one(2);
                add_direction(p, u, r, one);
                ++evaluations;
                accumulate(k, one, h * wk[i]);
                if (i % 2 == 0) accumulate(g, one, h * wg[i / 2]);
            }
        }
        const double tol = kPanelTol * (b - a) / (2.0 * std::numbers::pi);
        if (depth >= kMaxDepth || (!mixed && moment_gap(k, g) <= tol)) {
            accumulate(kronrod, k);
            accumulate(gauss, g);
            return;
        }
        panel(a, c, depth + 1);
        panel(c, b, depth + 1);
    }

    static constexpr double kPanelTol = 1e-13;
    static constexpr int kMaxDepth = 30;
};
}  // namespace

RestrictedGaussianStats restricted_stats_quadrature(const ConvexSet& k, const GaussianSpec& spec, bool need_moments) {
    const std::size_t n = spec.dim();
    if (k.dim() != n) throw Error(ErrorCode::DimensionError, "set and covariance disagree in dimension");
    if (n > 2) throw Error(ErrorCode::InvalidParameter, "quadrature is only available for n <= 2");
    const WhitenedSet inside(k, spec);

    RestrictedGaussianStats out;
    out.mass = {0.0, 0.0, kQuadratureNodes, Method::quadrature};
    const auto p = find_interior(k, spec, inside);

    Moments full(n), half(n);
    if (p) {
        if (n == 1) {
            integrate_1d(inside, *p, full);
            half = full;
        } else {
            const Radial rho(k, spec, *p);
            Adaptive ad{rho, *p};
            const auto cuts = breakpoints(rho, 16);
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i) ad.panel(cuts[i], cuts[i + 1], 0);
            full = ad.kronrod;
            half = ad.gauss;
            out.mass.n_samples = ad.evaluations;
        }
    }
    const double floor_err = 1e-13;
    out.mass.value = std::clamp(full.m0, 0.0, 1.0);
    out.mass.std_error = std::fabs(full.m0 - half.m0) + floor_err;
    if (!need_moments) return out;
    if (!(full.m0 > 1e-14)) throw Error(ErrorCode::MassTooSmall, "set has negligible Gaussian mass");

    // whitened mean / covariance, then map back through L
    auto finish = [&](const Moments& mo, Vector& mean, SymMatrix& cov) {
        mean = scaled(mo.m1, 1.0 / mo.m0);
        cov = SymMatrix(n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b <= a; ++b) cov.set(a, b, mo.m2(a, b) / mo.m0 - mean[a] * mean[b]);
        mean = spec.chol() * mean;
        cov = congruence_t(spec.chol(), cov);
    };
    Vector mf, mh;
    SymMatrix cf, ch;
    finish(full, mf, cf);
    finish(half, mh, ch);
    for (std::size_t a = 0; a < n; ++a)
        out.barycenter.push_back({mf[a], std::fabs(mf[a] - mh[a]) + floor_err, out.mass.n_samples, Method::quadrature});
    out.covariance = cf;
    out.covariance_stderr = SymMatrix(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b <= a; ++b) out.covariance_stderr.set(a, b, std::fabs(cf(a, b) - ch(a, b)) + floor_err);
    return out;
}

}  // namespace gcilab::gaussmc
