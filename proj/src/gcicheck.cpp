#include "gcilab/gcicheck.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <boost/random/normal_distribution.hpp>

#include "gcilab/error.hpp"
#include "gcilab/normal.hpp"

namespace gcilab {

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::equality_within_noise: return "equality_within_noise";
        case Verdict::violated: return "violated";
    }
    return "holds";
}

std::string_view to_string(StructureVerdict v) {
    switch (v) {
        case StructureVerdict::product: return "product";
        case StructureVerdict::not_product: return "not_product";
        case StructureVerdict::inconclusive: return "inconclusive";
    }
    return "product";
}

namespace gcicheck {

namespace {

// substream used by the membership-separability probes
constexpr std::uint64_t kProbeStream = 0x100000000ULL;

// Co-occurrence counts of boolean flags per replicate: c[r][f*F+g].
struct JointCounts {
    std::size_t flags = 0;
    std::size_t replicates = 1;
    std::size_t per_replicate = 0;
    std::vector<std::vector<std::uint64_t>> c;

    double p(std::size_t r, std::size_t f) const { return double(c[r][f * flags + f]) / double(per_replicate); }
    double pooled(std::size_t f, std::size_t g) const {
        std::uint64_t s = 0;
        for (const auto& m : c) s += m[f * flags + g];
        return double(s) / double(per_replicate * replicates);
    }
    std::size_t total() const { return per_replicate * replicates; }
};

using FlagFn = std::function<void(const double* z, bool* out)>;

JointCounts joint_counts(const gaussmc::NormalBlock& block, std::size_t nflags, unsigned threads, const FlagFn& fn) {
    JointCounts jc;
    jc.flags = nflags;
    jc.replicates = block.replicates;
    jc.per_replicate = block.per_replicate();
    const std::size_t chunks = (block.count + gaussmc::kChunk - 1) / gaussmc::kChunk;
    std::vector<std::vector<std::vector<std::uint64_t>>> partial(
        chunks, std::vector<std::vector<std::uint64_t>>(jc.replicates, std::vector<std::uint64_t>(nflags * nflags, 0)));
    gaussmc::for_each_chunk(block.count, threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        auto& mine = partial[chunk];
        std::array<bool, 16> f{};
        for (std::size_t i = begin; i < end; ++i) {
            fn(block.point(i), f.data());
            auto& m = mine[i / jc.per_replicate];
            for (std::size_t a = 0; a < nflags; ++a) {
                if (!f[a]) continue;
                for (std::size_t b = 0; b < nflags; ++b)
                    if (f[b]) ++m[a * nflags + b];
            }
        }
    });
    jc.c.assign(jc.replicates, std::vector<std::uint64_t>(nflags * nflags, 0));
    for (const auto& ch : partial)
        for (std::size_t r = 0; r < jc.replicates; ++r)
            for (std::size_t q = 0; q < nflags * nflags; ++q) jc.c[r][q] += ch[r][q];
    return jc;
}

// stderr of the sample mean of Σ w_f flag_f
double linear_stderr(const JointCounts& jc, const Vector& w) {
    double var = 0.0;
    for (std::size_t f = 0; f < jc.flags; ++f)
        for (std::size_t g = 0; g < jc.flags; ++g)
            var += w[f] * w[g] * (jc.pooled(f, g) - jc.pooled(f, f) * jc.pooled(g, g));
    const double n = double(jc.total());
    return std::sqrt(std::max(0.0, var) / std::max(1.0, n - 1.0));
}

double replicate_stderr(const std::vector<double>& vals) {
    const double r = double(vals.size());
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= r;
    double ss = 0.0;
    for (double v : vals) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (r - 1.0) / r);
}

RestrictedGaussianStats stats_with(const ConvexSet& k, const GaussianSpec& spec, const SamplerOptions& opts,
                                   const gaussmc::NormalBlock* block, bool need_moments = true) {
    if (opts.method == Method::quadrature) return gaussmc::restricted_stats_quadrature(k, spec, need_moments);
    return gaussmc::restricted_stats(k, spec, *block, opts.threads, need_moments);
}

std::optional<gaussmc::NormalBlock> make_block(std::size_t n, const SamplerOptions& opts) {
    if (opts.method == Method::quadrature) return std::nullopt;
    if (opts.budget < 1000) throw Error(ErrorCode::InvalidParameter, "budget must be at least 1000");
    return gaussmc::draw_normals(n, opts.budget, opts.seed, opts.method, opts.threads);
}

bool band_ok(const RestrictedGaussianStats& st, Method method, double tol) {
    const Vector b = st.barycenter_values();
    const double thr = tol > 0.0 ? tol : (method == Method::quadrature ? kQuadratureBand : 3.0 * norm(st.barycenter_errors()));
    return norm(b) <= thr;
}

Verdict classify(double diff, double se, double ratio, Method method) {
    if (method == Method::quadrature) {
        if (std::fabs(ratio - 1.0) <= kQuadratureBand) return Verdict::equality_within_noise;
        return ratio > 1.0 ? Verdict::holds : Verdict::violated;
    }
    if (std::fabs(diff) <= 3.0 * se) return Verdict::equality_within_noise;
    return diff > 0.0 ? Verdict::holds : Verdict::violated;
}

GciReport estimate_gci(const std::vector<ConvexSet>& ks, const SymMatrix& sigma0, const std::vector<SymMatrix>& sigmas,
                       const SamplerOptions& opts, const gaussmc::NormalBlock* block) {
    const std::size_t m = ks.size();
    const std::size_t n = sigma0.n();
    GciReport rep;
    const GaussianSpec spec0(sigma0);
    std::vector<GaussianSpec> specs;
    for (const auto& s : sigmas) specs.emplace_back(s);

    if (opts.method == Method::quadrature) {
        const auto inter = convex::intersect(ks);
        const auto st0 = gaussmc::restricted_stats_quadrature(inter, spec0, false);
        rep.lhs = st0.mass;
        std::vector<double> p;
        for (std::size_t i = 0; i < m; ++i) {
            rep.rhs_factors.push_back(gaussmc::restricted_stats_quadrature(ks[i], specs[i], false).mass);
            p.push_back(rep.rhs_factors.back().value);
        }
        double prod = 1.0;
        for (double v : p) prod *= v;
        double se = rep.lhs.std_error;
        for (std::size_t i = 0; i < m; ++i) se += rep.rhs_factors[i].std_error * (p[i] > 0.0 ? prod / p[i] : 0.0);
        rep.rhs_product = prod;
        rep.combined_stderr = se;
    } else {
        if (m + 1 > 16) throw Error(ErrorCode::InvalidInput, "at most 15 sets are supported");
        const FlagFn fn = [&](const double* z, bool* out) {
            std::array<double, kMaxDim> x{};
            spec0.map(z, x.data());
            bool all = true;
            for (std::size_t i = 0; i < m && all; ++i) all = ks[i].contains_raw(x.data());
            out[0] = all;
            for (std::size_t i = 0; i < m; ++i) {
                specs[i].map(z, x.data());
                out[i + 1] = ks[i].contains_raw(x.data());
            }
        };
        const JointCounts jc = joint_counts(*block, m + 1, opts.threads, fn);
        Vector p(m + 1);
        for (std::size_t f = 0; f <= m; ++f) p[f] = jc.pooled(f, f);
        double prod = 1.0;
        for (std::size_t i = 1; i <= m; ++i) prod *= p[i];
        double se_lhs, se_d;
        std::vector<double> se_f(m + 1);
        if (opts.method == Method::qmc) {
            std::vector<double> d_r, f_r(jc.replicates);
            std::vector<std::vector<double>> per_flag(m + 1);
            for (std::size_t r = 0; r < jc.replicates; ++r) {
                double pr = 1.0;
                for (std::size_t i = 1; i <= m; ++i) pr *= jc.p(r, i);
                d_r.push_back(jc.p(r, 0) - pr);
                for (std::size_t f = 0; f <= m; ++f) per_flag[f].push_back(jc.p(r, f));
            }
            se_d = replicate_stderr(d_r);
            for (std::size_t f = 0; f <= m; ++f) se_f[f] = replicate_stderr(per_flag[f]);
            se_lhs = se_f[0];
        } else {
            // influence function of lhs − ∏p_i
            Vector w(m + 1, 0.0);
            w[0] = 1.0;
            for (std::size_t i = 1; i <= m; ++i) {
                double others = 1.0;
                for (std::size_t k = 1; k <= m; ++k)
                    if (k != i) others *= p[k];
                w[i] = -others;
            }
            se_d = linear_stderr(jc, w);
            for (std::size_t f = 0; f <= m; ++f) {
                Vector e(m + 1, 0.0);
                e[f] = 1.0;
                se_f[f] = linear_stderr(jc, e);
            }
            se_lhs = se_f[0];
        }
        const std::size_t total = jc.total();
        rep.lhs = {p[0], se_lhs, total, opts.method};
        for (std::size_t i = 1; i <= m; ++i) rep.rhs_factors.push_back({p[i], se_f[i], total, opts.method});
        rep.rhs_product = prod;
        // a zero spread means every point agreed; use one point of resolution
        rep.combined_stderr = se_d > 0.0 ? se_d : 1.0 / double(total);
    }
    rep.difference = rep.lhs.value - rep.rhs_product;
    rep.ratio = rep.rhs_product > 0.0 ? rep.lhs.value / rep.rhs_product : 0.0;
    rep.margin_sigmas = rep.difference / rep.combined_stderr;
    rep.verdict = classify(rep.difference, rep.combined_stderr, rep.ratio, opts.method);
    if (!(rep.rhs_product > 0.0)) rep.warnings.push_back("a factor has zero measure");

    const SymMatrix p0 = inverse_pd(sigma0);
    for (const auto& s : sigmas) {
        const SymMatrix pi = inverse_pd(s);
        const double scale = std::max({1.0, p0.max_abs(), pi.max_abs()});
        if (symmat::min_eigenvalue(p0 - pi) < -1e-10 * scale) rep.ordering_holds = false;
    }
    if (!rep.ordering_holds) rep.warnings.push_back("ordering Sigma0^-1 >= Sigma_i^-1 fails; the inequality may not apply");
    (void)n;
    return rep;
}

}  // namespace

CenterResult center_set(const ConvexSet& k, const GaussianSpec& spec, const SamplerOptions& opts, double tol) {
    const std::size_t n = k.dim();
    if (spec.dim() != n) throw Error(ErrorCode::DimensionError, "set and covariance disagree in dimension");
    const auto block = make_block(n, opts);
    const gaussmc::NormalBlock* bp = block ? &*block : nullptr;

    Vector b(n, 0.0);
    if (!k.contains(b))
        if (auto h = convex::interior_hint(k)) b = *h;

    auto eval = [&](const Vector& bb) { return stats_with(convex::translate(k, scaled(bb, -1.0)), spec, opts, bp); };
    auto threshold = [&](const RestrictedGaussianStats& st) {
        if (tol > 0.0) return tol;
        return opts.method == Method::quadrature ? kQuadratureBand : 3.0 * norm(st.barycenter_errors());
    };

    CenterResult res;
    RestrictedGaussianStats st = eval(b);
    Vector best_b = b;
    RestrictedGaussianStats best = st;
    std::size_t it = 0;
    for (; it < kMaxCenterIterations; ++it) {
        const Vector r = st.barycenter_values();
        if (norm(r) < norm(best.barycenter_values())) {
            best = st;
            best_b = b;
        }
        if (norm(r) <= threshold(st)) {
            res.converged = true;
            best = st;
            best_b = b;
            break;
        }
        // Newton direction: d bar/d b = Cov Σ⁻¹ − I, so δ = Σ(Σ − Cov)⁻¹ r
        std::optional<Vector> delta;
        if (auto l = cholesky(spec.sigma() - st.covariance)) {
            const Vector y = backward_solve_t(*l, forward_solve(*l, r));
            delta = spec.sigma().apply(y);
        }
        bool moved = false;
        if (delta) {
            Vector d = *delta;
            for (int half = 0; half < 8 && !moved; ++half, d = scaled(d, 0.5)) {
                const Vector cand = axpy(1.0, d, b);
                try {
                    RestrictedGaussianStats sc = eval(cand);
                    if (norm(sc.barycenter_values()) < norm(r)) {
                        b = cand;
                        st = std::move(sc);
                        moved = true;
                    }
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::MassTooSmall) throw;
                }
            }
        }
        if (!moved) {
            // plain relaxed fixed-point step
            b = axpy(0.5, r, b);
            st = eval(b);
        }
    }
    if (!res.converged) {
        const Vector r = st.barycenter_values();
        if (norm(r) < norm(best.barycenter_values())) {
            best = st;
            best_b = b;
        }
        res.warnings.push_back("MaxIterations: centering stopped after " + std::to_string(kMaxCenterIterations) +
                               " iterations");
    }
    res.b0 = best_b;
    res.centered = convex::translate(k, scaled(best_b, -1.0));
    res.residual = best.barycenter_values();
    res.residual_stderr = best.barycenter_errors();
    res.residual_norm = norm(res.residual);
    res.threshold = threshold(best);
    res.iterations = it;
    return res;
}

GciReport verify_gci(const std::vector<ConvexSet>& k_list, const SymMatrix& sigma0,
                     const std::vector<SymMatrix>& sigma_list, const SamplerOptions& opts) {
    if (k_list.empty()) throw Error(ErrorCode::InvalidInput, "at least one set is required");
    if (k_list.size() != sigma_list.size()) throw Error(ErrorCode::DimensionError, "one covariance per set is required");
    const std::size_t n = sigma0.n();
    for (std::size_t i = 0; i < k_list.size(); ++i)
        if (k_list[i].dim() != n || sigma_list[i].n() != n)
            throw Error(ErrorCode::DimensionError, "set " + std::to_string(i) + " has the wrong dimension");
    const auto block = make_block(n, opts);
    const gaussmc::NormalBlock* bp = block ? &*block : nullptr;
    std::vector<Vector> bars;
    for (std::size_t i = 0; i < k_list.size(); ++i) {
        const auto st = stats_with(k_list[i], GaussianSpec(sigma_list[i]), opts, bp);
        if (!band_ok(st, opts.method, 0.0))
            throw Error(ErrorCode::PreconditionFailed, "set " + std::to_string(i) + " is not centered (|bar| = " +
                                                           std::to_string(norm(st.barycenter_values())) + ")");
        bars.push_back(st.barycenter_values());
    }
    GciReport rep = estimate_gci(k_list, sigma0, sigma_list, opts, bp);
    rep.barycenters = std::move(bars);
    return rep;
}

GciReport verify_gci_matched(const ConvexSet& k1, const ConvexSet& k2, const SamplerOptions& opts) {
    const std::size_t n = k1.dim();
    if (k2.dim() != n) throw Error(ErrorCode::DimensionError, "sets disagree in dimension");
    const auto block = make_block(n, opts);
    const gaussmc::NormalBlock* bp = block ? &*block : nullptr;
    const GaussianSpec spec = GaussianSpec::standard(n);
    const auto s1 = stats_with(k1, spec, opts, bp);
    const auto s2 = stats_with(k2, spec, opts, bp);
    const Vector diff = axpy(-1.0, s2.barycenter_values(), s1.barycenter_values());
    double thr = kQuadratureBand;
    if (opts.method != Method::quadrature) {
        const Vector e1 = s1.barycenter_errors(), e2 = s2.barycenter_errors();
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += e1[i] * e1[i] + e2[i] * e2[i];
        thr = 3.0 * std::sqrt(s);
    }
    if (norm(diff) > thr)
        throw Error(ErrorCode::PreconditionFailed, "barycenters of set 0 and set 1 differ by " + std::to_string(norm(diff)));
    const SymMatrix id = SymMatrix::identity(n);
    GciReport rep = estimate_gci({k1, k2}, id, {id, id}, opts, bp);
    rep.barycenters = {s1.barycenter_values(), s2.barycenter_values()};
    return rep;
}

EqualityStructure detect_equality_structure(const ConvexSet& k1, const ConvexSet& k2, const SamplerOptions& opts,
                                            double tol) {
    const std::size_t n = k1.dim();
    if (k2.dim() != n) throw Error(ErrorCode::DimensionError, "sets disagree in dimension");
    const GaussianSpec spec = GaussianSpec::standard(n);
    const auto block = make_block(n, opts);
    const gaussmc::NormalBlock* bp = block ? &*block : nullptr;
    const auto s1 = stats_with(k1, spec, opts, bp);
    const auto s2 = stats_with(k2, spec, opts, bp);

    EqualityStructure out;
    out.barycenter_1 = s1.barycenter_values();
    out.barycenter_2 = s2.barycenter_values();
    out.eig_tolerance = tol > 0.0 ? tol : std::max(1e-6, 3.0 * s1.max_covariance_stderr());
    const auto sd = symmat::spectral_decompose(s1.covariance);
    out.eigenvalues = sd.eigenvalues;
    out.e = symmat::eig1_space(s1.covariance, out.eig_tolerance);
    bool near_one_outside = false;
    for (double lam : sd.eigenvalues) {
        const double d = std::fabs(lam - 1.0);
        if (d <= out.eig_tolerance) continue;
        out.eig_gap = out.eig_gap ? std::min(*out.eig_gap, d) : d;
        if (d <= 10.0 * out.eig_tolerance) near_one_outside = true;
    }

    // membership-separability probes
    std::mt19937_64 rng(gaussmc::substream_seed(opts.seed, kProbeStream));
    boost::random::normal_distribution<double> gauss;
    const SymMatrix pe = out.e.projector();
    std::size_t miss1 = 0, miss2 = 0;
    Vector x(n), z(n), y(n);
    for (std::size_t probe = 0; probe < kStructureProbes; ++probe) {
        for (double& v : x) v = gauss(rng);
        for (double& v : z) v = gauss(rng);
        const Vector px = pe.apply(x), pz = pe.apply(z);
        // K1: replace the E part of x
        for (std::size_t i = 0; i < n; ++i) y[i] = x[i] - px[i] + pz[i];
        if (k1.contains_raw(x.data()) != k1.contains_raw(y.data())) ++miss1;
        // K2: replace the E⊥ part of x
        for (std::size_t i = 0; i < n; ++i) y[i] = px[i] + z[i] - pz[i];
        if (k2.contains_raw(x.data()) != k2.contains_raw(y.data())) ++miss2;
    }
    out.residual_1 = double(miss1) / double(kStructureProbes);
    out.residual_2 = double(miss2) / double(kStructureProbes);
    out.product_residual = std::max(out.residual_1, out.residual_2);
    if (out.residual_1 < kStructureRate && out.residual_2 < kStructureRate)
        out.verdict = StructureVerdict::product;
    else if (near_one_outside)
        out.verdict = StructureVerdict::inconclusive;
    else
        out.verdict = StructureVerdict::not_product;
    return out;
}

namespace {

struct PhiEvaluator {
    const ConvexSet& k1;
    const ConvexSet& k2;
    const GaussianSpec& spec;
    const SamplerOptions& opts;
    const gaussmc::NormalBlock* block;

    Estimate operator()(const Vector& a1, const Vector& a2) const {
        const ConvexSet t1 = convex::translate(k1, a1);
        const ConvexSet t2 = convex::translate(k2, a2);
        if (opts.method == Method::quadrature) {
            const auto m12 = gaussmc::restricted_stats_quadrature(convex::intersect(t1, t2), spec, false).mass;
            const auto m1 = gaussmc::restricted_stats_quadrature(t1, spec, false).mass;
            const auto m2 = gaussmc::restricted_stats_quadrature(t2, spec, false).mass;
            if (!(m1.value > 0.0) || !(m2.value > 0.0))
                throw Error(ErrorCode::MassTooSmall, "a translated set has zero Gaussian measure");
            const double v = m12.value / (m1.value * m2.value);
            const double se = v * (m12.std_error / std::max(m12.value, 1e-300) + m1.std_error / m1.value +
                                   m2.std_error / m2.value);
            return {v, m12.value > 0.0 ? se : m12.std_error / (m1.value * m2.value), m12.n_samples, Method::quadrature};
        }
        const FlagFn fn = [&](const double* z, bool* out) {
            std::array<double, kMaxDim> x{};
            spec.map(z, x.data());
            out[1] = t1.contains_raw(x.data());
            out[2] = t2.contains_raw(x.data());
            out[0] = out[1] && out[2];
        };
        const JointCounts jc = joint_counts(*block, 3, opts.threads, fn);
        const double p12 = jc.pooled(0, 0), p1 = jc.pooled(1, 1), p2 = jc.pooled(2, 2);
        if (!(p1 > 0.0) || !(p2 > 0.0)) throw Error(ErrorCode::MassTooSmall, "a translated set has no sample hits");
        const double v = p12 / (p1 * p2);
        double se;
        if (opts.method == Method::qmc) {
            std::vector<double> vals;
            for (std::size_t r = 0; r < jc.replicates; ++r) {
                const double q1 = jc.p(r, 1), q2 = jc.p(r, 2);
                vals.push_back(q1 > 0.0 && q2 > 0.0 ? jc.p(r, 0) / (q1 * q2) : 0.0);
            }
            se = replicate_stderr(vals);
        } else {
            // delta method on log Φ
            se = p12 > 0.0 ? v * linear_stderr(jc, {1.0 / p12, -1.0 / p1, -1.0 / p2})
                           : linear_stderr(jc, {1.0, 0.0, 0.0}) / (p1 * p2);
        }
        if (!(se > 0.0)) se = 1.0 / double(jc.total());
        return {v, se, jc.total(), opts.method};
    }
};

}  // namespace

Estimate phi(const ConvexSet& k1, const ConvexSet& k2, const Vector& a1, const Vector& a2, const GaussianSpec& spec,
             const SamplerOptions& opts) {
    const auto block = make_block(spec.dim(), opts);
    return PhiEvaluator{k1, k2, spec, opts, block ? &*block : nullptr}(a1, a2);
}

TranslationResult find_independent_translations(const ConvexSet& k1, const ConvexSet& k2, const GaussianSpec& spec,
                                                const SamplerOptions& opts, double tol) {
    const std::size_t n = k1.dim();
    if (k2.dim() != n || spec.dim() != n) throw Error(ErrorCode::DimensionError, "dimensions disagree");
    const auto block = make_block(n, opts);
    const gaussmc::NormalBlock* bp = block ? &*block : nullptr;
    const PhiEvaluator eval{k1, k2, spec, opts, bp};
    auto band = [&](const Estimate& e) {
        if (tol > 0.0) return tol;
        return opts.method == Method::quadrature ? kQuadratureBand : 3.0 * e.std_error;
    };

    TranslationResult res;
    const Vector zero(n, 0.0);
    try {
        res.phi_initial = eval(zero, zero).value;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::MassTooSmall) throw;
        res.phi_initial = 0.0;
    }

    // stage 1: recenter both
    const auto c1 = center_set(k1, spec, opts);
    const auto c2 = center_set(k2, spec, opts);
    for (const auto& w : c1.warnings) res.warnings.push_back("K1: " + w);
    for (const auto& w : c2.warnings) res.warnings.push_back("K2: " + w);
    res.a1 = scaled(c1.b0, -1.0);
    res.a2 = scaled(c2.b0, -1.0);
    Estimate e0 = eval(res.a1, res.a2);
    res.phi_centered = e0.value;
    res.phi = e0.value;
    if (std::fabs(e0.value - 1.0) <= band(e0)) {
        res.converged = true;
        return res;
    }
    if (e0.value < 1.0) {
        res.warnings.push_back("NoBracket: Phi at the centered translations is below 1");
        return res;
    }

    // stage 2: slide K2 along the line through the original barycenters
    res.stage = 2;
    const auto s1 = stats_with(k1, spec, opts, bp);
    const auto s2 = stats_with(k2, spec, opts, bp);
    Vector d = axpy(-1.0, s1.barycenter_values(), s2.barycenter_values());
    if (norm(d) < 1e-9) {
        d.assign(n, 0.0);
        d[0] = 1.0;
    } else {
        d = scaled(d, 1.0 / norm(d));
    }
    auto at = [&](double s) {
        try {
            return eval(res.a1, axpy(s, d, res.a2));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::MassTooSmall) throw;
            return Estimate{0.0, 0.0, 0, opts.method};
        }
    };
    double lo = 0.0, hi = 0.5;
    Estimate ehi = at(hi);
    std::size_t it = 0;
    while (ehi.value >= 1.0 && it < 60) {
        lo = hi;
        hi *= 2.0;
        ehi = at(hi);
        ++it;
    }
    if (ehi.value >= 1.0) {
        res.warnings.push_back("NoBracket: Phi stayed above 1 along the search line");
        return res;
    }
    Estimate best = e0;
    double best_s = 0.0;
    for (; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Estimate em = at(mid);
        if (std::fabs(em.value - 1.0) < std::fabs(best.value - 1.0)) {
            best = em;
            best_s = mid;
        }
        if (std::fabs(em.value - 1.0) <= band(em)) {
            res.converged = true;
            break;
        }
        if (em.value > 1.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15 * (1.0 + hi)) break;
    }
    res.iterations = it;
    res.a2 = axpy(best_s, d, res.a2);
    res.phi = best.value;
    if (!res.converged) res.warnings.push_back("NoConvergence: bisection ended outside the band");
    return res;
}

CounterexampleResult bary_gci_counterexample(double r2) {
    if (!(r2 >= 0.0) || !std::isfinite(r2)) throw Error(ErrorCode::InvalidParameter, "r2 must be finite and >= 0");
    CounterexampleResult c;
    c.r2 = r2;
    c.bar_1 = normal::truncated_mean_above(0.0);
    c.bar_2 = normal::truncated_mean_above(r2);
    c.gamma_a1 = normal::upper_tail(0.0);
    c.lhs = (1.0 + c.bar_1 * c.bar_2) * c.gamma_a1;
    c.violated = c.lhs > c.bound;
    return c;
}

}  // namespace gcicheck
}  // namespace gcilab
