#include "gcilab/gaussmc.hpp"

#include <algorithm>
#include <array>
#include <numbers>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include <boost/math/special_functions/erf.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/sobol.hpp>

#include "gcilab/error.hpp"

namespace gcilab {

std::string_view to_string(Method m) {
    switch (m) {
        case Method::monte_carlo: return "mc";
        case Method::qmc: return "qmc";
        case Method::quadrature: return "quadrature";
    }
    return "mc";
}

Method method_from_string(std::string_view s) {
    if (s == "mc" || s == "monte_carlo") return Method::monte_carlo;
    if (s == "qmc") return Method::qmc;
    if (s == "quadrature") return Method::quadrature;
    throw Error(ErrorCode::InvalidParameter, "unknown method '" + std::string(s) + "'");
}

GaussianSpec::GaussianSpec(SymMatrix sigma) : sigma_(std::move(sigma)) {
    if (!sigma_.all_finite()) throw Error(ErrorCode::InvalidMatrix, "covariance has non-finite entries");
    auto l = cholesky(sigma_);
    if (!l) throw Error(ErrorCode::NotPositiveDefinite, "covariance is not positive definite");
    chol_ = std::move(*l);
}

GaussianSpec GaussianSpec::standard(std::size_t n) { return GaussianSpec(SymMatrix::identity(n)); }

void GaussianSpec::map(const double* z, double* x) const {
    const std::size_t n = dim();
    for (std::size_t i = 0; i < n; ++i) {
        const double* r = chol_.row_ptr(i);
        double s = 0.0;
        for (std::size_t j = 0; j <= i; ++j) s += r[j] * z[j];
        x[i] = s;
    }
}

Vector RestrictedGaussianStats::barycenter_values() const {
    Vector v;
    for (const auto& e : barycenter) v.push_back(e.value);
    return v;
}

Vector RestrictedGaussianStats::barycenter_errors() const {
    Vector v;
    for (const auto& e : barycenter) v.push_back(e.std_error);
    return v;
}

double RestrictedGaussianStats::max_covariance_stderr() const { return covariance_stderr.max_abs(); }

namespace gaussmc {

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

void for_each_chunk(std::size_t count, unsigned threads,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    const std::size_t chunks = (count + kChunk - 1) / kChunk;
    auto run = [&](std::size_t c) { fn(c, c * kChunk, std::min(count, (c + 1) * kChunk)); };
    if (threads <= 1 || chunks <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) run(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const unsigned workers = std::min<std::size_t>(threads, chunks);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (std::size_t c = next++; c < chunks; c = next++) run(c);
        });
    for (auto& t : pool) t.join();
}

NormalBlock draw_normals(std::size_t dim, std::size_t count, std::uint64_t seed, Method method, unsigned threads) {
    if (dim == 0 || dim > kMaxDim) throw Error(ErrorCode::DimensionError, "unsupported dimension");
    if (count == 0) throw Error(ErrorCode::InvalidParameter, "sample count must be positive");
    NormalBlock b;
    b.dim = dim;
    b.method = method;
    if (method == Method::qmc) {
        b.replicates = kQmcReplicates;
        const std::size_t per = std::max<std::size_t>(1, count / kQmcReplicates);
        b.count = per * kQmcReplicates;
        b.z.resize(b.count * dim);
        // one Sobol point set, randomized by an independent digital shift per replicate
        boost::random::sobol sobol(dim);
        std::vector<std::uint64_t> raw(per * dim);
        for (auto& v : raw) v = sobol();
        for (std::size_t r = 0; r < kQmcReplicates; ++r) {
            std::mt19937_64 rng(substream_seed(seed, r));
            std::vector<std::uint64_t> shift(dim);
            for (auto& s : shift) s = rng();
            for (std::size_t i = 0; i < per; ++i)
                for (std::size_t d = 0; d < dim; ++d) {
                    const std::uint64_t v = raw[i * dim + d] ^ shift[d];
                    const double u = (static_cast<double>(v >> 11) + 0.5) * 0x1.0p-53;
                    b.z[((r * per) + i) * dim + d] = -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
                }
        }
        return b;
    }
    b.count = count;
    b.z.resize(count * dim);
    for_each_chunk(count, threads, [&](std::size_t c, std::size_t begin, std::size_t end) {
        std::mt19937_64 rng(substream_seed(seed, c));
        boost::random::normal_distribution<double> gauss;
        for (std::size_t i = begin * dim; i < end * dim; ++i) b.z[i] = gauss(rng);
    });
    return b;
}

std::vector<Vector> sample_gaussian(const GaussianSpec& spec, std::size_t count, std::uint64_t seed) {
    if (count == 0) throw Error(ErrorCode::InvalidParameter, "count must be at least 1");
    const NormalBlock b = draw_normals(spec.dim(), count, seed, Method::monte_carlo);
    std::vector<Vector> out(count, Vector(spec.dim()));
    for (std::size_t i = 0; i < count; ++i) spec.map(b.point(i), out[i].data());
    return out;
}

namespace {

struct RangeStats {
    std::size_t total = 0;
    std::size_t hits = 0;
    Vector mean;       // barycenter of hits
    Vector mean_se;    // delta-method stderr per coordinate
    SymMatrix cov;     // centered second moment of hits
    SymMatrix cov_se;
};

RangeStats range_stats(const ConvexSet& k, const GaussianSpec& spec, const NormalBlock& block, std::size_t begin,
                       std::size_t end, unsigned threads, bool need_moments) {
    const std::size_t n = spec.dim();
    const std::size_t len = end - begin;
    const std::size_t chunks = (len + kChunk - 1) / kChunk;
    std::vector<std::size_t> hit_count(chunks, 0);
    std::vector<Vector> sum1(chunks, Vector(n, 0.0));
    std::vector<std::uint8_t> flag(len, 0);

    for_each_chunk(len, threads, [&](std::size_t c, std::size_t b, std::size_t e) {
        std::array<double, kMaxDim> x;
        std::size_t h = 0;
        Vector& s1 = sum1[c];
        for (std::size_t i = b; i < e; ++i) {
            spec.map(block.point(begin + i), x.data());
            if (k.contains_raw(x.data())) {
                flag[i] = 1;
                ++h;
                if (need_moments)
                    for (std::size_t d = 0; d < n; ++d) s1[d] += x[d];
            }
        }
        hit_count[c] = h;
    });

    RangeStats out;
    out.total = len;
    Vector s1(n, 0.0);
    for (std::size_t c = 0; c < chunks; ++c) {
        out.hits += hit_count[c];
        for (std::size_t d = 0; d < n; ++d) s1[d] += sum1[c][d];
    }
    if (!need_moments || out.hits == 0) return out;

    const double h = static_cast<double>(out.hits);
    out.mean = scaled(s1, 1.0 / h);
    const std::size_t packed = n * (n + 1) / 2;
    std::vector<Vector> sum2(chunks, Vector(packed, 0.0)), sum4(chunks, Vector(packed, 0.0));
    for_each_chunk(len, threads, [&](std::size_t c, std::size_t b, std::size_t e) {
        std::array<double, kMaxDim> x;
        Vector& s2 = sum2[c];
        for (std::size_t i = b; i < e; ++i) {
            if (!flag[i]) continue;
            spec.map(block.point(begin + i), x.data());
            for (std::size_t d = 0; d < n; ++d) x[d] -= out.mean[d];
            std::size_t idx = 0;
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t q = 0; q <= r; ++q, ++idx) s2[idx] += x[r] * x[q];
        }
    });
    Vector s2(packed, 0.0);
    for (std::size_t c = 0; c < chunks; ++c)
        for (std::size_t idx = 0; idx < packed; ++idx) s2[idx] += sum2[c][idx];
    out.cov = SymMatrix(n);
    {
        std::size_t idx = 0;
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t q = 0; q <= r; ++q, ++idx) out.cov.set(r, q, s2[idx] / h);
    }
    for_each_chunk(len, threads, [&](std::size_t c, std::size_t b, std::size_t e) {
        std::array<double, kMaxDim> x;
        Vector& s4 = sum4[c];
        for (std::size_t i = b; i < e; ++i) {
            if (!flag[i]) continue;
            spec.map(block.point(begin + i), x.data());
            for (std::size_t d = 0; d < n; ++d) x[d] -= out.mean[d];
            std::size_t idx = 0;
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t q = 0; q <= r; ++q, ++idx) {
                    const double dev = x[r] * x[q] - out.cov(r, q);
                    s4[idx] += dev * dev;
                }
        }
    });
    Vector s4(packed, 0.0);
    for (std::size_t c = 0; c < chunks; ++c)
        for (std::size_t idx = 0; idx < packed; ++idx) s4[idx] += sum4[c][idx];
    out.cov_se = SymMatrix(n);
    out.mean_se = Vector(n);
    std::size_t idx = 0;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t q = 0; q <= r; ++q, ++idx) out.cov_se.set(r, q, std::sqrt(s4[idx]) / h);
    for (std::size_t d = 0; d < n; ++d) out.mean_se[d] = std::sqrt(out.cov(d, d) / h);
    return out;
}

double sd_of_mean(const Vector& v) {
    const double r = static_cast<double>(v.size());
    double m = 0.0;
    for (double x : v) m += x;
    m /= r;
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (r - 1.0) / r);
}

}  // namespace

RestrictedGaussianStats restricted_stats(const ConvexSet& k, const GaussianSpec& spec, const NormalBlock& block,
                                         unsigned threads, bool need_moments) {
    const std::size_t n = spec.dim();
    if (k.dim() != n || block.dim != n) throw Error(ErrorCode::DimensionError, "set, covariance and samples disagree in dimension");
    RestrictedGaussianStats out;
    out.mass.method = block.method;
    out.mass.n_samples = block.count;

    if (block.method != Method::qmc) {
        const RangeStats rs = range_stats(k, spec, block, 0, block.count, threads, need_moments);
        const double p = static_cast<double>(rs.hits) / static_cast<double>(rs.total);
        out.mass.value = p;
        out.mass.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(rs.total));
        if (!need_moments) return out;
        if (rs.hits < kMinHits)
            throw Error(ErrorCode::MassTooSmall, "only " + std::to_string(rs.hits) + " sample hits");
        for (std::size_t d = 0; d < n; ++d) out.barycenter.push_back({rs.mean[d], rs.mean_se[d], block.count, block.method});
        out.covariance = rs.cov;
        out.covariance_stderr = rs.cov_se;
        return out;
    }

    const std::size_t reps = block.replicates, per = block.per_replicate();
    Vector masses(reps);
    std::vector<Vector> means(n, Vector(reps));
    std::vector<Vector> covs(n * (n + 1) / 2, Vector(reps));
    std::size_t min_hits = block.count;
    for (std::size_t r = 0; r < reps; ++r) {
        const RangeStats rs = range_stats(k, spec, block, r * per, (r + 1) * per, threads, need_moments);
        masses[r] = static_cast<double>(rs.hits) / static_cast<double>(per);
        min_hits = std::min(min_hits, rs.hits);
        if (!need_moments || rs.hits < kMinHits) continue;
        std::size_t idx = 0;
        for (std::size_t a = 0; a < n; ++a) {
            means[a][r] = rs.mean[a];
            for (std::size_t b = 0; b <= a; ++b, ++idx) covs[idx][r] = rs.cov(a, b);
        }
    }
    auto avg = [](const Vector& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    };
    out.mass.value = avg(masses);
    out.mass.std_error = sd_of_mean(masses);
    if (!need_moments) return out;
    if (min_hits < kMinHits) throw Error(ErrorCode::MassTooSmall, "a QMC replicate has fewer than 10 hits");
    for (std::size_t a = 0; a < n; ++a) out.barycenter.push_back({avg(means[a]), sd_of_mean(means[a]), block.count, block.method});
    out.covariance = SymMatrix(n);
    out.covariance_stderr = SymMatrix(n);
    std::size_t idx = 0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b <= a; ++b, ++idx) {
            out.covariance.set(a, b, avg(covs[idx]));
            out.covariance_stderr.set(a, b, sd_of_mean(covs[idx]));
        }
    return out;
}

RestrictedGaussianStats restricted_stats(const ConvexSet& k, const GaussianSpec& spec, const SamplerOptions& opts,
                                         bool need_moments) {
    if (opts.method == Method::quadrature) return restricted_stats_quadrature(k, spec, need_moments);
    if (opts.budget < 1000) throw Error(ErrorCode::InvalidParameter, "budget must be at least 1000");
    const NormalBlock block = draw_normals(spec.dim(), opts.budget, opts.seed, opts.method, opts.threads);
    return restricted_stats(k, spec, block, opts.threads, need_moments);
}

Estimate measure(const ConvexSet& k, const GaussianSpec& spec, const SamplerOptions& opts) {
    return restricted_stats(k, spec, opts, false).mass;
}

std::vector<Estimate> barycenter(const ConvexSet& k, const GaussianSpec& spec, const SamplerOptions& opts) {
    return restricted_stats(k, spec, opts, true).barycenter;
}

RestrictedGaussianStats covariance(const ConvexSet& k, const GaussianSpec& spec, const SamplerOptions& opts) {
    return restricted_stats(k, spec, opts, true);
}

}  // namespace gaussmc
}  // namespace gcilab
