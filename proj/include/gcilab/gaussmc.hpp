#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "gcilab/convex.hpp"
#include "gcilab/linalg.hpp"

namespace gcilab {

enum class Method { monte_carlo, qmc, quadrature };

std::string_view to_string(Method m);
Method method_from_string(std::string_view s);  // "mc" | "monte_carlo" | "qmc" | "quadrature"

class GaussianSpec {
public:
    GaussianSpec() = default;
    // Throws NotPositiveDefinite.
    explicit GaussianSpec(SymMatrix sigma);
    static GaussianSpec standard(std::size_t n);

    std::size_t dim() const { return sigma_.n(); }
    const SymMatrix& sigma() const { return sigma_; }
    const Matrix& chol() const { return chol_; }
    // x = L z
    void map(const double* z, double* x) const;

private:
    SymMatrix sigma_;
    Matrix chol_;
};

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
    Method method = Method::monte_carlo;
};

struct RestrictedGaussianStats {
    Estimate mass;
    std::vector<Estimate> barycenter;
    SymMatrix covariance;
    SymMatrix covariance_stderr;

    Vector barycenter_values() const;
    Vector barycenter_errors() const;
    double max_covariance_stderr() const;
};

struct SamplerOptions {
    std::size_t budget = 100000;
    std::uint64_t seed = 0;
    Method method = Method::monte_carlo;
    unsigned threads = 1;
};

namespace gaussmc {

constexpr std::size_t kChunk = 16384;
constexpr std::size_t kQmcReplicates = 16;
constexpr std::size_t kQuadratureNodes = 2048;
constexpr std::size_t kMinHits = 10;

// splitmix64 of (seed, index): the seed of substream `index`.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

// Standard normal points, materialized so several estimators can share
// them (common random numbers). Point i occupies z[i*dim .. i*dim+dim).
struct NormalBlock {
    std::size_t dim = 0;
    std::size_t count = 0;
    Method method = Method::monte_carlo;
    std::size_t replicates = 1;  // > 1 only for qmc; replicate r owns a contiguous range
    std::vector<double> z;

    const double* point(std::size_t i) const { return z.data() + i * dim; }
    std::size_t per_replicate() const { return count / replicates; }
};

NormalBlock draw_normals(std::size_t dim, std::size_t count, std::uint64_t seed, Method method,
                         unsigned threads = 1);

std::vector<Vector> sample_gaussian(const GaussianSpec& spec, std::size_t count, std::uint64_t seed);

// Runs fn(chunk_index, begin, end) over fixed-size chunks of [0, count)
// on up to `threads` workers. Chunk boundaries never depend on threads.
void for_each_chunk(std::size_t count, unsigned threads,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

Estimate measure(const ConvexSet& k, const GaussianSpec& spec, const SamplerOptions& opts);
std::vector<Estimate> barycenter(const ConvexSet& k, const GaussianSpec& spec, const SamplerOptions& opts);
RestrictedGaussianStats covariance(const ConvexSet& k, const GaussianSpec& spec, const SamplerOptions& opts);

// Mass, barycenter and covariance of 1_K γ_Σ from a shared block.
// With need_moments = false only the mass is filled in.
RestrictedGaussianStats restricted_stats(const ConvexSet& k, const GaussianSpec& spec, const NormalBlock& block,
                                         unsigned threads = 1, bool need_moments = true);

// Deterministic integration for n ≤ 2 (see quadrature.cpp).
RestrictedGaussianStats restricted_stats_quadrature(const ConvexSet& k, const GaussianSpec& spec,
                                                    bool need_moments = true);

// Dispatch on opts.method.
RestrictedGaussianStats restricted_stats(const ConvexSet& k, const GaussianSpec& spec, const SamplerOptions& opts,
                                         bool need_moments = true);

}  // namespace gaussmc
}  // namespace gcilab
