#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gcilab/convex.hpp"
#include "gcilab/gaussmc.hpp"
#include "gcilab/symmat.hpp"

namespace gcilab {

enum class Verdict { holds, equality_within_noise, violated };
enum class StructureVerdict { product, not_product, inconclusive };
std::string_view to_string(Verdict v);
std::string_view to_string(StructureVerdict v);

struct CenterResult {
    Vector b0;
    ConvexSet centered;  // translate(k, -b0)
    Vector residual;     // barycenter of the centered set
    Vector residual_stderr;
    double residual_norm = 0.0;
    double threshold = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<std::string> warnings;
};

struct GciReport {
    Estimate lhs;
    std::vector<Estimate> rhs_factors;
    double rhs_product = 0.0;
    double ratio = 0.0;
    double difference = 0.0;  // lhs - product
    double combined_stderr = 0.0;
    double margin_sigmas = 0.0;
    Verdict verdict = Verdict::holds;
    bool ordering_holds = true;
    std::vector<Vector> barycenters;  // of each K_i under its Σ_i
    std::vector<std::string> warnings;
};

struct EqualityStructure {
    Subspace e;
    std::optional<double> eig_gap;  // |λ − 1| for the closest eigenvalue outside E
    double product_residual = 0.0;
    double residual_1 = 0.0;  // K1 membership change under resampling the E part
    double residual_2 = 0.0;  // K2 membership change under resampling the E⊥ part
    double eig_tolerance = 0.0;
    Vector eigenvalues;
    Vector barycenter_1;
    Vector barycenter_2;
    StructureVerdict verdict = StructureVerdict::not_product;
};

struct TranslationResult {
    Vector a1;
    Vector a2;
    double phi = 0.0;
    double phi_initial = 0.0;  // at a1 = a2 = 0
    double phi_centered = 0.0;
    std::size_t stage = 1;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<std::string> warnings;
};

struct CounterexampleResult {
    double r2 = 0.0;
    double bar_1 = 0.0;
    double bar_2 = 0.0;
    double gamma_a1 = 0.5;
    double lhs = 0.0;
    double bound = 1.0;
    bool violated = false;
};

namespace gcicheck {

constexpr std::size_t kMaxCenterIterations = 200;
constexpr std::size_t kStructureProbes = 20000;
constexpr double kStructureRate = 1e-3;
constexpr double kQuadratureBand = 1e-6;

// tol <= 0 selects the default: 1e-6 for quadrature, 3·stderr otherwise.
CenterResult center_set(const ConvexSet& k, const GaussianSpec& spec, const SamplerOptions& opts, double tol = 0.0);

// Throws PreconditionFailed when a set is not centered within the band.
GciReport verify_gci(const std::vector<ConvexSet>& k_list, const SymMatrix& sigma0,
                     const std::vector<SymMatrix>& sigma_list, const SamplerOptions& opts);
// m = 2, Σ = I, barycenters equal (not necessarily 0) within the band.
GciReport verify_gci_matched(const ConvexSet& k1, const ConvexSet& k2, const SamplerOptions& opts);

EqualityStructure detect_equality_structure(const ConvexSet& k1, const ConvexSet& k2, const SamplerOptions& opts,
                                            double tol = 0.0);

// Φ(a1, a2) = γ((K1+a1)∩(K2+a2)) / (γ(K1+a1)γ(K2+a2))
Estimate phi(const ConvexSet& k1, const ConvexSet& k2, const Vector& a1, const Vector& a2, const GaussianSpec& spec,
             const SamplerOptions& opts);

// tol <= 0: 1e-6 for quadrature, 3·stderr otherwise.
TranslationResult find_independent_translations(const ConvexSet& k1, const ConvexSet& k2, const GaussianSpec& spec,
                                                const SamplerOptions& opts, double tol = 0.0);

CounterexampleResult bary_gci_counterexample(double r2);

}  // namespace gcicheck
}  // namespace gcilab
