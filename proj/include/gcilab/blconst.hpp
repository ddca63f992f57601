#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "gcilab/linalg.hpp"
#include "gcilab/symmat.hpp"

namespace gcilab {

struct BLDatum {
    std::size_t big_n = 0;
    std::vector<Matrix> maps;  // B_i : n_i × N
    Vector weights;            // c_i > 0
    SymMatrix q;               // N × N

    std::size_t m() const { return maps.size(); }
    std::size_t n_i(std::size_t i) const { return maps[i].rows(); }
    // Throws InvalidInput / DimensionError.
    void validate() const;
};

struct ConstraintBand {
    std::vector<SymMatrix> lower;                 // G_i ⪰ 0
    std::vector<std::optional<SymMatrix>> upper;  // H_i, nullopt = ∞

    static ConstraintBand lower_only(std::vector<SymMatrix> g);
    static ConstraintBand identity(const BLDatum& d);  // G_i = I, H_i = ∞
    static ConstraintBand zero(const BLDatum& d);      // G_i = 0, H_i = ∞
};

// Positive real or +∞, never a sentinel float.
class ExtendedReal {
public:
    static ExtendedReal finite(double v) { return ExtendedReal(v, false); }
    static ExtendedReal infinity() { return ExtendedReal(0.0, true); }
    bool is_infinite() const { return infinite_; }
    bool is_finite() const { return !infinite_; }
    // Throws InvalidInput when infinite.
    double value() const;

private:
    ExtendedReal(double v, bool inf) : v_(v), infinite_(inf) {}
    double v_;
    bool infinite_;
};

enum class Classification { finite, infinite_constant, zero_constant };
std::string_view to_string(Classification c);

struct FinitenessResult {
    bool finite_possible = true;
    Vector witness;  // unit ω in ∩ker B_i with ⟨ω,Qω⟩ ≥ 0 when not finite
    Subspace kernel;
};

struct SurjectivityResult {
    bool ok = true;
    std::size_t index = 0;  // first map with a rank deficit
    std::size_t rank = 0;
};

struct OptimizerOptions {
    std::size_t random_starts = 8;
    std::uint64_t seed = 0;
    std::size_t max_iterations = 20000;
    double grad_tol = 1e-9;
    unsigned threads = 1;
};

struct GaussianBLResult {
    Classification classification = Classification::finite;
    ExtendedReal value = ExtendedReal::infinity();
    double log_value = 0.0;  // meaningful when finite and positive
    std::vector<SymMatrix> argmin;
    double stationarity_residual = 0.0;
    bool converged = false;
    std::size_t winning_start = 0;
    std::size_t iterations = 0;
    std::vector<double> start_log_values;  // per start, +inf when rejected
    Vector witness;                        // infinite_constant
    std::size_t zero_index = 0;            // zero_constant
};

namespace blconst {

FinitenessResult finiteness_check(const BLDatum& d);
SurjectivityResult surjectivity_check(const BLDatum& d);

ExtendedReal gaussian_bl_value(const BLDatum& d, const std::vector<SymMatrix>& a_list);
// log of the finite value; empty optional when +∞.
std::optional<double> log_gaussian_bl_value(const BLDatum& d, const std::vector<SymMatrix>& a_list);

// First-order residual in A-space: Σ‖P_i(A_i − G_i)‖_F + ‖negative part of P_i‖_F,
// P_i the gradient of the log-value with respect to A_i.
double stationarity_residual(const BLDatum& d, const ConstraintBand& band, const std::vector<SymMatrix>& a_list);

GaussianBLResult gaussian_bl_infimum(const BLDatum& d, const ConstraintBand& band, const OptimizerOptions& opts = {});

// GCI datum for covariances (Σ₀; Σ_1..Σ_m): B_i = I, c_i = 1, Q = ½ΣΣ_i⁻¹ − ½Σ₀⁻¹.
BLDatum gci_datum(const SymMatrix& sigma0, const std::vector<SymMatrix>& sigma_list);
// Σ's = I: Q = (m−1)/2 · I
BLDatum gci_datum(std::size_t n, std::size_t m = 2);

struct GciConstantResult {
    double constant = 0.0;
    bool ordering_holds = true;  // Σ₀⁻¹ ⪰ Σ_i⁻¹ for all i
    GaussianBLResult infimum;
};
GciConstantResult gci_constant(const SymMatrix& sigma0, const std::vector<SymMatrix>& sigma_list,
                               const OptimizerOptions& opts = {});

// Smallest Λ = 2^k (k ≥ 0) with gaussian_bl_value(d, ΛI) finite; NoConvergence past 2^60.
double find_lambda0(const BLDatum& d);
// A_{i0} = Λ₀P_{ω⊥} + εωωᵀ with ω ⊥ Im B_{i0}; A_i = Λ₀I otherwise.
std::vector<SymMatrix> zero_constant_family(const BLDatum& d, std::size_t index, double eps, double lambda0);

}  // namespace blconst
}  // namespace gcilab
