#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "gcilab/linalg.hpp"

namespace gcilab {

class Subspace {
public:
    Subspace() = default;
    // basis columns must already be orthonormal
    Subspace(std::size_t ambient_dim, Matrix basis);

    static Subspace zero(std::size_t n);
    static Subspace full(std::size_t n);
    // Orthonormalizes the given vectors (modified Gram-Schmidt); vectors
    // that are dependent on the earlier ones up to 1e-10 are dropped.
    static Subspace span(std::size_t n, const std::vector<Vector>& vectors);

    std::size_t ambient_dim() const { return ambient_; }
    std::size_t dim() const { return basis_.cols(); }
    const Matrix& basis() const { return basis_; }
    Vector vector(std::size_t j) const { return basis_.col(j); }

    SymMatrix projector() const;
    Vector project(const Vector& x) const;
    Vector coordinates(const Vector& x) const;  // basisᵀ x
    Vector embed(const Vector& c) const;        // basis c
    // Deterministic orthonormal complement: the standard basis vectors are
    // projected away from this subspace and orthonormalized in order,
    // greedily keeping the largest residual at each step.
    Subspace complement() const;

    // Sine of the largest principal angle between `other` and its
    // projection onto this subspace; 0 when other ⊆ this.
    double containment_gap(const Subspace& other) const;
    bool contains(const Subspace& other, double tol) const;
    // Sine of the largest principal angle; 1 when dimensions differ.
    double angle_to(const Subspace& other) const;

private:
    std::size_t ambient_ = 0;
    Matrix basis_;
};

struct SpectralDecomposition {
    Vector eigenvalues;  // descending
    Matrix eigenvectors; // columns, same order

    SymMatrix reconstruct() const;
};

struct SignedSplit {
    SymMatrix q_plus;
    SymMatrix q_minus;
    Subspace e_plus;
    Subspace e_zero;
    Subspace e_minus;
};

namespace symmat {

SpectralDecomposition spectral_decompose(const SymMatrix& m);

Subspace eig1_space(const SymMatrix& m, double tol);

double zero_threshold(const SymMatrix& q);
SignedSplit split_signed(const SymMatrix& q);

double min_eigenvalue(const SymMatrix& m);
double max_eigenvalue(const SymMatrix& m);
// Applies f to the eigenvalues.
template <class F>
SymMatrix spectral_map(const SymMatrix& m, F f) {
    const auto sd = spectral_decompose(m);
    SymMatrix out(m.n());
    for (std::size_t k = 0; k < m.n(); ++k) {
        const double lam = f(sd.eigenvalues[k]);
        for (std::size_t i = 0; i < m.n(); ++i)
            for (std::size_t j = 0; j <= i; ++j)
                out.add(i, j, lam * sd.eigenvectors(i, k) * sd.eigenvectors(j, k));
    }
    return out;
}
SymMatrix sqrt_psd(const SymMatrix& m);

// Singular values (descending) and right singular vectors (columns of V)
// of a general matrix, by one-sided Jacobi. V is cols×cols; singular
// values beyond min(rows, cols) are zero.
struct SvdResult {
    Vector singular_values;
    Matrix right_vectors;
};
SvdResult svd_right(const Matrix& a);
std::size_t numerical_rank(const Matrix& a, double rel_tol = 1e-10);
Subspace null_space(const Matrix& a, double rel_tol = 1e-10);

// ∏det(A_i) / det(Σ(A_i − Σ_i⁻¹) + Σ₀⁻¹)
double det_ratio(const std::vector<SymMatrix>& a_list, const std::vector<SymMatrix>& sigma_list,
                 const SymMatrix& sigma0, double tol = 1e-9);
// Same ratio with precision matrices P_i = Σ_i⁻¹ supplied directly.
double det_ratio_precision(const std::vector<SymMatrix>& a_list, const std::vector<SymMatrix>& prec_list,
                           const SymMatrix& prec0, double tol = 1e-9);

bool equality_structure_check(const SymMatrix& a1, const SymMatrix& a2, double tol);

// Haar-distributed orthogonal matrix.
Matrix random_orthogonal(std::size_t n, std::mt19937_64& rng);
SymMatrix conjugate(const Matrix& u, const SymMatrix& a);  // U A Uᵀ

}  // namespace symmat
}  // namespace gcilab
