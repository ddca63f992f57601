#include <doctest.h>

#include <cmath>
#include <random>

#include "gcilab/error.hpp"
#include "gcilab/symmat.hpp"

using namespace gcilab;

namespace {

SymMatrix random_sym(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    SymMatrix s(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) s.set(i, j, g(rng));
    return s;
}

// 2x2 eigenvalues from the characteristic polynomial
std::pair<double, double> eig2(const SymMatrix& a) {
    const double t = a(0, 0) + a(1, 1), d = a(0, 0) * a(1, 1) - a(0, 1) * a(0, 1);
    const double r = std::sqrt(t * t / 4 - d);
    return {t / 2 + r, t / 2 - r};
}

}  // namespace

TEST_CASE("spectral decomposition reconstructs and matches the 2x2 formula") {
    std::mt19937_64 rng(1);
    for (int rep = 0; rep < 20; ++rep) {
        const SymMatrix a = random_sym(2, rng);
        const auto sd = symmat::spectral_decompose(a);
        const auto [l1, l2] = eig2(a);
        CHECK(sd.eigenvalues[0] == doctest::Approx(l1).epsilon(1e-12));
        CHECK(sd.eigenvalues[1] == doctest::Approx(l2).epsilon(1e-12));
    }
    for (std::size_t n = 1; n <= 7; ++n) {
        const SymMatrix a = random_sym(n, rng);
        CHECK((symmat::spectral_decompose(a).reconstruct() - a).max_abs() < 1e-12);
    }
}

TEST_CASE("eig1_space") {
    const SymMatrix a = SymMatrix::diagonal({2.0, 1.0, 1.0 + 1e-12, 0.5});
    const Subspace e = symmat::eig1_space(a, 1e-9);
    CHECK(e.dim() == 2);
    CHECK(e.angle_to(Subspace::span(4, {{0, 1, 0, 0}, {0, 0, 1, 0}})) < 1e-12);

    // conjugation covariance: eig1(Uᵀ A U) = Uᵀ eig1(A)
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 10; ++rep) {
        const Matrix u = symmat::random_orthogonal(5, rng);
        const Matrix q = symmat::random_orthogonal(5, rng);
        const SymMatrix base = symmat::conjugate(q, SymMatrix::diagonal({1, 1, 3, 0.2, 1}));
        const Subspace e1 = symmat::eig1_space(base, 1e-9);
        const SymMatrix rotated = symmat::conjugate(u.transpose(), base);
        std::vector<Vector> mapped;
        for (std::size_t j = 0; j < e1.dim(); ++j) mapped.push_back(u.transpose() * e1.vector(j));
        CHECK(symmat::eig1_space(rotated, 1e-9).angle_to(Subspace::span(5, mapped)) < 1e-8);
    }
}

TEST_CASE("split_signed separates the spectrum") {
    const SignedSplit s = symmat::split_signed(SymMatrix::diagonal({1.0, 0.0, -2.0}));
    CHECK(s.e_plus.dim() == 1);
    CHECK(s.e_zero.dim() == 1);
    CHECK(s.e_minus.dim() == 1);
    CHECK((s.q_plus - s.q_minus - SymMatrix::diagonal({1.0, 0.0, -2.0})).max_abs() < 1e-14);
    CHECK(symmat::min_eigenvalue(s.q_minus) >= -1e-15);
}

TEST_CASE("null space and rank") {
    const Matrix a = Matrix::from_rows({{1, 2, 3}, {2, 4, 6}});
    CHECK(symmat::numerical_rank(a) == 1);
    const Subspace ns = symmat::null_space(a);
    REQUIRE(ns.dim() == 2);
    for (std::size_t j = 0; j < 2; ++j) CHECK(norm(a * ns.vector(j)) < 1e-12);
    CHECK(symmat::null_space(Matrix::identity(3)).dim() == 0);
}

TEST_CASE("det_ratio") {
    const SymMatrix id = SymMatrix::identity(2);
    CHECK(symmat::det_ratio({id, id}, {id, id}, id) == doctest::Approx(1.0));
    // diag(2,1) and diag(1,3): det 2·3 / det(diag(2,3)) = 1
    CHECK(symmat::det_ratio({SymMatrix::diagonal({2, 1}), SymMatrix::diagonal({1, 3})}, {id, id}, id) ==
          doctest::Approx(1.0).epsilon(1e-14));
    // diag(2,1) and diag(3,1): 6 / det(diag(4,1)) = 1.5
    CHECK(symmat::det_ratio({SymMatrix::diagonal({2, 1}), SymMatrix::diagonal({3, 1})}, {id, id}, id) ==
          doctest::Approx(1.5).epsilon(1e-14));
    CHECK_THROWS_AS(symmat::det_ratio({SymMatrix::diagonal({0.5, 1})}, {id}, id), Error);
}

TEST_CASE("equality_structure_check") {
    CHECK(symmat::equality_structure_check(SymMatrix::diagonal({2, 1}), SymMatrix::diagonal({1, 3}), 1e-9));
    CHECK_FALSE(symmat::equality_structure_check(SymMatrix::diagonal({2, 1}), SymMatrix::diagonal({3, 1}), 1e-9));
    CHECK(symmat::equality_structure_check(SymMatrix::identity(3), SymMatrix::diagonal({4, 5, 6}), 1e-9));
    CHECK_THROWS_AS(symmat::equality_structure_check(SymMatrix::diagonal({0.5, 1}), SymMatrix::identity(2), 1e-9),
                    Error);
}

TEST_CASE("random_orthogonal is orthogonal") {
    std::mt19937_64 rng(3);
    const Matrix u = symmat::random_orthogonal(6, rng);
    const Matrix p = u * u.transpose();
    CHECK((p - Matrix::identity(6)).max_abs() < 1e-13);
}
