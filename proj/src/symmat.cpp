#include "gcilab/symmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/random/normal_distribution.hpp>

#include "gcilab/error.hpp"

namespace gcilab {

namespace {

// Modified Gram-Schmidt of v against the first `count` columns of q.
void orthogonalize_against(Vector& v, const Matrix& q, std::size_t count) {
    for (int pass = 0; pass < 2; ++pass)
        for (std::size_t j = 0; j < count; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) s += q(i, j) * v[i];
            for (std::size_t i = 0; i < v.size(); ++i) v[i] -= s * q(i, j);
        }
}

}  // namespace

Subspace::Subspace(std::size_t ambient_dim, Matrix basis) : ambient_(ambient_dim), basis_(std::move(basis)) {
    if (basis_.cols() > 0 && basis_.rows() != ambient_)
        throw Error(ErrorCode::DimensionError, "subspace basis has wrong ambient dimension");
    if (basis_.cols() == 0) basis_ = Matrix(ambient_, 0);
}

Subspace Subspace::zero(std::size_t n) { return Subspace(n, Matrix(n, 0)); }
Subspace Subspace::full(std::size_t n) { return Subspace(n, Matrix::identity(n)); }

Subspace Subspace::span(std::size_t n, const std::vector<Vector>& vectors) {
    Matrix q(n, vectors.size());
    std::size_t count = 0;
    for (const auto& v0 : vectors) {
        if (v0.size() != n) throw Error(ErrorCode::DimensionError, "span vector has wrong dimension");
        const double n0 = norm(v0);
        if (n0 == 0.0) continue;
        Vector v = v0;
        orthogonalize_against(v, q, count);
        const double nv = norm(v);
        if (nv <= 1e-10 * n0) continue;
        for (std::size_t i = 0; i < n; ++i) q(i, count) = v[i] / nv;
        ++count;
    }
    Matrix b(n, count);
    for (std::size_t j = 0; j < count; ++j)
        for (std::size_t i = 0; i < n; ++i) b(i, j) = q(i, j);
    return Subspace(n, b);
}

SymMatrix Subspace::projector() const {
    SymMatrix p(ambient_);
    for (std::size_t k = 0; k < dim(); ++k)
        for (std::size_t i = 0; i < ambient_; ++i)
            for (std::size_t j = 0; j <= i; ++j) p.add(i, j, basis_(i, k) * basis_(j, k));
    return p;
}

Vector Subspace::coordinates(const Vector& x) const {
    if (x.size() != ambient_) throw Error(ErrorCode::DimensionError, "vector does not match subspace ambient dimension");
    Vector c(dim(), 0.0);
    for (std::size_t k = 0; k < dim(); ++k) {
        double s = 0.0;
        for (std::size_t i = 0; i < ambient_; ++i) s += basis_(i, k) * x[i];
        c[k] = s;
    }
    return c;
}

Vector Subspace::embed(const Vector& c) const {
    if (c.size() != dim()) throw Error(ErrorCode::DimensionError, "coordinate vector has wrong length");
    Vector x(ambient_, 0.0);
    for (std::size_t k = 0; k < dim(); ++k)
        for (std::size_t i = 0; i < ambient_; ++i) x[i] += basis_(i, k) * c[k];
    return x;
}

Vector Subspace::project(const Vector& x) const { return embed(coordinates(x)); }

Subspace Subspace::complement() const {
    const std::size_t n = ambient_;
    const std::size_t want = n - dim();
    Matrix q(n, n);
    for (std::size_t j = 0; j < dim(); ++j)
        for (std::size_t i = 0; i < n; ++i) q(i, j) = basis_(i, j);
    std::size_t count = dim();
    std::vector<bool> used(n, false);
    Matrix out(n, want);
    for (std::size_t w = 0; w < want; ++w) {
        double best = -1.0;
        std::size_t best_i = 0;
        Vector best_v;
        for (std::size_t e = 0; e < n; ++e) {
            if (used[e]) continue;
            Vector v(n, 0.0);
            v[e] = 1.0;
            orthogonalize_against(v, q, count);
            const double nv = norm(v);
            if (nv > best + 1e-12) {
                best = nv;
                best_i = e;
                best_v = v;
            }
        }
        used[best_i] = true;
        for (std::size_t i = 0; i < n; ++i) {
            q(i, count) = best_v[i] / best;
            out(i, w) = q(i, count);
        }
        ++count;
    }
    return Subspace(n, out);
}

double Subspace::containment_gap(const Subspace& other) const {
    if (other.ambient_ != ambient_) throw Error(ErrorCode::DimensionError, "subspaces live in different spaces");
    const std::size_t k = other.dim();
    if (k == 0) return 0.0;
    if (other.dim() > dim()) return 1.0;
    Matrix r(ambient_, k);
    for (std::size_t j = 0; j < k; ++j) {
        Vector v = other.vector(j);
        const Vector p = project(v);
        for (std::size_t i = 0; i < ambient_; ++i) r(i, j) = v[i] - p[i];
    }
    const SymMatrix gram = symmetrize(r.transpose() * r);
    const double top = symmat::max_eigenvalue(gram);
    return std::sqrt(std::max(0.0, top));
}

bool Subspace::contains(const Subspace& other, double tol) const { return containment_gap(other) <= tol; }

double Subspace::angle_to(const Subspace& other) const {
    if (other.dim() != dim()) return 1.0;
    return std::max(containment_gap(other), other.containment_gap(*this));
}

SymMatrix SpectralDecomposition::reconstruct() const {
    const std::size_t n = eigenvalues.size();
    SymMatrix m(n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j <= i; ++j) m.add(i, j, eigenvalues[k] * eigenvectors(i, k) * eigenvectors(j, k));
    return m;
}

namespace symmat {

SpectralDecomposition spectral_decompose(const SymMatrix& m) {
    if (!m.all_finite()) throw Error(ErrorCode::InvalidMatrix, "non-finite entry");
    const std::size_t n = m.n();
    Matrix a = m.to_matrix();
    Matrix v = Matrix::identity(n);
    const double fro = m.frobenius();
    const double threshold = 1e-12 * fro;

    for (int sweep = 0; sweep < 100 && fro > 0.0; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) off += a(i, j) * a(i, j);
        if (std::sqrt(off) <= threshold) break;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    SpectralDecomposition out;
    out.eigenvalues.resize(n);
    out.eigenvectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a(order[k], order[k]);
        Vector col = v.col(order[k]);
        std::size_t big = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::fabs(col[i]) > std::fabs(col[big]) + 1e-12) big = i;
        if (col[big] < 0.0)
            for (double& x : col) x = -x;
        out.eigenvectors.set_col(k, col);
    }

    // re-orthonormalize clusters of (numerically) equal eigenvalues as blocks
    const double scale = std::max(1.0, m.max_abs());
    std::size_t start = 0;
    while (start < n) {
        std::size_t end = start + 1;
        while (end < n && out.eigenvalues[start] - out.eigenvalues[end] <= 1e-10 * scale) ++end;
        if (end - start > 1) {
            for (std::size_t k = start; k < end; ++k) {
                Vector col = out.eigenvectors.col(k);
                orthogonalize_against(col, out.eigenvectors, k);
                const double nc = norm(col);
                for (double& x : col) x /= nc;
                out.eigenvectors.set_col(k, col);
            }
        }
        start = end;
    }
    return out;
}

Subspace eig1_space(const SymMatrix& m, double tol) {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidTolerance, "tolerance must be positive");
    const auto sd = spectral_decompose(m);
    std::vector<Vector> cols;
    for (std::size_t k = 0; k < m.n(); ++k)
        if (std::fabs(sd.eigenvalues[k] - 1.0) <= tol) cols.push_back(sd.eigenvectors.col(k));
    return Subspace(m.n(), Matrix::from_columns(cols, m.n()));
}

double zero_threshold(const SymMatrix& q) { return 1e-10 * std::max(1.0, q.max_abs()); }

SignedSplit split_signed(const SymMatrix& q) {
    const std::size_t n = q.n();
    const auto sd = spectral_decompose(q);
    const double band = zero_threshold(q);
    SignedSplit out{SymMatrix(n), SymMatrix(n), {}, {}, {}};
    std::vector<Vector> plus, zero, minus;
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = sd.eigenvalues[k];
        const Vector u = sd.eigenvectors.col(k);
        if (lam > band) {
            out.q_plus += SymMatrix::outer(u, lam);
            plus.push_back(u);
        } else if (lam < -band) {
            out.q_minus += SymMatrix::outer(u, -lam);
            minus.push_back(u);
        } else {
            zero.push_back(u);
        }
    }
    out.e_plus = Subspace(n, Matrix::from_columns(plus, n));
    out.e_zero = Subspace(n, Matrix::from_columns(zero, n));
    out.e_minus = Subspace(n, Matrix::from_columns(minus, n));
    return out;
}

double min_eigenvalue(const SymMatrix& m) {
    if (m.n() == 0) return 0.0;
    return spectral_decompose(m).eigenvalues.back();
}

double max_eigenvalue(const SymMatrix& m) {
    if (m.n() == 0) return 0.0;
    return spectral_decompose(m).eigenvalues.front();
}

SymMatrix sqrt_psd(const SymMatrix& m) {
    return spectral_map(m, [](double x) { return std::sqrt(std::max(0.0, x)); });
}

SvdResult svd_right(const Matrix& a) {
    const std::size_t m = a.rows(), n = a.cols();
    Matrix u = a;
    Matrix v = Matrix::identity(n);
    for (int sweep = 0; sweep < 80; ++sweep) {
        bool rotated = false;
        for (std::size_t i = 0; i + 1 < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t r = 0; r < m; ++r) {
                    alpha += u(r, i) * u(r, i);
                    beta += u(r, j) * u(r, j);
                    gamma += u(r, i) * u(r, j);
                }
                if (alpha == 0.0 || beta == 0.0) continue;
                if (std::fabs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::fabs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t r = 0; r < m; ++r) {
                    const double ui = u(r, i), uj = u(r, j);
                    u(r, i) = c * ui - s * uj;
                    u(r, j) = s * ui + c * uj;
                }
                for (std::size_t r = 0; r < n; ++r) {
                    const double vi = v(r, i), vj = v(r, j);
                    v(r, i) = c * vi - s * vj;
                    v(r, j) = s * vi + c * vj;
                }
            }
        if (!rotated) break;
    }
    Vector sv(n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < m; ++r) s += u(r, j) * u(r, j);
        sv[j] = std::sqrt(s);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return sv[x] > sv[y]; });
    SvdResult out{Vector(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.singular_values[k] = sv[order[k]];
        out.right_vectors.set_col(k, v.col(order[k]));
    }
    return out;
}

std::size_t numerical_rank(const Matrix& a, double rel_tol) {
    const auto s = svd_right(a);
    if (s.singular_values.empty() || s.singular_values[0] == 0.0) return 0;
    std::size_t r = 0;
    for (double x : s.singular_values)
        if (x > rel_tol * s.singular_values[0]) ++r;
    return std::min(r, std::min(a.rows(), a.cols()));
}

Subspace null_space(const Matrix& a, double rel_tol) {
    const std::size_t n = a.cols();
    const auto s = svd_right(a);
    const double top = s.singular_values.empty() ? 0.0 : s.singular_values[0];
    std::vector<Vector> cols;
    for (std::size_t k = 0; k < n; ++k)
        if (top == 0.0 || s.singular_values[k] <= rel_tol * top) cols.push_back(s.right_vectors.col(k));
    return Subspace::span(n, cols);
}

double det_ratio_precision(const std::vector<SymMatrix>& a_list, const std::vector<SymMatrix>& prec_list,
                           const SymMatrix& prec0, double tol) {
    if (a_list.empty() || a_list.size() != prec_list.size())
        throw Error(ErrorCode::DimensionError, "a_list and sigma_list must be non-empty and of equal length");
    const std::size_t n = prec0.n();
    SymMatrix denom = prec0;
    double log_num = 0.0;
    for (std::size_t i = 0; i < a_list.size(); ++i) {
        if (a_list[i].n() != n || prec_list[i].n() != n) throw Error(ErrorCode::DimensionError, "matrix size mismatch");
        const SymMatrix d = a_list[i] - prec_list[i];
        const double scale = std::max(1.0, std::max(a_list[i].max_abs(), prec_list[i].max_abs()));
        if (min_eigenvalue(d) < -tol * scale)
            throw Error(ErrorCode::ConstraintViolation, "A_" + std::to_string(i) + " is not above the precision bound");
        auto l = cholesky(a_list[i]);
        if (!l) throw Error(ErrorCode::SingularForm, "A_" + std::to_string(i) + " is singular");
        log_num += log_det_chol(*l);
        denom += d;
    }
    auto ld = cholesky(denom);
    if (!ld) throw Error(ErrorCode::SingularForm, "denominator form is not positive definite");
    return std::exp(log_num - log_det_chol(*ld));
}

double det_ratio(const std::vector<SymMatrix>& a_list, const std::vector<SymMatrix>& sigma_list,
                 const SymMatrix& sigma0, double tol) {
    std::vector<SymMatrix> prec;
    prec.reserve(sigma_list.size());
    for (const auto& s : sigma_list) prec.push_back(inverse_pd(s));
    return det_ratio_precision(a_list, prec, inverse_pd(sigma0), tol);
}

bool equality_structure_check(const SymMatrix& a1, const SymMatrix& a2, double tol) {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidTolerance, "tolerance must be positive");
    if (a1.n() != a2.n()) throw Error(ErrorCode::DimensionError, "matrix size mismatch");
    if (min_eigenvalue(a1) < 1.0 - tol || min_eigenvalue(a2) < 1.0 - tol)
        throw Error(ErrorCode::ConstraintViolation, "matrices must dominate the identity");
    const Subspace e1 = eig1_space(a1, tol);
    const Subspace e2 = eig1_space(a2, tol);
    return e2.contains(e1.complement(), tol);
}

Matrix random_orthogonal(std::size_t n, std::mt19937_64& rng) {
    boost::random::normal_distribution<double> gauss;
    for (;;) {
        std::vector<Vector> cols(n, Vector(n));
        for (auto& c : cols)
            for (double& x : c) x = gauss(rng);
        const Subspace s = Subspace::span(n, cols);
        if (s.dim() == n) return s.basis();
    }
}

SymMatrix conjugate(const Matrix& u, const SymMatrix& a) { return symmetrize(u * a.to_matrix() * u.transpose()); }

}  // namespace symmat
}  // namespace gcilab
