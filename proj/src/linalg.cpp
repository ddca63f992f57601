#include "gcilab/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "gcilab/error.hpp"

namespace gcilab {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidMatrix: return "InvalidMatrix";
        case ErrorCode::InvalidTolerance: return "InvalidTolerance";
        case ErrorCode::SingularForm: return "SingularForm";
        case ErrorCode::ConstraintViolation: return "ConstraintViolation";
        case ErrorCode::DimensionError: return "DimensionError";
        case ErrorCode::OriginNotInterior: return "OriginNotInterior";
        case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
        case ErrorCode::MassTooSmall: return "MassTooSmall";
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::EmptyDensity: return "EmptyDensity";
        case ErrorCode::GridTooSmall: return "GridTooSmall";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::NotCentered: return "NotCentered";
        case ErrorCode::NotLogConcave: return "NotLogConcave";
        case ErrorCode::PreconditionFailed: return "PreconditionFailed";
        case ErrorCode::NoBracket: return "NoBracket";
        case ErrorCode::NoSeries: return "NoSeries";
        case ErrorCode::SchemaError: return "SchemaError";
    }
    return "Unknown";
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_rows(const std::vector<Vector>& rows) {
    if (rows.empty()) return Matrix();
    Matrix m(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != m.cols_) throw Error(ErrorCode::DimensionError, "ragged matrix rows");
        for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

Matrix Matrix::from_columns(const std::vector<Vector>& cols, std::size_t rows) {
    Matrix m(rows, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j].size() != rows) throw Error(ErrorCode::DimensionError, "column length mismatch");
        for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    }
    return m;
}

Vector Matrix::col(std::size_t j) const {
    Vector v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
}

Vector Matrix::row(std::size_t i) const { return Vector(row_ptr(i), row_ptr(i) + cols_); }

void Matrix::set_col(std::size_t j, const Vector& v) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

std::vector<Vector> Matrix::to_rows() const {
    std::vector<Vector> r(rows_);
    for (std::size_t i = 0; i < rows_; ++i) r[i] = row(i);
    return r;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::fabs(v));
    return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw Error(ErrorCode::DimensionError, "matrix product shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vector operator*(const Matrix& a, const Vector& x) {
    if (a.cols() != x.size()) throw Error(ErrorCode::DimensionError, "matrix-vector shape mismatch");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* r = a.row_ptr(i);
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += r[j] * x[j];
        y[i] = s;
    }
    return y;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(ErrorCode::DimensionError, "shape mismatch");
    Matrix c = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) += b(i, j);
    return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(ErrorCode::DimensionError, "shape mismatch");
    Matrix c = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) -= b(i, j);
    return c;
}

Matrix operator*(double s, const Matrix& a) {
    Matrix c = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) *= s;
    return c;
}

SymMatrix::SymMatrix(std::size_t n, double fill) : n_(n), data_(n * (n + 1) / 2, fill) {}

SymMatrix SymMatrix::identity(std::size_t n) { return scaled_identity(n, 1.0); }

SymMatrix SymMatrix::scaled_identity(std::size_t n, double s) {
    SymMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, s);
    return m;
}

SymMatrix SymMatrix::diagonal(const Vector& d) {
    SymMatrix m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m.set(i, i, d[i]);
    return m;
}

SymMatrix SymMatrix::from_matrix(const Matrix& m) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::InvalidMatrix, "matrix is not square");
    const std::size_t n = m.rows();
    const double scale = std::max(1.0, m.max_abs());
    SymMatrix s(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double a = m(i, j), b = m(j, i);
            if (!std::isfinite(a) || !std::isfinite(b)) throw Error(ErrorCode::InvalidMatrix, "non-finite entry");
            if (std::fabs(a - b) > 1e-12 * scale)
                throw Error(ErrorCode::InvalidMatrix, "matrix is not symmetric");
            s.set(i, j, 0.5 * (a + b));
        }
    return s;
}

SymMatrix SymMatrix::from_rows(const std::vector<Vector>& rows) {
    for (const auto& r : rows)
        if (r.size() != rows.size()) throw Error(ErrorCode::InvalidMatrix, "matrix is not square");
    return from_matrix(Matrix::from_rows(rows));
}

SymMatrix SymMatrix::outer(const Vector& u, double scale) {
    SymMatrix m(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        for (std::size_t j = 0; j <= i; ++j) m.set(i, j, scale * u[i] * u[j]);
    return m;
}

Matrix SymMatrix::to_matrix() const {
    Matrix m(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j) m(i, j) = (*this)(i, j);
    return m;
}

std::vector<Vector> SymMatrix::to_rows() const { return to_matrix().to_rows(); }

Vector SymMatrix::flat() const { return to_matrix().data(); }

bool SymMatrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double SymMatrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::fabs(v));
    return m;
}

double SymMatrix::frobenius() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double v = (*this)(i, j);
            s += (i == j ? 1.0 : 2.0) * v * v;
        }
    return std::sqrt(s);
}

double SymMatrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

Vector SymMatrix::apply(const Vector& x) const {
    if (x.size() != n_) throw Error(ErrorCode::DimensionError, "symmetric apply shape mismatch");
    Vector y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

double SymMatrix::quad(const Vector& x) const { return dot(x, apply(x)); }

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
    if (o.n_ != n_) throw Error(ErrorCode::DimensionError, "symmetric sum shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
    if (o.n_ != n_) throw Error(ErrorCode::DimensionError, "symmetric difference shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

SymMatrix congruence(const Matrix& b, const SymMatrix& a) {
    if (b.rows() != a.n()) throw Error(ErrorCode::DimensionError, "congruence shape mismatch");
    const Matrix ab = a.to_matrix() * b;
    const std::size_t k = b.cols();
    SymMatrix out(k);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            double s = 0.0;
            for (std::size_t r = 0; r < b.rows(); ++r) s += b(r, i) * ab(r, j);
            out.set(i, j, s);
        }
    return out;
}

SymMatrix congruence_t(const Matrix& b, const SymMatrix& a) { return congruence(b.transpose(), a); }

SymMatrix symmetrize(const Matrix& m) {
    if (m.rows() != m.cols()) throw Error(ErrorCode::InvalidMatrix, "matrix is not square");
    SymMatrix s(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j <= i; ++j) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
    return s;
}

std::optional<Matrix> cholesky(const SymMatrix& a) {
    const std::size_t n = a.n();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return l;
}

double log_det_chol(const Matrix& l) {
    double s = 0.0;
    for (std::size_t i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
    return 2.0 * s;
}

double log_det_pd(const SymMatrix& a) {
    auto l = cholesky(a);
    if (!l) throw Error(ErrorCode::NotPositiveDefinite, "matrix is not positive definite");
    return log_det_chol(*l);
}

Vector forward_solve(const Matrix& l, const Vector& b) {
    const std::size_t n = l.rows();
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    return y;
}

Vector backward_solve_t(const Matrix& l, const Vector& y) {
    const std::size_t n = l.rows();
    Vector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
        x[ii] = s / l(ii, ii);
    }
    return x;
}

SymMatrix inverse_pd(const SymMatrix& a) {
    auto l = cholesky(a);
    if (!l) throw Error(ErrorCode::NotPositiveDefinite, "matrix is not positive definite");
    const std::size_t n = a.n();
    Matrix inv(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        Vector e(n, 0.0);
        e[j] = 1.0;
        inv.set_col(j, backward_solve_t(*l, forward_solve(*l, e)));
    }
    return symmetrize(inv);
}

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw Error(ErrorCode::DimensionError, "dot length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

Vector axpy(double a, const Vector& x, const Vector& y) {
    if (x.size() != y.size()) throw Error(ErrorCode::DimensionError, "axpy length mismatch");
    Vector r(y);
    for (std::size_t i = 0; i < x.size(); ++i) r[i] += a * x[i];
    return r;
}

Vector scaled(const Vector& x, double s) {
    Vector r(x);
    for (double& v : r) v *= s;
    return r;
}

}  // namespace gcilab
