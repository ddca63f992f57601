#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace gcilab {

using Vector = std::vector<double>;

constexpr std::size_t kMaxDim = 64;

// Dense row-major matrix. Used for maps B_i, eigenvector frames and
// Cholesky factors.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n);
    static Matrix from_rows(const std::vector<Vector>& rows);
    static Matrix from_columns(const std::vector<Vector>& cols, std::size_t rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }
    const std::vector<double>& data() const { return data_; }

    Vector col(std::size_t j) const;
    Vector row(std::size_t i) const;
    void set_col(std::size_t j, const Vector& v);
    Matrix transpose() const;
    std::vector<Vector> to_rows() const;

    double max_abs() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Vector operator*(const Matrix& a, const Vector& x);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);

// Symmetric matrix stored once (lower triangle, packed by rows).
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t n, double fill = 0.0);

    static SymMatrix identity(std::size_t n);
    static SymMatrix diagonal(const Vector& d);
    static SymMatrix scaled_identity(std::size_t n, double s);
    // Accepts a square matrix whose entries are symmetric up to
    // 1e-12 relative; the two triangles are averaged.
    static SymMatrix from_matrix(const Matrix& m);
    static SymMatrix from_rows(const std::vector<Vector>& rows);
    static SymMatrix outer(const Vector& u, double scale = 1.0);

    std::size_t n() const { return n_; }
    double operator()(std::size_t i, std::size_t j) const { return data_[index(i, j)]; }
    void set(std::size_t i, std::size_t j, double v) { data_[index(i, j)] = v; }
    void add(std::size_t i, std::size_t j, double v) { data_[index(i, j)] += v; }

    Matrix to_matrix() const;
    std::vector<Vector> to_rows() const;
    Vector flat() const;  // row-major n*n

    bool all_finite() const;
    double max_abs() const;
    double frobenius() const;
    double trace() const;

    Vector apply(const Vector& x) const;
    double quad(const Vector& x) const;

    SymMatrix& operator+=(const SymMatrix& o);
    SymMatrix& operator-=(const SymMatrix& o);
    SymMatrix& operator*=(double s);

    const std::vector<double>& packed() const { return data_; }

private:
    static std::size_t index(std::size_t i, std::size_t j) {
        return i >= j ? i * (i + 1) / 2 + j : j * (j + 1) / 2 + i;
    }
    std::size_t n_ = 0;
    std::vector<double> data_;
};

SymMatrix operator+(SymMatrix a, const SymMatrix& b);
SymMatrix operator-(SymMatrix a, const SymMatrix& b);
SymMatrix operator*(double s, SymMatrix a);

// Bᵀ A B for B of shape (a.n × k).
SymMatrix congruence(const Matrix& b, const SymMatrix& a);
// B A Bᵀ for B of shape (k × a.n).
SymMatrix congruence_t(const Matrix& b, const SymMatrix& a);
// Symmetric part of a square matrix product known to be symmetric.
SymMatrix symmetrize(const Matrix& m);

// Lower Cholesky factor; empty optional when not positive definite.
std::optional<Matrix> cholesky(const SymMatrix& a);
double log_det_chol(const Matrix& l);
// Throws NotPositiveDefinite.
double log_det_pd(const SymMatrix& a);
SymMatrix inverse_pd(const SymMatrix& a);
// Solves L y = b (forward) and Lᵀ x = y (backward).
Vector forward_solve(const Matrix& l, const Vector& b);
Vector backward_solve_t(const Matrix& l, const Vector& y);

double dot(const Vector& a, const Vector& b);
double norm(const Vector& a);
Vector axpy(double a, const Vector& x, const Vector& y);  // a*x + y
Vector scaled(const Vector& x, double s);

}  // namespace gcilab
