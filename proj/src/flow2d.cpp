#include <algorithm>
#include <cmath>
#include <numbers>

#include "gcilab/error.hpp"
#include "gcilab/flow.hpp"

namespace gcilab {

namespace {

double edge_weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

}  // namespace

GridDensity2D::GridDensity2D(double half_width, std::size_t points, const std::function<double(double, double)>& f)
    : half_width_(half_width), points_(points), dx_(0.0) {
    if (points < 3 || points > 513 || points % 2 == 0)
        throw Error(ErrorCode::InvalidParameter, "2-D grids need an odd point count <= 513");
    if (!(half_width > 0.0)) throw Error(ErrorCode::InvalidParameter, "half_width must be positive");
    dx_ = 2.0 * half_width / static_cast<double>(points - 1);
    const double c = static_cast<double>((points - 1) / 2);
    values_.resize(points * points);
    for (std::size_t i = 0; i < points; ++i)
        for (std::size_t j = 0; j < points; ++j) {
            const double v = f((static_cast<double>(i) - c) * dx_, (static_cast<double>(j) - c) * dx_);
            if (!std::isfinite(v)) throw Error(ErrorCode::InvalidInput, "function returned a non-finite value");
            values_[i * points + j] = std::max(0.0, v);
        }
    if (!(mass() > 0.0)) throw Error(ErrorCode::EmptyDensity, "sampled function has zero mass");
}

double GridDensity2D::mass() const {
    double s = 0.0;
    for (std::size_t i = 0; i < points_; ++i)
        for (std::size_t j = 0; j < points_; ++j)
            s += edge_weight(i, points_) * edge_weight(j, points_) * values_[i * points_ + j];
    return s * dx_ * dx_;
}

Vector GridDensity2D::barycenter() const {
    double s0 = 0.0, s1 = 0.0, w = 0.0;
    for (std::size_t i = 0; i < points_; ++i)
        for (std::size_t j = 0; j < points_; ++j) {
            const double v = edge_weight(i, points_) * edge_weight(j, points_) * values_[i * points_ + j];
            s0 += x(i) * v;
            s1 += x(j) * v;
            w += v;
        }
    return {s0 / w, s1 / w};
}

double GridDensity2D::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

double GridDensity2D::value_at_origin() const {
    const std::size_t c = (points_ - 1) / 2;
    return values_[c * points_ + c];
}

namespace flow {

double bl_functional_2d(const SymMatrix& q, const GridDensity2D& f1, const GridDensity2D& f2) {
    if (q.n() != 2) throw Error(ErrorCode::DimensionError, "Q must be 2 x 2");
    if (f1.size() != f2.size() || f1.dx() != f2.dx()) throw Error(ErrorCode::DimensionError, "grids differ");
    const std::size_t n = f1.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double a = f1(i, j) * f2(i, j);
            if (a == 0.0) continue;
            const double x = f1.x(i), y = f1.x(j);
            const double e = q(0, 0) * x * x + 2.0 * q(0, 1) * x * y + q(1, 1) * y * y;
            s += edge_weight(i, n) * edge_weight(j, n) * a * std::exp(e);
        }
    return s * f1.dx() * f1.dx() / (f1.mass() * f2.mass());
}

FradeliziResult fradelizi_check_2d(const GridDensity2D& f) {
    const Vector b = f.barycenter();
    double second = 0.0, w = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = 0; j < f.size(); ++j) {
            second += (f.x(i) * f.x(i) + f.x(j) * f.x(j)) * f(i, j);
            w += f(i, j);
        }
    const double tol = 1e-6 * std::sqrt(second / w);
    if (std::hypot(b[0], b[1]) > tol) throw Error(ErrorCode::NotCentered, "2-D density is not centered");
    FradeliziResult r;
    r.bound = std::exp(2.0);
    r.f0 = f.value_at_origin();
    r.fmax = f.max_value();
    r.ratio = r.fmax / r.f0;
    const std::size_t c = (f.size() - 1) / 2;
    double hi = 0.0;
    for (std::size_t i = c - 1; i <= c + 1; ++i)
        for (std::size_t j = c - 1; j <= c + 1; ++j) hi = std::max(hi, f(i, j));
    r.ok = r.fmax >= r.f0 * (1.0 - 1e-12) && r.fmax <= r.bound * hi * (1.0 + 1e-12);
    return r;
}

}  // namespace flow
}  // namespace gcilab
