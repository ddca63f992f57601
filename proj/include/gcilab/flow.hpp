#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gcilab/blconst.hpp"
#include "gcilab/linalg.hpp"

namespace gcilab {

// Samples on x_i = xmin + i*dx.
class GridDensity {
public:
    GridDensity() = default;
    // Throws EmptyDensity / InvalidInput.
    GridDensity(double xmin, double dx, Vector values);

    double xmin() const { return xmin_; }
    double dx() const { return dx_; }
    double xmax() const { return xmin_ + dx_ * static_cast<double>(values_.size() - 1); }
    std::size_t size() const { return values_.size(); }
    double x(std::size_t i) const { return xmin_ + dx_ * static_cast<double>(i); }
    const Vector& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    double mass() const;  // trapezoid
    double barycenter() const;
    double variance() const;
    double spread() const { return std::sqrt(variance()); }
    double max_value() const;
    // Linear interpolation, zero outside the window.
    double at(double x) const;
    // Index of the sample nearest to 0 (the grid need not contain 0).
    std::size_t center_index() const;

    GridDensity normalized() const;
    GridDensity with_values(Vector v) const { return GridDensity(xmin_, dx_, std::move(v)); }

private:
    double xmin_ = 0.0;
    double dx_ = 1.0;
    Vector values_;
};

struct FlowStep {
    std::size_t k = 0;
    double bl_value = 0.0;
    double l1_to_gaussian = 0.0;  // first input
    double l1_to_gaussian_2 = 0.0;
    double mass = 0.0;
    double mass_2 = 0.0;
    double barycenter = 0.0;
    double barycenter_2 = 0.0;
    // bl(k-1)^2 - I * bl(k); unset at k = 0
    std::optional<double> one_step_gap;
};

struct FlowReport {
    double constant = 0.0;  // Gaussian constant used in the one-step check
    double slack = 1e-3;
    std::vector<FlowStep> steps;
    std::vector<GridDensity> history_1;
    std::vector<GridDensity> history_2;
    bool one_step_holds = true;
    std::vector<std::string> warnings;
};

struct FradeliziResult {
    bool ok = true;
    double f0 = 0.0;     // value at the origin
    double fmax = 0.0;
    double ratio = 0.0;  // fmax / f0
    double bound = 0.0;  // e^n
    double location = 0.0;  // argmax
};

struct TruncateResult {
    GridDensity density;
    double xi = 0.0;
};

namespace flow {

// points >= 64 and odd; negative samples are clipped (warning appended).
GridDensity grid_from_function(const std::function<double(double)>& f, double half_width, std::size_t points,
                               std::vector<std::string>* warnings = nullptr);
// Same window, but the function is shifted so the sampled barycenter is 0, then normalized.
GridDensity centered_grid_from_function(const std::function<double(double)>& f, double half_width,
                                        std::size_t points);
// Samples the cell averages (1/dx)·mass(x_i + shift − dx/2, x_i + shift + dx/2).  Cell averages move
// continuously with the shift even when the density jumps, which lets discontinuous inputs be centered
// to rounding accuracy.
GridDensity grid_from_cell_mass(const std::function<double(double, double)>& cell_mass, double half_width,
                                std::size_t points, double shift = 0.0);
GridDensity centered_grid_from_cell_mass(const std::function<double(double, double)>& cell_mass,
                                         double half_width, std::size_t points);
// Symmetric grid with ±1 at half-cells: dx = 2/(2k+1), used for box inputs.
std::size_t aligned_points(double half_width, std::size_t cells_per_unit_interval);

bool logconcavity_check(const GridDensity& f, double g);
bool semilogconvexity_check(const GridDensity& f, double h);

// Throws NotCentered / NotLogConcave when the preconditions fail.
FradeliziResult fradelizi_check(const GridDensity& f);

// 2^{1/2} (f*f)(sqrt(2) x) on the same grid.  Throws GridTooSmall.
GridDensity ball_step(const GridDensity& f);

// Discrete ∫e^{qx²}∏f_i(b_i x)^{c_i} / ∏(∫f_i)^{c_i} for a one-dimensional datum.
double bl_functional(const BLDatum& datum, const std::vector<const GridDensity*>& fs);

FlowReport ball_iterate(const GridDensity& f1, const GridDensity& f2, std::size_t steps, const BLDatum& datum,
                        const std::optional<ConstraintBand>& band = std::nullopt, double slack = 1e-3);

// Density of e^{-t}Y + sqrt(beta(1-e^{-2t})) Z, Y ~ f.  Throws InvalidParameter / GridTooSmall.
GridDensity fokker_planck_step(const GridDensity& f, double beta, double t);

TruncateResult truncate_recenter(const GridDensity& f, double radius, double eps);
// out <= (2e)^eps f pointwise, with one-cell slack on f.
bool domination_check(const GridDensity& out, const GridDensity& f, double eps);
// Doubles radius from r_start until the domination bound holds; nullopt past the window.
std::optional<TruncateResult> find_truncation_radius(const GridDensity& f, double eps, double r_start,
                                                     double* radius_out = nullptr);

// L1 distance to the Gaussian with the grid mean and variance.
double clt_distance(const GridDensity& f);

// Random centered log-concave density on the given grid (several shape families).
GridDensity random_log_concave(std::uint64_t seed, double half_width, std::size_t points);

}  // namespace flow

// Square tensor grid centered at 0, at most 513 points per axis.
class GridDensity2D {
public:
    GridDensity2D(double half_width, std::size_t points, const std::function<double(double, double)>& f);

    std::size_t size() const { return points_; }
    double dx() const { return dx_; }
    double x(std::size_t i) const { return -half_width_ + dx_ * static_cast<double>(i); }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * points_ + j]; }

    double mass() const;
    Vector barycenter() const;
    double max_value() const;
    double value_at_origin() const;

private:
    double half_width_;
    std::size_t points_;
    double dx_;
    Vector values_;
};

namespace flow {

// ∫e^{<x,Qx>} f1 f2 / (∫f1 ∫f2) on a shared 2-D grid.
double bl_functional_2d(const SymMatrix& q, const GridDensity2D& f1, const GridDensity2D& f2);
FradeliziResult fradelizi_check_2d(const GridDensity2D& f);

}  // namespace flow
}  // namespace gcilab
