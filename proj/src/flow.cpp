#include "gcilab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

#include "gcilab/error.hpp"
#include "gcilab/gaussmc.hpp"
#include "gcilab/normal.hpp"

namespace gcilab {

GridDensity::GridDensity(double xmin, double dx, Vector values) : xmin_(xmin), dx_(dx), values_(std::move(values)) {
    if (!(dx_ > 0.0) || !std::isfinite(dx_) || !std::isfinite(xmin_))
        throw Error(ErrorCode::InvalidInput, "grid spacing must be positive");
    if (values_.size() < 3) throw Error(ErrorCode::GridTooSmall, "grid needs at least 3 samples");
    for (double v : values_)
        if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::InvalidInput, "grid values must be finite and >= 0");
    if (!(mass() > 0.0)) throw Error(ErrorCode::EmptyDensity, "grid density has zero mass");
}

double GridDensity::mass() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return dx_ * (s - 0.5 * (values_.front() + values_.back()));
}

double GridDensity::barycenter() const {
    double s = 0.0, w = 0.0;
    const std::size_t n = values_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double wt = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        s += wt * x(i) * values_[i];
        w += wt * values_[i];
    }
    return s / w;
}

double GridDensity::variance() const {
    const double m = barycenter();
    double s = 0.0, w = 0.0;
    const std::size_t n = values_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double wt = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
        const double d = x(i) - m;
        s += wt * d * d * values_[i];
        w += wt * values_[i];
    }
    return s / w;
}

double GridDensity::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

double GridDensity::at(double xv) const {
    const double u = (xv - xmin_) / dx_;
    const double last = static_cast<double>(values_.size() - 1);
    if (!(u >= 0.0) || u > last) return 0.0;
    const std::size_t i = std::min(static_cast<std::size_t>(u), values_.size() - 2);
    const double fr = u - static_cast<double>(i);
    return values_[i] + fr * (values_[i + 1] - values_[i]);
}

std::size_t GridDensity::center_index() const {
    const double u = std::round(-xmin_ / dx_);
    return static_cast<std::size_t>(std::clamp(u, 0.0, static_cast<double>(values_.size() - 1)));
}

GridDensity GridDensity::normalized() const {
    const double m = mass();
    Vector v = values_;
    for (double& x : v) x /= m;
    return GridDensity(xmin_, dx_, std::move(v));
}

namespace flow {

namespace {

void check_points(double half_width, std::size_t points) {
    if (points < 64 || points % 2 == 0) throw Error(ErrorCode::InvalidParameter, "points must be odd and >= 64");
    if (!(half_width > 0.0)) throw Error(ErrorCode::InvalidParameter, "half_width must be positive");
}

// sampled barycenter of x -> f(x + c), as a function of c
template <class Sampler>
double shift_root(Sampler&& bary_at) {
    double b0 = bary_at(0.0);
    if (b0 == 0.0) return 0.0;
    double lo = 0.0, hi = 0.0, blo = b0, bhi = b0;
    double step = std::max(std::fabs(b0), 1e-6);
    for (int k = 0; k < 80; ++k, step *= 2.0) {
        // the sampled barycenter decreases as the shift grows
        const double c = b0 > 0.0 ? step : -step;
        const double bc = bary_at(c);
        if ((bc > 0.0) != (b0 > 0.0) || bc == 0.0) {
            if (c > 0.0) {
                hi = c;
                bhi = bc;
            } else {
                lo = c;
                blo = bc;
            }
            break;
        }
        if (c > 0.0) {
            lo = c;
            blo = bc;
        } else {
            hi = c;
            bhi = bc;
        }
    }
    if ((blo > 0.0) == (bhi > 0.0) && blo != 0.0 && bhi != 0.0)
        throw Error(ErrorCode::NoConvergence, "could not bracket the centering shift");
    if (lo > hi) std::swap(lo, hi), std::swap(blo, bhi);
    for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + std::fabs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double bm = bary_at(mid);
        if (bm == 0.0) return mid;
        if ((bm > 0.0) == (blo > 0.0)) {
            lo = mid;
            blo = bm;
        } else {
            hi = mid;
            bhi = bm;
        }
    }
    return std::fabs(blo) < std::fabs(bhi) ? lo : hi;
}

double sampled_barycenter(const Vector& v, double dx, std::size_t c) {
    double s = 0.0, w = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double wt = (i == 0 || i + 1 == v.size()) ? 0.5 : 1.0;
        s += wt * (static_cast<double>(i) - static_cast<double>(c)) * dx * v[i];
        w += wt * v[i];
    }
    return w > 0.0 ? s / w : 0.0;
}

Vector sample(const std::function<double(double)>& f, double dx, std::size_t points, double shift) {
    const std::size_t c = (points - 1) / 2;
    Vector v(points);
    for (std::size_t i = 0; i < points; ++i) v[i] = f((static_cast<double>(i) - static_cast<double>(c)) * dx + shift);
    return v;
}

Vector sample_cells(const std::function<double(double, double)>& cm, double dx, std::size_t points, double shift) {
    const std::size_t c = (points - 1) / 2;
    Vector v(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double xi = (static_cast<double>(i) - static_cast<double>(c)) * dx + shift;
        v[i] = std::max(0.0, cm(xi - 0.5 * dx, xi + 0.5 * dx)) / dx;
    }
    return v;
}

// D_i of psi = -log f - k x^2/2 with a tolerance; callback sees (D, tol)
template <class Test>
bool curvature_scan(const GridDensity& f, double k, Test&& ok) {
    const Vector& v = f.values();
    const double fmax = f.max_value();
    const double thr = 1e-14 * fmax;
    const double dx2 = f.dx() * f.dx();
    const std::size_t n = v.size();
    // support above the threshold must be one interval
    std::size_t first = n, last = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (v[i] > thr) {
            first = std::min(first, i);
            last = i;
        }
    for (std::size_t i = first; i <= last; ++i)
        if (!(v[i] > thr)) return false;
    auto psi = [&](std::size_t i) {
        if (v[i] <= 0.0) return std::numeric_limits<double>::infinity();
        const double xi = f.x(i);
        return -std::log(v[i]) - 0.5 * k * xi * xi;
    };
    constexpr double kEps = std::numeric_limits<double>::epsilon();
    for (std::size_t i = std::max<std::size_t>(first, 1); i <= std::min(last, n - 2); ++i) {
        const double a = psi(i - 1), b = psi(i), c = psi(i + 1);
        const double d = (std::isinf(a) || std::isinf(c)) ? std::numeric_limits<double>::infinity() : a - 2.0 * b + c;
        const double local = std::fabs(std::log(v[i] / fmax));
        const double noise = 1e-12 + 4e-15 * fmax / v[i] +
                             64.0 * kEps * (std::isinf(d) ? 0.0 : std::fabs(a) + 2.0 * std::fabs(b) + std::fabs(c));
        const double tol = 1e-6 * dx2 * (1.0 + local) + noise;
        if (!ok(d, tol)) return false;
    }
    return true;
}

}  // namespace

GridDensity grid_from_function(const std::function<double(double)>& f, double half_width, std::size_t points,
                               std::vector<std::string>* warnings) {
    check_points(half_width, points);
    const double dx = 2.0 * half_width / static_cast<double>(points - 1);
    Vector v = sample(f, dx, points, 0.0);
    bool clipped = false;
    for (double& x : v) {
        if (!std::isfinite(x)) throw Error(ErrorCode::InvalidInput, "function returned a non-finite value");
        if (x < 0.0) {
            x = 0.0;
            clipped = true;
        }
    }
    if (clipped && warnings) warnings->push_back("negative samples clipped to 0");
    double s = 0.0;
    for (double x : v) s += x;
    if (!(s > 0.0)) throw Error(ErrorCode::EmptyDensity, "sampled function has zero mass");
    return GridDensity(-half_width, dx, std::move(v));
}

GridDensity centered_grid_from_function(const std::function<double(double)>& f, double half_width,
                                        std::size_t points) {
    check_points(half_width, points);
    const double dx = 2.0 * half_width / static_cast<double>(points - 1);
    const std::size_t c = (points - 1) / 2;
    auto clip = [&](double x) { return std::max(0.0, f(x)); };
    const double shift = shift_root([&](double s) { return sampled_barycenter(sample(clip, dx, points, s), dx, c); });
    return GridDensity(-half_width, dx, sample(clip, dx, points, shift)).normalized();
}

GridDensity grid_from_cell_mass(const std::function<double(double, double)>& cell_mass, double half_width,
                                std::size_t points, double shift) {
    check_points(half_width, points);
    const double dx = 2.0 * half_width / static_cast<double>(points - 1);
    return GridDensity(-half_width, dx, sample_cells(cell_mass, dx, points, shift));
}

GridDensity centered_grid_from_cell_mass(const std::function<double(double, double)>& cell_mass,
                                         double half_width, std::size_t points) {
    check_points(half_width, points);
    const double dx = 2.0 * half_width / static_cast<double>(points - 1);
    const std::size_t c = (points - 1) / 2;
    const double shift =
        shift_root([&](double s) { return sampled_barycenter(sample_cells(cell_mass, dx, points, s), dx, c); });
    return GridDensity(-half_width, dx, sample_cells(cell_mass, dx, points, shift)).normalized();
}

std::size_t aligned_points(double half_width, std::size_t cells_per_unit_interval) {
    const double dx = 2.0 / static_cast<double>(2 * cells_per_unit_interval + 1);
    const auto m = static_cast<std::size_t>(std::llround(half_width / dx));
    return 2 * m + 1;
}

bool logconcavity_check(const GridDensity& f, double g) {
    return curvature_scan(f, g, [](double d, double tol) { return d >= -tol; });
}

bool semilogconvexity_check(const GridDensity& f, double h) {
    return curvature_scan(f, h, [](double d, double tol) { return d <= tol; });
}

FradeliziResult fradelizi_check(const GridDensity& f) {
    const double spread = f.spread();
    if (std::fabs(f.barycenter()) > 1e-6 * spread)
        throw Error(ErrorCode::NotCentered, "barycenter " + std::to_string(f.barycenter()) + " is not 0");
    if (!logconcavity_check(f, 0.0)) throw Error(ErrorCode::NotLogConcave, "density is not log-concave");
    FradeliziResult r;
    r.bound = std::numbers::e;
    const Vector& v = f.values();
    const auto it = std::max_element(v.begin(), v.end());
    r.fmax = *it;
    r.location = f.x(static_cast<std::size_t>(it - v.begin()));
    r.f0 = f.at(0.0);
    r.ratio = r.fmax / r.f0;
    // one grid cell of slack on either side of the origin
    const double u = -f.xmin() / f.dx();
    const auto j = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, static_cast<double>(v.size() - 2)));
    const double lo = std::min(v[j], v[j + 1]);
    double hi = 0.0;
    for (std::size_t k = (j == 0 ? 0 : j - 1); k <= std::min(j + 2, v.size() - 1); ++k) hi = std::max(hi, v[k]);
    r.ok = r.fmax >= lo * (1.0 - 1e-12) && r.fmax <= r.bound * hi * (1.0 + 1e-12);
    return r;
}

GridDensity ball_step(const GridDensity& f) {
    const Vector& v = f.values();
    const std::size_t n = v.size();
    const double dx = f.dx();
    Vector conv(2 * n - 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] == 0.0) continue;
        const double vi = v[i] * dx;
        double* out = conv.data() + i;
        for (std::size_t j = 0; j < n; ++j) out[j] += vi * v[j];
    }
    const double y0 = 2.0 * f.xmin();
    const double reach = std::sqrt(2.0) * std::max(std::fabs(f.xmin()), std::fabs(f.xmax()));
    double total = 0.0, outside = 0.0;
    for (std::size_t k = 0; k < conv.size(); ++k) {
        total += conv[k];
        if (std::fabs(y0 + dx * static_cast<double>(k)) > reach) outside += conv[k];
    }
    if (outside > 1e-9 * total) throw Error(ErrorCode::GridTooSmall, "self-convolution leaves the window");
    Vector out(n);
    const double last = static_cast<double>(conv.size() - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = (std::sqrt(2.0) * f.x(i) - y0) / dx;
        if (u < 0.0 || u > last) {
            out[i] = 0.0;
            continue;
        }
        const std::size_t k = std::min(static_cast<std::size_t>(u), conv.size() - 2);
        const double fr = u - static_cast<double>(k);
        out[i] = std::sqrt(2.0) * (conv[k] + fr * (conv[k + 1] - conv[k]));
    }
    return f.with_values(std::move(out));
}

double bl_functional(const BLDatum& datum, const std::vector<const GridDensity*>& fs) {
    datum.validate();
    if (datum.big_n != 1) throw Error(ErrorCode::DimensionError, "grid BL functional needs N = 1");
    if (fs.size() != datum.m()) throw Error(ErrorCode::DimensionError, "one density per map is required");
    for (std::size_t i = 0; i < datum.m(); ++i)
        if (datum.n_i(i) != 1) throw Error(ErrorCode::DimensionError, "grid BL functional needs n_i = 1");
    const GridDensity& base = *fs.front();
    const double q = datum.q(0, 0);
    double denom_log = 0.0;
    for (std::size_t i = 0; i < datum.m(); ++i) denom_log += datum.weights[i] * std::log(fs[i]->mass());
    double s = 0.0;
    const std::size_t n = base.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double x = base.x(k);
        double prod = std::exp(q * x * x);
        for (std::size_t i = 0; i < datum.m() && prod > 0.0; ++i) {
            const double b = datum.maps[i](0, 0);
            const double fv = (b == 1.0 && fs[i] == &base) ? base[k] : fs[i]->at(b * x);
            prod *= fv > 0.0 ? std::pow(fv, datum.weights[i]) : 0.0;
        }
        s += ((k == 0 || k + 1 == n) ? 0.5 : 1.0) * prod;
    }
    return s * base.dx() * std::exp(-denom_log);
}

FlowReport ball_iterate(const GridDensity& f1, const GridDensity& f2, std::size_t steps, const BLDatum& datum,
                        const std::optional<ConstraintBand>& band, double slack) {
    FlowReport rep;
    rep.slack = slack;
    const ConstraintBand b = band ? *band : ConstraintBand::identity(datum);
    const auto inf = blconst::gaussian_bl_infimum(datum, b);
    if (!inf.value.is_finite()) throw Error(ErrorCode::InvalidInput, "datum has an infinite Gaussian constant");
    if (!inf.converged) rep.warnings.push_back("Gaussian constant optimizer did not converge");
    rep.constant = inf.value.value();
    GridDensity a = f1, c = f2;
    auto record = [&](std::size_t k) {
        FlowStep s;
        s.k = k;
        s.bl_value = bl_functional(datum, {&a, &c});
        s.l1_to_gaussian = clt_distance(a);
        s.l1_to_gaussian_2 = clt_distance(c);
        s.mass = a.mass();
        s.mass_2 = c.mass();
        s.barycenter = a.barycenter();
        s.barycenter_2 = c.barycenter();
        if (!rep.steps.empty()) {
            const double prev = rep.steps.back().bl_value;
            s.one_step_gap = prev * prev - rep.constant * s.bl_value;
            if (*s.one_step_gap < -slack) rep.one_step_holds = false;
        }
        rep.steps.push_back(s);
        rep.history_1.push_back(a);
        rep.history_2.push_back(c);
    };
    record(0);
    for (std::size_t k = 1; k <= steps; ++k) {
        a = ball_step(a);
        c = ball_step(c);
        record(k);
    }
    return rep;
}

GridDensity fokker_planck_step(const GridDensity& f, double beta, double t) {
    if (!(beta > 0.0) || !(t > 0.0) || !std::isfinite(beta) || !std::isfinite(t))
        throw Error(ErrorCode::InvalidParameter, "beta and t must be positive");
    const double a = std::exp(-t);
    const double s = std::sqrt(-beta * std::expm1(-2.0 * t));
    const Vector& v = f.values();
    const std::size_t n = v.size();
    const double h = a * f.dx();
    // density of aY is piecewise linear with nodes u_j = a x_j and values v_j / a
    Vector u(n), g(n);
    for (std::size_t j = 0; j < n; ++j) {
        u[j] = a * f.x(j);
        g[j] = v[j] / a;
    }
    constexpr double kCut = 38.0;
    Vector z(n), tail(n), dens(n), out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = f.x(i);
        // nodes within the kernel reach
        const double lo_u = x - kCut * s - h, hi_u = x + kCut * s + h;
        const auto jlo = static_cast<std::size_t>(std::clamp(std::floor((lo_u - u[0]) / h), 0.0, double(n - 1)));
        const auto jhi = static_cast<std::size_t>(std::clamp(std::ceil((hi_u - u[0]) / h), 0.0, double(n - 1)));
        for (std::size_t j = jlo; j <= jhi; ++j) {
            z[j] = (x - u[j]) / s;
            tail[j] = normal::upper_tail(std::fabs(z[j]));
            dens[j] = normal::pdf(z[j]);
        }
        double acc = 0.0;
        for (std::size_t j = jlo; j < jhi; ++j) {
            if (g[j] == 0.0 && g[j + 1] == 0.0) continue;
            const double za = z[j + 1], zb = z[j];
            double p;
            if (za >= 0.0)
                p = tail[j + 1] - tail[j];
            else if (zb <= 0.0)
                p = tail[j] - tail[j + 1];
            else
                p = 1.0 - tail[j + 1] - tail[j];
            acc += g[j] * p + (g[j + 1] - g[j]) * (s / h) * (zb * p - (dens[j + 1] - dens[j]));
        }
        out[i] = std::max(0.0, acc);
    }
    GridDensity res = f.with_values(std::move(out));
    const double m_in = f.mass();
    if (m_in - res.mass() > 1e-9 * m_in) throw Error(ErrorCode::GridTooSmall, "Fokker-Planck output leaves the window");
    return res;
}

TruncateResult truncate_recenter(const GridDensity& f, double radius, double eps) {
    if (!(radius > 0.0) || !(eps > -1.0)) throw Error(ErrorCode::InvalidParameter, "radius > 0 and eps > -1 required");
    const double scale = 1.0 + eps;
    const std::size_t n = f.size();
    const double half = 0.5 * scale * f.dx();
    // h_R((1+eps)x + xi) with the cut at |y| = R averaged over the image cell
    auto build = [&](double xi) {
        Vector v(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double y = scale * f.x(i) + xi;
            const double inside = std::clamp((std::min(y + half, radius) - std::max(y - half, -radius)) / (2.0 * half), 0.0, 1.0);
            v[i] = inside > 0.0 ? inside * f.at(y) : 0.0;
        }
        return v;
    };
    auto bary = [&](double xi) {
        const Vector v = build(xi);
        double s = 0.0, w = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double wt = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
            s += wt * f.x(i) * v[i];
            w += wt * v[i];
        }
        if (!(w > 0.0)) throw Error(ErrorCode::EmptyDensity, "truncated density has zero mass");
        return s / w;
    };
    // the output barycenter moves like -xi/(1+eps); solve in terms of that
    const double xi = shift_root([&](double c) { return bary(c); });
    TruncateResult r;
    r.xi = xi;
    r.density = f.with_values(build(xi));
    return r;
}

bool domination_check(const GridDensity& out, const GridDensity& f, double eps) {
    if (out.size() != f.size()) throw Error(ErrorCode::DimensionError, "grids differ");
    const double bound = std::pow(2.0 * std::numbers::e, eps);
    const Vector& o = out.values();
    const Vector& v = f.values();
    for (std::size_t i = 0; i < o.size(); ++i) {
        double m = v[i];
        if (i > 0) m = std::max(m, v[i - 1]);
        if (i + 1 < v.size()) m = std::max(m, v[i + 1]);
        if (o[i] > bound * m * (1.0 + 1e-12)) return false;
    }
    return true;
}

std::optional<TruncateResult> find_truncation_radius(const GridDensity& f, double eps, double r_start,
                                                     double* radius_out) {
    const double limit = 2.0 * std::max(std::fabs(f.xmin()), std::fabs(f.xmax()));
    for (double r = r_start; r <= limit; r *= 2.0) {
        TruncateResult tr = truncate_recenter(f, r, eps);
        if (domination_check(tr.density, f, eps)) {
            if (radius_out) *radius_out = r;
            return tr;
        }
    }
    return std::nullopt;
}

double clt_distance(const GridDensity& f) {
    const double m = f.barycenter();
    const double var = f.variance();
    const double sd = std::sqrt(var);
    const double mass = f.mass();
    const std::size_t n = f.size();
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double g = normal::pdf((f.x(i) - m) / sd) / sd;
        s += ((i == 0 || i + 1 == n) ? 0.5 : 1.0) * std::fabs(f[i] / mass - g);
    }
    return s * f.dx();
}

GridDensity random_log_concave(std::uint64_t seed, double half_width, std::size_t points) {
    std::mt19937_64 rng(gaussmc::substream_seed(seed, 0));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto pick = [&](double lo, double hi) { return lo + (hi - lo) * unif(rng); };
    const int family = static_cast<int>(rng() % 7);
    const bool mirror = (rng() & 1) != 0;
    std::function<double(double, double)> cm;
    // mass on [a, b]; tails chosen to sit far below the window edge
    auto exp_mass = [](double rate, double a, double b) {
        // ∫_{max(a,0)}^{b} rate e^{-rate x}
        a = std::max(a, 0.0);
        if (!(b > a)) return 0.0;
        return std::exp(-rate * a) * -std::expm1(-rate * (b - a));
    };
    switch (family) {
        case 0: {
            const double sigma = pick(0.3, 1.0);
            cm = [=](double a, double b) { return normal::interval(a / sigma, b / sigma); };
            break;
        }
        case 1: {
            const double sigma = pick(0.3, 1.0), lo = -pick(0.1, 2.0), hi = pick(0.2, 2.5);
            const double z = normal::interval(lo, hi);
            cm = [=](double a, double b) {
                return normal::interval(std::max(a / sigma, lo), std::min(b / sigma, hi)) / z;
            };
            break;
        }
        case 2: {
            const double lo = -pick(0.2, 2.0), hi = pick(0.2, 2.0);
            cm = [=](double a, double b) { return std::max(0.0, std::min(b, hi) - std::max(a, lo)) / (hi - lo); };
            break;
        }
        case 3: {
            const double rate = pick(4.0, 8.0);
            cm = [=](double a, double b) { return exp_mass(rate, a, b); };
            break;
        }
        case 4: {
            const double r1 = pick(4.0, 8.0), r2 = pick(4.0, 8.0);
            const double w1 = r2 / (r1 + r2), w2 = r1 / (r1 + r2);
            cm = [=](double a, double b) { return w1 * exp_mass(r1, a, b) + w2 * exp_mass(r2, -b, -a); };
            break;
        }
        case 5: {
            const double k = pick(1.0, 5.0), theta = pick(0.05, 0.15);
            const double mode = (k - 1.0) * theta;
            cm = [=](double a, double b) {
                a = std::max(a, 0.0);
                if (!(b > a)) return 0.0;
                if (a >= mode) return boost::math::gamma_q(k, a / theta) - boost::math::gamma_q(k, b / theta);
                return boost::math::gamma_p(k, b / theta) - boost::math::gamma_p(k, a / theta);
            };
            break;
        }
        default: {
            const double sc = pick(0.1, 0.2);
            // logistic, evaluated through the smaller tail
            auto lower = [=](double x) { return x <= 0.0 ? 1.0 / (1.0 + std::exp(-x / sc)) : 0.0; };
            auto upper = [=](double x) { return x > 0.0 ? 1.0 / (1.0 + std::exp(x / sc)) : 0.0; };
            cm = [=](double a, double b) {
                if (b <= 0.0) return lower(b) - lower(a);
                if (a >= 0.0) return upper(a) - upper(b);
                return 1.0 - lower(a) - upper(b);
            };
            break;
        }
    }
    if (mirror) {
        auto base = cm;
        cm = [base](double a, double b) { return base(-b, -a); };
    }
    return centered_grid_from_cell_mass(cm, half_width, points);
}

}  // namespace flow
}  // namespace gcilab
