#include "gcilab/blconst.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include <boost/random/normal_distribution.hpp>

#include "gcilab/error.hpp"
#include "gcilab/gaussmc.hpp"

namespace gcilab {

double ExtendedReal::value() const {
    if (infinite_) throw Error(ErrorCode::InvalidInput, "value is +infinity");
    return v_;
}

std::string_view to_string(Classification c) {
    switch (c) {
        case Classification::finite: return "finite";
        case Classification::infinite_constant: return "infinite_constant";
        case Classification::zero_constant: return "zero_constant";
    }
    return "finite";
}

void BLDatum::validate() const {
    if (big_n == 0) throw Error(ErrorCode::InvalidInput, "datum needs N >= 1");
    if (maps.empty()) throw Error(ErrorCode::InvalidInput, "datum needs at least one map");
    if (weights.size() != maps.size()) throw Error(ErrorCode::InvalidInput, "one weight per map is required");
    for (std::size_t i = 0; i < maps.size(); ++i) {
        if (maps[i].cols() != big_n || maps[i].rows() == 0)
            throw Error(ErrorCode::DimensionError, "map B_" + std::to_string(i) + " must have N columns");
        for (double v : maps[i].data())
            if (!std::isfinite(v)) throw Error(ErrorCode::InvalidInput, "map entries must be finite");
        if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
            throw Error(ErrorCode::InvalidInput, "weights must be positive");
    }
    if (q.n() != big_n) throw Error(ErrorCode::DimensionError, "Q must be N x N");
    if (!q.all_finite()) throw Error(ErrorCode::InvalidMatrix, "Q has non-finite entries");
}

ConstraintBand ConstraintBand::lower_only(std::vector<SymMatrix> g) {
    ConstraintBand b;
    b.upper.assign(g.size(), std::nullopt);
    b.lower = std::move(g);
    return b;
}

ConstraintBand ConstraintBand::identity(const BLDatum& d) {
    std::vector<SymMatrix> g;
    for (std::size_t i = 0; i < d.m(); ++i) g.push_back(SymMatrix::identity(d.n_i(i)));
    return lower_only(std::move(g));
}

ConstraintBand ConstraintBand::zero(const BLDatum& d) {
    std::vector<SymMatrix> g;
    for (std::size_t i = 0; i < d.m(); ++i) g.push_back(SymMatrix(d.n_i(i)));
    return lower_only(std::move(g));
}

namespace blconst {

namespace {

Vector sign_normalized(Vector v) {
    std::size_t big = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::fabs(v[i]) > std::fabs(v[big]) + 1e-12) big = i;
    if (v[big] < 0.0)
        for (double& x : v) x = -x;
    return v;
}

struct Eval {
    bool finite = false;
    double f = 0.0;
    std::vector<SymMatrix> grad_a;
};

Eval evaluate(const BLDatum& d, const std::vector<SymMatrix>& a, bool want_grad) {
    Eval e;
    const std::size_t big_n = d.big_n;
    SymMatrix m = -2.0 * d.q;
    double f = 0.0, dim_sum = 0.0;
    std::vector<Matrix> chol_a;
    for (std::size_t i = 0; i < d.m(); ++i) {
        auto l = cholesky(a[i]);
        if (!l) return e;
        f += 0.5 * d.weights[i] * log_det_chol(*l);
        dim_sum += d.weights[i] * static_cast<double>(d.n_i(i));
        m += d.weights[i] * congruence(d.maps[i], a[i]);
        chol_a.push_back(std::move(*l));
    }
    auto lm = cholesky(m);
    if (!lm) return e;
    f += 0.5 * (static_cast<double>(big_n) - dim_sum) * std::log(2.0 * std::numbers::pi) - 0.5 * log_det_chol(*lm);
    e.finite = std::isfinite(f);
    e.f = f;
    if (!want_grad || !e.finite) return e;
    const SymMatrix m_inv = inverse_pd(m);
    for (std::size_t i = 0; i < d.m(); ++i) {
        SymMatrix g = inverse_pd(a[i]) - congruence_t(d.maps[i], m_inv);
        g *= 0.5 * d.weights[i];
        e.grad_a.push_back(std::move(g));
    }
    return e;
}

void check_list(const BLDatum& d, const std::vector<SymMatrix>& a) {
    if (a.size() != d.m()) throw Error(ErrorCode::DimensionError, "one matrix per map is required");
    for (std::size_t i = 0; i < d.m(); ++i)
        if (a[i].n() != d.n_i(i)) throw Error(ErrorCode::DimensionError, "A_" + std::to_string(i) + " has the wrong size");
}

double frob2(const Matrix& m) {
    double s = 0.0;
    for (double v : m.data()) s += v * v;
    return s;
}

Matrix lower_part(const Matrix& m) {
    Matrix l = m;
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = i + 1; j < m.cols(); ++j) l(i, j) = 0.0;
    return l;
}

Matrix psd_factor(const SymMatrix& d) {
    const double scale = std::max(1.0, d.max_abs());
    const SymMatrix floored = symmat::spectral_map(d, [](double x) { return std::max(0.0, x); });
    if (auto l = cholesky(floored + SymMatrix::scaled_identity(d.n(), 1e-14 * scale))) return *l;
    return symmat::sqrt_psd(floored).to_matrix();
}

class Optimizer {
public:
    Optimizer(const BLDatum& d, const ConstraintBand& band, const OptimizerOptions& opts)
        : d_(d), band_(band), opts_(opts) {}

    std::vector<SymMatrix> a_of(const std::vector<Matrix>& l) const {
        std::vector<SymMatrix> a;
        for (std::size_t i = 0; i < l.size(); ++i) a.push_back(band_.lower[i] + symmetrize(l[i] * l[i].transpose()));
        return a;
    }

    void project(std::vector<Matrix>& l) const {
        for (std::size_t i = 0; i < l.size(); ++i) {
            if (!band_.upper[i]) continue;
            const SymMatrix& h = *band_.upper[i];
            const SymMatrix& g = band_.lower[i];
            SymMatrix a = g + symmetrize(l[i] * l[i].transpose());
            const SymMatrix h_half = symmat::sqrt_psd(h);
            const SymMatrix h_inv_half = symmat::spectral_map(h, [](double x) { return x > 0.0 ? 1.0 / std::sqrt(x) : 0.0; });
            const SymMatrix t = symmetrize(h_inv_half.to_matrix() * a.to_matrix() * h_inv_half.to_matrix());
            if (symmat::max_eigenvalue(t) <= 1.0) continue;
            const SymMatrix clipped = symmat::spectral_map(t, [](double x) { return std::min(x, 1.0); });
            a = symmetrize(h_half.to_matrix() * clipped.to_matrix() * h_half.to_matrix());
            l[i] = psd_factor(a - g);
        }
    }

    struct Run {
        bool ok = false;
        double f = INFINITY;
        std::vector<Matrix> l;
        bool converged = false;
        std::size_t iterations = 0;
    };

    Run descend(std::vector<Matrix> l) const {
        Run run;
        project(l);
        Eval e = evaluate(d_, a_of(l), true);
        for (int grow = 0; !e.finite && grow < 64; ++grow) {
            for (auto& li : l) li = 2.0 * li + Matrix::identity(li.rows());
            project(l);
            e = evaluate(d_, a_of(l), true);
        }
        if (!e.finite) return run;
        double alpha = 1.0;
        std::size_t it = 0;
        for (; it < opts_.max_iterations; ++it) {
            std::vector<Matrix> g(l.size());
            double gnorm2 = 0.0;
            for (std::size_t i = 0; i < l.size(); ++i) {
                g[i] = lower_part(2.0 * (e.grad_a[i].to_matrix() * l[i]));
                gnorm2 += frob2(g[i]);
            }
            if (std::sqrt(gnorm2) <= opts_.grad_tol * (1.0 + std::fabs(e.f))) {
                run.converged = true;
                break;
            }
            bool accepted = false;
            for (int tries = 0; tries < 80; ++tries) {
                std::vector<Matrix> trial(l.size());
                for (std::size_t i = 0; i < l.size(); ++i) trial[i] = l[i] - alpha * g[i];
                project(trial);
                double decrease = 0.0;
                for (std::size_t i = 0; i < l.size(); ++i) {
                    const Matrix step = l[i] - trial[i];
                    for (std::size_t k = 0; k < step.data().size(); ++k) decrease += g[i].data()[k] * step.data()[k];
                }
                Eval et = evaluate(d_, a_of(trial), true);
                if (et.finite && et.f <= e.f - 1e-4 * decrease && et.f <= e.f) {
                    const bool moved = et.f < e.f;
                    l = std::move(trial);
                    e = std::move(et);
                    alpha *= 2.0;
                    accepted = moved;
                    break;
                }
                alpha *= 0.5;
            }
            if (!accepted) {
                // no representable decrease left along the gradient
                run.converged = true;
                break;
            }
        }
        run.ok = true;
        run.f = e.f;
        run.l = std::move(l);
        run.iterations = it;
        return run;
    }

    std::vector<Matrix> g_start() const {
        std::vector<Matrix> l;
        bool needs_push = false;
        for (std::size_t i = 0; i < d_.m(); ++i) {
            const std::size_t n = d_.n_i(i);
            if (cholesky(band_.lower[i]))
                l.push_back(Matrix(n, n));
            else
                l.push_back(Matrix::identity(n));
        }
        // L = 0 is stationary for the parameterization; leave it when the
        // A-space gradient admits no feasible descent there
        Eval e = evaluate(d_, a_of(l), true);
        if (e.finite)
            for (std::size_t i = 0; i < d_.m(); ++i)
                if (symmat::min_eigenvalue(e.grad_a[i]) < -1e-12 * (1.0 + e.grad_a[i].max_abs())) needs_push = true;
        if (needs_push)
            for (auto& li : l) li = li + 1e-3 * Matrix::identity(li.rows());
        return l;
    }

    std::vector<Matrix> random_start(std::size_t index) const {
        std::mt19937_64 rng(gaussmc::substream_seed(opts_.seed, index));
        boost::random::normal_distribution<double> gauss;
        std::vector<Matrix> l;
        for (std::size_t i = 0; i < d_.m(); ++i) {
            const std::size_t n = d_.n_i(i);
            const double s = std::sqrt(std::max(1.0, band_.lower[i].max_abs()));
            Matrix li(n, n);
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c <= r; ++c) li(r, c) = s * gauss(rng);
            l.push_back(std::move(li));
        }
        return l;
    }

private:
    const BLDatum& d_;
    const ConstraintBand& band_;
    const OptimizerOptions& opts_;
};

void check_band(const BLDatum& d, const ConstraintBand& band) {
    if (band.lower.size() != d.m() || band.upper.size() != d.m())
        throw Error(ErrorCode::DimensionError, "band needs one entry per map");
    for (std::size_t i = 0; i < d.m(); ++i) {
        const SymMatrix& g = band.lower[i];
        if (g.n() != d.n_i(i)) throw Error(ErrorCode::DimensionError, "G_" + std::to_string(i) + " has the wrong size");
        const double scale = std::max(1.0, g.max_abs());
        if (symmat::min_eigenvalue(g) < -1e-12 * scale) throw Error(ErrorCode::InvalidInput, "G_i must be PSD");
        if (band.upper[i]) {
            if (band.upper[i]->n() != g.n()) throw Error(ErrorCode::DimensionError, "H_i has the wrong size");
            if (symmat::min_eigenvalue(*band.upper[i] - g) < -1e-12 * scale)
                throw Error(ErrorCode::InvalidInput, "band requires G_i <= H_i");
            if (!cholesky(*band.upper[i])) throw Error(ErrorCode::InvalidInput, "finite H_i must be positive definite");
        }
    }
}

}  // namespace

FinitenessResult finiteness_check(const BLDatum& d) {
    d.validate();
    std::vector<Vector> rows;
    for (const auto& b : d.maps)
        for (std::size_t r = 0; r < b.rows(); ++r) rows.push_back(b.row(r));
    FinitenessResult out;
    out.kernel = symmat::null_space(Matrix::from_rows(rows), 1e-10);
    if (out.kernel.dim() == 0) return out;
    const SymMatrix qv = congruence(out.kernel.basis(), d.q);
    const auto sd = symmat::spectral_decompose(qv);
    const double scale = std::max(1.0, d.q.max_abs());
    if (sd.eigenvalues.front() < -1e-10 * scale) return out;
    out.finite_possible = false;
    Vector w = out.kernel.embed(sd.eigenvectors.col(0));
    out.witness = sign_normalized(scaled(w, 1.0 / norm(w)));
    return out;
}

SurjectivityResult surjectivity_check(const BLDatum& d) {
    d.validate();
    SurjectivityResult out;
    for (std::size_t i = 0; i < d.m(); ++i) {
        const std::size_t r = symmat::numerical_rank(d.maps[i], 1e-10);
        if (r < d.n_i(i)) {
            out.ok = false;
            out.index = i;
            out.rank = r;
            return out;
        }
    }
    return out;
}

std::optional<double> log_gaussian_bl_value(const BLDatum& d, const std::vector<SymMatrix>& a_list) {
    d.validate();
    check_list(d, a_list);
    for (std::size_t i = 0; i < d.m(); ++i)
        if (!cholesky(a_list[i])) throw Error(ErrorCode::InvalidInput, "A_" + std::to_string(i) + " is not positive definite");
    const Eval e = evaluate(d, a_list, false);
    if (!e.finite) return std::nullopt;
    return e.f;
}

ExtendedReal gaussian_bl_value(const BLDatum& d, const std::vector<SymMatrix>& a_list) {
    const auto lv = log_gaussian_bl_value(d, a_list);
    if (!lv) return ExtendedReal::infinity();
    return ExtendedReal::finite(std::exp(*lv));
}

double stationarity_residual(const BLDatum& d, const ConstraintBand& band, const std::vector<SymMatrix>& a_list) {
    const Eval e = evaluate(d, a_list, true);
    if (!e.finite) return INFINITY;
    double r = 0.0;
    for (std::size_t i = 0; i < d.m(); ++i) {
        const Matrix pa = e.grad_a[i].to_matrix() * (a_list[i] - band.lower[i]).to_matrix();
        r += std::sqrt(frob2(pa));
        const SymMatrix neg = symmat::spectral_map(e.grad_a[i], [](double x) { return std::min(0.0, x); });
        r += neg.frobenius();
    }
    return r;
}

GaussianBLResult gaussian_bl_infimum(const BLDatum& d, const ConstraintBand& band, const OptimizerOptions& opts) {
    d.validate();
    check_band(d, band);
    GaussianBLResult out;
    const auto fin = finiteness_check(d);
    if (!fin.finite_possible) {
        out.classification = Classification::infinite_constant;
        out.value = ExtendedReal::infinity();
        out.witness = fin.witness;
        out.converged = true;
        return out;
    }
    const auto sur = surjectivity_check(d);
    if (!sur.ok) {
        out.classification = Classification::zero_constant;
        out.value = ExtendedReal::finite(0.0);
        out.log_value = -INFINITY;
        out.zero_index = sur.index;
        out.converged = true;
        return out;
    }

    const Optimizer opt(d, band, opts);
    const std::size_t starts = 1 + opts.random_starts;
    std::vector<Optimizer::Run> runs(starts);
    auto work = [&](std::size_t s) { runs[s] = opt.descend(s == 0 ? opt.g_start() : opt.random_start(s)); };
    if (opts.threads > 1) {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < std::min<std::size_t>(opts.threads, starts); ++w)
            pool.emplace_back([&, w]() {
                for (std::size_t s = w; s < starts; s += opts.threads) work(s);
            });
        for (auto& t : pool) t.join();
    } else {
        for (std::size_t s = 0; s < starts; ++s) work(s);
    }

    // winner by (value, start index); values within a relative 1e-12 count as ties
    std::size_t best = starts;
    for (std::size_t s = 0; s < starts; ++s) {
        out.start_log_values.push_back(runs[s].ok ? runs[s].f : INFINITY);
        if (!runs[s].ok) continue;
        if (best == starts) {
            best = s;
            continue;
        }
        const double fb = runs[best].f;
        if (runs[s].f < fb - 1e-12 * (1.0 + std::fabs(fb))) best = s;
    }
    if (best == starts) throw Error(ErrorCode::NoConvergence, "no start reached a finite value");
    const auto& w = runs[best];
    out.classification = Classification::finite;
    out.argmin = opt.a_of(w.l);
    out.log_value = w.f;
    out.value = ExtendedReal::finite(std::exp(w.f));
    out.converged = w.converged;
    out.winning_start = best;
    out.iterations = w.iterations;
    out.stationarity_residual = stationarity_residual(d, band, out.argmin);
    return out;
}

BLDatum gci_datum(const SymMatrix& sigma0, const std::vector<SymMatrix>& sigma_list) {
    const std::size_t n = sigma0.n();
    if (sigma_list.empty()) throw Error(ErrorCode::InvalidInput, "at least one covariance is required");
    BLDatum d;
    d.big_n = n;
    d.q = -0.5 * inverse_pd(sigma0);
    for (const auto& s : sigma_list) {
        if (s.n() != n) throw Error(ErrorCode::DimensionError, "covariances differ in size");
        d.maps.push_back(Matrix::identity(n));
        d.weights.push_back(1.0);
        d.q += 0.5 * inverse_pd(s);
    }
    return d;
}

BLDatum gci_datum(std::size_t n, std::size_t m) {
    return gci_datum(SymMatrix::identity(n), std::vector<SymMatrix>(m, SymMatrix::identity(n)));
}

GciConstantResult gci_constant(const SymMatrix& sigma0, const std::vector<SymMatrix>& sigma_list,
                               const OptimizerOptions& opts) {
    const std::size_t n = sigma0.n();
    const BLDatum d = gci_datum(sigma0, sigma_list);
    const SymMatrix p0 = inverse_pd(sigma0);
    GciConstantResult out;
    std::vector<SymMatrix> g;
    const double log2pi = std::log(2.0 * std::numbers::pi);
    double log_c = -0.5 * (static_cast<double>(n) * log2pi + log_det_pd(sigma0));
    for (const auto& s : sigma_list) {
        const SymMatrix p = inverse_pd(s);
        const double scale = std::max(1.0, std::max(p0.max_abs(), p.max_abs()));
        if (symmat::min_eigenvalue(p0 - p) < -1e-10 * scale) out.ordering_holds = false;
        g.push_back(p);
        log_c += 0.5 * (static_cast<double>(n) * log2pi + log_det_pd(s));
    }
    out.infimum = gaussian_bl_infimum(d, ConstraintBand::lower_only(std::move(g)), opts);
    out.constant = std::exp(log_c + out.infimum.log_value);
    return out;
}

double find_lambda0(const BLDatum& d) {
    d.validate();
    double lam = 1.0;
    for (int k = 0; k <= 60; ++k, lam *= 2.0) {
        std::vector<SymMatrix> a;
        for (std::size_t i = 0; i < d.m(); ++i) a.push_back(SymMatrix::scaled_identity(d.n_i(i), lam));
        if (log_gaussian_bl_value(d, a)) return lam;
    }
    throw Error(ErrorCode::NoConvergence, "no finite scalar start up to 2^60");
}

std::vector<SymMatrix> zero_constant_family(const BLDatum& d, std::size_t index, double eps, double lambda0) {
    d.validate();
    if (index >= d.m()) throw Error(ErrorCode::InvalidParameter, "map index out of range");
    if (!(eps > 0.0) || !(lambda0 > 0.0)) throw Error(ErrorCode::InvalidParameter, "eps and lambda0 must be positive");
    const Subspace left_null = symmat::null_space(d.maps[index].transpose(), 1e-10);
    if (left_null.dim() == 0) throw Error(ErrorCode::InvalidInput, "map is surjective; no zero-constant family");
    const Vector w = sign_normalized(left_null.vector(0));
    std::vector<SymMatrix> a;
    for (std::size_t i = 0; i < d.m(); ++i) {
        const std::size_t n = d.n_i(i);
        if (i != index) {
            a.push_back(SymMatrix::scaled_identity(n, lambda0));
            continue;
        }
        SymMatrix ai = SymMatrix::scaled_identity(n, lambda0);
        ai -= SymMatrix::outer(w, lambda0);
        ai += SymMatrix::outer(w, eps);
        a.push_back(ai);
    }
    return a;
}

}  // namespace blconst
}  // namespace gcilab
