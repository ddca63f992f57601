#include <doctest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include <boost/math/distributions/normal.hpp>

#include "gcilab/convex.hpp"
#include "gcilab/error.hpp"
#include "gcilab/gcicheck.hpp"

using namespace gcilab;

namespace {

const boost::math::normal_distribution<double> kNormal;
double cdf(double x) { return boost::math::cdf(kNormal, x); }
double pdf(double x) { return boost::math::pdf(kNormal, x); }

double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

SamplerOptions quad() {
    SamplerOptions o;
    o.method = Method::quadrature;
    return o;
}

SamplerOptions mc(std::size_t budget = 400000, std::uint64_t seed = 3) {
    SamplerOptions o;
    o.budget = budget;
    o.seed = seed;
    return o;
}

}  // namespace

TEST_CASE("centering an interval") {
    // root of the truncated-normal mean of [-b, 2-b], found by bisection
    auto mean = [](double b) { return (pdf(-b) - pdf(2 - b)) / (cdf(2 - b) - cdf(-b)); };
    double lo = -1, hi = 3;
    for (int i = 0; i < 200; ++i) (mean(0.5 * (lo + hi)) > 0 ? lo : hi) = 0.5 * (lo + hi);
    const double oracle = 0.5 * (lo + hi);

    const auto q = gcicheck::center_set(convex::box({0}, {2}), GaussianSpec::standard(1), quad());
    CHECK(q.converged);
    CHECK(q.b0[0] == doctest::Approx(oracle).epsilon(1e-6));
    const auto m = gcicheck::center_set(convex::box({0}, {2}), GaussianSpec::standard(1), mc());
    CHECK(m.converged);
    CHECK(std::fabs(m.b0[0] - oracle) < 0.02);
    CHECK(m.residual_norm <= m.threshold);
}

TEST_CASE("centering a triangle, checked by iterated Simpson integration") {
    const ConvexSet tri = convex::polytope({{-1, 0}, {0, -1}, {1, 1}}, {0, 0, 2});
    const auto r = gcicheck::center_set(tri, GaussianSpec::standard(2), quad());
    REQUIRE(r.converged);
    const double x0 = -r.b0[0], y0 = -r.b0[1];
    // centered triangle: x in [x0, x0+2], y in [y0, y0 + 2 - (x - x0)]
    auto ylo = [&](double) { return y0; };
    auto yhi = [&](double x) { return y0 + 2 - (x - x0); };
    const double mass = simpson([&](double x) { return pdf(x) * (cdf(yhi(x)) - cdf(ylo(x))); }, x0, x0 + 2);
    const double mx = simpson([&](double x) { return x * pdf(x) * (cdf(yhi(x)) - cdf(ylo(x))); }, x0, x0 + 2);
    const double my = simpson([&](double x) { return pdf(x) * (pdf(ylo(x)) - pdf(yhi(x))); }, x0, x0 + 2);
    CHECK(std::fabs(mx / mass) < 1e-6);
    CHECK(std::fabs(my / mass) < 1e-6);
}

TEST_CASE("symmetric sets need no centering") {
    const auto r = gcicheck::center_set(convex::ball({0, 0}, 1.5), GaussianSpec::standard(2), quad());
    CHECK(r.iterations <= 1);
    CHECK(norm(r.b0) < 1e-6);
}

TEST_CASE("orthogonal stripes are independent") {
    const ConvexSet s1 = convex::slab({1, 0}, -1, 1), s2 = convex::slab({0, 1}, -0.5, 0.5);
    const SymMatrix id = SymMatrix::identity(2);
    const auto q = gcicheck::verify_gci({s1, s2}, id, {id, id}, quad());
    CHECK(q.verdict == Verdict::equality_within_noise);
    CHECK(q.ratio == doctest::Approx(1.0).epsilon(1e-9));
    const auto m = gcicheck::verify_gci({s1, s2}, id, {id, id}, mc());
    CHECK(m.verdict == Verdict::equality_within_noise);

    const auto st = gcicheck::detect_equality_structure(s1, s2, quad());
    CHECK(st.verdict == StructureVerdict::product);
    CHECK(st.e.angle_to(Subspace::span(2, {{0, 1}})) < 1e-6);

    const auto t = gcicheck::find_independent_translations(s1, s2, GaussianSpec::standard(2), quad());
    CHECK(t.stage == 1);
    CHECK(t.phi == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("stripes at 45 degrees are strictly correlated") {
    const double a = 1.0, b = 0.7;
    const ConvexSet s1 = convex::slab({1, 0}, -a, a);
    const ConvexSet s2 = convex::slab({std::sqrt(0.5), std::sqrt(0.5)}, -b, b);
    const double joint = simpson(
        [&](double x) { return pdf(x) * (cdf(std::sqrt(2.0) * b - x) - cdf(-std::sqrt(2.0) * b - x)); }, -a, a);
    const auto rep = gcicheck::verify_gci_matched(s1, s2, quad());
    CHECK(rep.lhs.value == doctest::Approx(joint).epsilon(1e-10));
    CHECK(rep.verdict == Verdict::holds);
    CHECK(rep.margin_sigmas > 3.0);
    CHECK(gcicheck::detect_equality_structure(s1, s2, quad()).verdict == StructureVerdict::not_product);
}

TEST_CASE("balls have no unit covariance direction") {
    const ConvexSet b = convex::ball({0, 0}, 1.2);
    const auto st = gcicheck::detect_equality_structure(b, b, quad());
    CHECK(st.e.dim() == 0);
    CHECK(st.verdict == StructureVerdict::not_product);
    // radial oracle: Var(x1 | |x| ≤ r) = E[R²]/2 with R² ~ χ²₂ truncated at r²
    const double r2 = 1.44;
    const double er2 = 2.0 - r2 * std::exp(-r2 / 2) / (1 - std::exp(-r2 / 2));
    CHECK(st.eigenvalues[0] == doctest::Approx(er2 / 2).epsilon(1e-8));
}

TEST_CASE("uncentered input fails the precondition") {
    const ConvexSet k = convex::box({0, 0}, {1, 1});
    const SymMatrix id = SymMatrix::identity(2);
    CHECK_THROWS_AS(gcicheck::verify_gci({k, convex::ball({0, 0}, 1)}, id, {id, id}, quad()), Error);
    try {
        gcicheck::verify_gci({convex::ball({0, 0}, 1), k}, id, {id, id}, quad());
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::PreconditionFailed);
        CHECK(std::string(e.what()).find("set 1") != std::string::npos);
    }
}

TEST_CASE("random centered polytopes satisfy GCI; results ignore thread count") {
    std::mt19937_64 rng(21);
    for (int rep = 0; rep < 4; ++rep) {
        SamplerOptions o = mc(200000, 100 + rep);
        const auto c1 = gcicheck::center_set(convex::random_polytope(2, rng, 2.0), GaussianSpec::standard(2), o);
        const auto c2 = gcicheck::center_set(convex::random_polytope(2, rng, 2.0), GaussianSpec::standard(2), o);
        INFO("residuals " << c1.residual_norm << " / " << c1.threshold << ", " << c2.residual_norm << " / " << c2.threshold);
        REQUIRE(c1.converged);
        REQUIRE(c2.converged);
        const SymMatrix id = SymMatrix::identity(2);
        const auto r1 = gcicheck::verify_gci({c1.centered, c2.centered}, id, {id, id}, o);
        CHECK(r1.margin_sigmas >= -3.0);
        o.threads = 3;
        const auto r3 = gcicheck::verify_gci({c1.centered, c2.centered}, id, {id, id}, o);
        CHECK(r1.lhs.value == r3.lhs.value);
        CHECK(r1.margin_sigmas == r3.margin_sigmas);
        // quadrature agrees with the Monte Carlo estimate
        const auto q = gaussmc::restricted_stats_quadrature(convex::intersect(c1.centered, c2.centered),
                                                            GaussianSpec::standard(2), false);
        CHECK(std::fabs(q.mass.value - r1.lhs.value) < 5 * r1.lhs.std_error + 1e-12);
    }
}

TEST_CASE("a common nonzero barycenter gives a strict inequality") {
    // K1 = ball on the x-axis, K2 = box symmetric in y whose x-position is tuned to the same barycenter
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.6, 1.5);
    for (int rep = 0; rep < 5; ++rep) {
        const double radius = u(rng), width = u(rng), height = u(rng);
        double c_lo = 0.0, c_hi = 3.0;
        ConvexSet k1;
        double target = 0.0;
        for (int it = 0; it < 80; ++it) {
            const double c = 0.5 * (c_lo + c_hi);
            k1 = convex::ball({c, 0}, radius);
            target = gaussmc::restricted_stats(k1, GaussianSpec::standard(2), quad()).barycenter[0].value;
            (target < 0.5 ? c_lo : c_hi) = c;
        }
        double lo = -2.0, hi = 3.0;
        ConvexSet k2;
        for (int it = 0; it < 80; ++it) {
            const double l = 0.5 * (lo + hi);
            k2 = convex::box({l, -height}, {l + width, height});
            const double bx = gaussmc::restricted_stats(k2, GaussianSpec::standard(2), quad()).barycenter[0].value;
            (bx < target ? lo : hi) = l;
        }
        const auto rep_ = gcicheck::verify_gci_matched(k1, k2, quad());
        CHECK(rep_.margin_sigmas > 3.0);
        CHECK(rep_.ratio > 1.0);
    }
}

TEST_CASE("translations for separated squares") {
    const ConvexSet k1 = convex::box({0, 0}, {1, 1});
    const ConvexSet k2 = convex::box({6, 0}, {7, 1});
    const auto r = gcicheck::find_independent_translations(k1, k2, GaussianSpec::standard(2), quad());
    CHECK(r.converged);
    CHECK(r.phi_initial < 1.0);
    CHECK(std::fabs(r.phi - 1.0) <= 1e-3);
}

TEST_CASE("BaryGCI counterexample values") {
    const auto z = gcicheck::bary_gci_counterexample(0.0);
    CHECK(z.lhs == doctest::Approx(0.5 * (1 + 2 / std::numbers::pi)).epsilon(1e-12));
    CHECK_FALSE(z.violated);
    const auto t = gcicheck::bary_gci_counterexample(3.0);
    CHECK(t.violated);
    CHECK(t.bar_2 == doctest::Approx(pdf(3) / (1 - cdf(3))).epsilon(1e-10));
}
