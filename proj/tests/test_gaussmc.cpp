#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>

#include "gcilab/convex.hpp"
#include "gcilab/gaussmc.hpp"

using namespace gcilab;

namespace {

double cdf(double x) { return boost::math::cdf(boost::math::normal_distribution<double>(), x); }
double pdf(double x) { return boost::math::pdf(boost::math::normal_distribution<double>(), x); }

SamplerOptions opts(Method m, std::size_t budget = 200000, std::uint64_t seed = 5, unsigned threads = 1) {
    SamplerOptions o;
    o.method = m;
    o.budget = budget;
    o.seed = seed;
    o.threads = threads;
    return o;
}

}  // namespace

TEST_CASE("box measure agrees with the normal CDF") {
    const ConvexSet b = convex::box({-1, 0.5}, {2, 3});
    const double exact = (cdf(2) - cdf(-1)) * (cdf(3) - cdf(0.5));
    const auto spec = GaussianSpec::standard(2);
    for (Method m : {Method::monte_carlo, Method::qmc}) {
        const Estimate e = gaussmc::measure(b, spec, opts(m));
        CHECK(std::fabs(e.value - exact) <= 4.0 * e.std_error);
        CHECK(e.std_error < 2e-3);
    }
    const Estimate q = gaussmc::measure(b, spec, opts(Method::quadrature));
    CHECK(q.value == doctest::Approx(exact).epsilon(1e-10));
}

TEST_CASE("quadrature moments of a half-line and a correlated box") {
    const auto spec = GaussianSpec::standard(1);
    const auto st = gaussmc::restricted_stats(convex::box({0}, {40}), spec, opts(Method::quadrature));
    CHECK(st.mass.value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(st.barycenter[0].value == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-10));
    CHECK(st.covariance(0, 0) == doctest::Approx(1.0 - 2.0 / std::numbers::pi).epsilon(1e-9));

    // slab in x under Σ = diag(4, 1): the x-marginal is N(0, 4) truncated to [-1, 3]
    const GaussianSpec s2(SymMatrix::diagonal({4.0, 1.0}));
    const auto q = gaussmc::restricted_stats(convex::slab({1, 0}, -1, 3), s2, opts(Method::quadrature));
    const double a = -0.5, b = 1.5;
    const double z = cdf(b) - cdf(a);
    CHECK(q.mass.value == doctest::Approx(z).epsilon(1e-10));
    CHECK(q.barycenter[0].value == doctest::Approx(2.0 * (pdf(a) - pdf(b)) / z).epsilon(1e-9));
    CHECK(std::fabs(q.barycenter[1].value) < 1e-10);
    CHECK(q.covariance(1, 1) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("Monte Carlo barycenter and covariance within error bars") {
    const auto spec = GaussianSpec::standard(1);
    const auto st = gaussmc::restricted_stats(convex::box({0}, {40}), spec, opts(Method::monte_carlo, 400000));
    CHECK(std::fabs(st.barycenter[0].value - std::sqrt(2.0 / std::numbers::pi)) <= 4.0 * st.barycenter[0].std_error);
    CHECK(std::fabs(st.covariance(0, 0) - (1.0 - 2.0 / std::numbers::pi)) <= 4.0 * st.covariance_stderr(0, 0));
}

TEST_CASE("results do not depend on thread count and repeat for a seed") {
    const ConvexSet b = convex::ball({0.3, -0.2, 0.1}, 1.2);
    const auto spec = GaussianSpec::standard(3);
    for (Method m : {Method::monte_carlo, Method::qmc}) {
        const auto a = gaussmc::restricted_stats(b, spec, opts(m, 100000, 9, 1));
        const auto c = gaussmc::restricted_stats(b, spec, opts(m, 100000, 9, 3));
        CHECK(a.mass.value == c.mass.value);
        CHECK(a.barycenter[1].value == c.barycenter[1].value);
        CHECK(a.covariance(2, 1) == c.covariance(2, 1));
        const auto d = gaussmc::restricted_stats(b, spec, opts(m, 100000, 10, 1));
        CHECK(a.mass.value != d.mass.value);
    }
}

TEST_CASE("substreams differ") {
    CHECK(gaussmc::substream_seed(1, 0) != gaussmc::substream_seed(1, 1));
    CHECK(gaussmc::substream_seed(1, 0) != gaussmc::substream_seed(2, 0));
    CHECK(gaussmc::substream_seed(1, 3) == gaussmc::substream_seed(1, 3));
}

TEST_CASE("quadrature rejects n > 2") {
    CHECK_THROWS(gaussmc::measure(convex::ball({0, 0, 0}, 1), GaussianSpec::standard(3), opts(Method::quadrature)));
}
