#include <doctest.h>

#include <cmath>
#include <random>

#include "gcilab/convex.hpp"
#include "gcilab/error.hpp"

using namespace gcilab;

TEST_CASE("membership of basic sets") {
    const ConvexSet b = convex::box({-1, -1}, {1, 2});
    CHECK(b.contains({0.5, 1.5}));
    CHECK_FALSE(b.contains({0.5, 2.5}));
    const ConvexSet ball = convex::ball({1, 0}, 2);
    CHECK(ball.contains({2.9, 0}));
    CHECK_FALSE(ball.contains({3.1, 0}));
    const ConvexSet s = convex::slab({0, 1}, -1, 1);
    CHECK(s.contains({1e6, 0.5}));
    CHECK_FALSE(s.contains({0, 1.5}));
    const ConvexSet t = convex::translate(b, {10, 0});
    CHECK(t.contains({10.5, 0}));
    CHECK_FALSE(t.contains({0.5, 0}));
    const ConvexSet i = convex::intersect(b, s);
    CHECK(i.contains({0, 0.9}));
    CHECK_FALSE(i.contains({0, 1.5}));
    CHECK_THROWS_AS(convex::box({0, 0}, {1}), Error);
}

TEST_CASE("product set ignores the free subspace") {
    const ConvexSet base = convex::box({-1}, {1});
    const ConvexSet p = convex::product_set(base, Subspace::span(2, {{0, 1}}));
    CHECK(p.dim() == 2);
    CHECK(p.contains({0.5, 1e5}));
    CHECK_FALSE(p.contains({1.5, 0}));
}

TEST_CASE("Minkowski gauge") {
    const ConvexSet b = convex::box({-1, -1}, {1, 1});
    CHECK(convex::minkowski_gauge(b, {2, 0}, 1e-12) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(convex::minkowski_gauge(b, {0.5, -0.25}, 1e-12) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(convex::minkowski_gauge(convex::ball({0, 0}, 3), {1, 1}, 1e-12) ==
          doctest::Approx(std::sqrt(2.0) / 3).epsilon(1e-9));
    // recession direction of a slab
    CHECK(convex::minkowski_gauge(convex::slab({0, 1}, -1, 1), {5, 0}, 1e-12) == 0.0);
    CHECK_THROWS_AS(convex::minkowski_gauge(convex::box({1, 1}, {2, 2}), {1, 0}, 1e-9), Error);
}

TEST_CASE("interior hint lies inside") {
    const ConvexSet b = convex::translate(convex::box({0, 0}, {1, 1}), {5, -3});
    const auto h = convex::interior_hint(b);
    REQUIRE(h.has_value());
    CHECK(b.contains(*h));
}

TEST_CASE("random polytopes are bounded and contain their hint") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const ConvexSet p = convex::random_polytope(3, rng, 2.0);
        const auto h = convex::interior_hint(p);
        REQUIRE(h.has_value());
        CHECK(p.contains(*h));
        CHECK_FALSE(p.contains({50, 0, 0}));
        CHECK_FALSE(p.contains({0, -50, 0}));
    }
}
