#pragma once

#include <memory>
#include <optional>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "gcilab/linalg.hpp"
#include "gcilab/symmat.hpp"

namespace gcilab {

namespace convex {
struct Node;
}

// Immutable convex body described by an exact membership oracle.
class ConvexSet {
public:
    ConvexSet() = default;
    explicit ConvexSet(std::shared_ptr<const convex::Node> node);

    std::size_t dim() const;
    // Throws DimensionError when x has the wrong length.
    bool contains(const Vector& x) const;
    // Unchecked hot path; x must point to dim() values.
    bool contains_raw(const double* x) const;

    const convex::Node& node() const { return *node_; }
    bool valid() const { return static_cast<bool>(node_); }

private:
    std::shared_ptr<const convex::Node> node_;
};

namespace convex {

struct Polytope {
    std::vector<Vector> normals;
    Vector offsets;
};

struct Ellipsoid {
    Vector center;
    SymMatrix shape;      // S, PD
    SymMatrix shape_inv;  // S⁻¹
};

struct Slab {
    Vector u;
    double lo;
    double hi;
};

// base × E, base given in coordinates of the orthonormal basis `complement` of E⊥.
struct Product {
    ConvexSet base;
    Subspace free;
    Subspace complement;
};

struct Intersection {
    std::vector<ConvexSet> parts;
};

struct Translate {
    ConvexSet inner;
    Vector shift;
};

struct FullSpace {
    std::size_t dim;
};

struct Node {
    std::size_t dim;
    std::variant<Polytope, Ellipsoid, Slab, Product, Intersection, Translate, FullSpace> body;
};

ConvexSet polytope(std::vector<Vector> normals, Vector offsets);
ConvexSet box(const Vector& lo, const Vector& hi);
ConvexSet ellipsoid(Vector center, const SymMatrix& shape);
ConvexSet ball(Vector center, double radius);
ConvexSet slab(Vector u, double lo, double hi);
ConvexSet full_space(std::size_t dim);
ConvexSet product_set(const ConvexSet& base, const Subspace& e);
ConvexSet product_set(const ConvexSet& base, const Subspace& e, const Subspace& complement);
ConvexSet intersect(const ConvexSet& k1, const ConvexSet& k2);
ConvexSet intersect(const std::vector<ConvexSet>& parts);
ConvexSet translate(const ConvexSet& k, const Vector& a);
// {x : Mx ∈ K} for invertible M (maps polytopes and ellipsoids exactly).
ConvexSet linear_preimage(const ConvexSet& k, const Matrix& m);

bool contains(const ConvexSet& k, const Vector& x);

// Throws OriginNotInterior unless the 2n axis points at radius 1e-6 are members.
void check_origin_interior(const ConvexSet& k);

constexpr double kGaugeCap = 1099511627776.0;  // 2^40

double minkowski_gauge(const ConvexSet& k, const Vector& x, double tol);

// A point believed to lie in the interior, when one is cheaply known.
std::optional<Vector> interior_hint(const ConvexSet& k);

// 2n+4 halfspaces ⟨a,x⟩ ≤ 1 with a uniform on the sphere; redrawn until
// every probe direction has radial extent at most max_radius.
ConvexSet random_polytope(std::size_t n, std::mt19937_64& rng, double max_radius = 5.0);

}  // namespace convex
}  // namespace gcilab
