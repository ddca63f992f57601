#pragma once

#include <cmath>
#include <numbers>

namespace gcilab::normal {

inline double pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

inline double cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// P(X > x)
inline double upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

// P(a < X < b) without cancellation in either tail.
inline double interval(double a, double b) {
    if (!(b > a)) return 0.0;
    if (a >= 0.0) return upper_tail(a) - upper_tail(b);
    if (b <= 0.0) return upper_tail(-b) - upper_tail(-a);
    return 1.0 - upper_tail(-a) - upper_tail(b);
}

// E[X | X > r]
inline double truncated_mean_above(double r) { return pdf(r) / upper_tail(r); }

}  // namespace gcilab::normal
