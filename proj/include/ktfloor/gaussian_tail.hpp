#pragma once

#include <cmath>
#include <limits>

#include "ktfloor/quantities.hpp"

namespace ktfloor {

/// Q(x) = P(Z > x) for standard normal Z. erfc keeps full relative
/// precision deep into the tail (Q(12) ~ 1.8e-33 is still ~1 ulp).
inline double upper_tail(double x)
{
    return 0.5 * std::erfc(x / std::sqrt(2.0));
}

inline double normal_log_density(double x)
{
    return -0.5 * x * x - 0.5 * std::log(2.0 * constants::pi);
}

/// ln Q(x), finite past the point where Q(x) underflows. Beyond x = 30 the
/// asymptotic series has converged to double precision.
inline double log_upper_tail(double x)
{
    if (x < 30.0)
        return std::log(upper_tail(x));
    const double r = 1.0 / (x * x);
    const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
    return normal_log_density(x) - std::log(x) + std::log(series);
}

/// x such that Q(x) = p, for 0 < p < 1.
inline double upper_tail_inverse(double p)
{
    if (!(p > 0.0 && p < 1.0))
        throw DomainError("tail probability must lie in (0, 1)");
    if (p > 0.5)
        return -upper_tail_inverse(1.0 - p);
    if (p == 0.5)
        return 0.0;

    // Abramowitz & Stegun 26.2.23, |error| < 4.5e-4 on (0, 0.5]
    const double t = std::sqrt(-2.0 * std::log(p));
    double x = t - (2.515517 + t * (0.802853 + t * 0.010328)) /
                       (1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308)));

    // Halley on Q(x) - p. The Newton increment (Q - p) / phi is formed in
    // log space so phi may underflow without harm.
    for (int it = 0; it < 4; ++it) {
        const double q = upper_tail(x);
        const double d = (q / p - 1.0) * std::exp(std::log(p) - normal_log_density(x));
        const double next = x + d / (1.0 - 0.5 * x * d);
        if (!std::isfinite(next))
            break;
        const bool done = std::abs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(next);
        x = next;
        if (done)
            break;
    }
    return x;
}

}  // namespace ktfloor
