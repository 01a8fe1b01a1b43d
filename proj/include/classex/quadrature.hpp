#pragma once

#include <cstdint>
#include <vector>

namespace classex {

// Gauss-Legendre rule on [0,1].
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    static GaussLegendre make(int order);

    // Shared fixed-order rules: 128 points plus the 256-point rule used
    // for order-doubling verification.
    static const GaussLegendre& base();
    static const GaussLegendre& doubled();
};

// Endpoint-graded map w -> v on [0,1]: the order-11 smoothstep
// s(w) = I_w(6,6), whose derivative vanishes to fourth order at both
// endpoints. Composing it with Gauss-Legendre keeps fixed-order rules
// accurate for integrands with algebraic endpoint singularities.
inline double smoothstep_value(double w) {
    const double w2 = w * w;
    const double w3 = w2 * w;
    const double s =
        w3 * w3 *
        (462.0 + w * (-1980.0 + w * (3465.0 + w * (-3080.0 + w * (1386.0 - 252.0 * w)))));
    // guard rounding at the right endpoint so downstream u stays in [0,1]
    return s < 0.0 ? 0.0 : (s > 1.0 ? 1.0 : s);
}

inline double smoothstep_deriv(double w) {
    const double a = w * (1.0 - w);
    const double a2 = a * a;
    return 2772.0 * a2 * a2 * a;
}

} // namespace classex
