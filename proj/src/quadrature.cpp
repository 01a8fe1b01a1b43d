#include "classex/quadrature.hpp"

#include <cmath>
#include <limits>

namespace classex {

// Newton iteration on Legendre polynomial roots, exploiting symmetry.
GaussLegendre GaussLegendre::make(int order) {
    const int n = order;
    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<double> w(static_cast<std::size_t>(n));
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (;;) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double dz = -p1 / pp;
            z += dz;
            if (std::fabs(dz) < std::numeric_limits<double>::epsilon()) break;
        }
        // map [-1,1] -> [0,1]
        x[static_cast<std::size_t>(i)] = 0.5 * (1.0 - z);
        x[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (1.0 + z);
        const double wi = 1.0 / ((1.0 - z * z) * pp * pp);
        w[static_cast<std::size_t>(i)] = wi;
        w[static_cast<std::size_t>(n - 1 - i)] = wi;
    }
    GaussLegendre rule;
    rule.nodes = std::move(x);
    rule.weights = std::move(w);
    return rule;
}

const GaussLegendre& GaussLegendre::base() {
    static const GaussLegendre rule = make(128);
    return rule;
}

const GaussLegendre& GaussLegendre::doubled() {
    static const GaussLegendre rule = make(256);
    return rule;
}

} // namespace classex
