#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace classex {

enum class BasisKind { constant, monomial, radial };

// A candidate basis for the discriminability function D(u) on [0,1].
// Element 0 is always the constant 1 (the intercept); radial elements
// are probit-scale Gaussian CDF bumps
//   h_l(u) = Phi((Phi^-1(u) - t_l) / h).
struct BasisSpec {
    BasisKind kind = BasisKind::constant;
    double bandwidth = 0.0;          // radial only
    std::vector<double> knots;       // radial: t_l for elements 1..m-1
    std::vector<double> powers;      // monomial: element i is u^powers[i]

    std::int64_t size() const;
    double eval(std::int64_t ell, double u) const;
    std::string label() const;
};

BasisSpec constant_basis();
BasisSpec monomial_basis(std::vector<double> powers);
BasisSpec radial_basis(double bandwidth, double knot_limit);

// Largest admissible knot magnitude, Phi^-1(1 - 1/(r*k1^2)).
double knot_range(std::int64_t r, std::int64_t k1);

// One radial candidate per bandwidth: knots at multiples of h/2 inside
// [-T, T] with T = knot_range(r, k1), plus the constant element.
std::vector<BasisSpec> candidate_bases(std::int64_t r, std::int64_t k1,
                                       const std::vector<double>& h_grid);

inline std::vector<double> default_bandwidth_grid() {
    return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
}

// Moments H_{l,k} = (k-1) * int_0^1 h_l(u) u^{k-2} du on a fixed k-grid.
struct MomentMatrix {
    std::int64_t m = 0;
    std::vector<std::int64_t> ks;  // sorted, unique
    std::vector<double> values;    // m x ks.size(), row-major in l

    double at(std::int64_t ell, std::int64_t k) const;
    bool has_k(std::int64_t k) const;
};

// Computes the moment matrix by fixed-order Gauss-Legendre quadrature
// under the substitution v = u^{k-1} (which flattens the Beta(k-1,1)
// weight) composed with an endpoint-graded map (see quadrature.hpp).
// Every value is verified by order doubling; a doubled-order shift above
// 1e-6 raises numeric_error instead of being silently accepted.
MomentMatrix moments(const BasisSpec& basis, const std::vector<std::int64_t>& ks,
                     int threads = 1);

// Audit route: the same integral evaluated in u-space without the
// v = u^{k-1} substitution. Intended for small k cross-checks.
double moment_direct(const BasisSpec& basis, std::int64_t ell, std::int64_t k);

} // namespace classex
