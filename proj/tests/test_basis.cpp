#include <doctest.h>

#include <cmath>
#include <vector>

#include "classex/basis.hpp"
#include "classex/errors.hpp"
#include "classex/normal.hpp"

using namespace classex;

namespace {

// High-resolution trapezoid oracle for H_{l,k} on the substituted
// integrand v -> h(v^(1/(k-1))); independent of the Gauss-Legendre path.
double trapezoid_moment(const BasisSpec& basis, std::int64_t ell, std::int64_t k, std::int64_t n) {
    double acc = 0.0;
    const double step = 1.0 / static_cast<double>(n);
    const double inv = 1.0 / static_cast<double>(k - 1);
    for (std::int64_t i = 0; i <= n; ++i) {
        const double v = static_cast<double>(i) * step;
        const double u = std::pow(v, inv);
        const double f = basis.eval(ell, u);
        acc += (i == 0 || i == n) ? 0.5 * f : f;
    }
    return acc * step;
}

} // namespace

TEST_SUITE("basis") {

TEST_CASE("eval fixtures") {
    const double T = knot_range(1, 10);
    BasisSpec radial = radial_basis(0.5, T);
    // first element is the intercept
    CHECK(radial.eval(0, 0.37) == 1.0);
    // at u = Phi(t) the probit argument vanishes
    const double t1 = radial.knots[3];
    CHECK(radial.eval(4, norm_cdf(t1)) == doctest::Approx(0.5).epsilon(1e-12));
    // reference composition at a generic point
    CHECK(radial_basis(0.5, 0.0).eval(1, 0.9) ==
          doctest::Approx(norm_cdf(norm_quantile(0.9) / 0.5)).epsilon(1e-13));
    // endpoints by continuous limit
    CHECK(radial.eval(2, 0.0) == 0.0);
    CHECK(radial.eval(2, 1.0) == 1.0);

    CHECK_THROWS_AS(radial.eval(radial.size(), 0.5), input_error);
    CHECK_THROWS_AS(radial.eval(1, 1.5), input_error);

    const BasisSpec mono = monomial_basis({0.0, 1.0, 2.0});
    CHECK(mono.eval(0, 0.3) == 1.0);
    CHECK(mono.eval(2, 0.5) == doctest::Approx(0.25));
}

TEST_CASE("moment fixtures: constants and monomials") {
    const BasisSpec constant = constant_basis();
    const auto mc = moments(constant, {2, 5, 100, 10000});
    for (const auto k : mc.ks) CHECK(mc.at(0, k) == doctest::Approx(1.0).epsilon(1e-12));

    // closed form (k-1)/(k-1+m); e.g. m=1, k=3 -> 2/3
    const BasisSpec mono = monomial_basis({0.0, 1.0, 2.0, 5.0});
    const std::vector<std::int64_t> ks = {2, 3, 10, 100, 100000};
    const auto mm = moments(mono, ks);
    CHECK(mm.at(1, 3) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    for (const auto k : ks) {
        for (std::size_t ell = 0; ell < 4; ++ell) {
            const double m = mono.powers[ell];
            const double expect = static_cast<double>(k - 1) / (static_cast<double>(k - 1) + m);
            CHECK(mm.at(static_cast<std::int64_t>(ell), k) ==
                  doctest::Approx(expect).epsilon(1e-8));
        }
    }
}

TEST_CASE("radial moment against the trapezoid oracle") {
    BasisSpec b;
    b.kind = BasisKind::radial;
    b.bandwidth = 0.4;
    b.knots = {1.0};
    const auto mm = moments(b, {50});
    const double oracle = trapezoid_moment(b, 1, 50, 10000000);
    CHECK(mm.at(1, 50) == doctest::Approx(oracle).epsilon(1e-7));
}

TEST_CASE("substituted and direct quadrature agree for small k") {
    const double T = knot_range(1, 20);
    const BasisSpec radial = radial_basis(0.4, T);
    std::vector<std::int64_t> ks;
    for (std::int64_t k = 2; k <= 30; ++k) ks.push_back(k);
    const auto mm = moments(radial, ks);
    for (const auto k : {std::int64_t{2}, std::int64_t{7}, std::int64_t{19}, std::int64_t{30}}) {
        for (std::int64_t ell = 0; ell < radial.size(); ell += 3) {
            CHECK(mm.at(ell, k) == doctest::Approx(moment_direct(radial, ell, k)).epsilon(1e-7));
        }
    }
}

TEST_CASE("moment monotonicity in k for non-decreasing elements") {
    const BasisSpec radial = radial_basis(0.3, knot_range(1, 50));
    std::vector<std::int64_t> ks;
    for (std::int64_t k = 2; k <= 60; k += 4) ks.push_back(k);
    const auto mm = moments(radial, ks);
    for (std::int64_t ell = 0; ell < radial.size(); ++ell) {
        for (std::size_t i = 1; i < ks.size(); ++i) {
            CHECK(mm.at(ell, ks[i]) >= mm.at(ell, ks[i - 1]) - 1e-10);
        }
    }
}

TEST_CASE("H at k=2 is the plain integral of the element") {
    BasisSpec b;
    b.kind = BasisKind::radial;
    b.bandwidth = 1.0;
    b.knots = {0.7};
    const auto mm = moments(b, {2});
    // int_0^1 Phi(Phi^-1(u) - t) du = Phi(-t/sqrt(2))
    CHECK(mm.at(1, 2) == doctest::Approx(norm_cdf(-0.7 / std::sqrt(2.0))).epsilon(1e-10));
}

TEST_CASE("knot rule") {
    // T = Phi^-1(1 - 1/(r k1^2))
    CHECK(knot_range(1, 10) == doctest::Approx(norm_quantile(0.99)).epsilon(1e-14));

    const auto cands = candidate_bases(1, 10, {1.0});
    REQUIRE(cands.size() == 1);
    const auto& b = cands[0];
    const double T = knot_range(1, 10);
    const auto expected_count = 2 * static_cast<std::int64_t>(std::floor(T / 0.5)) + 1;
    CHECK(static_cast<std::int64_t>(b.knots.size()) == expected_count);
    CHECK(b.size() == expected_count + 1);
    for (std::size_t i = 1; i < b.knots.size(); ++i) {
        CHECK(b.knots[i] - b.knots[i - 1] == doctest::Approx(0.5).epsilon(1e-12));
    }
    CHECK(std::fabs(b.knots.front()) <= T);
    CHECK(std::fabs(b.knots.back()) <= T);
    CHECK(b.knots.front() == -b.knots.back());

    const auto grid = candidate_bases(2, 37, default_bandwidth_grid());
    CHECK(grid.size() == 10);
    CHECK_THROWS_AS(candidate_bases(1, 10, {}), input_error);
}

TEST_CASE("quadrature non-convergence is reported") {
    BasisSpec nasty;
    nasty.kind = BasisKind::radial;
    nasty.bandwidth = 1e-4; // near-step transition the fixed rules cannot resolve
    nasty.knots = {0.3};    // off-center so symmetry cannot hide the error
    CHECK_THROWS_AS(moments(nasty, {2}), numeric_error);
}

TEST_CASE("moment matrix lookups") {
    const auto mm = moments(monomial_basis({0.0, 1.0}), {2, 10});
    CHECK(mm.has_k(10));
    CHECK_FALSE(mm.has_k(5));
    CHECK_THROWS_AS(mm.at(0, 5), input_error);
    CHECK_THROWS_AS(moments(monomial_basis({1.0}), {1}), input_error);
}

} // TEST_SUITE
