#include <doctest.h>

#include <cmath>
#include <vector>

#include "classex/errors.hpp"
#include "classex/kde.hpp"
#include "classex/normal.hpp"
#include "classex/rng.hpp"
#include "classex/scores.hpp"

using namespace classex;

namespace {

ScoreTable random_table(std::int64_t k1, std::int64_t r, std::uint64_t seed) {
    ScoreTable t;
    t.k1 = k1;
    t.r = r;
    t.scores.resize(static_cast<std::size_t>(k1 * r * k1));
    RandomStream s(seed);
    for (auto& v : t.scores) v = s.normal();
    return t;
}

// Quadrature oracle: integrate the smoothed wrong-score density from far
// below up to the true score with a fine trapezoid rule, then average
// acc_2^(K-1) over observations.
double kde_oracle(const ScoreTable& t, std::int64_t K, double h, std::int64_t n_grid) {
    double total = 0.0;
    for (std::int64_t i = 0; i < t.k1; ++i) {
        for (std::int64_t j = 0; j < t.r; ++j) {
            const auto row = t.row(i, j);
            std::vector<double> wrong;
            for (std::int64_t s = 0; s < t.k1; ++s) {
                if (s != i) wrong.push_back(row[static_cast<std::size_t>(s)]);
            }
            const double true_score = row[static_cast<std::size_t>(i)];
            double lo = true_score;
            for (const double w : wrong) lo = std::min(lo, w);
            lo -= 12.0 * h;
            const double step = (true_score - lo) / static_cast<double>(n_grid);
            double integral = 0.0;
            for (std::int64_t g = 0; g <= n_grid; ++g) {
                const double x = lo + step * static_cast<double>(g);
                double density = 0.0;
                for (const double w : wrong) density += norm_pdf((x - w) / h);
                density /= h * static_cast<double>(wrong.size());
                integral += (g == 0 || g == n_grid) ? 0.5 * density : density;
            }
            integral *= step;
            total += std::pow(integral, static_cast<double>(K - 1));
        }
    }
    return total / static_cast<double>(t.k1 * t.r);
}

} // namespace

TEST_SUITE("kde") {

TEST_CASE("single competitor at the true score gives one half") {
    ScoreTable t;
    t.k1 = 2;
    t.r = 1;
    t.scores = {0.4, 0.4, /* class 2 */ 0.1, 0.9};
    KdeConfig cfg;
    cfg.rule = BandwidthRule::fixed;
    cfg.fixed_bandwidth = 0.25;
    // class 1: kernel symmetry puts exactly half the mass below the tie
    for (const std::int64_t K : {std::int64_t{2}, std::int64_t{5}}) {
        double acc_class1 = norm_cdf(0.0);
        CHECK(acc_class1 == 0.5);
        const double expected_class1 = std::pow(0.5, static_cast<double>(K - 1));
        const double expected_class2 =
            std::pow(norm_cdf((0.9 - 0.1) / 0.25), static_cast<double>(K - 1));
        const double expect = 0.5 * (expected_class1 + expected_class2);
        CHECK(kde_extrapolate(t, K, cfg) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("vanishing bandwidth on a correct observation drives acc to one") {
    // the upward-bias mechanism: unsmoothed empirical CDF saturates
    ScoreTable t;
    t.k1 = 4;
    t.r = 1;
    t.scores.assign(16, 0.0);
    for (std::int64_t i = 0; i < 4; ++i) {
        for (std::int64_t s = 0; s < 4; ++s) {
            t.at(i, 0, s) = (s == i) ? 10.0 : static_cast<double>(s);
        }
    }
    KdeConfig cfg;
    cfg.rule = BandwidthRule::fixed;
    cfg.fixed_bandwidth = 1e-9;
    for (const std::int64_t K : {std::int64_t{2}, std::int64_t{1000}, std::int64_t{100000}}) {
        CHECK(kde_extrapolate(t, K, cfg) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("closed-form CDF equals the quadrature oracle on 5-class tables") {
    for (const std::uint64_t seed : {1u, 2u, 3u}) {
        const auto t = random_table(5, 1, seed);
        KdeConfig cfg;
        cfg.rule = BandwidthRule::fixed;
        cfg.fixed_bandwidth = 0.5;
        const double got = kde_extrapolate(t, 3, cfg);
        const double oracle = kde_oracle(t, 3, 0.5, 1000000);
        CHECK(got == doctest::Approx(oracle).epsilon(1e-6));
    }
}

TEST_CASE("monotone decrease in K") {
    const auto t = random_table(8, 2, 77);
    KdeConfig cfg;
    cfg.rule = BandwidthRule::fixed;
    cfg.fixed_bandwidth = 0.4;
    double prev = 1.0;
    for (const std::int64_t K : {std::int64_t{2}, std::int64_t{3}, std::int64_t{5},
                                 std::int64_t{9}, std::int64_t{17}}) {
        const double v = kde_extrapolate(t, K, cfg);
        CHECK(v > 0.0);
        CHECK(v < 1.0);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }
}

TEST_CASE("ucv bandwidth on normal samples lands near the reference rule") {
    RandomStream s(2027);
    std::vector<double> xs(10000);
    for (auto& x : xs) x = s.normal();
    const double h = select_bandwidth(xs, BandwidthRule::ucv);
    const double silverman = 1.06 * std::pow(10000.0, -0.2); // population sd = 1
    CHECK(h > 0.5 * silverman);
    CHECK(h < 2.0 * silverman);
}

TEST_CASE("bandwidth selection rejects degenerate samples") {
    const std::vector<double> two_values = {1.0, 2.0, 1.0, 2.0, 1.0};
    CHECK_THROWS_AS(select_bandwidth(two_values, BandwidthRule::ucv), numeric_error);
    const std::vector<double> identical(10, 3.0);
    CHECK_THROWS_AS(select_bandwidth(identical, BandwidthRule::bcv), numeric_error);
}

TEST_CASE("bandwidth selection is scale equivariant within one percent") {
    RandomStream s(5);
    std::vector<double> xs(800);
    for (auto& x : xs) x = s.normal() * 2.0 + 1.0;
    for (const auto rule : {BandwidthRule::ucv, BandwidthRule::bcv}) {
        const double h1 = select_bandwidth(xs, rule);
        std::vector<double> scaled(xs.size());
        const double c = 7.5;
        for (std::size_t i = 0; i < xs.size(); ++i) scaled[i] = c * xs[i];
        const double h2 = select_bandwidth(scaled, rule);
        CHECK(h2 / (c * h1) == doctest::Approx(1.0).epsilon(0.01));
    }
}

TEST_CASE("degenerate observation falls back to Silverman and is flagged") {
    ScoreTable t;
    t.k1 = 3;
    t.r = 1;
    // wrong-class scores of class 1 are identical: selection must fail over
    t.scores = {0.9, 0.1, 0.1, /* class 2 */ 0.3, 0.8, 0.2, /* class 3 */ 0.25, 0.4, 0.6};
    KdeConfig cfg;
    cfg.rule = BandwidthRule::ucv;
    KdeDiagnostics diag;
    const double v = kde_extrapolate(t, 4, cfg, &diag);
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
    CHECK(diag.fallback_count >= 1);
}

TEST_CASE("pooled mode runs and stays in range") {
    const auto t = random_table(12, 1, 13);
    KdeConfig cfg;
    cfg.rule = BandwidthRule::bcv;
    cfg.pooled = true;
    const double v = kde_extrapolate(t, 24, cfg);
    CHECK(v > 0.0);
    CHECK(v < 1.0);
}

TEST_CASE("input validation") {
    const auto t = random_table(4, 1, 1);
    KdeConfig cfg;
    CHECK_THROWS_AS(kde_extrapolate(t, 1, cfg), input_error);
    cfg.rule = BandwidthRule::fixed;
    cfg.fixed_bandwidth = 0.0;
    CHECK_THROWS_AS(kde_extrapolate(t, 4, cfg), input_error);
}

} // TEST_SUITE
