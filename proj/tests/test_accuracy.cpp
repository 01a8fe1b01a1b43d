#include <doctest.h>

#include <cmath>
#include <vector>

#include "classex/accuracy.hpp"
#include "classex/errors.hpp"
#include "classex/ranks.hpp"
#include "classex/rng.hpp"

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

// Enumeration oracle: mean test accuracy over every size-k subset of the
// classes, computed straight from the score table.
double enumerate_ata(const ScoreTable& t, std::int64_t k) {
    std::vector<std::int64_t> subset(static_cast<std::size_t>(k));
    for (std::int64_t i = 0; i < k; ++i) subset[static_cast<std::size_t>(i)] = i;
    double total = 0.0;
    std::int64_t n_subsets = 0;
    for (;;) {
        std::int64_t correct = 0;
        for (const auto i : subset) {
            for (std::int64_t j = 0; j < t.r; ++j) {
                bool top = true;
                for (const auto s : subset) {
                    if (s != i && t.at(i, j, s) >= t.at(i, j, i)) {
                        top = false;
                        break;
                    }
                }
                correct += top;
            }
        }
        total += static_cast<double>(correct) / static_cast<double>(k * t.r);
        ++n_subsets;
        // next combination
        std::int64_t pos = k - 1;
        while (pos >= 0 && subset[static_cast<std::size_t>(pos)] == t.k1 - k + pos) --pos;
        if (pos < 0) break;
        ++subset[static_cast<std::size_t>(pos)];
        for (std::int64_t q = pos + 1; q < k; ++q) {
            subset[static_cast<std::size_t>(q)] = subset[static_cast<std::size_t>(q - 1)] + 1;
        }
    }
    return total / static_cast<double>(n_subsets);
}

RankHistogram hist_of(const ScoreTable& t) { return make_histogram(compute_ranks(t)); }

} // namespace

TEST_SUITE("accuracy") {

TEST_CASE("test accuracy fixtures") {
    RankHistogram h;
    h.k1 = 3;
    h.r = 1;
    h.counts = {1, 1, 1};
    CHECK(test_accuracy(h) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    RankHistogram perfect;
    perfect.k1 = 5;
    perfect.r = 2;
    perfect.counts = {0, 0, 0, 0, 10};
    CHECK(test_accuracy(perfect) == 1.0);

    RankHistogram two;
    two.k1 = 2;
    two.r = 1;
    two.counts = {0, 2};
    CHECK(test_accuracy(two) == 1.0);
}

TEST_CASE("ata fixtures") {
    RankHistogram h;
    h.k1 = 3;
    h.r = 1;
    h.counts = {1, 1, 1}; // ranks {3,2,1}
    CHECK(ata_value(h, 2) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ata_value(h, 3) == doctest::Approx(test_accuracy(h)).epsilon(1e-12));

    RankHistogram perfect;
    perfect.k1 = 6;
    perfect.r = 2;
    perfect.counts = {0, 0, 0, 0, 0, 12};
    for (std::int64_t k = 2; k <= 6; ++k) {
        CHECK(ata_value(perfect, k) == doctest::Approx(1.0).epsilon(1e-12));
    }

    CHECK_THROWS_AS(ata_value(h, 1), input_error);
    CHECK_THROWS_AS(ata_value(h, 4), input_error);
}

TEST_CASE("ata matches explicit subset enumeration") {
    for (const std::uint64_t seed : {11u, 12u, 13u}) {
        const auto t = random_table(2 + static_cast<std::int64_t>(seed % 7), 1 + seed % 3, seed);
        const auto h = hist_of(t);
        for (std::int64_t k = 2; k <= t.k1; ++k) {
            CHECK(ata_value(h, k) == doctest::Approx(enumerate_ata(t, k)).epsilon(1e-12));
        }
    }
}

TEST_CASE("curve is monotone non-increasing in k and bounded") {
    RandomStream s(404);
    for (int rep = 0; rep < 20; ++rep) {
        RankHistogram h;
        h.k1 = 2 + static_cast<std::int64_t>(s.below(30));
        h.r = 1 + static_cast<std::int64_t>(s.below(3));
        h.counts.resize(static_cast<std::size_t>(h.k1));
        for (auto& c : h.counts) c = static_cast<std::int64_t>(s.below(5));
        std::int64_t total = 0;
        for (const auto c : h.counts) total += c;
        if (total == 0) {
            h.counts[0] = h.k1 * h.r;
        } else {
            // pad to k1*r at rank 1
            h.counts[0] += h.k1 * h.r - total;
            if (h.counts[0] < 0) continue;
        }
        double prev = 1.0;
        for (std::int64_t k = 2; k <= h.k1; ++k) {
            const double v = ata_value(h, k);
            CHECK(v >= 0.0);
            CHECK(v <= prev + 1e-12);
            prev = v;
        }
    }
}

TEST_CASE("large-k1 curve stays finite and ordered") {
    RankHistogram h;
    h.k1 = 100000;
    h.r = 1;
    h.counts.assign(static_cast<std::size_t>(h.k1), 1);
    const double a2 = ata_value(h, 2);
    const double afull = ata_value(h, h.k1);
    CHECK(std::isfinite(a2));
    // uniform correct-label ranks: a random competitor wins half the time
    CHECK(a2 == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(afull == doctest::Approx(1.0 / static_cast<double>(h.k1)).epsilon(1e-9));
    CHECK(a2 >= afull);
}

TEST_CASE("curve accepts k=1 only at the conventional value 1") {
    AccuracyCurve curve;
    curve.k1 = 4;
    curve.r = 1;
    CHECK_NOTHROW(curve.insert(1, 1.0, Provenance::observed));
    CHECK_THROWS_AS(curve.insert(1, 0.9, Provenance::observed), input_error);
    CHECK_THROWS_AS(curve.insert(0, 1.0, Provenance::observed), input_error);
}

TEST_CASE("ata_curve carries provenance and k1 metadata") {
    RankHistogram h;
    h.k1 = 4;
    h.r = 1;
    h.counts = {0, 1, 1, 2};
    const auto curve = ata_curve(h, {2, 3, 4}, 2);
    CHECK(curve.k1 == 4);
    CHECK(curve.entries.size() == 3);
    for (const auto& e : curve.entries) CHECK(e.provenance == Provenance::observed);
    CHECK(curve.find(3) != nullptr);
    CHECK(curve.find(5) == nullptr);
}

TEST_CASE("fresh task accuracy fixtures") {
    const auto t = random_table(6, 2, 909);
    const auto h = hist_of(t);
    CHECK(fresh_task_accuracy(t, 6, 1) == doctest::Approx(test_accuracy(h)).epsilon(1e-15));

    ScoreTable perfect;
    perfect.k1 = 5;
    perfect.r = 1;
    perfect.scores.assign(25, 0.0);
    for (std::int64_t i = 0; i < 5; ++i) {
        for (std::int64_t s = 0; s < 5; ++s) {
            perfect.at(i, 0, s) = (s == i) ? 1.0 : -static_cast<double>(s) - 1.0;
        }
    }
    CHECK(fresh_task_accuracy(perfect, 3, 7) == 1.0);
    CHECK_THROWS_AS(fresh_task_accuracy(t, 1, 0), input_error);
    CHECK_THROWS_AS(fresh_task_accuracy(t, 7, 0), input_error);
}

TEST_CASE("fresh task draws are unbiased for the ata value") {
    const auto t = random_table(8, 1, 31);
    const auto h = hist_of(t);
    const std::int64_t k2 = 4;
    const double expect = ata_value(h, k2);
    const int n = 10000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = fresh_task_accuracy(t, k2, static_cast<std::uint64_t>(i));
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / n;
    const double sd = std::sqrt((sum_sq - n * mean * mean) / (n - 1.0));
    const double se = sd / std::sqrt(static_cast<double>(n));
    CHECK(std::fabs(mean - expect) <= 3.0 * se);
}

TEST_CASE("default k grid") {
    const auto small = default_k_grid(100);
    CHECK(small.size() == 99);
    CHECK(small.front() == 2);
    CHECK(small.back() == 100);
    const auto big = default_k_grid(50000);
    CHECK(big.size() < 2500);
    CHECK(big.front() == 2);
    CHECK(big.back() == 50000);
    for (std::size_t i = 1; i < big.size(); ++i) CHECK(big[i] > big[i - 1]);
}

} // TEST_SUITE
