#include <doctest.h>

#include <cmath>

#include "classex/csv.hpp"
#include "classex/normal.hpp"
#include "classex/quadrature.hpp"
#include "classex/rng.hpp"

using namespace classex;

TEST_SUITE("normal") {

TEST_CASE("cdf spot values") {
    CHECK(norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(norm_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
    CHECK(norm_cdf(-1.959963984540054) == doctest::Approx(0.025).epsilon(1e-12));
    CHECK(norm_cdf(-30.0) > 0.0); // deep tail stays positive until erfc underflows
    CHECK(norm_cdf(40.0) == 1.0);
}

TEST_CASE("quantile spot values") {
    CHECK(norm_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(norm_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
    CHECK(norm_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-13));
    CHECK(std::isinf(norm_quantile(0.0)));
    CHECK(std::isinf(norm_quantile(1.0)));
}

TEST_CASE("round trip cdf(quantile(u)) = u to 1e-9 across (1e-12, 1-1e-12)") {
    // log-spaced toward both tails plus a uniform sweep
    for (int i = 1; i <= 11; ++i) {
        const double tail = std::pow(10.0, -i);
        CHECK(norm_cdf(norm_quantile(tail)) == doctest::Approx(tail).epsilon(1e-9));
        CHECK(norm_cdf(norm_quantile(1.0 - tail)) == doctest::Approx(1.0 - tail).epsilon(1e-9));
    }
    for (double u = 0.01; u < 1.0; u += 0.01) {
        CHECK(norm_cdf(norm_quantile(u)) == doctest::Approx(u).epsilon(1e-12));
        CHECK(std::fabs(norm_quantile(norm_cdf(norm_quantile(u))) - norm_quantile(u)) < 1e-9);
    }
}

} // TEST_SUITE

TEST_SUITE("quadrature") {

TEST_CASE("weights sum to one and nodes are interior") {
    for (const auto* rule : {&GaussLegendre::base(), &GaussLegendre::doubled()}) {
        double sum = 0.0;
        for (const double w : rule->weights) sum += w;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
        for (const double x : rule->nodes) {
            CHECK(x > 0.0);
            CHECK(x < 1.0);
        }
    }
}

TEST_CASE("grading map fixes endpoints and preserves mass") {
    CHECK(smoothstep_value(0.0) == 0.0);
    CHECK(smoothstep_value(1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(smoothstep_value(0.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(smoothstep_deriv(0.0) == 0.0);
    CHECK(smoothstep_deriv(1.0) == 0.0);
    // graded rule still integrates exactly: int_0^1 dv = 1
    const auto& rule = GaussLegendre::base();
    double mass = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        mass += rule.weights[i] * smoothstep_deriv(rule.nodes[i]);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-14));
}

} // TEST_SUITE

TEST_SUITE("rng") {

TEST_CASE("streams are reproducible and seed-sensitive") {
    RandomStream a(mix64(7, 1, 2));
    RandomStream b(mix64(7, 1, 2));
    RandomStream c(mix64(7, 1, 3));
    bool all_equal = true, any_equal_c = false;
    for (int i = 0; i < 100; ++i) {
        const double ua = a.uniform(), ub = b.uniform(), uc = c.uniform();
        all_equal = all_equal && (ua == ub);
        any_equal_c = any_equal_c || (ua == uc);
    }
    CHECK(all_equal);
    CHECK_FALSE(any_equal_c);
}

TEST_CASE("normal draws have sane moments") {
    RandomStream s(42);
    const int n = 200000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = s.normal();
        sum += z;
        sum_sq += z * z;
    }
    CHECK(std::fabs(sum / n) < 0.01);
    CHECK(sum_sq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("subset sampling is uniform-ish and in range") {
    RandomStream s(9);
    int first_count = 0;
    for (int rep = 0; rep < 3000; ++rep) {
        const auto subset = s.sample_without_replacement(10, 4);
        CHECK(subset.size() == 4);
        for (std::size_t i = 1; i < subset.size(); ++i) CHECK(subset[i - 1] < subset[i]);
        for (const auto v : subset) {
            CHECK(v >= 0);
            CHECK(v < 10);
        }
        if (std::find(subset.begin(), subset.end(), 0) != subset.end()) ++first_count;
    }
    // element 0 appears with probability 0.4
    CHECK(first_count > 1000);
    CHECK(first_count < 1400);
}

} // TEST_SUITE

TEST_SUITE("csv") {

TEST_CASE("format_double round-trips") {
    for (const double v : {0.1, 1.0 / 3.0, 1e-17, 123456789.123456789, -0.0}) {
        CHECK(parse_double_field(format_double(v), "test") == v);
    }
}

TEST_CASE("split handles spacing") {
    const auto fields = split_csv_line("a, b ,c,,1.5");
    REQUIRE(fields.size() == 5);
    CHECK(fields[0] == "a");
    CHECK(fields[1] == "b");
    CHECK(fields[3].empty());
}

TEST_CASE("bad numeric fields throw") {
    CHECK_THROWS(parse_double_field("1.2.3", "ctx"));
    CHECK_THROWS(parse_int_field("7x", "ctx"));
}

TEST_CASE("fnv1a64 is stable") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64("a") != fnv1a64("b"));
}

} // TEST_SUITE
