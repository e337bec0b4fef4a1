#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ejspec/oracle.hpp"
#include "ejspec/symmetric_functions.hpp"
#include "support.hpp"

using namespace ejspec;

TEST_CASE("finite differences are exact on linear maps") {
    SplitMix64 rng(81);
    auto algebra = ejtest::big_test_algebra();
    Element x = random_element(algebra, rng);
    Element z = random_element(algebra, rng);
    Element probe = random_element(algebra, rng);

    auto linear = [&](const Element& y) {
        return std::vector<double>{trace_inner(probe, y), trace_of(y)};
    };
    auto fd = oracle::fd_dir_derivative(linear, x, z, std::vector<double>{1e-2, 1e-3, 1e-4});
    CHECK(fd.value[0] == doctest::Approx(trace_inner(probe, z)).epsilon(1e-9));
    CHECK(fd.value[1] == doctest::Approx(trace_of(z)).epsilon(1e-9));
    CHECK(fd.error_estimate < 1e-9 * (1.0 + std::abs(fd.value[0])));
    CHECK_FALSE(fd.observed_order.has_value());  // everything at noise level
}

TEST_CASE("finite differences recover the eigenvalue derivative at a crossing") {
    Element x = Element::identity(AlgebraDescriptor::sym(2));
    Element z = ejtest::sym_element(2, {0, 1, 1, 0});
    auto fd = oracle::fd_dir_derivative(
        [](const Element& y) { return spectral_decompose(y).lambda; }, x, z,
        std::vector<double>{1e-3, 1e-4, 1e-5});
    CHECK(fd.value[0] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(fd.value[1] == doctest::Approx(-1.0).epsilon(1e-7));
}

TEST_CASE("finite difference error shrinks linearly on curved spectra") {
    SplitMix64 rng(82);
    auto algebra = AlgebraDescriptor::sym(4);
    Element x = random_element(algebra, rng);
    Element z = random_element(algebra, rng);
    auto fd = oracle::fd_dir_derivative(
        [](const Element& y) { return spectral_decompose(y).lambda; }, x, z,
        std::vector<double>{1e-3, 1e-4, 1e-5});
    REQUIRE(fd.observed_order.has_value());
    CHECK(*fd.observed_order > 0.7);
    CHECK(*fd.observed_order < 2.5);
}

TEST_CASE("t grid validation") {
    auto id = [](const Element& y) { return spectral_decompose(y).lambda; };
    Element x = Element::identity(AlgebraDescriptor::sym(2));
    CHECK_THROWS_AS(oracle::fd_dir_derivative(id, x, x, std::vector<double>{}), ValidationError);
    CHECK_THROWS_AS(oracle::fd_dir_derivative(id, x, x, std::vector<double>{1e-3, 1e-2}),
                    ValidationError);
    CHECK_THROWS_AS(oracle::fd_dir_derivative(id, x, x, std::vector<double>{1e-3, -1e-4}),
                    ValidationError);
}

TEST_CASE("probe accepts true convex subgradients") {
    SplitMix64 rng(83);
    // f(u) = ||u||_1 at a point with no zeros: unique gradient, global inequality
    std::vector<double> u{1.0, -2.0, 0.5};
    std::vector<double> d{1.0, -1.0, 1.0};
    auto verdict = oracle::regular_subgradient_probe(
        [](std::span<const double> v) {
            double sum = 0.0;
            for (double value : v) sum += std::abs(value);
            return sum;
        },
        u, d, 1e-9, std::vector<double>{1e-1, 1e-2, 1e-3}, 512, 17);
    CHECK(verdict.passed);
    // the global subgradient inequality holds with margin zero up to rounding
    CHECK(verdict.worst_violation >= -1e-12);
}

TEST_CASE("probe rejects the midpoint at the f_2 tie") {
    auto verdict = oracle::regular_subgradient_probe(
        [](std::span<const double> v) {
            return value(SymmetricFunctionId::kth_largest(2),
                         std::vector<double>(v.begin(), v.end()));
        },
        std::vector<double>{1, 1}, std::vector<double>{0.5, 0.5}, 1e-3,
        std::vector<double>{1e-2, 1e-3, 1e-4}, 512, 19);
    CHECK_FALSE(verdict.passed);
    CHECK(verdict.worst_violation <= -0.5);
    CHECK(verdict.worst_violation >= -1.0 / std::sqrt(2.0) - 1e-9);
    REQUIRE(verdict.witness.has_value());
    // the worst direction pushes the coordinates apart
    CHECK((*verdict.witness)[0] * (*verdict.witness)[1] < 0.0);
}

TEST_CASE("element probe accepts the top-eigenvalue subgradient at the identity") {
    Element x = Element::identity(AlgebraDescriptor::sym(2));
    Element e11 = ejtest::sym_element(2, {1, 0, 0, 0});
    auto verdict = oracle::regular_subgradient_probe_element(
        [](const Element& y) { return spectral_decompose(y).lambda[0]; }, x, e11, 1e-3,
        std::vector<double>{1e-2, 1e-3, 1e-4}, 512, 23);
    CHECK(verdict.passed);
}

TEST_CASE("infinite values never violate") {
    // domain wall right next to the base point
    std::vector<double> u{1e-6};
    std::vector<double> d{0.0};
    auto verdict = oracle::regular_subgradient_probe(
        [](std::span<const double> v) {
            return v[0] > 0 ? 0.0 : std::numeric_limits<double>::infinity();
        },
        u, d, 1e-3, std::vector<double>{1.0}, 64, 29);
    CHECK(verdict.passed);
}

TEST_CASE("hull membership geometry") {
    std::vector<std::vector<double>> segment{{1, 0}, {0, 1}};
    CHECK(oracle::hull_member_bruteforce(std::vector<double>{1, 0}, segment, 1e-12));
    CHECK(oracle::hull_member_bruteforce(std::vector<double>{0.5, 0.5}, segment, 1e-12));
    CHECK_FALSE(oracle::hull_member_bruteforce(std::vector<double>{0.6, 0.5}, segment, 1e-3));

    CHECK(oracle::distance_to_hull(std::vector<double>{0.6, 0.5}, segment) ==
          doctest::Approx(0.1 / std::sqrt(2.0)));
    CHECK(oracle::distance_to_hull(std::vector<double>{2, 0}, {{1, 0}}) == doctest::Approx(1.0));
    CHECK(oracle::distance_to_hull(std::vector<double>{2, 2}, segment) ==
          doctest::Approx(std::sqrt(2.0) * 1.5));

    // distance from the origin to the m-simplex is 1/sqrt(m)
    for (int m : {2, 3, 5, 8}) {
        std::vector<std::vector<double>> vertices;
        for (int i = 0; i < m; ++i) {
            std::vector<double> v(m, 0.0);
            v[i] = 1.0;
            vertices.push_back(std::move(v));
        }
        CHECK(oracle::distance_to_hull(std::vector<double>(m, 0.0), vertices) ==
              doctest::Approx(1.0 / std::sqrt(static_cast<double>(m))));
    }
}

TEST_CASE("random convex combinations are members") {
    SplitMix64 rng(84);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = 4 + static_cast<int>(rng.next_u64() % 5);
        std::vector<std::vector<double>> points;
        for (int i = 0; i < 5; ++i) points.push_back(ejtest::random_vector(dim, rng));
        std::vector<double> mix(dim, 0.0);
        std::vector<int> all{0, 1, 2, 3, 4};
        auto weights = ejtest::random_simplex_point(5, all, rng);
        for (int p = 0; p < 5; ++p)
            for (int i = 0; i < dim; ++i) mix[i] += weights[p] * points[p][i];
        CHECK(oracle::hull_member_bruteforce(mix, points, 1e-8));
        // projection residual is tiny, not merely below the tolerance
        CHECK(oracle::distance_to_hull(mix, points) < 1e-11);
    }
}

TEST_CASE("hull input validation") {
    CHECK_THROWS_AS(oracle::distance_to_hull(std::vector<double>{1.0}, {}), ValidationError);
    std::vector<std::vector<double>> too_many(10001, std::vector<double>{0.0});
    CHECK_THROWS_AS(oracle::distance_to_hull(std::vector<double>{1.0}, too_many),
                    ValidationError);
    CHECK_THROWS_AS(oracle::distance_to_hull(std::vector<double>{1.0}, {{1.0, 2.0}}),
                    ValidationError);
}
