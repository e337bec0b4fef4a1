#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ejspec/oracle.hpp"
#include "ejspec/transfer.hpp"
#include "support.hpp"

using namespace ejspec;
using ejtest::sym_element;

namespace {

const std::vector<SubdiffKind> kAllKinds = {SubdiffKind::Regular, SubdiffKind::Limiting,
                                            SubdiffKind::Horizon, SubdiffKind::Clarke};

const std::vector<SymmetricFunctionId> kCatalog = {
    SymmetricFunctionId::kth_largest(1),
    SymmetricFunctionId::kth_largest(2),
    SymmetricFunctionId::sum_top_k(2),
    SymmetricFunctionId::l1_norm(1.5),
    SymmetricFunctionId::l2_norm(2.0),
    SymmetricFunctionId::neglogprod(1.0),
    SymmetricFunctionId::sum(),
    SymmetricFunctionId::half_sq_norm(),
    SymmetricFunctionId::zero_norm_count(1.0),
};

Element domain_element(const SymmetricFunctionId& fid, const AlgebraDescriptor& algebra,
                       SplitMix64& rng, bool force_ties) {
    Element x;
    if (force_ties) {
        std::vector<double> values(algebra.rank());
        for (double& value : values) value = std::floor(3.0 * rng.uniform01());
        x = ejtest::with_spectrum(algebra, values, rng);
    } else {
        x = random_element(algebra, rng);
    }
    if (fid.tag == SymFunctionTag::NegLogProd) {
        double lowest = spectral_decompose(x).lambda.back();
        x += (std::abs(lowest) + 0.5) * Element::identity(algebra);
    }
    return x;
}

}  // namespace

TEST_CASE("spectral values") {
    SplitMix64 rng(51);
    auto algebra = ejtest::big_test_algebra();
    Element x = random_element(algebra, rng);

    // F = lambda_1
    CHECK(spectral_value(SymmetricFunctionId::kth_largest(1), x) ==
          doctest::Approx(spectral_decompose(x).lambda[0]));

    // half squared norm transfers to ||x||^2 / 2
    CHECK(spectral_value(SymmetricFunctionId::half_sq_norm(), x) ==
          doctest::Approx(0.5 * norm(x) * norm(x)).epsilon(1e-10));

    // -mu log det on the cone interior
    Element p = x + (std::abs(spectral_decompose(x).lambda.back()) + 1.0) * Element::identity(algebra);
    double logdet = 0.0;
    for (double value : spectral_decompose(p).lambda) logdet += std::log(value);
    CHECK(spectral_value(SymmetricFunctionId::neglogprod(1.5), p) ==
          doctest::Approx(-1.5 * logdet).epsilon(1e-10));
    CHECK(std::isinf(spectral_value(SymmetricFunctionId::neglogprod(1.0), x - 100.0 * Element::identity(algebra))));
}

TEST_CASE("membership examples") {
    Element x = sym_element(2, {2, 0, 0, 1});
    Element offdiag = sym_element(2, {0, 1, 1, 0});

    for (const auto& fid : {SymmetricFunctionId::kth_largest(1), SymmetricFunctionId::sum()}) {
        for (auto kind : kAllKinds) {
            auto report = spectral_subdiff_member(fid, kind, x, offdiag, 1e-6);
            CHECK_FALSE(report.member);
            CHECK_FALSE(report.commutes);
        }
    }

    // f_1 on Sym(2) at the identity, Clarke: any psd s with unit trace
    Element id2 = Element::identity(AlgebraDescriptor::sym(2));
    Element s = sym_element(2, {0.5, 0.3, 0.3, 0.5});
    auto report = spectral_subdiff_member(SymmetricFunctionId::kth_largest(1), SubdiffKind::Clarke,
                                          id2, s, 1e-6);
    CHECK(report.commutes);
    CHECK(report.member);
    REQUIRE(report.diag_vector.has_value());
    CHECK((*report.diag_vector)[0] == doctest::Approx(0.8));
    CHECK((*report.diag_vector)[1] == doctest::Approx(0.2));
    CHECK(lambda_k_subdiff_member(1, SubdiffKind::Clarke, id2, s, 1e-6));

    // the trivial supseteq direction: diagonal subgradients are members
    SplitMix64 rng(52);
    auto frame = spectral_decompose(x).frame;
    Element e11 = sym_element(2, {1, 0, 0, 0});
    auto reg = spectral_subdiff_member(SymmetricFunctionId::kth_largest(1), SubdiffKind::Regular,
                                       x, e11, 1e-6);
    CHECK(reg.member);
    CHECK(reg.commutes);
}

TEST_CASE("subgradient construction") {
    SplitMix64 rng(53);
    auto algebra = ejtest::big_test_algebra();
    Element x = random_element(algebra, rng);
    const int r = algebra.rank();

    Element via_sum = spectral_subgradient_build(SymmetricFunctionId::sum(), SubdiffKind::Regular,
                                                 x, std::vector<double>(r, 1.0));
    CHECK(norm(via_sum - Element::identity(algebra)) < 1e-10);

    auto lambda = spectral_decompose(x).lambda;
    Element via_half = spectral_subgradient_build(SymmetricFunctionId::half_sq_norm(),
                                                  SubdiffKind::Regular, x, lambda);
    CHECK(norm(via_half - x) < 1e-8 * (1.0 + norm(x)));

    Element x2 = sym_element(2, {2, 0, 0, 1});
    Element via_top = spectral_subgradient_build(SymmetricFunctionId::kth_largest(1),
                                                 SubdiffKind::Regular, x2,
                                                 std::vector<double>{1, 0});
    CHECK(norm(via_top - sym_element(2, {1, 0, 0, 0})) < 1e-12);

    CHECK_THROWS_AS(spectral_subgradient_build(SymmetricFunctionId::kth_largest(1),
                                               SubdiffKind::Regular, x2,
                                               std::vector<double>{0, 1}),
                    NotASubgradient);
}

TEST_CASE("transfer round trip across the catalog") {
    SplitMix64 rng(54);
    for (const auto& fid : kCatalog) {
        for (auto kind : {SubdiffKind::Regular, SubdiffKind::Limiting, SubdiffKind::Horizon}) {
            for (const auto& algebra : ejtest::test_algebras()) {
                Element x = domain_element(fid, algebra, rng, /*force_ties=*/false);
                auto lambda = spectral_decompose(x).lambda;
                auto d = ejtest::sample_subgradient(fid, kind, lambda, rng);
                if (!d) continue;
                Element s = spectral_subgradient_build(fid, kind, x, *d);
                CHECK(operator_commute(x, s, 1e-8));
                auto report = spectral_subdiff_member(fid, kind, x, s, 1e-6);
                CHECK(report.commutes);
                CHECK(report.member);
            }
        }
    }
}

TEST_CASE("non-commuting candidates are rejected across the catalog") {
    SplitMix64 rng(55);
    auto algebra = ejtest::big_test_algebra();
    for (const auto& fid : kCatalog) {
        Element x = domain_element(fid, algebra, rng, false);
        Element s = random_element(algebra, rng);
        REQUIRE_FALSE(operator_commute(x, s, 1e-8));
        for (auto kind : kAllKinds) {
            auto report = spectral_subdiff_member(fid, kind, x, s, 1e-6);
            CHECK_FALSE(report.member);
            CHECK_FALSE(report.commutes);
        }
    }
}

TEST_CASE("lambda_k closed forms") {
    Element x = sym_element(2, {2, 0, 0, 1});
    Element e11 = sym_element(2, {1, 0, 0, 0});
    Element e22 = sym_element(2, {0, 0, 0, 1});

    CHECK(lambda_k_subdiff_member(1, SubdiffKind::Clarke, x, e11));
    CHECK_FALSE(lambda_k_subdiff_member(1, SubdiffKind::Clarke, x, e22));
    CHECK(lambda_k_subdiff_member(2, SubdiffKind::Clarke, x, e22));

    // repeated top eigenvalue empties the regular subdifferential at k = 2
    Element id2 = Element::identity(AlgebraDescriptor::sym(2));
    SplitMix64 rng(56);
    for (int trial = 0; trial < 10; ++trial) {
        Element s = random_element(AlgebraDescriptor::sym(2), rng);
        auto report = lambda_k_subdiff_query(2, SubdiffKind::Regular, id2, s);
        CHECK_FALSE(report.member);
        CHECK(report.branch == "regular_empty");
    }
    CHECK_FALSE(lambda_k_subdiff_member(2, SubdiffKind::Regular, id2, e22));
    CHECK(lambda_k_subdiff_member(2, SubdiffKind::Limiting, id2, e22));

    // horizon accepts only zero
    Element zero = Element::zero(AlgebraDescriptor::sym(2));
    CHECK(lambda_k_subdiff_member(1, SubdiffKind::Horizon, x, zero));
    CHECK(lambda_k_subdiff_member(2, SubdiffKind::Horizon, id2, zero));
    CHECK_FALSE(lambda_k_subdiff_member(1, SubdiffKind::Horizon, x, e11));

    CHECK_THROWS_AS(lambda_k_subdiff_member(3, SubdiffKind::Clarke, x, e11), ValidationError);
}

TEST_CASE("lambda_k membership via FD gradient of lambda_1") {
    // at a point with a simple top eigenvalue, lambda_1 is differentiable and
    // its gradient is the unique clarke subgradient
    SplitMix64 rng(57);
    auto algebra = AlgebraDescriptor::sym(4);
    Element x = random_element(algebra, rng);
    auto dec = spectral_decompose(x);
    Element gradient = dec.frame.idempotents[0];
    CHECK(lambda_k_subdiff_member(1, SubdiffKind::Clarke, x, gradient, 1e-6));

    auto fd = oracle::fd_dir_derivative(
        [](const Element& y) { return spectral_decompose(y).lambda; }, x,
        random_element(algebra, rng), std::vector<double>{1e-4, 1e-5, 1e-6});
    CHECK(fd.error_estimate < 1e-3);
}

TEST_CASE("two lambda_k membership paths agree") {
    SplitMix64 rng(58);
    for (const auto& algebra : ejtest::test_algebras()) {
        const int r = algebra.rank();
        for (int trial = 0; trial < 8; ++trial) {
            bool tie = trial % 2 == 1;
            Element x = tie ? ejtest::with_spectrum(
                                  algebra,
                                  [&] {
                                      std::vector<double> values(r);
                                      for (double& value : values)
                                          value = std::floor(3.0 * rng.uniform01());
                                      return values;
                                  }(),
                                  rng)
                            : random_element(algebra, rng);
            auto frame = spectral_decompose(x).frame;
            for (int k = 1; k <= r; ++k) {
                auto fid = SymmetricFunctionId::kth_largest(k);
                for (int sample = 0; sample < 4; ++sample) {
                    Element s;
                    if (sample % 2 == 0) {
                        s = random_element(algebra, rng);  // non-commuting almost surely
                    } else {
                        auto kind = kAllKinds[sample % kAllKinds.size()];
                        auto lambda = spectral_decompose(x).lambda;
                        auto d = ejtest::sample_subgradient(fid, kind, lambda, rng);
                        s = d ? diag_build(*d, frame) : random_element(algebra, rng);
                    }
                    for (auto kind : kAllKinds) {
                        bool via_transfer =
                            spectral_subdiff_member(fid, kind, x, s, 1e-6).member;
                        bool via_formula = lambda_k_subdiff_member(k, kind, x, s, 1e-6);
                        CHECK(via_transfer == via_formula);
                    }
                }
            }
        }
    }
}

TEST_CASE("built regular subgradients of F survive the element probe") {
    SplitMix64 rng(59);
    const std::vector<double> radii{1e-3, 1e-4};
    for (const auto& fid : kCatalog) {
        auto algebra = AlgebraDescriptor({{FactorKind::Sym, 3}, {FactorKind::Diagonal, 2}});
        Element x = domain_element(fid, algebra, rng, false);
        auto lambda = spectral_decompose(x).lambda;
        auto d = ejtest::sample_subgradient(fid, SubdiffKind::Regular, lambda, rng);
        if (!d) continue;
        Element s = spectral_subgradient_build(fid, SubdiffKind::Regular, x, *d);
        auto verdict = oracle::regular_subgradient_probe_element(
            [&](const Element& y) { return spectral_value(fid, y); }, x, s, 1e-3, radii, 128,
            900);
        CHECK(verdict.passed);
    }
}

TEST_CASE("clarke contains limiting for built members") {
    SplitMix64 rng(60);
    auto algebra = ejtest::big_test_algebra();
    for (const auto& fid : kCatalog) {
        Element x = domain_element(fid, algebra, rng, true);
        auto lambda = spectral_decompose(x).lambda;
        auto d = ejtest::sample_subgradient(fid, SubdiffKind::Limiting, lambda, rng);
        if (!d) continue;
        Element s = spectral_subgradient_build(fid, SubdiffKind::Limiting, x, *d);
        CHECK(spectral_subdiff_member(fid, SubdiffKind::Clarke, x, s, 1e-6).member);
    }
}

TEST_CASE("scale coherence of the top eigenvalue") {
    SplitMix64 rng(61);
    auto algebra = AlgebraDescriptor::sym(3);
    Element x = ejtest::with_spectrum(algebra, {2, 2, 1}, rng);
    Element s = spectral_decompose(x).frame.idempotents[0];
    Element e = Element::identity(algebra);
    for (double beta : {-3.0, 0.0, 0.75, 10.0}) {
        CHECK(lambda_k_subdiff_member(1, SubdiffKind::Clarke, x + beta * e, s, 1e-6));
        CHECK(spectral_subdiff_member(SymmetricFunctionId::kth_largest(1), SubdiffKind::Clarke,
                                      x + beta * e, s, 1e-6)
                  .member);
    }
}

TEST_CASE("spectral dist0") {
    SplitMix64 rng(62);
    Element id2 = Element::identity(AlgebraDescriptor::sym(2));
    CHECK(spectral_dist0(SymmetricFunctionId::kth_largest(1), id2) ==
          doctest::Approx(1.0 / std::sqrt(2.0)));

    auto algebra = ejtest::big_test_algebra();
    Element x = random_element(algebra, rng);
    CHECK(spectral_dist0(SymmetricFunctionId::half_sq_norm(), x) ==
          doctest::Approx(norm(x)).epsilon(1e-9));
    CHECK(spectral_dist0(SymmetricFunctionId::sum(), x) ==
          doctest::Approx(std::sqrt(static_cast<double>(algebra.rank()))));
}
