#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "ejspec/algebra.hpp"
#include "ejspec/grouping.hpp"
#include "ejspec/rng.hpp"
#include "ejspec/symmetric_functions.hpp"

namespace ejtest {

using namespace ejspec;

inline Element sym_element(int n, std::initializer_list<double> rowmajor) {
    return Element::from_sym(n, std::vector<double>(rowmajor));
}

inline Element diag_element(std::initializer_list<double> entries) {
    return Element::from_diagonal(std::vector<double>(entries));
}

inline Element spin_element(double x0, std::initializer_list<double> xbar) {
    return Element::from_spin(x0, std::vector<double>(xbar));
}

// Desk-scale algebras exercised by the property suites: every factor kind
// alone plus mixed products (rank <= 12, at most 4 factors).
inline std::vector<AlgebraDescriptor> test_algebras() {
    return {
        AlgebraDescriptor::diagonal(4),
        AlgebraDescriptor::sym(2),
        AlgebraDescriptor::sym(5),
        AlgebraDescriptor::spin(3),
        AlgebraDescriptor::spin(8),
        AlgebraDescriptor({{FactorKind::Sym, 3}, {FactorKind::Spin, 4}}),
        AlgebraDescriptor({{FactorKind::Diagonal, 2}, {FactorKind::Sym, 4}}),
        AlgebraDescriptor(
            {{FactorKind::Sym, 3}, {FactorKind::Diagonal, 3}, {FactorKind::Spin, 5}, {FactorKind::Sym, 2}}),
    };
}

inline AlgebraDescriptor big_test_algebra() {
    return AlgebraDescriptor({{FactorKind::Sym, 4}, {FactorKind::Spin, 4}, {FactorKind::Diagonal, 3}});
}

// Element with prescribed eigenvalue multiset: Diag(values, frame of a
// random element), giving exact ties and frames in general position.
inline Element with_spectrum(const AlgebraDescriptor& algebra, std::vector<double> values,
                             SplitMix64& rng) {
    Element seed = random_element(algebra, rng);
    auto frame = spectral_decompose(seed).frame;
    return diag_build(values, frame);
}

inline std::vector<double> random_vector(int r, SplitMix64& rng) {
    std::vector<double> u(r);
    for (double& value : u) value = rng.normal();
    return u;
}

// Uniform point of the simplex over `support` embedded in dimension r.
inline std::vector<double> random_simplex_point(int r, const std::vector<int>& support,
                                                SplitMix64& rng) {
    std::vector<double> d(r, 0.0);
    double total = 0.0;
    for (int i : support) {
        d[i] = -std::log(rng.uniform01_open_low());
        total += d[i];
    }
    for (int i : support) d[i] /= total;
    return d;
}

inline std::vector<std::vector<double>> all_permutations(const std::vector<double>& v) {
    std::vector<int> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end());
    std::vector<std::vector<double>> out;
    do {
        std::vector<double> p(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) p[i] = v[order[i]];
        out.push_back(std::move(p));
    } while (std::next_permutation(order.begin(), order.end()));
    return out;
}

// All P v with P running over the permutations that fix lam (block-diagonal
// over groups of equal lam entries).  lam must be nonincreasing.
inline std::vector<std::vector<double>> stabilizer_orbit(const std::vector<double>& v,
                                                         const std::vector<double>& lam,
                                                         double tau) {
    auto bounds = chain_blocks(lam, tau);
    std::vector<std::vector<double>> orbit{std::vector<double>()};
    for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
        std::vector<double> block(v.begin() + bounds[j], v.begin() + bounds[j + 1]);
        std::sort(block.begin(), block.end());
        std::vector<std::vector<double>> grown;
        do {
            for (const auto& prefix : orbit) {
                std::vector<double> next = prefix;
                next.insert(next.end(), block.begin(), block.end());
                grown.push_back(std::move(next));
            }
        } while (std::next_permutation(block.begin(), block.end()));
        orbit = std::move(grown);
    }
    std::sort(orbit.begin(), orbit.end());
    orbit.erase(std::unique(orbit.begin(), orbit.end()), orbit.end());
    return orbit;
}

// Draws a point of the requested subdifferential of the catalog function at
// u, or nullopt when that set is empty.
inline std::optional<std::vector<double>> sample_subgradient(const SymmetricFunctionId& fid,
                                                             SubdiffKind kind,
                                                             const std::vector<double>& u,
                                                             SplitMix64& rng,
                                                             double tie_tol = -1.0) {
    const int r = static_cast<int>(u.size());
    const double tie = tie_tol < 0.0
                           ? 1e-8 * (1.0 + std::abs(*std::max_element(
                                               u.begin(), u.end(),
                                               [](double a, double b) {
                                                   return std::abs(a) < std::abs(b);
                                               })))
                           : tie_tol;
    const double ztol = 1e-12;

    auto sorted_order = [&]() {
        std::vector<int> order(r);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return u[i] > u[j]; });
        return order;
    };

    if (kind == SubdiffKind::Horizon) {
        if (fid.tag == SymFunctionTag::ZeroNormCount) {
            std::vector<double> d(r, 0.0);
            for (int i = 0; i < r; ++i)
                if (std::abs(u[i]) <= ztol) d[i] = rng.normal();
            return d;
        }
        return std::vector<double>(r, 0.0);
    }

    switch (fid.tag) {
        case SymFunctionTag::Sum:
            return std::vector<double>(r, 1.0);
        case SymFunctionTag::HalfSqNorm:
            return u;
        case SymFunctionTag::NegLogProd: {
            std::vector<double> d(r);
            for (int i = 0; i < r; ++i) d[i] = -fid.mu / u[i];
            return d;
        }
        case SymFunctionTag::L2Norm: {
            double unorm = std::sqrt(std::inner_product(u.begin(), u.end(), u.begin(), 0.0));
            if (unorm > ztol) {
                std::vector<double> d(u);
                for (double& value : d) value *= fid.mu / unorm;
                return d;
            }
            std::vector<double> d = random_vector(r, rng);
            double dnorm = std::sqrt(std::inner_product(d.begin(), d.end(), d.begin(), 0.0));
            double rho = fid.mu * rng.uniform01();
            for (double& value : d) value *= rho / dnorm;
            return d;
        }
        case SymFunctionTag::L1Norm: {
            std::vector<double> d(r);
            for (int i = 0; i < r; ++i) {
                if (std::abs(u[i]) > ztol)
                    d[i] = u[i] > 0 ? fid.mu : -fid.mu;
                else
                    d[i] = fid.mu * (2.0 * rng.uniform01() - 1.0);
            }
            return d;
        }
        case SymFunctionTag::ZeroNormCount: {
            std::vector<double> d(r, 0.0);
            for (int i = 0; i < r; ++i)
                if (std::abs(u[i]) <= ztol) d[i] = rng.normal();
            return d;
        }
        case SymFunctionTag::KthLargest: {
            auto order = sorted_order();
            std::vector<double> sorted(r);
            for (int i = 0; i < r; ++i) sorted[i] = u[order[i]];
            auto bounds = chain_blocks(sorted, tie);
            std::vector<int> ties;
            int begin = 0, end = 0;
            for (std::size_t j = 0; j + 1 < bounds.size(); ++j)
                if (fid.k - 1 >= bounds[j] && fid.k - 1 < bounds[j + 1]) {
                    begin = bounds[j];
                    end = bounds[j + 1];
                    for (int i = begin; i < end; ++i) ties.push_back(order[i]);
                }
            if (kind == SubdiffKind::Regular && fid.k - 1 != begin) return std::nullopt;
            if (kind == SubdiffKind::Limiting) {
                int alpha = 1 - fid.k + end;
                int size = 1 + static_cast<int>(rng.next_u64() %
                                                static_cast<std::uint64_t>(std::min(
                                                    alpha, static_cast<int>(ties.size()))));
                std::vector<int> chosen = ties;
                for (int i = static_cast<int>(chosen.size()) - 1; i > 0; --i)
                    std::swap(chosen[i], chosen[rng.next_u64() % (i + 1)]);
                chosen.resize(size);
                return random_simplex_point(r, chosen, rng);
            }
            return random_simplex_point(r, ties, rng);
        }
        case SymFunctionTag::SumTopK: {
            auto order = sorted_order();
            std::vector<double> sorted(r);
            for (int i = 0; i < r; ++i) sorted[i] = u[order[i]];
            auto bounds = chain_blocks(sorted, tie);
            std::vector<double> d(r, 0.0);
            for (std::size_t j = 0; j + 1 < bounds.size(); ++j)
                if (fid.k - 1 >= bounds[j] && fid.k - 1 < bounds[j + 1]) {
                    for (int i = 0; i < bounds[j]; ++i) d[order[i]] = 1.0;
                    const int m = bounds[j + 1] - bounds[j];
                    std::vector<double> raw(m);
                    for (double& value : raw) value = rng.uniform01();
                    auto slice = project_to_capped_simplex(
                        raw, static_cast<double>(fid.k - bounds[j]));
                    for (int i = 0; i < m; ++i) d[order[bounds[j] + i]] = slice[i];
                }
            return d;
        }
    }
    return std::nullopt;
}

}  // namespace ejtest
