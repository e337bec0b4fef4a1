#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ejspec/errors.hpp"

namespace ejspec {

enum class SubdiffKind { Regular, Limiting, Horizon, Clarke };

std::string to_string(SubdiffKind kind);
SubdiffKind subdiff_kind_from_string(const std::string& name);

// Catalog of permutation-symmetric functions f : R^r -> (-inf, +inf].
//
//   kth_largest:k=K      u -> K-th largest component
//   sum_top_k:k=K        u -> sum of the K largest components
//   l1_norm:mu=M         u -> M * sum |u_i|
//   l2_norm:mu=M         u -> M * ||u||
//   neglogprod:mu=M      u -> -M * sum log u_i   (domain u > 0)
//   sum                  u -> sum u_i
//   half_sq_norm         u -> ||u||^2 / 2
//   zero_norm_count:mu=M u -> M * #{i : u_i != 0}
enum class SymFunctionTag {
    KthLargest,
    SumTopK,
    L1Norm,
    L2Norm,
    NegLogProd,
    Sum,
    HalfSqNorm,
    ZeroNormCount,
};

struct SymmetricFunctionId {
    SymFunctionTag tag = SymFunctionTag::Sum;
    int k = 1;
    double mu = 1.0;

    static SymmetricFunctionId kth_largest(int k) { return {SymFunctionTag::KthLargest, k, 1.0}; }
    static SymmetricFunctionId sum_top_k(int k) { return {SymFunctionTag::SumTopK, k, 1.0}; }
    static SymmetricFunctionId l1_norm(double mu) { return {SymFunctionTag::L1Norm, 1, mu}; }
    static SymmetricFunctionId l2_norm(double mu) { return {SymFunctionTag::L2Norm, 1, mu}; }
    static SymmetricFunctionId neglogprod(double mu) { return {SymFunctionTag::NegLogProd, 1, mu}; }
    static SymmetricFunctionId sum() { return {SymFunctionTag::Sum, 1, 1.0}; }
    static SymmetricFunctionId half_sq_norm() { return {SymFunctionTag::HalfSqNorm, 1, 1.0}; }
    static SymmetricFunctionId zero_norm_count(double mu) {
        return {SymFunctionTag::ZeroNormCount, 1, mu};
    }

    std::string to_string() const;
    static SymmetricFunctionId parse(const std::string& text);
};

// V-representation for polyhedral subdifferential sets.  Rays come in +/-
// pairs when the set contains a full subspace direction.
struct GeneratorSet {
    std::vector<std::vector<double>> points;
    std::vector<std::vector<double>> rays;
};

// A queryable subdifferential set.  membership(d, tol) means the Euclidean
// distance from d to the set is at most tol; dist0 is the distance from the
// origin, i.e. min{||d|| : d in set}.
class SubdiffSet {
public:
    static SubdiffSet empty_set(int r);
    static SubdiffSet make(int r, std::function<double(std::span<const double>)> distance,
                           std::optional<GeneratorSet> generators = std::nullopt);

    int dimension() const { return r_; }
    bool is_empty() const { return empty_; }
    double distance(std::span<const double> d) const;
    bool member(std::span<const double> d, double tol = 1e-6) const;
    double dist0() const;
    const std::optional<GeneratorSet>& generators() const { return generators_; }

private:
    int r_ = 0;
    bool empty_ = false;
    std::function<double(std::span<const double>)> distance_;
    std::optional<GeneratorSet> generators_;
};

// Value of the catalog function; +inf outside the domain.
double value(const SymmetricFunctionId& fid, std::span<const double> u);

// The requested subdifferential of the catalog function at u.  Equal entries
// of u are grouped at tie_tol (tie_tol < 0 selects 1e-8 * (1 + max|u_i|));
// entries with |u_i| below 1e-12 * (1 + max|u_i|) count as zero.  Throws
// DomainViolation outside the domain for Regular/Limiting/Clarke queries;
// Horizon queries outside the domain return the empty set.
//
// The Clarke sets follow cl(conv of limiting + conv of horizon), which for
// every catalog entry collapses to a closed form.  The zero_norm_count and
// sum_top_k formulas are standard results that this catalog treats as
// claims validated by the numerical probes in the test suite:
//   sum_top_k: the classical convex subdifferential of the sum of the k
//     largest entries (ones above the k-th value, a capped simplex slice on
//     the ties, zeros below);
//   zero_norm_count: the counting function is locally constant in its
//     nonzero coordinates and jumps up at zeros, which frees the zero
//     coordinates entirely: every subdifferential kind equals the subspace
//     {d : d_i = 0 for all i with u_i != 0}.
SubdiffSet subdiff(const SymmetricFunctionId& fid, SubdiffKind kind, std::span<const double> u,
                   double tie_tol = -1.0);

// Distance from the origin to the limiting subdifferential at u.
double dist0(const SymmetricFunctionId& fid, std::span<const double> u, double tie_tol = -1.0);

// Projection of d onto the probability simplex {w >= 0, sum w = 1}.
std::vector<double> project_to_simplex(std::span<const double> d);

// Projection of d onto {0 <= w <= 1, sum w = target}.
std::vector<double> project_to_capped_simplex(std::span<const double> d, double target);

}  // namespace ejspec
