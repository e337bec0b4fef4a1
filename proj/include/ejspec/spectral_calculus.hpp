#pragma once

#include <span>
#include <vector>

#include "ejspec/algebra.hpp"

namespace ejspec {

// Block structure of the nonincreasing eigenvalue vector: boundaries of the
// distinct-eigenvalue runs, multiplicities, the relative index l_p of every
// sorted position inside its run, and the block idempotents e_p (sums of the
// frame idempotents with equal eigenvalue; frame-independent).
struct EigenBlockStructure {
    std::vector<int> boundaries;             // r_0 = 0 < r_1 < ... < r_l = r
    std::vector<int> multiplicities;         // n_j = r_j - r_{j-1}
    std::vector<int> relative_index;         // l_p, 1-based, for p = 0..r-1
    std::vector<Element> block_idempotents;  // one per block

    int block_count() const { return static_cast<int>(multiplicities.size()); }
    int block_of(int p) const;
    const Element& idempotent_for(int p) const { return block_idempotents[block_of(p)]; }
};

EigenBlockStructure block_structure(const SpectralDecomposition& dec, double tau_group);

// Directional derivative of the sorted eigenvalue map at x along z.  Computed
// blockwise: for each run of equal eigenvalues of x with block idempotent e,
// the entries are the eigenvalues of the projection Q_e(z) inside the
// subalgebra V(e, 1), sorted nonincreasing.  tau_group < 0 selects the
// default grouping tolerance.
std::vector<double> eigen_dir_derivative(const Element& x, const Element& z,
                                         double tau_group = -1.0);

// True iff u is majorized by v: all sorted prefix sums dominate within
// tol * (1 + ||v||_1) and the totals agree within the same slack.
bool majorizes(std::span<const double> u, std::span<const double> v, double tol = 1e-9);

// True iff u lies in conv{P v : P permutation with P lam = lam}.  The
// stabilizer of lam is block-diagonal over groups of equal entries, so the
// hull factors per block and membership reduces to per-block majorization.
bool stabilizer_hull_member(std::span<const double> u, std::span<const double> v,
                            std::span<const double> lam, double tau_group,
                            double tol = 1e-9);

}  // namespace ejspec
