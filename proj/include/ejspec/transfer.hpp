#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ejspec/algebra.hpp"
#include "ejspec/symmetric_functions.hpp"

namespace ejspec {

// Spectral functions F = f(lambda(.)) and their generalized subdifferentials.
//
// Membership in any subdifferential of F at x reduces to: x and s operator
// commute, and the diagonal of s in a common frame of (x, s) belongs to the
// matching subdifferential of f at lambda(x).  Checking one canonical frame
// is complete because any two common frames give diagonals that differ by a
// permutation fixing lambda(x), and the subdifferentials of a symmetric f
// are invariant under such permutations.

struct SpectralQueryReport {
    SubdiffKind kind = SubdiffKind::Regular;
    bool commutes = false;
    bool member = false;
    std::optional<JordanFrame> frame_used;
    std::optional<std::vector<double>> diag_vector;
};

// F(x) = f(lambda(x)); +inf outside the domain.
double spectral_value(const SymmetricFunctionId& fid, const Element& x);

// Membership query for s in the chosen subdifferential of F at x.  A
// non-commuting s is reported as member = false with commutes = false.
SpectralQueryReport spectral_subdiff_member(const SymmetricFunctionId& fid, SubdiffKind kind,
                                            const Element& x, const Element& s,
                                            double tol = 1e-6, double tau_group = -1.0);

// Builds the subgradient Diag(d, J) for a frame J of x; validates that d
// belongs to the matching subdifferential of f at lambda(x) first and throws
// NotASubgradient otherwise.  The result operator-commutes with x by
// construction.
Element spectral_subgradient_build(const SymmetricFunctionId& fid, SubdiffKind kind,
                                   const Element& x, std::span<const double> d,
                                   double tol = 1e-6, double tau_group = -1.0);

struct LambdaKReport {
    bool member = false;
    std::string branch;  // which rule decided: clarke | regular | regular_empty | horizon | limiting
};

// Closed-form membership for the subdifferentials of lambda_k, decided via
// the eigenvalue-block idempotent of lambda_k(x):
//   Clarke   : Q_chat s = s, smallest eigenvalue of s >= -tol, tr s = 1
//   Regular  : the Clarke test when k = 1 or lambda_{k-1}(x) > lambda_k(x)
//              at tau_group, otherwise empty
//   Horizon  : ||s|| <= tol
//   Limiting : the Clarke test plus rank(s) <= 1 - k + #{i : lambda_i(x) >=
//              lambda_k(x) - tau_group}, where rank counts eigenvalues above
//              1e-6 * (1 + ||s||)
LambdaKReport lambda_k_subdiff_query(int k, SubdiffKind kind, const Element& x,
                                     const Element& s, double tol = 1e-6,
                                     double tau_group = -1.0);

bool lambda_k_subdiff_member(int k, SubdiffKind kind, const Element& x, const Element& s,
                             double tol = 1e-6, double tau_group = -1.0);

// dist(0, limiting subdifferential of F at x) = dist0 of f at lambda(x).
double spectral_dist0(const SymmetricFunctionId& fid, const Element& x);

}  // namespace ejspec
