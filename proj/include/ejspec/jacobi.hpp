#pragma once

#include <span>
#include <vector>

namespace ejspec {

// Eigendecomposition of a small dense symmetric matrix.
struct JacobiResult {
    std::vector<double> values;   // nonincreasing
    std::vector<double> vectors;  // column-major; column k pairs with values[k]
    int sweeps = 0;
};

// Cyclic Jacobi rotations with a fixed sweep order (row by row), so the
// result is bitwise reproducible.  Converges when the off-diagonal Frobenius
// mass drops below 1e-12 times the Frobenius norm of the input; throws
// EigenSolverFailure after 100 sweeps.  `matrix` is row-major n*n and is
// read from the lower triangle.
JacobiResult jacobi_eigensystem(int n, std::span<const double> matrix);

}  // namespace ejspec
