#pragma once

#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ejspec/errors.hpp"
#include "ejspec/rng.hpp"

namespace ejspec {

// A product Euclidean Jordan algebra built from three factor kinds:
//
//   Diagonal(n) : R^n with the componentwise product, rank n
//   Sym(n)      : n x n real symmetric matrices, X o Y = (XY + YX)/2, rank n
//   Spin(n)     : pairs (x0, xbar) in R x R^{n-1} with
//                 x o y = (x0 y0 + <xbar, ybar>, x0 ybar + y0 xbar), rank 2
//
// The inner product is the trace form <x, y> = tr(x o y); for Spin the trace
// convention is tr((x0, xbar)) = 2 x0 so primitive idempotents have unit norm.

enum class FactorKind { Diagonal, Sym, Spin };

struct Factor {
    FactorKind kind = FactorKind::Diagonal;
    int n = 0;

    int rank() const { return kind == FactorKind::Spin ? 2 : n; }
    // Stored coordinates: Sym parts are packed lower triangles.
    int dim() const { return kind == FactorKind::Sym ? n * (n + 1) / 2 : n; }

    friend bool operator==(const Factor&, const Factor&) = default;
};

class AlgebraDescriptor {
public:
    AlgebraDescriptor() = default;
    explicit AlgebraDescriptor(std::vector<Factor> factors);

    static AlgebraDescriptor diagonal(int n) { return AlgebraDescriptor({{FactorKind::Diagonal, n}}); }
    static AlgebraDescriptor sym(int n) { return AlgebraDescriptor({{FactorKind::Sym, n}}); }
    static AlgebraDescriptor spin(int n) { return AlgebraDescriptor({{FactorKind::Spin, n}}); }

    const std::vector<Factor>& factors() const { return factors_; }
    int factor_count() const { return static_cast<int>(factors_.size()); }
    int rank() const { return rank_; }
    int dim() const { return dim_; }
    int factor_offset(int f) const { return offsets_[f]; }

    friend bool operator==(const AlgebraDescriptor& a, const AlgebraDescriptor& b) {
        return a.factors_ == b.factors_;
    }

private:
    std::vector<Factor> factors_;
    std::vector<int> offsets_;
    int rank_ = 0;
    int dim_ = 0;
};

// An immutable-by-convention element of a product algebra.  Sym parts hold
// only the packed lower triangle, so stored matrices are symmetric exactly.
class Element {
public:
    Element() = default;
    explicit Element(AlgebraDescriptor algebra);

    static Element zero(const AlgebraDescriptor& algebra) { return Element(algebra); }
    static Element identity(const AlgebraDescriptor& algebra);

    // Single-factor constructors; row-major `matrix` is read from the lower
    // triangle only.
    static Element from_diagonal(std::span<const double> entries);
    static Element from_sym(int n, std::span<const double> matrix);
    static Element from_spin(double x0, std::span<const double> xbar);

    // Concatenates single-factor elements into a product element.
    static Element product(std::span<const Element> parts);

    const AlgebraDescriptor& algebra() const { return algebra_; }

    std::span<const double> part(int f) const;
    std::span<double> part(int f);
    std::span<const double> data() const { return data_; }
    std::span<double> data() { return data_; }

    double sym_at(int f, int i, int j) const;
    void sym_set(int f, int i, int j, double value);

    Element& operator+=(const Element& other);
    Element& operator-=(const Element& other);
    Element& operator*=(double scale);

private:
    AlgebraDescriptor algebra_;
    std::vector<double> data_;
};

Element operator+(Element lhs, const Element& rhs);
Element operator-(Element lhs, const Element& rhs);
Element operator*(double scale, Element x);
Element operator-(Element x);

// The bilinear Jordan product x o y, computed per factor.
Element jordan_product(const Element& x, const Element& y);

// Trace inner product <x, y> = tr(x o y).
double trace_inner(const Element& x, const Element& y);

double trace_of(const Element& x);
double norm(const Element& x);

// Quadratic map Q_x(y) = 2 x o (x o y) - (x o x) o y.
Element quadratic_apply(const Element& x, const Element& y);

// Orthonormal basis of the algebra under the trace inner product.
int basis_size(const AlgebraDescriptor& algebra);
Element basis_element(const AlgebraDescriptor& algebra, int index);

// Coordinates with respect to that basis; Euclidean geometry on coordinates
// matches the trace-inner-product geometry on elements.
std::vector<double> coordinates(const Element& x);
Element from_coordinates(const AlgebraDescriptor& algebra, std::span<const double> coords);

// Isotropic Gaussian element (standard normal coordinates).
Element random_element(const AlgebraDescriptor& algebra, SplitMix64& rng);

// Ordered system [c_1, ..., c_r] of primitive idempotents summing to e.
struct JordanFrame {
    std::vector<Element> idempotents;

    int size() const { return static_cast<int>(idempotents.size()); }
    const AlgebraDescriptor& algebra() const { return idempotents.at(0).algebra(); }

    struct Residuals {
        double idempotency = 0.0;    // max ||c o c - c||
        double unit_trace = 0.0;     // max |tr(c) - 1|
        double orthogonality = 0.0;  // max ||c_i o c_j||, max |<c_i, c_j>|, i != j
        double completeness = 0.0;   // ||sum c_i - e||
        double max() const;
    };
    Residuals residuals() const;
    bool valid(double tol = 1e-8) const { return residuals().max() <= tol; }
};

// Nonincreasing eigenvalues plus a frame that diagonalizes x with that
// ordering.  `origin[i]` records which (factor, local eigen index) the i-th
// sorted eigenvalue came from.
struct SpectralDecomposition {
    std::vector<double> lambda;
    JordanFrame frame;
    std::vector<std::pair<int, int>> origin;
};

// Per-factor eigendata in a form that keeps eigenvector information, used by
// the frame machinery and by the blockwise eigenvalue calculus.
struct FactorSpectrum {
    std::vector<double> values;    // nonincreasing within the factor
    std::vector<int> perm;         // Diagonal: sorted position -> original index
    std::vector<double> eigvecs;   // Sym: column-major n*n, column k <-> values[k]
    std::vector<double> spin_axis; // Spin: unit xbar direction (c_+ = (1, +axis)/2)
};

std::vector<FactorSpectrum> factor_spectra(const Element& x);

// Merged nonincreasing eigenvalues of a product element with their origins;
// ties are broken by factor order, then local index.
void merge_spectra(const std::vector<FactorSpectrum>& spectra,
                   std::vector<double>& lambda_out,
                   std::vector<std::pair<int, int>>& origin_out);

// Builds the primitive idempotent for one factor-local eigen position.
Element idempotent_from_spectrum(const AlgebraDescriptor& algebra, int factor,
                                 const FactorSpectrum& spectrum, int local);

SpectralDecomposition spectral_decompose(const Element& x, double tol = 1e-8);

// Default eigenvalue grouping tolerance, 1e-8 * (1 + ||x||).
double default_tau_group(const Element& x);

// True iff the multiplication operators L_x and L_y commute on a fixed
// orthonormal basis, to tolerance tol * (1 + ||x|| * ||y||).
bool operator_commute(const Element& x, const Element& y, double tol = 1e-8);

// A common Jordan frame J with diag(x, J) = lambda(x); within each block of
// equal x-eigenvalues the frame is ordered so the s-diagonal is
// nonincreasing, remaining ties by factor order then local index.  Throws
// NonCommuting when no common frame exists.  tau_group < 0 selects the
// default grouping tolerance.
JordanFrame common_frame(const Element& x, const Element& s, double tol = 1e-8,
                         double tau_group = -1.0);

// diag(z, J) = (<c_1, z>, ..., <c_r, z>).
std::vector<double> diag_in_frame(const Element& z, const JordanFrame& frame);

// Diag(u, J) = sum_i u_i c_i.
Element diag_build(std::span<const double> u, const JordanFrame& frame);

// Peirce split (Q_c z, z - Q_c z - Q_{e-c} z, Q_{e-c} z) for an idempotent c.
std::tuple<Element, Element, Element> peirce_project(const Element& c, const Element& z,
                                                     double tol = 1e-8);

// Given a primitive idempotent c with x o c = sigma c, returns a frame of x
// (nonincreasing eigenvalue order) that contains c; c is placed first within
// its tie block.
JordanFrame frame_extend(const Element& x, const Element& c, double sigma,
                         double tol = 1e-8);

}  // namespace ejspec
