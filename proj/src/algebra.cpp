#include "ejspec/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ejspec/grouping.hpp"
#include "ejspec/jacobi.hpp"

namespace ejspec {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kSpinDegenerateAxis = 1e-14;

int tri_index(int i, int j) {
    if (i < j) std::swap(i, j);
    return i * (i + 1) / 2 + j;
}

void require_same_algebra(const Element& x, const Element& y, const char* where) {
    if (!(x.algebra() == y.algebra()))
        throw DescriptorMismatch(std::string(where) + ": elements live in different algebras");
}

std::vector<double> unpack_sym(int n, std::span<const double> packed) {
    std::vector<double> full(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) full[i * n + j] = full[j * n + i] = packed[tri_index(i, j)];
    return full;
}

void pack_sym_lower(int n, std::span<const double> full, std::span<double> packed) {
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) packed[tri_index(i, j)] = full[i * n + j];
}

void jordan_product_factor(const Factor& factor, std::span<const double> x,
                           std::span<const double> y, std::span<double> out) {
    switch (factor.kind) {
        case FactorKind::Diagonal:
            for (int i = 0; i < factor.n; ++i) out[i] = x[i] * y[i];
            break;
        case FactorKind::Sym: {
            const int n = factor.n;
            auto fx = unpack_sym(n, x);
            auto fy = unpack_sym(n, y);
            std::vector<double> full(n * n, 0.0);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j <= i; ++j) {
                    double sum = 0.0;
                    for (int k = 0; k < n; ++k)
                        sum += fx[i * n + k] * fy[k * n + j] + fy[i * n + k] * fx[k * n + j];
                    full[i * n + j] = 0.5 * sum;
                }
            for (int i = 0; i < n; ++i)
                for (int j = 0; j <= i; ++j) out[tri_index(i, j)] = full[i * n + j];
            break;
        }
        case FactorKind::Spin: {
            double dot = 0.0;
            for (int k = 0; k < factor.n; ++k) dot += x[k] * y[k];
            double x0 = x[0];
            double y0 = y[0];
            out[0] = dot;
            for (int k = 1; k < factor.n; ++k) out[k] = x0 * y[k] + y0 * x[k];
            break;
        }
    }
}

double trace_inner_factor(const Factor& factor, std::span<const double> x,
                          std::span<const double> y) {
    switch (factor.kind) {
        case FactorKind::Diagonal: {
            double sum = 0.0;
            for (int i = 0; i < factor.n; ++i) sum += x[i] * y[i];
            return sum;
        }
        case FactorKind::Sym: {
            double sum = 0.0;
            for (int i = 0; i < factor.n; ++i)
                for (int j = 0; j <= i; ++j) {
                    double weight = (i == j) ? 1.0 : 2.0;
                    sum += weight * x[tri_index(i, j)] * y[tri_index(i, j)];
                }
            return sum;
        }
        case FactorKind::Spin: {
            double sum = 0.0;
            for (int k = 0; k < factor.n; ++k) sum += x[k] * y[k];
            return 2.0 * sum;
        }
    }
    return 0.0;
}

double trace_factor(const Factor& factor, std::span<const double> x) {
    switch (factor.kind) {
        case FactorKind::Diagonal: {
            double sum = 0.0;
            for (int i = 0; i < factor.n; ++i) sum += x[i];
            return sum;
        }
        case FactorKind::Sym: {
            double sum = 0.0;
            for (int i = 0; i < factor.n; ++i) sum += x[tri_index(i, i)];
            return sum;
        }
        case FactorKind::Spin:
            return 2.0 * x[0];
    }
    return 0.0;
}

}  // namespace

AlgebraDescriptor::AlgebraDescriptor(std::vector<Factor> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) throw ValidationError("algebra descriptor needs at least one factor");
    offsets_.reserve(factors_.size());
    for (const Factor& factor : factors_) {
        switch (factor.kind) {
            case FactorKind::Diagonal:
            case FactorKind::Sym:
                if (factor.n < 1) throw ValidationError("factor size must be at least 1");
                break;
            case FactorKind::Spin:
                if (factor.n < 2) throw ValidationError("spin factor size must be at least 2");
                break;
        }
        offsets_.push_back(dim_);
        rank_ += factor.rank();
        dim_ += factor.dim();
    }
}

Element::Element(AlgebraDescriptor algebra)
    : algebra_(std::move(algebra)), data_(algebra_.dim(), 0.0) {}

Element Element::identity(const AlgebraDescriptor& algebra) {
    Element e(algebra);
    for (int f = 0; f < algebra.factor_count(); ++f) {
        const Factor& factor = algebra.factors()[f];
        auto part = e.part(f);
        switch (factor.kind) {
            case FactorKind::Diagonal:
                std::fill(part.begin(), part.end(), 1.0);
                break;
            case FactorKind::Sym:
                for (int i = 0; i < factor.n; ++i) part[tri_index(i, i)] = 1.0;
                break;
            case FactorKind::Spin:
                part[0] = 1.0;
                break;
        }
    }
    return e;
}

Element Element::from_diagonal(std::span<const double> entries) {
    Element x(AlgebraDescriptor::diagonal(static_cast<int>(entries.size())));
    std::copy(entries.begin(), entries.end(), x.data_.begin());
    return x;
}

Element Element::from_sym(int n, std::span<const double> matrix) {
    Element x(AlgebraDescriptor::sym(n));
    pack_sym_lower(n, matrix, x.data_);
    return x;
}

Element Element::from_spin(double x0, std::span<const double> xbar) {
    Element x(AlgebraDescriptor::spin(static_cast<int>(xbar.size()) + 1));
    x.data_[0] = x0;
    std::copy(xbar.begin(), xbar.end(), x.data_.begin() + 1);
    return x;
}

Element Element::product(std::span<const Element> parts) {
    std::vector<Factor> factors;
    for (const Element& part : parts)
        for (const Factor& factor : part.algebra().factors()) factors.push_back(factor);
    Element x(AlgebraDescriptor(std::move(factors)));
    std::size_t offset = 0;
    for (const Element& part : parts) {
        std::copy(part.data_.begin(), part.data_.end(), x.data_.begin() + offset);
        offset += part.data_.size();
    }
    return x;
}

std::span<const double> Element::part(int f) const {
    return std::span<const double>(data_).subspan(algebra_.factor_offset(f),
                                                  algebra_.factors()[f].dim());
}

std::span<double> Element::part(int f) {
    return std::span<double>(data_).subspan(algebra_.factor_offset(f),
                                            algebra_.factors()[f].dim());
}

double Element::sym_at(int f, int i, int j) const { return part(f)[tri_index(i, j)]; }

void Element::sym_set(int f, int i, int j, double value) { part(f)[tri_index(i, j)] = value; }

Element& Element::operator+=(const Element& other) {
    require_same_algebra(*this, other, "operator+=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

Element& Element::operator-=(const Element& other) {
    require_same_algebra(*this, other, "operator-=");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

Element& Element::operator*=(double scale) {
    for (double& value : data_) value *= scale;
    return *this;
}

Element operator+(Element lhs, const Element& rhs) { return lhs += rhs; }
Element operator-(Element lhs, const Element& rhs) { return lhs -= rhs; }
Element operator*(double scale, Element x) { return x *= scale; }
Element operator-(Element x) { return x *= -1.0; }

Element jordan_product(const Element& x, const Element& y) {
    require_same_algebra(x, y, "jordan_product");
    Element z(x.algebra());
    for (int f = 0; f < x.algebra().factor_count(); ++f)
        jordan_product_factor(x.algebra().factors()[f], x.part(f), y.part(f), z.part(f));
    return z;
}

double trace_inner(const Element& x, const Element& y) {
    require_same_algebra(x, y, "trace_inner");
    double sum = 0.0;
    for (int f = 0; f < x.algebra().factor_count(); ++f)
        sum += trace_inner_factor(x.algebra().factors()[f], x.part(f), y.part(f));
    return sum;
}

double trace_of(const Element& x) {
    double sum = 0.0;
    for (int f = 0; f < x.algebra().factor_count(); ++f)
        sum += trace_factor(x.algebra().factors()[f], x.part(f));
    return sum;
}

double norm(const Element& x) { return std::sqrt(std::max(0.0, trace_inner(x, x))); }

Element quadratic_apply(const Element& x, const Element& y) {
    require_same_algebra(x, y, "quadratic_apply");
    Element xy = jordan_product(x, y);
    Element xsq = jordan_product(x, x);
    return 2.0 * jordan_product(x, xy) - jordan_product(xsq, y);
}

int basis_size(const AlgebraDescriptor& algebra) { return algebra.dim(); }

std::vector<double> coordinates(const Element& x) {
    const AlgebraDescriptor& algebra = x.algebra();
    std::vector<double> coords(algebra.dim());
    for (int f = 0; f < algebra.factor_count(); ++f) {
        const Factor& factor = algebra.factors()[f];
        auto part = x.part(f);
        double* out = coords.data() + algebra.factor_offset(f);
        switch (factor.kind) {
            case FactorKind::Diagonal:
                std::copy(part.begin(), part.end(), out);
                break;
            case FactorKind::Sym:
                for (int i = 0; i < factor.n; ++i)
                    for (int j = 0; j <= i; ++j)
                        out[tri_index(i, j)] = (i == j ? 1.0 : kSqrt2) * part[tri_index(i, j)];
                break;
            case FactorKind::Spin:
                for (int k = 0; k < factor.n; ++k) out[k] = kSqrt2 * part[k];
                break;
        }
    }
    return coords;
}

Element from_coordinates(const AlgebraDescriptor& algebra, std::span<const double> coords) {
    if (static_cast<int>(coords.size()) != algebra.dim())
        throw ValidationError("from_coordinates: coordinate length mismatch");
    Element x(algebra);
    for (int f = 0; f < algebra.factor_count(); ++f) {
        const Factor& factor = algebra.factors()[f];
        auto part = x.part(f);
        const double* in = coords.data() + algebra.factor_offset(f);
        switch (factor.kind) {
            case FactorKind::Diagonal:
                std::copy(in, in + factor.n, part.begin());
                break;
            case FactorKind::Sym:
                for (int i = 0; i < factor.n; ++i)
                    for (int j = 0; j <= i; ++j)
                        part[tri_index(i, j)] = (i == j ? 1.0 : 1.0 / kSqrt2) * in[tri_index(i, j)];
                break;
            case FactorKind::Spin:
                for (int k = 0; k < factor.n; ++k) part[k] = in[k] / kSqrt2;
                break;
        }
    }
    return x;
}

Element basis_element(const AlgebraDescriptor& algebra, int index) {
    std::vector<double> coords(algebra.dim(), 0.0);
    coords.at(index) = 1.0;
    return from_coordinates(algebra, coords);
}

Element random_element(const AlgebraDescriptor& algebra, SplitMix64& rng) {
    std::vector<double> coords(algebra.dim());
    for (double& value : coords) value = rng.normal();
    return from_coordinates(algebra, coords);
}

JordanFrame::Residuals JordanFrame::residuals() const {
    Residuals res;
    const int r = size();
    Element sum = Element::zero(algebra());
    for (int i = 0; i < r; ++i) {
        const Element& ci = idempotents[i];
        res.idempotency = std::max(res.idempotency, norm(jordan_product(ci, ci) - ci));
        res.unit_trace = std::max(res.unit_trace, std::abs(trace_of(ci) - 1.0));
        for (int j = i + 1; j < r; ++j) {
            const Element& cj = idempotents[j];
            res.orthogonality = std::max(res.orthogonality, norm(jordan_product(ci, cj)));
            res.orthogonality = std::max(res.orthogonality, std::abs(trace_inner(ci, cj)));
        }
        sum += ci;
    }
    res.completeness = norm(sum - Element::identity(algebra()));
    return res;
}

double JordanFrame::Residuals::max() const {
    return std::max(std::max(idempotency, unit_trace), std::max(orthogonality, completeness));
}

std::vector<FactorSpectrum> factor_spectra(const Element& x) {
    const AlgebraDescriptor& algebra = x.algebra();
    std::vector<FactorSpectrum> spectra(algebra.factor_count());
    for (int f = 0; f < algebra.factor_count(); ++f) {
        const Factor& factor = algebra.factors()[f];
        auto part = x.part(f);
        FactorSpectrum& spectrum = spectra[f];
        switch (factor.kind) {
            case FactorKind::Diagonal: {
                spectrum.perm.resize(factor.n);
                std::iota(spectrum.perm.begin(), spectrum.perm.end(), 0);
                std::stable_sort(spectrum.perm.begin(), spectrum.perm.end(),
                                 [&](int i, int j) { return part[i] > part[j]; });
                spectrum.values.resize(factor.n);
                for (int k = 0; k < factor.n; ++k) spectrum.values[k] = part[spectrum.perm[k]];
                break;
            }
            case FactorKind::Sym: {
                auto full = unpack_sym(factor.n, part);
                JacobiResult eig = jacobi_eigensystem(factor.n, full);
                spectrum.values = std::move(eig.values);
                spectrum.eigvecs = std::move(eig.vectors);
                break;
            }
            case FactorKind::Spin: {
                double x0 = part[0];
                double radial = 0.0;
                for (int k = 1; k < factor.n; ++k) radial += part[k] * part[k];
                radial = std::sqrt(radial);
                spectrum.values = {x0 + radial, x0 - radial};
                spectrum.spin_axis.assign(factor.n - 1, 0.0);
                if (radial <= kSpinDegenerateAxis) {
                    spectrum.spin_axis[0] = 1.0;
                } else {
                    for (int k = 1; k < factor.n; ++k) spectrum.spin_axis[k - 1] = part[k] / radial;
                }
                break;
            }
        }
    }
    return spectra;
}

void merge_spectra(const std::vector<FactorSpectrum>& spectra,
                   std::vector<double>& lambda_out,
                   std::vector<std::pair<int, int>>& origin_out) {
    lambda_out.clear();
    origin_out.clear();
    for (int f = 0; f < static_cast<int>(spectra.size()); ++f)
        for (int k = 0; k < static_cast<int>(spectra[f].values.size()); ++k) {
            lambda_out.push_back(spectra[f].values[k]);
            origin_out.push_back({f, k});
        }
    std::vector<int> order(lambda_out.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return lambda_out[i] > lambda_out[j]; });
    std::vector<double> lambda_sorted(lambda_out.size());
    std::vector<std::pair<int, int>> origin_sorted(origin_out.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        lambda_sorted[i] = lambda_out[order[i]];
        origin_sorted[i] = origin_out[order[i]];
    }
    lambda_out = std::move(lambda_sorted);
    origin_out = std::move(origin_sorted);
}

Element idempotent_from_spectrum(const AlgebraDescriptor& algebra, int factor,
                                 const FactorSpectrum& spectrum, int local) {
    Element c = Element::zero(algebra);
    const Factor& info = algebra.factors()[factor];
    auto part = c.part(factor);
    switch (info.kind) {
        case FactorKind::Diagonal:
            part[spectrum.perm[local]] = 1.0;
            break;
        case FactorKind::Sym: {
            const int n = info.n;
            const double* q = spectrum.eigvecs.data() + local * n;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j <= i; ++j) part[tri_index(i, j)] = q[i] * q[j];
            break;
        }
        case FactorKind::Spin: {
            double sign = (local == 0) ? 1.0 : -1.0;
            part[0] = 0.5;
            for (int k = 1; k < info.n; ++k) part[k] = 0.5 * sign * spectrum.spin_axis[k - 1];
            break;
        }
    }
    return c;
}

SpectralDecomposition spectral_decompose(const Element& x, double tol) {
    SpectralDecomposition dec;
    auto spectra = factor_spectra(x);
    merge_spectra(spectra, dec.lambda, dec.origin);
    dec.frame.idempotents.reserve(dec.lambda.size());
    for (const auto& [factor, local] : dec.origin)
        dec.frame.idempotents.push_back(
            idempotent_from_spectrum(x.algebra(), factor, spectra[factor], local));

    Element recon = Element::zero(x.algebra());
    for (std::size_t i = 0; i < dec.lambda.size(); ++i)
        recon += dec.lambda[i] * dec.frame.idempotents[i];
    if (norm(recon - x) > tol * (1.0 + norm(x)))
        throw EigenSolverFailure("spectral_decompose: reconstruction residual exceeds tolerance");
    return dec;
}

double default_tau_group(const Element& x) { return 1e-8 * (1.0 + norm(x)); }

bool operator_commute(const Element& x, const Element& y, double tol) {
    require_same_algebra(x, y, "operator_commute");
    const double bound = tol * (1.0 + norm(x) * norm(y));
    for (int k = 0; k < basis_size(x.algebra()); ++k) {
        Element b = basis_element(x.algebra(), k);
        Element residual =
            jordan_product(x, jordan_product(y, b)) - jordan_product(y, jordan_product(x, b));
        if (norm(residual) > bound) return false;
    }
    return true;
}

namespace {

struct FrameCandidate {
    double svalue = 0.0;
    Element idempotent;
};

// Simultaneously diagonalizes s inside one block of equal x-eigenvalues,
// factor by factor.  `locals` lists the factor-local eigen positions of x
// that fall in the block.
void block_candidates(const Element& s, int f, const FactorSpectrum& spectrum,
                      const std::vector<int>& locals, std::vector<FrameCandidate>& out) {
    const AlgebraDescriptor& algebra = s.algebra();
    const Factor& factor = algebra.factors()[f];
    auto spart = s.part(f);
    switch (factor.kind) {
        case FactorKind::Diagonal:
            for (int local : locals) {
                int original = spectrum.perm[local];
                FrameCandidate cand;
                cand.svalue = spart[original];
                cand.idempotent = idempotent_from_spectrum(algebra, f, spectrum, local);
                out.push_back(std::move(cand));
            }
            break;
        case FactorKind::Sym: {
            const int n = factor.n;
            const int m = static_cast<int>(locals.size());
            auto sfull = unpack_sym(n, spart);
            // projected = U_B^T S U_B over the block eigenbasis of x
            std::vector<double> projected(m * m);
            for (int a = 0; a < m; ++a) {
                const double* qa = spectrum.eigvecs.data() + locals[a] * n;
                for (int b = 0; b <= a; ++b) {
                    const double* qb = spectrum.eigvecs.data() + locals[b] * n;
                    double sum = 0.0;
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) sum += qa[i] * sfull[i * n + j] * qb[j];
                    projected[a * m + b] = projected[b * m + a] = sum;
                }
            }
            JacobiResult eig = jacobi_eigensystem(m, projected);
            for (int k = 0; k < m; ++k) {
                std::vector<double> q(n, 0.0);
                for (int a = 0; a < m; ++a) {
                    const double* qa = spectrum.eigvecs.data() + locals[a] * n;
                    double w = eig.vectors[k * m + a];
                    for (int i = 0; i < n; ++i) q[i] += w * qa[i];
                }
                FrameCandidate cand;
                cand.svalue = eig.values[k];
                cand.idempotent = Element::zero(algebra);
                auto part = cand.idempotent.part(f);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j <= i; ++j) part[tri_index(i, j)] = q[i] * q[j];
                out.push_back(std::move(cand));
            }
            break;
        }
        case FactorKind::Spin: {
            if (locals.size() == 2) {
                // x looks like a multiple of the factor identity here, so the
                // frame is free: take s's own spin frame.
                Element sf = Element::zero(algebra);
                std::copy(spart.begin(), spart.end(), sf.part(f).begin());
                // Build a single-factor view to reuse the closed form.
                auto sub_spectra = factor_spectra(sf);
                for (int k = 0; k < 2; ++k) {
                    FrameCandidate cand;
                    cand.svalue = sub_spectra[f].values[k];
                    cand.idempotent = idempotent_from_spectrum(algebra, f, sub_spectra[f], k);
                    out.push_back(std::move(cand));
                }
            } else {
                for (int local : locals) {
                    double sign = (local == 0) ? 1.0 : -1.0;
                    double dot = 0.0;
                    for (int k = 1; k < factor.n; ++k)
                        dot += spart[k] * spectrum.spin_axis[k - 1];
                    FrameCandidate cand;
                    cand.svalue = spart[0] + sign * dot;
                    cand.idempotent = idempotent_from_spectrum(algebra, f, spectrum, local);
                    out.push_back(std::move(cand));
                }
            }
            break;
        }
    }
}

}  // namespace

JordanFrame common_frame(const Element& x, const Element& s, double tol, double tau_group) {
    require_same_algebra(x, s, "common_frame");
    if (!operator_commute(x, s, tol))
        throw NonCommuting("common_frame: elements do not operator commute");
    const double tau = tau_group < 0.0 ? default_tau_group(x) : tau_group;

    auto spectra = factor_spectra(x);
    std::vector<double> lambda;
    std::vector<std::pair<int, int>> origin;
    merge_spectra(spectra, lambda, origin);
    auto bounds = chain_blocks(lambda, tau);

    JordanFrame frame;
    frame.idempotents.reserve(lambda.size());
    const int factor_count = x.algebra().factor_count();
    for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
        std::vector<FrameCandidate> candidates;
        for (int f = 0; f < factor_count; ++f) {
            std::vector<int> locals;
            for (int i = bounds[b]; i < bounds[b + 1]; ++i)
                if (origin[i].first == f) locals.push_back(origin[i].second);
            if (locals.empty()) continue;
            std::sort(locals.begin(), locals.end());
            block_candidates(s, f, spectra[f], locals, candidates);
        }
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const FrameCandidate& a, const FrameCandidate& b) {
                             return a.svalue > b.svalue;
                         });
        for (FrameCandidate& cand : candidates)
            frame.idempotents.push_back(std::move(cand.idempotent));
    }

    Element recon = diag_build(diag_in_frame(s, frame), frame);
    if (norm(recon - s) > 10.0 * tol * (1.0 + norm(s)))
        throw NonCommuting("common_frame: simultaneous diagonalization failed numerically");
    return frame;
}

std::vector<double> diag_in_frame(const Element& z, const JordanFrame& frame) {
    require_same_algebra(z, frame.idempotents.at(0), "diag_in_frame");
    std::vector<double> diag(frame.size());
    for (int i = 0; i < frame.size(); ++i) diag[i] = trace_inner(frame.idempotents[i], z);
    return diag;
}

Element diag_build(std::span<const double> u, const JordanFrame& frame) {
    if (static_cast<int>(u.size()) != frame.size())
        throw ValidationError("diag_build: vector length does not match frame size");
    Element x = Element::zero(frame.algebra());
    for (int i = 0; i < frame.size(); ++i) x += u[i] * frame.idempotents[i];
    return x;
}

std::tuple<Element, Element, Element> peirce_project(const Element& c, const Element& z,
                                                     double tol) {
    require_same_algebra(c, z, "peirce_project");
    double cnorm = norm(c);
    if (norm(jordan_product(c, c) - c) > tol * (1.0 + cnorm * cnorm))
        throw NotIdempotent("peirce_project: c is not idempotent");
    Element complement = Element::identity(c.algebra()) - c;
    Element z1 = quadratic_apply(c, z);
    Element z0 = quadratic_apply(complement, z);
    Element zhalf = z - z1 - z0;
    return {z1, zhalf, z0};
}

JordanFrame frame_extend(const Element& x, const Element& c, double sigma, double tol) {
    require_same_algebra(x, c, "frame_extend");
    double cnorm = norm(c);
    if (norm(jordan_product(c, c) - c) > tol * (1.0 + cnorm * cnorm) ||
        std::abs(trace_of(c) - 1.0) > tol)
        throw NotEigenIdempotent("frame_extend: c is not a primitive idempotent");
    if (norm(jordan_product(x, c) - sigma * c) > tol * (1.0 + norm(x)))
        throw NotEigenIdempotent("frame_extend: x o c != sigma c");

    const AlgebraDescriptor& algebra = x.algebra();
    int support = -1;
    for (int f = 0; f < algebra.factor_count(); ++f) {
        double part_norm =
            std::sqrt(std::max(0.0, trace_inner_factor(algebra.factors()[f], c.part(f), c.part(f))));
        if (part_norm > 0.5) {
            if (support >= 0)
                throw NotEigenIdempotent("frame_extend: idempotent spans several factors");
            support = f;
        }
    }
    if (support < 0) throw NotEigenIdempotent("frame_extend: no supporting factor found");

    struct Entry {
        double value;
        Element idempotent;
    };
    std::vector<Entry> entries;
    entries.push_back({sigma, c});

    auto spectra = factor_spectra(x);
    for (int f = 0; f < algebra.factor_count(); ++f) {
        if (f == support) continue;
        for (int k = 0; k < static_cast<int>(spectra[f].values.size()); ++k)
            entries.push_back({spectra[f].values[k],
                               idempotent_from_spectrum(algebra, f, spectra[f], k)});
    }

    const Factor& factor = algebra.factors()[support];
    auto cpart = c.part(support);
    auto xpart = x.part(support);
    switch (factor.kind) {
        case FactorKind::Diagonal: {
            int pivot = 0;
            for (int i = 1; i < factor.n; ++i)
                if (cpart[i] > cpart[pivot]) pivot = i;
            for (int i = 0; i < factor.n; ++i) {
                if (i == pivot) continue;
                Element ci = Element::zero(algebra);
                ci.part(support)[i] = 1.0;
                entries.push_back({xpart[i], ci});
            }
            break;
        }
        case FactorKind::Sym: {
            const int n = factor.n;
            if (n == 1) break;
            auto cfull = unpack_sym(n, cpart);
            JacobiResult ceig = jacobi_eigensystem(n, cfull);
            std::vector<double> q(ceig.vectors.begin(), ceig.vectors.begin() + n);

            // Householder reflector sending a coordinate axis to q; the
            // remaining columns form an orthonormal basis of q-perp.
            std::vector<double> v = q;
            v[0] += (q[0] >= 0.0 ? 1.0 : -1.0);
            double vnorm2 = 0.0;
            for (double value : v) vnorm2 += value * value;
            auto basis_col = [&](int col, int i) {
                double h = (i == col + 1 ? 1.0 : 0.0);
                return h - 2.0 * v[i] * v[col + 1] / vnorm2;
            };

            auto xfull = unpack_sym(n, xpart);
            std::vector<double> reduced((n - 1) * (n - 1));
            for (int a = 0; a < n - 1; ++a)
                for (int b = 0; b <= a; ++b) {
                    double sum = 0.0;
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j)
                            sum += basis_col(a, i) * xfull[i * n + j] * basis_col(b, j);
                    reduced[a * (n - 1) + b] = reduced[b * (n - 1) + a] = sum;
                }
            JacobiResult xeig = jacobi_eigensystem(n - 1, reduced);
            for (int k = 0; k < n - 1; ++k) {
                std::vector<double> column(n, 0.0);
                for (int a = 0; a < n - 1; ++a) {
                    double w = xeig.vectors[k * (n - 1) + a];
                    for (int i = 0; i < n; ++i) column[i] += w * basis_col(a, i);
                }
                Element ck = Element::zero(algebra);
                auto part = ck.part(support);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j <= i; ++j) part[tri_index(i, j)] = column[i] * column[j];
                entries.push_back({xeig.values[k], ck});
            }
            break;
        }
        case FactorKind::Spin: {
            Element complement = Element::zero(algebra);
            auto part = complement.part(support);
            part[0] = 0.5;
            for (int k = 1; k < factor.n; ++k) part[k] = -cpart[k];
            entries.push_back({2.0 * xpart[0] - sigma, complement});
            break;
        }
    }

    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.value > b.value; });
    JordanFrame frame;
    frame.idempotents.reserve(entries.size());
    for (Entry& entry : entries) frame.idempotents.push_back(std::move(entry.idempotent));
    return frame;
}

}  // namespace ejspec
