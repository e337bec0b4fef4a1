#include "ejspec/spectral_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ejspec/grouping.hpp"
#include "ejspec/jacobi.hpp"

namespace ejspec {

int EigenBlockStructure::block_of(int p) const {
    for (int j = 0; j + 1 < static_cast<int>(boundaries.size()); ++j)
        if (p >= boundaries[j] && p < boundaries[j + 1]) return j;
    throw ValidationError("block_of: index out of range");
}

EigenBlockStructure block_structure(const SpectralDecomposition& dec, double tau_group) {
    EigenBlockStructure out;
    out.boundaries = chain_blocks(dec.lambda, tau_group);
    const int blocks = static_cast<int>(out.boundaries.size()) - 1;
    out.multiplicities.resize(blocks);
    out.relative_index.resize(dec.lambda.size());
    out.block_idempotents.reserve(blocks);
    for (int j = 0; j < blocks; ++j) {
        const int begin = out.boundaries[j];
        const int end = out.boundaries[j + 1];
        out.multiplicities[j] = end - begin;
        Element sum = Element::zero(dec.frame.algebra());
        for (int p = begin; p < end; ++p) {
            out.relative_index[p] = p - begin + 1;
            sum += dec.frame.idempotents[p];
        }
        out.block_idempotents.push_back(std::move(sum));
    }
    return out;
}

namespace {

// Eigenvalues of the projection of z onto one block of x's spectrum, factor
// by factor; `locals` holds the factor-local eigen positions in the block.
void block_projection_eigenvalues(const Element& z, int f, const FactorSpectrum& spectrum,
                                  const std::vector<int>& locals, std::vector<double>& out) {
    const Factor& factor = z.algebra().factors()[f];
    auto zpart = z.part(f);
    switch (factor.kind) {
        case FactorKind::Diagonal:
            for (int local : locals) out.push_back(zpart[spectrum.perm[local]]);
            break;
        case FactorKind::Sym: {
            const int n = factor.n;
            const int m = static_cast<int>(locals.size());
            std::vector<double> zfull(n * n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j <= i; ++j) {
                    double value = zpart[i * (i + 1) / 2 + j];
                    zfull[i * n + j] = zfull[j * n + i] = value;
                }
            std::vector<double> projected(m * m);
            for (int a = 0; a < m; ++a) {
                const double* qa = spectrum.eigvecs.data() + locals[a] * n;
                for (int b = 0; b <= a; ++b) {
                    const double* qb = spectrum.eigvecs.data() + locals[b] * n;
                    double sum = 0.0;
                    for (int i = 0; i < n; ++i)
                        for (int j = 0; j < n; ++j) sum += qa[i] * zfull[i * n + j] * qb[j];
                    projected[a * m + b] = projected[b * m + a] = sum;
                }
            }
            JacobiResult eig = jacobi_eigensystem(m, projected);
            out.insert(out.end(), eig.values.begin(), eig.values.end());
            break;
        }
        case FactorKind::Spin: {
            if (locals.size() == 2) {
                double radial = 0.0;
                for (int k = 1; k < factor.n; ++k) radial += zpart[k] * zpart[k];
                radial = std::sqrt(radial);
                out.push_back(zpart[0] + radial);
                out.push_back(zpart[0] - radial);
            } else {
                for (int local : locals) {
                    double sign = (local == 0) ? 1.0 : -1.0;
                    double dot = 0.0;
                    for (int k = 1; k < factor.n; ++k)
                        dot += zpart[k] * spectrum.spin_axis[k - 1];
                    out.push_back(zpart[0] + sign * dot);
                }
            }
            break;
        }
    }
}

}  // namespace

std::vector<double> eigen_dir_derivative(const Element& x, const Element& z, double tau_group) {
    if (!(x.algebra() == z.algebra()))
        throw DescriptorMismatch("eigen_dir_derivative: elements live in different algebras");
    const double tau = tau_group < 0.0 ? default_tau_group(x) : tau_group;

    auto spectra = factor_spectra(x);
    std::vector<double> lambda;
    std::vector<std::pair<int, int>> origin;
    merge_spectra(spectra, lambda, origin);
    auto bounds = chain_blocks(lambda, tau);

    std::vector<double> derivative;
    derivative.reserve(lambda.size());
    for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
        std::vector<double> block_values;
        for (int f = 0; f < x.algebra().factor_count(); ++f) {
            std::vector<int> locals;
            for (int i = bounds[b]; i < bounds[b + 1]; ++i)
                if (origin[i].first == f) locals.push_back(origin[i].second);
            if (locals.empty()) continue;
            std::sort(locals.begin(), locals.end());
            block_projection_eigenvalues(z, f, spectra[f], locals, block_values);
        }
        std::sort(block_values.begin(), block_values.end(), std::greater<>());
        derivative.insert(derivative.end(), block_values.begin(), block_values.end());
    }
    return derivative;
}

bool majorizes(std::span<const double> u, std::span<const double> v, double tol) {
    if (u.size() != v.size()) throw ValidationError("majorizes: length mismatch");
    std::vector<double> su(u.begin(), u.end());
    std::vector<double> sv(v.begin(), v.end());
    std::sort(su.begin(), su.end(), std::greater<>());
    std::sort(sv.begin(), sv.end(), std::greater<>());
    double l1 = 0.0;
    for (double value : sv) l1 += std::abs(value);
    const double slack = tol * (1.0 + l1);

    double prefix_u = 0.0;
    double prefix_v = 0.0;
    for (std::size_t k = 0; k < su.size(); ++k) {
        prefix_u += su[k];
        prefix_v += sv[k];
        if (k + 1 < su.size()) {
            if (prefix_u > prefix_v + slack) return false;
        } else {
            if (std::abs(prefix_u - prefix_v) > slack) return false;
        }
    }
    return true;
}

bool stabilizer_hull_member(std::span<const double> u, std::span<const double> v,
                            std::span<const double> lam, double tau_group, double tol) {
    if (u.size() != v.size() || u.size() != lam.size())
        throw ValidationError("stabilizer_hull_member: length mismatch");
    const int r = static_cast<int>(u.size());
    std::vector<int> order(r);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return lam[i] > lam[j]; });
    std::vector<double> lam_sorted(r);
    for (int i = 0; i < r; ++i) lam_sorted[i] = lam[order[i]];
    auto bounds = chain_blocks(lam_sorted, tau_group);

    for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
        std::vector<double> ub, vb;
        for (int i = bounds[b]; i < bounds[b + 1]; ++i) {
            ub.push_back(u[order[i]]);
            vb.push_back(v[order[i]]);
        }
        if (!majorizes(ub, vb, tol)) return false;
    }
    return true;
}

}  // namespace ejspec
