#include "ejspec/transfer.hpp"

#include <algorithm>
#include <cmath>

#include "ejspec/grouping.hpp"

namespace ejspec {

double spectral_value(const SymmetricFunctionId& fid, const Element& x) {
    return value(fid, spectral_decompose(x).lambda);
}

SpectralQueryReport spectral_subdiff_member(const SymmetricFunctionId& fid, SubdiffKind kind,
                                            const Element& x, const Element& s, double tol,
                                            double tau_group) {
    if (!(x.algebra() == s.algebra()))
        throw DescriptorMismatch("spectral_subdiff_member: elements live in different algebras");
    SpectralQueryReport report;
    report.kind = kind;

    auto dec = spectral_decompose(x);
    const double tau = tau_group < 0.0 ? default_tau_group(x) : tau_group;
    SubdiffSet set = subdiff(fid, kind, dec.lambda, tau);  // may throw DomainViolation

    if (!operator_commute(x, s, tol)) return report;
    JordanFrame frame;
    try {
        frame = common_frame(x, s, tol, tau);
    } catch (const NonCommuting&) {
        return report;
    }
    report.commutes = true;
    report.diag_vector = diag_in_frame(s, frame);
    report.member = set.member(*report.diag_vector, tol);
    report.frame_used = std::move(frame);
    return report;
}

Element spectral_subgradient_build(const SymmetricFunctionId& fid, SubdiffKind kind,
                                   const Element& x, std::span<const double> d, double tol,
                                   double tau_group) {
    auto dec = spectral_decompose(x);
    if (static_cast<int>(d.size()) != dec.frame.size())
        throw ValidationError("spectral_subgradient_build: vector length mismatch");
    const double tau = tau_group < 0.0 ? default_tau_group(x) : tau_group;
    SubdiffSet set = subdiff(fid, kind, dec.lambda, tau);
    if (!set.member(d, tol))
        throw NotASubgradient("spectral_subgradient_build: d is not in the " + to_string(kind) +
                              " subdifferential of " + fid.to_string());
    return diag_build(d, dec.frame);
}

namespace {

struct LambdaKContext {
    std::vector<double> lambda;
    int block_begin = 0;  // first sorted position of lambda_k's tie block
    int block_end = 0;    // one past the last position
    Element block_idempotent;
};

LambdaKContext lambda_k_context(int k, const Element& x, double tau) {
    auto dec = spectral_decompose(x);
    auto bounds = chain_blocks(dec.lambda, tau);
    LambdaKContext ctx;
    ctx.block_idempotent = Element::zero(x.algebra());
    for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
        if (k - 1 >= bounds[j] && k - 1 < bounds[j + 1]) {
            ctx.block_begin = bounds[j];
            ctx.block_end = bounds[j + 1];
            for (int p = bounds[j]; p < bounds[j + 1]; ++p)
                ctx.block_idempotent += dec.frame.idempotents[p];
            break;
        }
    }
    ctx.lambda = std::move(dec.lambda);
    return ctx;
}

bool clarke_test(const LambdaKContext& ctx, const Element& s, double tol) {
    if (norm(quadratic_apply(ctx.block_idempotent, s) - s) > tol * (1.0 + norm(s))) return false;
    if (std::abs(trace_of(s) - 1.0) > tol) return false;
    auto sdec = spectral_decompose(s);
    return sdec.lambda.back() >= -tol;
}

int eigen_rank(const Element& s) {
    auto sdec = spectral_decompose(s);
    const double tol_rank = 1e-6 * (1.0 + norm(s));
    int rank = 0;
    for (double value : sdec.lambda)
        if (value > tol_rank) ++rank;
    return rank;
}

}  // namespace

LambdaKReport lambda_k_subdiff_query(int k, SubdiffKind kind, const Element& x, const Element& s,
                                     double tol, double tau_group) {
    if (!(x.algebra() == s.algebra()))
        throw DescriptorMismatch("lambda_k_subdiff_query: elements live in different algebras");
    if (k < 1 || k > x.algebra().rank())
        throw ValidationError("lambda_k_subdiff_query: k out of range");
    const double tau = tau_group < 0.0 ? default_tau_group(x) : tau_group;

    LambdaKReport report;
    if (kind == SubdiffKind::Horizon) {
        report.branch = "horizon";
        report.member = norm(s) <= tol;
        return report;
    }

    LambdaKContext ctx = lambda_k_context(k, x, tau);
    switch (kind) {
        case SubdiffKind::Clarke:
            report.branch = "clarke";
            report.member = clarke_test(ctx, s, tol);
            break;
        case SubdiffKind::Regular:
            if (k - 1 != ctx.block_begin) {
                report.branch = "regular_empty";
                report.member = false;
            } else {
                report.branch = "regular";
                report.member = clarke_test(ctx, s, tol);
            }
            break;
        case SubdiffKind::Limiting: {
            report.branch = "limiting";
            int alpha = 1 - k + ctx.block_end;
            report.member = clarke_test(ctx, s, tol) && eigen_rank(s) <= alpha;
            break;
        }
        case SubdiffKind::Horizon:
            break;
    }
    return report;
}

bool lambda_k_subdiff_member(int k, SubdiffKind kind, const Element& x, const Element& s,
                             double tol, double tau_group) {
    return lambda_k_subdiff_query(k, kind, x, s, tol, tau_group).member;
}

double spectral_dist0(const SymmetricFunctionId& fid, const Element& x) {
    return dist0(fid, spectral_decompose(x).lambda);
}

}  // namespace ejspec
