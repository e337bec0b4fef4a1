#include "ejspec/symmetric_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ejspec/grouping.hpp"

namespace ejspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_abs(std::span<const double> u) {
    double m = 0.0;
    for (double value : u) m = std::max(m, std::abs(value));
    return m;
}

double tie_tolerance(std::span<const double> u, double tie_tol) {
    return tie_tol < 0.0 ? 1e-8 * (1.0 + max_abs(u)) : tie_tol;
}

double zero_tolerance(std::span<const double> u) { return 1e-12 * (1.0 + max_abs(u)); }

std::vector<int> descending_order(std::span<const double> u) {
    std::vector<int> order(u.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return u[i] > u[j]; });
    return order;
}

// Tie structure around the k-th largest entry (k is 1-based).
struct KthTies {
    std::vector<int> equal;   // original indices with u_i = f_k(u)
    int strictly_above = 0;   // #{i : u_i > f_k(u)}
    int count_geq = 0;        // #{i : u_i >= f_k(u)}
    bool first_in_block = false;  // k = 1 or f_{k-1}(u) > f_k(u)
};

KthTies kth_ties(std::span<const double> u, int k, double tie_tol) {
    const int r = static_cast<int>(u.size());
    if (k < 1 || k > r) throw ValidationError("k-th largest: k out of range");
    auto order = descending_order(u);
    std::vector<double> sorted(r);
    for (int i = 0; i < r; ++i) sorted[i] = u[order[i]];
    auto bounds = chain_blocks(sorted, tie_tolerance(u, tie_tol));

    KthTies ties;
    for (std::size_t j = 0; j + 1 < bounds.size(); ++j) {
        if (k - 1 >= bounds[j] && k - 1 < bounds[j + 1]) {
            ties.strictly_above = bounds[j];
            ties.count_geq = bounds[j + 1];
            ties.first_in_block = (k - 1 == bounds[j]);
            for (int i = bounds[j]; i < bounds[j + 1]; ++i) ties.equal.push_back(order[i]);
            break;
        }
    }
    std::sort(ties.equal.begin(), ties.equal.end());
    return ties;
}

double sq(double value) { return value * value; }

// Distance from d to the simplex supported on `support` (zero elsewhere),
// with at most `max_support` nonzero coordinates.  Selecting the largest
// entries is optimal for the sparse case.
double distance_to_sparse_simplex(std::span<const double> d, const std::vector<int>& support,
                                  int max_support) {
    const int m = std::min<int>(max_support, static_cast<int>(support.size()));
    std::vector<int> chosen = support;
    std::stable_sort(chosen.begin(), chosen.end(), [&](int i, int j) { return d[i] > d[j]; });
    chosen.resize(m);

    std::vector<double> onto(m);
    for (int i = 0; i < m; ++i) onto[i] = d[chosen[i]];
    auto projected = project_to_simplex(onto);

    double dist2 = 0.0;
    for (int i = 0; i < m; ++i) dist2 += sq(projected[i] - onto[i]);
    std::vector<bool> used(d.size(), false);
    for (int i : chosen) used[i] = true;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (!used[i]) dist2 += sq(d[i]);
    return std::sqrt(dist2);
}

SubdiffSet singleton_set(std::vector<double> point) {
    const int r = static_cast<int>(point.size());
    GeneratorSet gens;
    gens.points.push_back(point);
    return SubdiffSet::make(
        r,
        [point = std::move(point)](std::span<const double> d) {
            double dist2 = 0.0;
            for (std::size_t i = 0; i < d.size(); ++i) dist2 += sq(d[i] - point[i]);
            return std::sqrt(dist2);
        },
        std::move(gens));
}

SubdiffSet origin_set(int r) { return singleton_set(std::vector<double>(r, 0.0)); }

SubdiffSet simplex_set(int r, std::vector<int> support) {
    GeneratorSet gens;
    for (int i : support) {
        std::vector<double> vertex(r, 0.0);
        vertex[i] = 1.0;
        gens.points.push_back(std::move(vertex));
    }
    const int m = static_cast<int>(support.size());
    return SubdiffSet::make(
        r,
        [support = std::move(support), m](std::span<const double> d) {
            return distance_to_sparse_simplex(d, support, m);
        },
        std::move(gens));
}

SubdiffSet sparse_simplex_set(int r, std::vector<int> support, int max_support) {
    std::optional<GeneratorSet> gens;
    if (max_support >= static_cast<int>(support.size())) {
        gens.emplace();
        for (int i : support) {
            std::vector<double> vertex(r, 0.0);
            vertex[i] = 1.0;
            gens->points.push_back(std::move(vertex));
        }
    }
    return SubdiffSet::make(
        r,
        [support = std::move(support), max_support](std::span<const double> d) {
            return distance_to_sparse_simplex(d, support, max_support);
        },
        std::move(gens));
}

// Not really a subset relation with the simplex family: ones on
// `forced_ones`, a capped simplex slice with the given total on `free`,
// zeros elsewhere.
SubdiffSet capped_slice_set(int r, std::vector<int> forced_ones, std::vector<int> free,
                            double total, std::size_t generator_cap = 10000) {
    std::optional<GeneratorSet> gens;
    const int m = static_cast<int>(free.size());
    const int choose = static_cast<int>(std::llround(total));
    if (std::abs(total - choose) < 1e-12 && choose >= 0 && choose <= m) {
        // Enumerate the 0/1 selections when there are not too many.
        double combos = 1.0;
        for (int i = 0; i < choose; ++i) combos = combos * (m - i) / (i + 1);
        if (combos <= static_cast<double>(generator_cap)) {
            gens.emplace();
            std::vector<int> pick(choose);
            std::iota(pick.begin(), pick.end(), 0);
            while (true) {
                std::vector<double> vertex(r, 0.0);
                for (int i : forced_ones) vertex[i] = 1.0;
                for (int i : pick) vertex[free[i]] = 1.0;
                gens->points.push_back(std::move(vertex));
                int pos = choose - 1;
                while (pos >= 0 && pick[pos] == m - choose + pos) --pos;
                if (pos < 0) break;
                ++pick[pos];
                for (int i = pos + 1; i < choose; ++i) pick[i] = pick[i - 1] + 1;
            }
        }
    }
    return SubdiffSet::make(
        r,
        [forced_ones = std::move(forced_ones), free = std::move(free),
         total](std::span<const double> d) {
            double dist2 = 0.0;
            std::vector<bool> touched(d.size(), false);
            for (int i : forced_ones) {
                dist2 += sq(d[i] - 1.0);
                touched[i] = true;
            }
            std::vector<double> slice(free.size());
            for (std::size_t i = 0; i < free.size(); ++i) {
                slice[i] = d[free[i]];
                touched[free[i]] = true;
            }
            auto projected = project_to_capped_simplex(slice, total);
            for (std::size_t i = 0; i < slice.size(); ++i) dist2 += sq(projected[i] - slice[i]);
            for (std::size_t i = 0; i < d.size(); ++i)
                if (!touched[i]) dist2 += sq(d[i]);
            return std::sqrt(dist2);
        },
        std::move(gens));
}

SubdiffSet box_product_set(int r, std::vector<double> center_on_support,
                           std::vector<int> support, std::vector<int> zeros, double mu,
                           int generator_zero_cap = 20) {
    std::optional<GeneratorSet> gens;
    if (static_cast<int>(zeros.size()) <= generator_zero_cap) {
        gens.emplace();
        const std::size_t patterns = std::size_t{1} << zeros.size();
        for (std::size_t mask = 0; mask < patterns; ++mask) {
            std::vector<double> vertex(r, 0.0);
            for (std::size_t i = 0; i < support.size(); ++i)
                vertex[support[i]] = center_on_support[i];
            for (std::size_t i = 0; i < zeros.size(); ++i)
                vertex[zeros[i]] = (mask >> i) & 1 ? mu : -mu;
            gens->points.push_back(std::move(vertex));
        }
    }
    return SubdiffSet::make(
        r,
        [center_on_support = std::move(center_on_support), support = std::move(support),
         zeros = std::move(zeros), mu](std::span<const double> d) {
            double dist2 = 0.0;
            for (std::size_t i = 0; i < support.size(); ++i)
                dist2 += sq(d[support[i]] - center_on_support[i]);
            for (int i : zeros) dist2 += sq(std::max(0.0, std::abs(d[i]) - mu));
            return std::sqrt(dist2);
        },
        std::move(gens));
}

SubdiffSet subspace_set(int r, std::vector<int> zero_coords) {
    GeneratorSet gens;
    gens.points.push_back(std::vector<double>(r, 0.0));
    std::vector<bool> pinned(r, false);
    for (int i : zero_coords) pinned[i] = true;
    for (int i = 0; i < r; ++i) {
        if (pinned[i]) continue;
        std::vector<double> ray(r, 0.0);
        ray[i] = 1.0;
        gens.rays.push_back(ray);
        ray[i] = -1.0;
        gens.rays.push_back(std::move(ray));
    }
    return SubdiffSet::make(
        r,
        [zero_coords = std::move(zero_coords)](std::span<const double> d) {
            double dist2 = 0.0;
            for (int i : zero_coords) dist2 += sq(d[i]);
            return std::sqrt(dist2);
        },
        std::move(gens));
}

SubdiffSet ball_set(int r, double radius) {
    return SubdiffSet::make(r, [radius](std::span<const double> d) {
        double norm2 = 0.0;
        for (double value : d) norm2 += sq(value);
        return std::max(0.0, std::sqrt(norm2) - radius);
    });
}

bool in_domain(const SymmetricFunctionId& fid, std::span<const double> u) {
    if (fid.tag != SymFunctionTag::NegLogProd) return true;
    for (double value : u)
        if (value <= 0.0) return false;
    return true;
}

std::vector<double> gradient(const SymmetricFunctionId& fid, std::span<const double> u) {
    std::vector<double> g(u.begin(), u.end());
    switch (fid.tag) {
        case SymFunctionTag::NegLogProd:
            for (double& value : g) value = -fid.mu / value;
            return g;
        case SymFunctionTag::Sum:
            std::fill(g.begin(), g.end(), 1.0);
            return g;
        case SymFunctionTag::HalfSqNorm:
            return g;
        case SymFunctionTag::L2Norm: {
            double scale = fid.mu / std::sqrt(std::inner_product(u.begin(), u.end(), u.begin(), 0.0));
            for (double& value : g) value *= scale;
            return g;
        }
        default:
            throw ValidationError("gradient: not a smooth catalog entry");
    }
}

}  // namespace

std::string to_string(SubdiffKind kind) {
    switch (kind) {
        case SubdiffKind::Regular: return "regular";
        case SubdiffKind::Limiting: return "limiting";
        case SubdiffKind::Horizon: return "horizon";
        case SubdiffKind::Clarke: return "clarke";
    }
    return "?";
}

SubdiffKind subdiff_kind_from_string(const std::string& name) {
    if (name == "regular") return SubdiffKind::Regular;
    if (name == "limiting") return SubdiffKind::Limiting;
    if (name == "horizon") return SubdiffKind::Horizon;
    if (name == "clarke") return SubdiffKind::Clarke;
    throw ValidationError("unknown subdifferential kind '" + name + "'");
}

std::string SymmetricFunctionId::to_string() const {
    switch (tag) {
        case SymFunctionTag::KthLargest: return "kth_largest:k=" + std::to_string(k);
        case SymFunctionTag::SumTopK: return "sum_top_k:k=" + std::to_string(k);
        case SymFunctionTag::L1Norm: return "l1_norm:mu=" + std::to_string(mu);
        case SymFunctionTag::L2Norm: return "l2_norm:mu=" + std::to_string(mu);
        case SymFunctionTag::NegLogProd: return "neglogprod:mu=" + std::to_string(mu);
        case SymFunctionTag::Sum: return "sum";
        case SymFunctionTag::HalfSqNorm: return "half_sq_norm";
        case SymFunctionTag::ZeroNormCount: return "zero_norm_count:mu=" + std::to_string(mu);
    }
    return "?";
}

SymmetricFunctionId SymmetricFunctionId::parse(const std::string& text) {
    std::string name = text;
    std::string params;
    if (auto colon = text.find(':'); colon != std::string::npos) {
        name = text.substr(0, colon);
        params = text.substr(colon + 1);
    }
    auto int_param = [&](const char* key) {
        std::string prefix = std::string(key) + "=";
        if (params.rfind(prefix, 0) != 0)
            throw ValidationError("function id '" + text + "': expected " + prefix + "<int>");
        int value = std::stoi(params.substr(prefix.size()));
        if (value < 1) throw ValidationError("function id '" + text + "': k must be positive");
        return value;
    };
    auto mu_param = [&]() {
        if (params.rfind("mu=", 0) != 0)
            throw ValidationError("function id '" + text + "': expected mu=<value>");
        double value = std::stod(params.substr(3));
        if (!(value > 0.0)) throw ValidationError("function id '" + text + "': mu must be positive");
        return value;
    };
    if (name == "kth_largest") return kth_largest(int_param("k"));
    if (name == "sum_top_k") return sum_top_k(int_param("k"));
    if (name == "l1_norm") return l1_norm(mu_param());
    if (name == "l2_norm") return l2_norm(mu_param());
    if (name == "neglogprod") return neglogprod(mu_param());
    if (name == "sum") return sum();
    if (name == "half_sq_norm") return half_sq_norm();
    if (name == "zero_norm_count") return zero_norm_count(mu_param());
    throw ValidationError("unknown function id '" + text + "'");
}

SubdiffSet SubdiffSet::empty_set(int r) {
    SubdiffSet set;
    set.r_ = r;
    set.empty_ = true;
    set.distance_ = [](std::span<const double>) { return kInf; };
    return set;
}

SubdiffSet SubdiffSet::make(int r, std::function<double(std::span<const double>)> distance,
                            std::optional<GeneratorSet> generators) {
    SubdiffSet set;
    set.r_ = r;
    set.distance_ = std::move(distance);
    set.generators_ = std::move(generators);
    return set;
}

double SubdiffSet::distance(std::span<const double> d) const {
    if (static_cast<int>(d.size()) != r_)
        throw ValidationError("SubdiffSet::distance: dimension mismatch");
    return distance_(d);
}

bool SubdiffSet::member(std::span<const double> d, double tol) const {
    return !empty_ && distance(d) <= tol;
}

double SubdiffSet::dist0() const {
    if (empty_) throw EmptySubdifferential("dist0: subdifferential is empty");
    return distance(std::vector<double>(r_, 0.0));
}

double value(const SymmetricFunctionId& fid, std::span<const double> u) {
    const int r = static_cast<int>(u.size());
    switch (fid.tag) {
        case SymFunctionTag::KthLargest: {
            if (fid.k < 1 || fid.k > r) throw ValidationError("kth_largest: k out of range");
            std::vector<double> sorted(u.begin(), u.end());
            std::sort(sorted.begin(), sorted.end(), std::greater<>());
            return sorted[fid.k - 1];
        }
        case SymFunctionTag::SumTopK: {
            if (fid.k < 1 || fid.k > r) throw ValidationError("sum_top_k: k out of range");
            std::vector<double> sorted(u.begin(), u.end());
            std::sort(sorted.begin(), sorted.end(), std::greater<>());
            return std::accumulate(sorted.begin(), sorted.begin() + fid.k, 0.0);
        }
        case SymFunctionTag::L1Norm: {
            double sum = 0.0;
            for (double value : u) sum += std::abs(value);
            return fid.mu * sum;
        }
        case SymFunctionTag::L2Norm:
            return fid.mu * std::sqrt(std::inner_product(u.begin(), u.end(), u.begin(), 0.0));
        case SymFunctionTag::NegLogProd: {
            double sum = 0.0;
            for (double value : u) {
                if (value <= 0.0) return kInf;
                sum += std::log(value);
            }
            return -fid.mu * sum;
        }
        case SymFunctionTag::Sum:
            return std::accumulate(u.begin(), u.end(), 0.0);
        case SymFunctionTag::HalfSqNorm:
            return 0.5 * std::inner_product(u.begin(), u.end(), u.begin(), 0.0);
        case SymFunctionTag::ZeroNormCount: {
            const double ztol = zero_tolerance(u);
            int count = 0;
            for (double value : u)
                if (std::abs(value) > ztol) ++count;
            return fid.mu * count;
        }
    }
    throw ValidationError("value: unknown function tag");
}

SubdiffSet subdiff(const SymmetricFunctionId& fid, SubdiffKind kind, std::span<const double> u,
                   double tie_tol) {
    const int r = static_cast<int>(u.size());
    if (!in_domain(fid, u)) {
        if (kind == SubdiffKind::Horizon) return SubdiffSet::empty_set(r);
        throw DomainViolation("subdiff: point outside the domain of " + fid.to_string());
    }

    switch (fid.tag) {
        case SymFunctionTag::KthLargest: {
            if (kind == SubdiffKind::Horizon) return origin_set(r);
            KthTies ties = kth_ties(u, fid.k, tie_tol);
            if (kind == SubdiffKind::Regular && !ties.first_in_block)
                return SubdiffSet::empty_set(r);
            if (kind == SubdiffKind::Limiting) {
                int alpha = 1 - fid.k + ties.count_geq;
                return sparse_simplex_set(r, ties.equal, alpha);
            }
            return simplex_set(r, ties.equal);
        }
        case SymFunctionTag::SumTopK: {
            if (kind == SubdiffKind::Horizon) return origin_set(r);
            KthTies ties = kth_ties(u, fid.k, tie_tol);
            auto order = descending_order(u);
            std::vector<int> forced(order.begin(), order.begin() + ties.strictly_above);
            std::sort(forced.begin(), forced.end());
            return capped_slice_set(r, std::move(forced), ties.equal,
                                    static_cast<double>(fid.k - ties.strictly_above));
        }
        case SymFunctionTag::L1Norm: {
            if (kind == SubdiffKind::Horizon) return origin_set(r);
            const double ztol = zero_tolerance(u);
            std::vector<int> support, zeros;
            std::vector<double> center;
            for (int i = 0; i < r; ++i) {
                if (std::abs(u[i]) > ztol) {
                    support.push_back(i);
                    center.push_back(u[i] > 0.0 ? fid.mu : -fid.mu);
                } else {
                    zeros.push_back(i);
                }
            }
            return box_product_set(r, std::move(center), std::move(support), std::move(zeros),
                                   fid.mu);
        }
        case SymFunctionTag::L2Norm: {
            if (kind == SubdiffKind::Horizon) return origin_set(r);
            double unorm = std::sqrt(std::inner_product(u.begin(), u.end(), u.begin(), 0.0));
            if (unorm <= zero_tolerance(u)) return ball_set(r, fid.mu);
            return singleton_set(gradient(fid, u));
        }
        case SymFunctionTag::NegLogProd:
        case SymFunctionTag::Sum:
        case SymFunctionTag::HalfSqNorm: {
            if (kind == SubdiffKind::Horizon) return origin_set(r);
            return singleton_set(gradient(fid, u));
        }
        case SymFunctionTag::ZeroNormCount: {
            const double ztol = zero_tolerance(u);
            std::vector<int> support;
            for (int i = 0; i < r; ++i)
                if (std::abs(u[i]) > ztol) support.push_back(i);
            return subspace_set(r, std::move(support));
        }
    }
    throw ValidationError("subdiff: unknown function tag");
}

double dist0(const SymmetricFunctionId& fid, std::span<const double> u, double tie_tol) {
    return subdiff(fid, SubdiffKind::Limiting, u, tie_tol).dist0();
}

std::vector<double> project_to_simplex(std::span<const double> d) {
    const int m = static_cast<int>(d.size());
    std::vector<double> sorted(d.begin(), d.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = sorted[0] - 1.0;
    for (int i = 0; i < m; ++i) {
        cumulative += sorted[i];
        double candidate = (cumulative - 1.0) / (i + 1);
        if (sorted[i] - candidate > 0.0) theta = candidate;
    }
    std::vector<double> out(m);
    for (int i = 0; i < m; ++i) out[i] = std::max(0.0, d[i] - theta);
    return out;
}

std::vector<double> project_to_capped_simplex(std::span<const double> d, double target) {
    const int m = static_cast<int>(d.size());
    if (m == 0) return {};
    double lo = *std::min_element(d.begin(), d.end()) - 2.0;
    double hi = *std::max_element(d.begin(), d.end());
    auto mass = [&](double tau) {
        double sum = 0.0;
        for (double value : d) sum += std::clamp(value - tau, 0.0, 1.0);
        return sum;
    };
    for (int iter = 0; iter < 200; ++iter) {
        double mid = 0.5 * (lo + hi);
        if (mass(mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    double tau = 0.5 * (lo + hi);
    std::vector<double> out(m);
    for (int i = 0; i < m; ++i) out[i] = std::clamp(d[i] - tau, 0.0, 1.0);
    return out;
}

}  // namespace ejspec
