#include "ejspec/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ejspec::oracle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

// Dense solve with partial pivoting; a is row-major n x n, b length n.
std::vector<double> solve_dense(int n, std::vector<double> a, std::vector<double> b) {
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int row = col + 1; row < n; ++row)
            if (std::abs(a[row * n + col]) > std::abs(a[pivot * n + col])) pivot = row;
        if (pivot != col) {
            for (int j = 0; j < n; ++j) std::swap(a[col * n + j], a[pivot * n + j]);
            std::swap(b[col], b[pivot]);
        }
        double diag = a[col * n + col];
        if (diag == 0.0) throw Error("solve_dense: singular system");
        for (int row = col + 1; row < n; ++row) {
            double factor = a[row * n + col] / diag;
            if (factor == 0.0) continue;
            for (int j = col; j < n; ++j) a[row * n + j] -= factor * a[col * n + j];
            b[row] -= factor * b[col];
        }
    }
    std::vector<double> x(n);
    for (int row = n - 1; row >= 0; --row) {
        double sum = b[row];
        for (int j = row + 1; j < n; ++j) sum -= a[row * n + j] * x[j];
        x[row] = sum / a[row * n + row];
    }
    return x;
}

}  // namespace

FdResult fd_dir_derivative(const std::function<std::vector<double>(const Element&)>& evaluate,
                           const Element& x, const Element& z, std::span<const double> t_grid) {
    if (t_grid.empty()) throw ValidationError("fd_dir_derivative: empty t grid");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (t_grid[i] <= 0.0) throw ValidationError("fd_dir_derivative: t must be positive");
        if (i > 0 && t_grid[i] >= t_grid[i - 1])
            throw ValidationError("fd_dir_derivative: t grid must be decreasing");
    }

    const std::vector<double> base = evaluate(x);
    std::vector<std::vector<double>> quotients;
    quotients.reserve(t_grid.size());
    for (double t : t_grid) {
        std::vector<double> shifted = evaluate(x + t * z);
        for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] = (shifted[i] - base[i]) / t;
        quotients.push_back(std::move(shifted));
    }

    FdResult result;
    const std::size_t last = t_grid.size() - 1;
    if (t_grid.size() == 1) {
        result.value = quotients[0];
        return result;
    }
    // D(t) = L + c t + O(t^2): eliminate the linear term with the two finest t.
    const double t1 = t_grid[last - 1];
    const double t2 = t_grid[last];
    result.value.resize(base.size());
    for (std::size_t i = 0; i < base.size(); ++i)
        result.value[i] = (t1 * quotients[last][i] - t2 * quotients[last - 1][i]) / (t1 - t2);

    auto deviation = [&](std::size_t which) {
        double worst = 0.0;
        for (std::size_t i = 0; i < base.size(); ++i)
            worst = std::max(worst, std::abs(quotients[which][i] - result.value[i]));
        return worst;
    };
    result.error_estimate = deviation(last);

    double value_scale = 0.0;
    for (double entry : result.value) value_scale = std::max(value_scale, std::abs(entry));
    double base_scale = 0.0;
    for (double entry : base) base_scale = std::max(base_scale, std::abs(entry));

    // Quotients carry rounding noise of order eps * |f| / t; only deviations
    // clearly above that floor say anything about the convergence order.
    const double eps = 2.3e-16;
    std::vector<double> log_t, log_err;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        double err = deviation(i);
        double floor = 64.0 * eps * (1.0 + base_scale) / t_grid[i] +
                       16.0 * eps * (1.0 + value_scale);
        if (err > floor) {
            log_t.push_back(std::log(t_grid[i]));
            log_err.push_back(std::log(err));
        }
    }
    if (log_t.size() >= 2) {
        double mean_t = 0.0, mean_e = 0.0;
        for (std::size_t i = 0; i < log_t.size(); ++i) {
            mean_t += log_t[i];
            mean_e += log_err[i];
        }
        mean_t /= log_t.size();
        mean_e /= log_t.size();
        double var = 0.0, cov = 0.0;
        for (std::size_t i = 0; i < log_t.size(); ++i) {
            var += (log_t[i] - mean_t) * (log_t[i] - mean_t);
            cov += (log_t[i] - mean_t) * (log_err[i] - mean_e);
        }
        if (var > 0.0) result.observed_order = cov / var;
    }
    return result;
}

ProbeVerdict regular_subgradient_probe(
    const std::function<double(std::span<const double>)>& evaluate, std::span<const double> u0,
    std::span<const double> d, double epsilon, std::span<const double> radii, int n_dirs,
    std::uint64_t seed) {
    if (u0.size() != d.size()) throw ValidationError("regular_subgradient_probe: length mismatch");
    const double f0 = evaluate(u0);
    if (!std::isfinite(f0))
        throw ValidationError("regular_subgradient_probe: evaluate(x0) must be finite");

    ProbeVerdict verdict;
    verdict.epsilon = epsilon;
    verdict.worst_violation = kInf;
    SplitMix64 root(seed);
    const int r = static_cast<int>(u0.size());
    std::vector<double> probe(r);

    for (std::size_t which = 0; which < radii.size(); ++which) {
        for (int j = 0; j < n_dirs; ++j) {
            SplitMix64 rng = root.derive(which * static_cast<std::uint64_t>(n_dirs) + j);
            std::vector<double> direction(r);
            double norm2 = 0.0;
            for (double& value : direction) {
                value = rng.normal();
                norm2 += value * value;
            }
            if (norm2 == 0.0) continue;
            const double scale = radii[which] / std::sqrt(norm2);
            for (int i = 0; i < r; ++i) {
                direction[i] *= scale;
                probe[i] = u0[i] + direction[i];
            }
            double fv = evaluate(probe);
            if (!std::isfinite(fv)) continue;  // +inf ahead never violates
            double margin = (fv - f0 - dot(d, direction)) / radii[which];
            if (margin < verdict.worst_violation) {
                verdict.worst_violation = margin;
                verdict.witness = direction;
            }
        }
    }
    verdict.passed = verdict.worst_violation >= -epsilon;
    return verdict;
}

ElementProbeVerdict regular_subgradient_probe_element(
    const std::function<double(const Element&)>& evaluate, const Element& x0, const Element& s,
    double epsilon, std::span<const double> radii, int n_dirs, std::uint64_t seed) {
    const AlgebraDescriptor& algebra = x0.algebra();
    auto coords0 = coordinates(x0);
    auto scoords = coordinates(s);
    auto in_coords = [&](std::span<const double> w) {
        return evaluate(from_coordinates(algebra, w));
    };
    ProbeVerdict flat =
        regular_subgradient_probe(in_coords, coords0, scoords, epsilon, radii, n_dirs, seed);
    ElementProbeVerdict verdict;
    verdict.passed = flat.passed;
    verdict.worst_violation = flat.worst_violation;
    verdict.epsilon = flat.epsilon;
    if (flat.witness) verdict.witness = from_coordinates(algebra, *flat.witness);
    return verdict;
}

double distance_to_hull(std::span<const double> u,
                        const std::vector<std::vector<double>>& points) {
    if (points.empty()) throw ValidationError("distance_to_hull: empty point list");
    if (points.size() > 10000) throw ValidationError("distance_to_hull: size cap exceeded");
    const int dim = static_cast<int>(u.size());
    const int m = static_cast<int>(points.size());
    for (const auto& point : points)
        if (static_cast<int>(point.size()) != dim)
            throw ValidationError("distance_to_hull: dimension mismatch");

    // Work on translated points q_i = p_i - u; Wolfe's minimum-norm-point.
    std::vector<std::vector<double>> q(points.begin(), points.end());
    for (auto& point : q)
        for (int i = 0; i < dim; ++i) point[i] -= u[i];

    int start = 0;
    double best = dot(q[0], q[0]);
    for (int i = 1; i < m; ++i) {
        double norm2 = dot(q[i], q[i]);
        if (norm2 < best) {
            best = norm2;
            start = i;
        }
    }
    std::vector<int> active{start};
    std::vector<double> weights{1.0};
    std::vector<double> current = q[start];

    const int max_major = 4 * m + 100;
    for (int major = 0; major < max_major; ++major) {
        double current_norm2 = dot(current, current);
        int entering = -1;
        double lowest = kInf;
        for (int i = 0; i < m; ++i) {
            double along = dot(current, q[i]);
            if (along < lowest) {
                lowest = along;
                entering = i;
            }
        }
        if (lowest >= current_norm2 - 1e-14 * (1.0 + current_norm2)) break;
        if (std::find(active.begin(), active.end(), entering) != active.end()) break;
        active.push_back(entering);
        weights.push_back(0.0);

        // Minor loop: pull the iterate to the affine minimizer, dropping
        // vertices whose weight would cross zero.
        for (int minor = 0; minor < 8 * m + 16; ++minor) {
            const int size = static_cast<int>(active.size());
            std::vector<double> system((size + 1) * (size + 1), 0.0);
            std::vector<double> rhs(size + 1, 0.0);
            for (int a = 0; a < size; ++a) {
                for (int b = 0; b < size; ++b)
                    system[a * (size + 1) + b] = dot(q[active[a]], q[active[b]]);
                system[a * (size + 1) + size] = 1.0;
                system[size * (size + 1) + a] = 1.0;
            }
            rhs[size] = 1.0;
            std::vector<double> solved = solve_dense(size + 1, std::move(system), std::move(rhs));
            std::vector<double> affine(solved.begin(), solved.begin() + size);

            bool interior = true;
            for (double w : affine)
                if (w <= 1e-12) interior = false;
            if (interior) {
                weights = affine;
                break;
            }
            double theta = 1.0;
            for (int a = 0; a < size; ++a)
                if (affine[a] <= 1e-12 && weights[a] > affine[a])
                    theta = std::min(theta, weights[a] / (weights[a] - affine[a]));
            for (int a = 0; a < size; ++a)
                weights[a] = (1.0 - theta) * weights[a] + theta * affine[a];

            double smallest = kInf;
            int drop = -1;
            for (int a = 0; a < size; ++a)
                if (weights[a] < smallest) {
                    smallest = weights[a];
                    drop = a;
                }
            if (smallest > 1e-12) break;
            active.erase(active.begin() + drop);
            weights.erase(weights.begin() + drop);
            double total = 0.0;
            for (double w : weights) total += w;
            for (double& w : weights) w /= total;
        }

        std::fill(current.begin(), current.end(), 0.0);
        for (std::size_t a = 0; a < active.size(); ++a)
            for (int i = 0; i < dim; ++i) current[i] += weights[a] * q[active[a]][i];
    }
    return std::sqrt(std::max(0.0, dot(current, current)));
}

bool hull_member_bruteforce(std::span<const double> u,
                            const std::vector<std::vector<double>>& points, double tol) {
    return distance_to_hull(u, points) <= tol;
}

}  // namespace ejspec::oracle
