#include "ejspec/jacobi.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numeric>

#include "ejspec/errors.hpp"

namespace ejspec {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kOffDiagTolScale = 1e-12;

double offdiag_mass(int n, const std::vector<double>& a) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) sum += 2.0 * a[i * n + j] * a[i * n + j];
    return std::sqrt(sum);
}

}  // namespace

JacobiResult jacobi_eigensystem(int n, std::span<const double> matrix) {
    std::vector<double> a(n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[i * n + j] = matrix[std::max(i, j) * n + std::min(i, j)];

    std::vector<double> v(n * n, 0.0);
    for (int i = 0; i < n; ++i) v[i * n + i] = 1.0;

    double frob = 0.0;
    for (double entry : a) frob += entry * entry;
    frob = std::sqrt(frob);
    const double threshold = kOffDiagTolScale * frob + DBL_MIN;

    int sweep = 0;
    while (offdiag_mass(n, a) > threshold) {
        if (++sweep > kMaxSweeps)
            throw EigenSolverFailure("jacobi_eigensystem: sweep cap exceeded");
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double apq = a[p * n + q];
                if (apq == 0.0) continue;
                double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;

                for (int k = 0; k < n; ++k) {
                    double akp = a[k * n + p];
                    double akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a[p * n + k];
                    double aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    double vkp = v[k * n + p];
                    double vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return a[i * n + i] > a[j * n + j]; });

    JacobiResult result;
    result.sweeps = sweep;
    result.values.resize(n);
    result.vectors.resize(n * n);
    for (int k = 0; k < n; ++k) {
        result.values[k] = a[order[k] * n + order[k]];
        for (int i = 0; i < n; ++i) result.vectors[k * n + i] = v[i * n + order[k]];
    }
    return result;
}

}  // namespace ejspec
