#include "ejspec/kl_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ejspec/transfer.hpp"

namespace ejspec {

namespace {

struct BandSample {
    double delta = 0.0;
    double dist = 0.0;
};

// Shared aggregation: the callback maps a per-sample rng to an optional
// (delta, dist0) pair for samples landing in the band.
template <typename Draw>
KLReport run_kl_probe(double alpha, double c, double nu, int n_samples, std::uint64_t seed,
                      double tol, Draw&& draw) {
    KLReport report;
    SplitMix64 root(seed);
    double min_margin = 0.0;
    bool any = false;
    for (int i = 0; i < n_samples; ++i) {
        SplitMix64 rng = root.derive(static_cast<std::uint64_t>(i));
        BandSample sample;
        if (!draw(rng, nu, sample)) continue;
        double psi_prime = c * (1.0 - alpha) * std::pow(sample.delta, -alpha);
        double margin = psi_prime * sample.dist - 1.0;
        ++report.samples_tested;
        if (margin < -tol) ++report.violations;
        if (!any || margin < min_margin) {
            min_margin = margin;
            any = true;
        }
    }
    if (any) report.min_margin = min_margin;
    return report;
}

}  // namespace

KLReport kl_check(const SymmetricFunctionId& fid, const Element& x, double alpha, double c,
                  double nu, double radius, int n_samples, std::uint64_t seed, double tol) {
    const double f0 = spectral_value(fid, x);
    if (!std::isfinite(f0)) throw DomainViolation("kl_check: x outside the domain");
    return run_kl_probe(alpha, c, nu, n_samples, seed, tol,
                        [&](SplitMix64& rng, double band, BandSample& out) {
                            Element direction = random_element(x.algebra(), rng);
                            double scale = norm(direction);
                            if (scale == 0.0) return false;
                            double rho = radius * rng.uniform01_open_low();
                            Element y = x + (rho / scale) * direction;
                            double fy = spectral_value(fid, y);
                            double delta = fy - f0;
                            if (!(delta > 0.0 && delta < band)) return false;
                            out.delta = delta;
                            out.dist = spectral_dist0(fid, y);
                            return true;
                        });
}

KLReport kl_check_vector(const SymmetricFunctionId& fid, std::span<const double> u, double alpha,
                         double c, double nu, double radius, int n_samples, std::uint64_t seed,
                         double tol) {
    const double f0 = value(fid, u);
    if (!std::isfinite(f0)) throw DomainViolation("kl_check_vector: u outside the domain");
    const int r = static_cast<int>(u.size());
    return run_kl_probe(alpha, c, nu, n_samples, seed, tol,
                        [&](SplitMix64& rng, double band, BandSample& out) {
                            std::vector<double> direction(r);
                            double norm2 = 0.0;
                            for (double& value : direction) {
                                value = rng.normal();
                                norm2 += value * value;
                            }
                            if (norm2 == 0.0) return false;
                            double rho = radius * rng.uniform01_open_low() / std::sqrt(norm2);
                            std::vector<double> y(u.begin(), u.end());
                            for (int i = 0; i < r; ++i) y[i] += rho * direction[i];
                            double fy = value(fid, y);
                            double delta = fy - f0;
                            if (!(delta > 0.0 && delta < band)) return false;
                            out.delta = delta;
                            out.dist = dist0(fid, y);
                            return true;
                        });
}

ExponentFit kl_exponent_fit(const SymmetricFunctionId& fid, const Element& x,
                            std::span<const double> radii, int n_samples, std::uint64_t seed,
                            double nu) {
    const double f0 = spectral_value(fid, x);
    if (!std::isfinite(f0)) throw DomainViolation("kl_exponent_fit: x outside the domain");

    // Band floor avoids log underflow on near-zero value gaps.
    constexpr double kDeltaFloor = 1e-8;
    std::vector<double> log_delta, log_dist;
    SplitMix64 root(seed);
    std::uint64_t counter = 0;
    for (double radius : radii) {
        for (int i = 0; i < n_samples; ++i) {
            SplitMix64 rng = root.derive(counter++);
            Element direction = random_element(x.algebra(), rng);
            double scale = norm(direction);
            if (scale == 0.0) continue;
            double rho = radius * rng.uniform01_open_low();
            Element y = x + (rho / scale) * direction;
            double fy = spectral_value(fid, y);
            double delta = fy - f0;
            if (!(delta >= kDeltaFloor && delta < nu)) continue;
            double dist = spectral_dist0(fid, y);
            if (!(dist > 0.0)) continue;
            log_delta.push_back(std::log(delta));
            log_dist.push_back(std::log(dist));
        }
    }

    const int count = static_cast<int>(log_delta.size());
    if (count < 8) throw InsufficientSamples("kl_exponent_fit: fewer than 8 samples in band");

    double mean_x = 0.0, mean_y = 0.0;
    for (int i = 0; i < count; ++i) {
        mean_x += log_delta[i];
        mean_y += log_dist[i];
    }
    mean_x /= count;
    mean_y /= count;
    double var_x = 0.0, var_y = 0.0, cov = 0.0;
    for (int i = 0; i < count; ++i) {
        double dx = log_delta[i] - mean_x;
        double dy = log_dist[i] - mean_y;
        var_x += dx * dx;
        var_y += dy * dy;
        cov += dx * dy;
    }

    ExponentFit fit;
    fit.samples_used = count;
    fit.degenerate = var_x / count < 1e-18 || var_y / count < 1e-18;
    fit.estimate = var_x / count < 1e-18 ? 0.0 : cov / var_x;
    double rss = 0.0;
    for (int i = 0; i < count; ++i) {
        double predicted = mean_y + fit.estimate * (log_delta[i] - mean_x);
        rss += (log_dist[i] - predicted) * (log_dist[i] - predicted);
    }
    fit.residual = std::sqrt(rss / count);
    return fit;
}

}  // namespace ejspec
