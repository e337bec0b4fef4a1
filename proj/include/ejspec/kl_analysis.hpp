#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "ejspec/algebra.hpp"
#include "ejspec/symmetric_functions.hpp"

namespace ejspec {

// Numeric probing of the Kurdyka-Lojasiewicz inequality
//
//     psi'(F(y) - F(x)) * dist(0, dF(y)) >= 1,    psi(t) = c * t^(1 - alpha),
//
// for points y near x with F(x) < F(y) < F(x) + nu.  Sampling can only
// falsify the inequality, never certify it; a clean report reads "no
// violation found".

struct ExponentFit {
    double estimate = 0.0;   // slope of log dist0 against log(F(y) - F(x))
    double residual = 0.0;   // RMS residual of the fit
    bool degenerate = false; // one of the fitted quantities was constant
    int samples_used = 0;
};

struct KLReport {
    long samples_tested = 0;  // samples that landed in the value band
    long violations = 0;      // samples with margin < -tol
    std::optional<double> min_margin;  // min of psi'(delta) * dist0 - 1
    std::optional<ExponentFit> fitted_exponent;
};

// Draws n_samples points y = x + rho * unit-direction with isotropic Gaussian
// directions and rho uniform in (0, radius]; keeps those in the value band
// and aggregates margins.  Deterministic given the seed, with order-
// insensitive aggregation.
KLReport kl_check(const SymmetricFunctionId& fid, const Element& x, double alpha, double c,
                  double nu, double radius, int n_samples, std::uint64_t seed,
                  double tol = 1e-8);

// The same probe for f on R^r, used to compare against the induced spectral
// function with matched bands.
KLReport kl_check_vector(const SymmetricFunctionId& fid, std::span<const double> u,
                         double alpha, double c, double nu, double radius, int n_samples,
                         std::uint64_t seed, double tol = 1e-8);

// Least-squares slope of log dist0 against log(F(y) - F(x)) over accepted
// samples (n_samples draws per radius, band Delta in [1e-8, nu)).  The slope
// estimates the KL exponent alpha: along the sharp regime of the inequality
// dist0 scales like Delta^alpha.  Throws InsufficientSamples below 8 points.
ExponentFit kl_exponent_fit(const SymmetricFunctionId& fid, const Element& x,
                            std::span<const double> radii, int n_samples, std::uint64_t seed,
                            double nu = 1e300);

}  // namespace ejspec
