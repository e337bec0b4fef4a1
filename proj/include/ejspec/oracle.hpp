#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ejspec/algebra.hpp"

// Independent brute-force oracles used by the test suites.  This module
// depends only on the algebra evaluation primitives; it never imports the
// subdifferential formulas it is used to validate.
namespace ejspec::oracle {

struct ProbeVerdict {
    bool passed = false;
    double worst_violation = 0.0;  // min over samples of the subgradient margin
    double epsilon = 0.0;
    std::optional<std::vector<double>> witness;  // direction attaining the worst margin
};

struct FdResult {
    std::vector<double> value;  // extrapolated one-sided directional derivative
    double error_estimate = 0.0;
    std::optional<double> observed_order;  // absent when all quotients sit at noise level
};

// One-sided difference quotients (lambda'(x; z) is only a one-sided
// derivative at eigenvalue crossings) on a positive decreasing t grid, with
// linear-in-t extrapolation from the two finest quotients.
FdResult fd_dir_derivative(const std::function<std::vector<double>(const Element&)>& evaluate,
                           const Element& x, const Element& z, std::span<const double> t_grid);

// Samples directions v on spheres of the given radii and evaluates the
// regular-subgradient margin (f(u0 + v) - f(u0) - <d, v>) / ||v||.  An
// infinite f(u0 + v) never violates.  passed means the worst margin stays
// above -epsilon.
ProbeVerdict regular_subgradient_probe(
    const std::function<double(std::span<const double>)>& evaluate, std::span<const double> u0,
    std::span<const double> d, double epsilon, std::span<const double> radii, int n_dirs = 512,
    std::uint64_t seed = 0);

// The same probe for a function of algebra elements, run in orthonormal
// coordinates; the witness is returned as an element.
struct ElementProbeVerdict {
    bool passed = false;
    double worst_violation = 0.0;
    double epsilon = 0.0;
    std::optional<Element> witness;
};
ElementProbeVerdict regular_subgradient_probe_element(
    const std::function<double(const Element&)>& evaluate, const Element& x0, const Element& s,
    double epsilon, std::span<const double> radii, int n_dirs = 512, std::uint64_t seed = 0);

// Euclidean distance from u to conv(points), via Wolfe's minimum-norm-point
// algorithm (finite-terminating active-set scheme; accurate well below 1e-9
// at desk scale).  Requires a nonempty point list of at most 10^4 points.
double distance_to_hull(std::span<const double> u,
                        const std::vector<std::vector<double>>& points);

bool hull_member_bruteforce(std::span<const double> u,
                            const std::vector<std::vector<double>>& points, double tol);

}  // namespace ejspec::oracle
