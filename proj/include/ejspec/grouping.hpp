#pragma once

#include <span>
#include <vector>

namespace ejspec {

// Chain-groups a nonincreasing sequence into blocks of equal values: a new
// block starts whenever the gap to the previous entry exceeds tau.  Returns
// boundaries r_0 = 0 < r_1 < ... < r_l = n.
inline std::vector<int> chain_blocks(std::span<const double> sorted_desc, double tau) {
    std::vector<int> bounds{0};
    const int n = static_cast<int>(sorted_desc.size());
    if (n == 0) return bounds;
    for (int i = 1; i < n; ++i) {
        if (sorted_desc[i - 1] - sorted_desc[i] > tau) bounds.push_back(i);
    }
    bounds.push_back(n);
    return bounds;
}

}  // namespace ejspec
