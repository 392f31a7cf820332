#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace onmf {

struct AssignmentResult {
    std::vector<std::size_t> col_of_row;  // kNoMatch for rows matched to padding
    double cost = 0.0;

    static constexpr std::size_t kNoMatch = static_cast<std::size_t>(-1);
};

// Exact min-cost assignment on an nr x nc cost matrix (row-major) via
// shortest augmenting paths with potentials, O(dim^3). Rectangular inputs are
// padded to square with zero-cost entries, which leaves the optimum over the
// real block unchanged.
inline AssignmentResult min_cost_assignment(std::span<const double> cost,
                                            std::size_t nr, std::size_t nc) {
    if (cost.size() != nr * nc)
        throw std::invalid_argument("min_cost_assignment: cost size != nr*nc");
    if (nr == 0 || nc == 0)
        throw std::invalid_argument("min_cost_assignment: empty cost matrix");
    const std::size_t dim = nr > nc ? nr : nc;
    const double inf = std::numeric_limits<double>::infinity();
    auto at = [&](std::size_t i, std::size_t j) -> double {
        return (i < nr && j < nc) ? cost[i * nc + j] : 0.0;
    };

    std::vector<double> u(dim + 1, 0.0), v(dim + 1, 0.0), minv(dim + 1, 0.0);
    std::vector<std::size_t> p(dim + 1, 0), way(dim + 1, 0);
    std::vector<char> used(dim + 1, 0);
    for (std::size_t i = 1; i <= dim; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            std::size_t j1 = 0;
            double delta = inf;
            for (std::size_t j = 1; j <= dim; ++j) {
                if (used[j]) continue;
                const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= dim; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    AssignmentResult res;
    res.col_of_row.assign(nr, AssignmentResult::kNoMatch);
    for (std::size_t j = 1; j <= dim; ++j) {
        if (p[j] == 0) continue;
        const std::size_t i = p[j] - 1, jj = j - 1;
        if (i < nr && jj < nc) {
            res.col_of_row[i] = jj;
            res.cost += cost[i * nc + jj];
        }
    }
    return res;
}

}  // namespace onmf
