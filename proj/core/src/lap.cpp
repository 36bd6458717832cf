#include "solvers.hpp"

#include <limits>
#include <stdexcept>

namespace kacsim::detail {

// Dense shortest-augmenting-path assignment with dual potentials
// (Hungarian, O(n^3)).
double assignment_cost(std::size_t n, const std::vector<double>& cost,
                       std::vector<int>* rowsol) {
    if (cost.size() != n * n) throw std::invalid_argument("assignment_cost: bad matrix");
    const double inf = std::numeric_limits<double>::infinity();
    // 1-based columns; p[j] = row matched to column j.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = static_cast<int>(i);
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            std::size_t i0 = static_cast<std::size_t>(p[j0]), j1 = 0;
            double delta = inf;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = static_cast<int>(j0);
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
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
            std::size_t j1 = static_cast<std::size_t>(way[j0]);
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    double total = 0.0;
    if (rowsol) rowsol->assign(n, -1);
    for (std::size_t j = 1; j <= n; ++j) {
        if (p[j] == 0) continue;
        total += cost[(p[j] - 1) * n + (j - 1)];
        if (rowsol) (*rowsol)[p[j] - 1] = static_cast<int>(j - 1);
    }
    return total;
}

}  // namespace kacsim::detail
