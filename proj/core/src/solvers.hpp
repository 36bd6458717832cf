// Internal exact solvers backing the Wasserstein distances.
#pragma once

#include <cstddef>
#include <vector>

namespace kacsim::detail {

// Minimum-cost perfect assignment on a dense n x n cost matrix
// (row-major).  Returns the total cost; rowsol[i] is the column of row i.
double assignment_cost(std::size_t n, const std::vector<double>& cost,
                       std::vector<int>* rowsol = nullptr);

// Balanced transportation problem: supplies a (size n), demands b (size m),
// dense cost matrix (n x m).  Successive shortest paths with potentials.
double transportation_cost(const std::vector<double>& supply,
                           const std::vector<double>& demand,
                           const std::vector<double>& cost);

}  // namespace kacsim::detail
