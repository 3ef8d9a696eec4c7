#ifndef CFGEN_EMD_HPP
#define CFGEN_EMD_HPP

#include <vector>

namespace cfgen {

// Exact earth mover distance for a balanced transportation problem:
// minimize sum flow[i][j] * cost[i][j] subject to row sums = supply and
// column sums = demand (both sum to 1). Solved by the transportation
// simplex with Bland's anti-cycling rule; single-row/column problems are
// forced transports computed directly.
double solve_transport(const std::vector<std::vector<double>>& cost,
                       const std::vector<double>& supply,
                       const std::vector<double>& demand);

// (1 - cosine(u, v)) / 2, clamped to [0, 1]. Zero vectors get cosine 0.
double cosine_cost(const std::vector<double>& u, const std::vector<double>& v);

}  // namespace cfgen

#endif  // CFGEN_EMD_HPP
