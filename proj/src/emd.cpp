#include "cfgen/emd.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "cfgen/errors.hpp"

namespace cfgen {

double cosine_cost(const std::vector<double>& u, const std::vector<double>& v) {
  if (u.size() != v.size()) throw Error("cosine_cost: dimension mismatch");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  double cosine = 0.0;
  if (nu > 0.0 && nv > 0.0) cosine = dot / (std::sqrt(nu) * std::sqrt(nv));
  cosine = std::clamp(cosine, -1.0, 1.0);
  return (1.0 - cosine) / 2.0;
}

namespace {

constexpr double kEps = 1e-12;

struct Cell {
  int i;
  int j;
};

}  // namespace

double solve_transport(const std::vector<std::vector<double>>& cost,
                       const std::vector<double>& supply,
                       const std::vector<double>& demand) {
  const int m = static_cast<int>(supply.size());
  const int n = static_cast<int>(demand.size());
  if (m == 0 || n == 0) throw EmptyInputError("solve_transport: empty side");
  for (const auto& row : cost) {
    if (static_cast<int>(row.size()) != n)
      throw Error("solve_transport: cost shape mismatch");
  }

  // Forced transports need no simplex.
  if (m == 1) {
    double total = 0.0;
    for (int j = 0; j < n; ++j) total += demand[j] * cost[0][j];
    return total;
  }
  if (n == 1) {
    double total = 0.0;
    for (int i = 0; i < m; ++i) total += supply[i] * cost[i][0];
    return total;
  }

  std::vector<std::vector<double>> flow(m, std::vector<double>(n, 0.0));
  std::vector<std::vector<bool>> basic(m, std::vector<bool>(n, false));

  // Northwest-corner initial basis: exactly m + n - 1 cells, zero-flow cells
  // kept so the basis stays a spanning tree.
  {
    std::vector<double> a = supply, b = demand;
    int i = 0, j = 0;
    while (true) {
      double x = std::min(a[i], b[j]);
      flow[i][j] += x;
      basic[i][j] = true;
      a[i] -= x;
      b[j] -= x;
      if (i == m - 1 && j == n - 1) break;
      if (j == n - 1 || (a[i] <= b[j] && i < m - 1)) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  const int max_iterations = 10000 + 50 * m * n * (m + n);
  for (int iter = 0; iter < max_iterations; ++iter) {
    // Potentials u_i + v_j = c_ij over the basis tree.
    std::vector<double> u(m), v(n);
    std::vector<bool> u_set(m, false), v_set(n, false);
    u[0] = 0.0;
    u_set[0] = true;
    std::deque<int> queue = {0};  // rows 0..m-1, columns m..m+n-1
    while (!queue.empty()) {
      int node = queue.front();
      queue.pop_front();
      if (node < m) {
        for (int j = 0; j < n; ++j) {
          if (basic[node][j] && !v_set[j]) {
            v[j] = cost[node][j] - u[node];
            v_set[j] = true;
            queue.push_back(m + j);
          }
        }
      } else {
        int j = node - m;
        for (int i = 0; i < m; ++i) {
          if (basic[i][j] && !u_set[i]) {
            u[i] = cost[i][j] - v[j];
            u_set[i] = true;
            queue.push_back(i);
          }
        }
      }
    }

    // Bland's rule: first cell in row-major order with negative reduced cost.
    int ei = -1, ej = -1;
    for (int i = 0; i < m && ei < 0; ++i) {
      for (int j = 0; j < n; ++j) {
        if (basic[i][j]) continue;
        if (cost[i][j] - u[i] - v[j] < -kEps) {
          ei = i;
          ej = j;
          break;
        }
      }
    }
    if (ei < 0) break;  // optimal

    // Unique path from row ei to column ej through the basis tree.
    std::vector<int> parent(m + n, -1);
    std::vector<bool> visited(m + n, false);
    std::deque<int> bfs = {ei};
    visited[ei] = true;
    while (!bfs.empty()) {
      int node = bfs.front();
      bfs.pop_front();
      if (node == m + ej) break;
      if (node < m) {
        for (int j = 0; j < n; ++j) {
          if (basic[node][j] && !visited[m + j]) {
            visited[m + j] = true;
            parent[m + j] = node;
            bfs.push_back(m + j);
          }
        }
      } else {
        int j = node - m;
        for (int i = 0; i < m; ++i) {
          if (basic[i][j] && !visited[i]) {
            visited[i] = true;
            parent[i] = m + j;
            bfs.push_back(i);
          }
        }
      }
    }
    if (!visited[m + ej])
      throw std::logic_error("transport basis is not connected");

    // Cycle = entering cell + path back; signs alternate starting with +.
    std::vector<Cell> cycle = {{ei, ej}};
    int node = m + ej;
    while (node != ei) {
      int par = parent[node];
      if (node >= m) {
        cycle.push_back({par, node - m});  // row par -> column node
      } else {
        cycle.push_back({node, par - m});
      }
      node = par;
    }

    double theta = -1.0;
    std::size_t leaving = 0;
    for (std::size_t k = 1; k < cycle.size(); k += 2) {
      double f = flow[cycle[k].i][cycle[k].j];
      if (theta < 0.0 || f < theta - kEps ||
          (std::abs(f - theta) <= kEps &&
           (cycle[k].i < cycle[leaving].i ||
            (cycle[k].i == cycle[leaving].i &&
             cycle[k].j < cycle[leaving].j)))) {
        theta = f;
        leaving = k;
      }
    }

    for (std::size_t k = 0; k < cycle.size(); ++k) {
      double& f = flow[cycle[k].i][cycle[k].j];
      f += (k % 2 == 0) ? theta : -theta;
      if (f < 0.0) f = 0.0;  // numeric dust
    }
    basic[ei][ej] = true;
    basic[cycle[leaving].i][cycle[leaving].j] = false;
  }

  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) total += flow[i][j] * cost[i][j];
  }
  return total;
}

}  // namespace cfgen
