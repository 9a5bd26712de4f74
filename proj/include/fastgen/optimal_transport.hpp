#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fastgen {

struct TransportPlan {
  double cost = 0.0;
  // Row-major supply x demand matrix of shipped mass.
  std::vector<double> flow;
};

// Exact solution of the balanced transportation problem
//   min sum_ij cost_ij x_ij  s.t.  sum_j x_ij = supply_i, sum_i x_ij = demand_j, x >= 0
// by successive shortest augmenting paths (Dijkstra with node potentials on
// the dense residual graph). `cost` is row-major and must be non-negative.
// Supply and demand totals must agree to within 1e-9 relative.
[[nodiscard]] TransportPlan solve_transport(std::span<const double> supply,
                                            std::span<const double> demand,
                                            std::span<const double> cost);

}  // namespace fastgen
