#include "fastgen/optimal_transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace fastgen {

TransportPlan solve_transport(std::span<const double> supply, std::span<const double> demand,
                              std::span<const double> cost) {
  const std::size_t m = supply.size();
  const std::size_t n = demand.size();
  if (m == 0 || n == 0) throw std::invalid_argument("transport problem has an empty side");
  if (cost.size() != m * n) throw std::invalid_argument("cost matrix has the wrong size");
  for (double c : cost) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw std::invalid_argument("costs must be finite and non-negative");
    }
  }
  const double total_supply = std::accumulate(supply.begin(), supply.end(), 0.0);
  const double total_demand = std::accumulate(demand.begin(), demand.end(), 0.0);
  const double scale = std::max({total_supply, total_demand, 1e-300});
  if (std::fabs(total_supply - total_demand) > 1e-9 * scale) {
    throw std::invalid_argument("supply and demand totals differ");
  }
  const double eps = 1e-14 * scale;

  std::vector<double> rem_supply(supply.begin(), supply.end());
  std::vector<double> rem_demand(demand.begin(), demand.end());
  TransportPlan plan;
  plan.flow.assign(m * n, 0.0);

  // Nodes: sources [0, m), sinks [m, m + n), sink terminal T = m + n.
  const std::size_t nodes = m + n + 1;
  const std::size_t terminal = m + n;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<double> potential(nodes, 0.0);
  std::vector<double> dist(nodes);
  std::vector<std::size_t> prev(nodes);
  std::vector<char> done(nodes);

  auto remaining = [&] {
    double r = 0.0;
    for (double s : rem_supply) r += s > eps ? s : 0.0;
    return r;
  };
  auto any_demand = [&] {
    return std::any_of(rem_demand.begin(), rem_demand.end(), [&](double d) { return d > eps; });
  };

  while (remaining() > eps && any_demand()) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(prev.begin(), prev.end(), kNone);
    std::fill(done.begin(), done.end(), 0);
    // The super source reaches every source with supply left at cost 0.
    for (std::size_t i = 0; i < m; ++i) {
      if (rem_supply[i] > eps) dist[i] = std::max(0.0, -potential[i]);
    }
    auto relax = [&](std::size_t from, std::size_t to, double arc_cost) {
      const double reduced = std::max(0.0, arc_cost + potential[from] - potential[to]);
      if (dist[from] + reduced < dist[to]) {
        dist[to] = dist[from] + reduced;
        prev[to] = from;
      }
    };
    for (;;) {
      std::size_t u = kNone;
      for (std::size_t v = 0; v < nodes; ++v) {
        if (!done[v] && dist[v] < kInf && (u == kNone || dist[v] < dist[u])) u = v;
      }
      if (u == kNone || u == terminal) break;
      done[u] = 1;
      if (u < m) {
        for (std::size_t j = 0; j < n; ++j) relax(u, m + j, cost[u * n + j]);
      } else {
        const std::size_t j = u - m;
        for (std::size_t i = 0; i < m; ++i) {
          if (plan.flow[i * n + j] > eps) relax(u, i, -cost[i * n + j]);
        }
        if (rem_demand[j] > eps) relax(u, terminal, 0.0);
      }
    }
    if (dist[terminal] == kInf) break;  // unreachable for balanced input

    // Walk the path back to find the bottleneck.
    std::size_t last_sink = prev[terminal];
    double push = rem_demand[last_sink - m];
    std::size_t v = last_sink;
    std::size_t first_source = kNone;
    while (v != kNone) {
      const std::size_t p = prev[v];
      if (v < m) {
        if (p == kNone) {
          first_source = v;
        } else {
          push = std::min(push, plan.flow[v * n + (p - m)]);  // reverse arc sink p -> source v
        }
      }
      v = p;
    }
    push = std::min(push, rem_supply[first_source]);

    rem_supply[first_source] -= push;
    rem_demand[last_sink - m] -= push;
    for (v = last_sink; prev[v] != kNone; v = prev[v]) {
      const std::size_t p = prev[v];
      if (v >= m) {
        plan.flow[p * n + (v - m)] += push;  // forward source p -> sink v
      } else {
        plan.flow[v * n + (p - m)] -= push;  // cancel flow source v -> sink p
      }
    }

    const double reach = dist[terminal];
    for (std::size_t u = 0; u < nodes; ++u) potential[u] += std::min(dist[u], reach);
  }

  for (std::size_t k = 0; k < m * n; ++k) {
    if (plan.flow[k] < 0.0) plan.flow[k] = 0.0;
    plan.cost += plan.flow[k] * cost[k];
  }
  return plan;
}

}  // namespace fastgen
