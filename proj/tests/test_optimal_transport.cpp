#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fastgen/optimal_transport.hpp"
#include "fastgen/rng.hpp"
#include "support/oracles.hpp"

using namespace fastgen;

namespace {

std::vector<double> random_simplex(SplitMix64& rng, std::size_t n) {
  std::vector<double> v(n);
  double total = 0.0;
  for (auto& x : v) {
    x = rng.below(4) == 0 ? 0.0 : rng.uniform();
    total += x;
  }
  if (total == 0.0) {
    v[0] = 1.0;
    total = 1.0;
  }
  for (auto& x : v) x /= total;
  return v;
}

}  // namespace

TEST_CASE("transport plan marginals and hand case") {
  const std::vector<double> supply = {0.6, 0.4}, demand = {0.5, 0.5}, cost = {0, 0.8, 0.8, 0};
  const TransportPlan plan = solve_transport(supply, demand, cost);
  CHECK(std::fabs(plan.cost - 0.08) < 1e-12);
  REQUIRE(plan.flow.size() == 4);
  CHECK(plan.flow[0] == doctest::Approx(0.5));
  CHECK(plan.flow[1] == doctest::Approx(0.1));
  CHECK(plan.flow[3] == doctest::Approx(0.4));
}

TEST_CASE("solver matches vertex enumeration on random small problems") {
  SplitMix64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t m = 1 + rng.below(3), n = 1 + rng.below(3);
    const auto supply = random_simplex(rng, m);
    const auto demand = random_simplex(rng, n);
    std::vector<double> cost(m * n);
    for (auto& c : cost) c = rng.below(5) == 0 ? 0.0 : rng.uniform() * 3.0;
    const TransportPlan plan = solve_transport(supply, demand, cost);
    const double oracle = fastgen::testing::transport_by_vertex_enumeration(supply, demand, cost);
    REQUIRE(std::fabs(plan.cost - oracle) < 1e-9);
    for (std::size_t i = 0; i < m; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        REQUIRE(plan.flow[i * n + j] >= -1e-12);
        row += plan.flow[i * n + j];
      }
      REQUIRE(std::fabs(row - supply[i]) < 1e-9);
    }
    for (std::size_t j = 0; j < n; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < m; ++i) col += plan.flow[i * n + j];
      REQUIRE(std::fabs(col - demand[j]) < 1e-9);
    }
  }
}

TEST_CASE("larger problems stay within the lp lower bound structure") {
  // Under a 0/1 cost the optimum is the total variation distance.
  SplitMix64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t k = 2 + rng.below(40);
    const auto p = random_simplex(rng, k);
    const auto q = random_simplex(rng, k);
    std::vector<double> cost(k * k, 1.0);
    for (std::size_t i = 0; i < k; ++i) cost[i * k + i] = 0.0;
    REQUIRE(std::fabs(solve_transport(p, q, cost).cost - fastgen::testing::total_variation(p, q)) <
            1e-9);
  }
}

TEST_CASE("invalid transport problems") {
  const std::vector<double> one = {1.0};
  const std::vector<double> half = {0.5};
  const std::vector<double> cost = {0.0};
  const std::vector<double> negative = {-1.0};
  CHECK_THROWS_AS((void)solve_transport({}, one, cost), std::invalid_argument);
  CHECK_THROWS_AS((void)solve_transport(one, half, cost), std::invalid_argument);
  CHECK_THROWS_AS((void)solve_transport(one, one, negative), std::invalid_argument);
  CHECK_THROWS_AS((void)solve_transport(one, one, std::vector<double>{0.0, 1.0}), std::invalid_argument);
}
