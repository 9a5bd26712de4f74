#include <doctest.h>

#include <cmath>

#include "fastgen/rng.hpp"
#include "support/oracles.hpp"
#include "support/stats.hpp"

namespace st = fastgen::testing;

TEST_CASE("chi-square survival function against reference values") {
  CHECK(st::chi_square_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(st::chi_square_sf(11.070497693516351, 5) == doctest::Approx(0.05).epsilon(1e-10));
  CHECK(st::chi_square_sf(150, 120) == doctest::Approx(0.03307348091130466).epsilon(1e-9));
  CHECK(st::chi_square_sf(0.5, 3) == doctest::Approx(0.9188914116546758).epsilon(1e-10));
  for (double x : {0.1, 1.0, 7.5, 40.0}) CHECK(st::gamma_q(1.0, x) == doctest::Approx(std::exp(-x)));
}

TEST_CASE("ks helpers") {
  CHECK(st::ks_critical_001(50000) == doctest::Approx(0.0087183).epsilon(1e-4));
  CHECK(st::ks_statistic({0.5}, [](double x) { return x; }) == doctest::Approx(0.5));
  fastgen::SplitMix64 rng(1);
  std::vector<double> u;
  for (int i = 0; i < 20000; ++i) u.push_back(rng.uniform());
  CHECK(st::ks_passes(u, [](double x) { return st::uniform_cdf(x, 0.0, 1.0); }));
  CHECK_FALSE(st::ks_passes(u, [](double x) { return st::uniform_cdf(x, 0.0, 1.1); }));
}

TEST_CASE("chi-square pooling") {
  const auto fit = st::chi_square_gof({50, 50}, {0.5, 0.5});
  CHECK(fit.statistic == doctest::Approx(0.0));
  CHECK(fit.df == 1.0);
  CHECK(fit.p_value == doctest::Approx(1.0));
  const auto pooled = st::chi_square_gof({30, 30, 38, 2}, {0.3, 0.3, 0.39, 0.01});
  CHECK(pooled.df == 2.0);
  CHECK(st::chi_square_gof({90, 10}, {0.5, 0.5}).p_value < 1e-10);
}

TEST_CASE("transport vertex enumeration on a hand-solved case") {
  // supply (0.6, 0.4), demand (0.5, 0.5); diagonal free, off-diagonal 0.8
  const double v = st::transport_by_vertex_enumeration({0.6, 0.4}, {0.5, 0.5}, {0, 0.8, 0.8, 0});
  CHECK(v == doctest::Approx(0.08).epsilon(1e-12));
  CHECK(st::total_variation({0.6, 0.4}, {0.5, 0.5}) == doctest::Approx(0.1));
}
