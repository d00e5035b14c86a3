#include <cmath>

#include "doctest.h"
#include "rxscale/branching.hpp"

using namespace rxscale;

TEST_CASE("shifted geometric offspring law") {
  OffspringLaw law = OffspringLaw::shifted_geometric();
  CHECK(law.mean == doctest::Approx(4.0));
  CHECK(law.probabilities(0) == doctest::Approx(0.2));
  CHECK(law.probabilities(3) == doctest::Approx(0.2 * 0.8 * 0.8 * 0.8));

  CHECK(pgf_eval(law, 1.0) == doctest::Approx(1.0));
  CHECK(pgf_eval(law, 0.0) == doctest::Approx(0.2));
  // Geometric pgf in closed form: (1/5) / (1 - 4s/5).
  CHECK(pgf_eval(law, 0.5) == doctest::Approx(0.2 / (1 - 0.4)));
  CHECK_THROWS_AS(pgf_eval(law, 1.5), std::invalid_argument);
}

TEST_CASE("extinction probability is the smallest pgf fixed point") {
  OffspringLaw law = OffspringLaw::shifted_geometric();
  double q = extinction_probability(law);
  CHECK(std::abs(q - 0.25) < 1e-12);
  CHECK(pgf_eval(law, q) == doctest::Approx(q).epsilon(1e-10));

  // Critical and subcritical lineages die out almost surely.
  OffspringLaw coin;
  coin.probabilities = [](int k) { return (k == 0 || k == 2) ? 0.5 : 0.0; };
  coin.mean = 1.0;
  CHECK(extinction_probability(coin) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("walk estimate brackets the fixed point") {
  OffspringLaw law = OffspringLaw::shifted_geometric();
  WalkEstimate est = extinction_by_walk(law, 200000, 2024);
  CHECK(est.walks == 200000);
  CHECK(est.se > 0.0);
  CHECK(std::abs(est.estimate - 0.25) < 3 * est.se + 1e-4);

  WalkEstimate again = extinction_by_walk(law, 200000, 2024);
  CHECK(again.estimate == est.estimate);
}

TEST_CASE("two-type mean matrix satisfies both eigen identities") {
  for (double n : {1e2, 1e3, 1e4, 1e6}) {
    double lam = growth_rate(n);
    double r = rho(n);
    CHECK(std::abs((1.0 - 0.25 * r) - lam * r) < 1e-10);
    CHECK(std::abs(2.5 * (r - 1.0) * std::pow(n, -2.0 / 3.0) - lam) < 1e-10);
  }
  CHECK(std::pow(1e6, 2.0 / 3.0) * growth_rate(1e6) == doctest::Approx(7.5).epsilon(0.05));
  CHECK(rho(1e6) == doctest::Approx(4.0).epsilon(0.02));

  TwoTypeRates rates;
  rates.n = 1e4;
  auto q = rates.q_matrix();
  CHECK(q[0][0] == doctest::Approx(-0.25));
  CHECK(q[1][0] == doctest::Approx(1.0));
  CHECK(rates.growth_rate() == doctest::Approx(growth_rate(1e4)));
}

TEST_CASE("establishment crossing predicates") {
  EstablishmentSpec spec(1000.0, 1.0);
  CHECK(spec.threshold == doctest::Approx(std::pow(1000.0, 2.0 / 3.0)));
  CHECK(spec.rho == doctest::Approx(rho(1000.0)));

  auto weighted = weighted_crossing(spec, 0, 1);
  auto genome_only = genome_crossing(spec, 1);
  auto dead = lineage_dead(0, 1);

  State below{0, 0, 50};
  CHECK_FALSE(weighted(0.0, below));
  CHECK(dead(0.0, below));

  std::int64_t level = static_cast<std::int64_t>(spec.threshold) + 1;
  State crossed{0, level, 0};
  CHECK(weighted(0.0, crossed));
  CHECK(genome_only(0.0, crossed));
  CHECK_FALSE(dead(0.0, crossed));

  // rho-weighted templates count toward the crossing with weight > 1.
  std::int64_t few = static_cast<std::int64_t>(spec.threshold / spec.rho) + 1;
  State templates_only{few, 0, 0};
  CHECK(weighted(0.0, templates_only));
  CHECK_FALSE(genome_only(0.0, templates_only));
}

TEST_CASE("establishment time predictions scale as n^(2/3) log n") {
  double t1 = predict_establishment_time(1e3, 1.0);
  CHECK(t1 == doctest::Approx(4.0 / 45 * std::pow(1e3, 2.0 / 3.0) * std::log(1e3)));
  CHECK_THROWS_AS(predict_establishment_time(1e3, 2.5), std::invalid_argument);

  double gap = predict_level_crossing_gap(1e3, 0.5, 1.0);
  CHECK(gap == doctest::Approx(2.0 / 15 * std::log(2.0) * std::pow(1e3, 2.0 / 3.0)));
  CHECK_THROWS_AS(predict_level_crossing_gap(1e3, 1.0, 0.5), std::invalid_argument);
}
