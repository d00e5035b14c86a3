#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "rxscale/exemplars.hpp"
#include "rxscale/limits.hpp"
#include "rxscale/network.hpp"
#include "rxscale/scaling.hpp"

using namespace rxscale;

TEST_CASE("the catalog lists six systems with complete annotations") {
  const std::vector<std::string>& names = exemplar_names();
  REQUIRE(names.size() == 6);
  CHECK(names[0] == "crystallization");
  CHECK(names.back() == "viral");

  for (const std::string& name : names) {
    Exemplar ex = exemplar(name);
    CHECK(ex.name == name);
    CHECK(!ex.notes.empty());
    CHECK(ex.network.n_species() > 0);
    CHECK(ex.network.n0().has_value());
    REQUIRE(ex.scalings.count(ex.default_scaling) == 1);
    CHECK(ex.scaling.alpha == ex.scalings.at(ex.default_scaling).alpha);
    CHECK(!ex.oracles.empty());

    // Every bundled assignment is admissible for its network.
    for (const auto& [key, scaling] : ex.scalings) {
      BalanceReport rep = check_balance(ex.network, scaling);
      CHECK(rep.admissible());
    }

    // Hints in the bundled network match the default assignment.
    auto lifted = scaling_from_hints(ex.network, ex.scaling.gamma);
    REQUIRE(lifted.has_value());
    CHECK(lifted->alpha == ex.scaling.alpha);
    CHECK(lifted->beta == ex.scaling.beta);
  }

  CHECK_THROWS_AS(exemplar("unknown"), std::out_of_range);
  CHECK_THROWS_AS(oracle("viral", "unknown_quantity", 1.0), std::out_of_range);
}

TEST_CASE("bundled networks round trip through the text format") {
  for (const std::string& name : exemplar_names()) {
    Network net = exemplar(name).network;
    Network again = parse_network(render_network(net));
    REQUIRE(again.n_species() == net.n_species());
    REQUIRE(again.n_reactions() == net.n_reactions());
    for (int i = 0; i < net.n_species(); ++i) {
      CHECK(again.species()[i].name == net.species()[i].name);
      CHECK(again.species()[i].init == net.species()[i].init);
      CHECK(again.species()[i].alpha == net.species()[i].alpha);
    }
    for (int k = 0; k < net.n_reactions(); ++k) {
      CHECK(again.reactions()[k].kappa_exact == net.reactions()[k].kappa_exact);
      CHECK(again.reactions()[k].beta == net.reactions()[k].beta);
    }
  }
}

TEST_CASE("closed-form oracles return the known constants") {
  CHECK(oracle("crystallization", "E_X_C", 10.0) == doctest::Approx(5.0));
  CHECK(oracle("crystallization", "Var_X_C", 10.0) == doctest::Approx(2.5));
  CHECK(oracle("crystallization", "Z_A", 10.0) == doctest::Approx(0.5));

  CHECK(oracle("enzyme-1", "E_X_P", 10.0) == doctest::Approx(100 * (1 - std::exp(-1.0))));
  CHECK(oracle("enzyme-2", "E_X_P", 5.0) == doctest::Approx(5.0));
  CHECK(oracle("enzyme-2", "Var_X_P", 5.0) == doctest::Approx(5.0));

  CHECK(oracle("isom-1", "E_X_3_slow", 1.0) == doctest::Approx(3.0));
  CHECK(oracle("isom-1", "Z_1", 0.0) == doctest::Approx(1.2));

  CHECK(oracle("isom-2", "E_X_3", 10.0) == doctest::Approx(10.0));
  double v1 = oracle("isom-2", "V_1", 0.2);
  double x2 = oracle("isom-2", "E_X_2_v", 0.2);
  CHECK(x2 == doctest::Approx(1e5 / 40002 * v1).epsilon(1e-3));
  CHECK(x2 == doctest::Approx(0.18394).epsilon(1e-3));

  CHECK(oracle("viral", "extinction_prob", 0.0) == doctest::Approx(0.25));
  CHECK(oracle("viral", "logistic_growth", 0.0) == doctest::Approx(7.5));
  CHECK(oracle("viral", "logistic_saturation", 0.0) == doctest::Approx(3.75));
  CHECK(oracle("viral", "V_2_logistic", 0.0) == doctest::Approx(1.0));
  CHECK(oracle("viral", "fast_E_Z", 2.0) == doctest::Approx(20.0));
  CHECK(oracle("viral", "fast_E_Y", 2.0) == doctest::Approx(10.0));
  CHECK(oracle("viral", "fast_E_ZY", 2.0) == doctest::Approx(40.0 / 9 * 2 + 50 * 4));
  CHECK(oracle("viral", "fast_Var_Y", 2.0) == doctest::Approx(40.0 / 9));
  CHECK(oracle("viral", "fast_Cov_ZY", 2.0) == doctest::Approx(80.0 / 9));
}

TEST_CASE("re-anchoring a network rewrites rates, counts, and hints") {
  Exemplar ex = exemplar("isom-1");
  Network small = net_at_scale(ex.network, ex.scaling, 100);
  CHECK(small.n0() == Rat(100));
  CHECK(small.species()[0].init == 120);
  CHECK(small.species()[1].init == 60);
  CHECK(small.species()[2].init == 0);
  CHECK(small.species()[0].alpha == Rat(1));

  // lambda_k is preserved: kappa' = lambda * n^beta with lambda = 5e-5 * 1000^(5/3).
  double lambda_prod = 5e-5 * std::pow(1000.0, 5.0 / 3.0);
  CHECK(small.reactions()[2].kappa ==
        doctest::Approx(lambda_prod * std::pow(100.0, -5.0 / 3.0)).epsilon(1e-12));
  CHECK(small.reactions()[0].kappa == doctest::Approx(1.0));
}

TEST_CASE("classification of the bundled defaults") {
  CHECK(classify_case(exemplar("viral").network, exemplar("viral").scaling) ==
        LimitCase::LogisticSlow);
  for (const char* name : {"crystallization", "enzyme-1", "enzyme-2", "isom-1", "isom-2"})
    CHECK(classify_case(exemplar(name).network, exemplar(name).scaling) ==
          LimitCase::Unclassified);
}

TEST_CASE("the proposal search rediscovers every bundled assignment") {
  struct Case {
    const char* exemplar_name;
    const char* scaling_key;
    std::vector<double> magnitudes;
    std::vector<std::vector<int>> groups;
    long max_denominator;
  };
  // Magnitudes are the working scales n0^alpha of each regime; equal-alpha
  // groups mirror what the annotations imply.
  const std::vector<Case> cases{
      {"isom-1", "Z", {1200, 600, 1}, {{0, 1}}, 6},
      {"isom-1", "U", {1200, 600, 1}, {{0, 1}}, 6},
      {"isom-1", "V", {1200, 600, 1000}, {{0, 1}}, 6},
      {"isom-2", "Z", {2000, 1, 1}, {{1, 2}}, 6},
      {"isom-2", "V", {2000, 1, 10000}, {}, 6},
      {"enzyme-1", "V", {100, 1000, 100, 100}, {{0, 2, 3}}, 6},
      {"enzyme-2", "Z", {100, 10, 10, 1}, {{1, 2}}, 4},
      {"crystallization", "Z", {1e6, 1e6, 10}, {{0, 1}}, 6},
      {"viral", "V", {}, {}, 6},
  };

  for (const Case& c : cases) {
    CAPTURE(c.exemplar_name);
    CAPTURE(c.scaling_key);
    Exemplar ex = exemplar(c.exemplar_name);
    const ScalingExponents& want = ex.scalings.at(c.scaling_key);

    ProposeOptions opts;
    opts.equal_alpha = c.groups;
    std::vector<ScalingExponents> props = propose_exponents(
        ex.network, c.magnitudes, want.n0, c.max_denominator, opts);

    bool found = false;
    for (const ScalingExponents& p : props)
      if (p.gamma == want.gamma && p.alpha == want.alpha && p.beta == want.beta) found = true;
    CHECK(found);
  }
}
