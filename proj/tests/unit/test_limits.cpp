#include <cmath>

#include "doctest.h"
#include "rxscale/exemplars.hpp"
#include "rxscale/limits.hpp"
#include "rxscale/network.hpp"
#include "rxscale/scaling.hpp"

using namespace rxscale;

TEST_CASE("fluid limit of the reversible chain conserves mass and finds equilibrium") {
  Network net = exemplar("isom-1").network;
  ODEModel ode = fluid_limit(net);
  REQUIRE(ode.dim == 2);

  // fwd at rate 1, back at rate 2: equilibrium splits total mass 2:1.
  std::vector<double> eq{1.2, 0.6};
  std::vector<double> d = ode.drift(0.0, eq);
  CHECK(std::abs(d[0]) < 1e-12);
  CHECK(std::abs(d[1]) < 1e-12);

  OdePath path = integrate_ode(ode, {1.8, 0.0}, 10.0, 1e-3, 20);
  REQUIRE(path.times.size() == 21);
  for (const auto& y : path.values) CHECK(y[0] + y[1] == doctest::Approx(1.8).epsilon(1e-9));
  CHECK(path.values.back()[0] == doctest::Approx(1.2).epsilon(1e-6));
  CHECK(ode_state_at(ode, {1.8, 0.0}, 10.0)[1] == doctest::Approx(0.6).epsilon(1e-6));
}

TEST_CASE("fluid limit refuses systems driven by a discrete input") {
  // At the slow-genome assignment the genome equation keeps its production
  // term, whose rate counts the order-one template pool, so no closed fluid
  // system exists.
  Exemplar ex = exemplar("viral");
  CHECK_THROWS_AS(fluid_limit(ex.network, ex.scaling), std::runtime_error);

  // The crystallization catalyst term vanishes in the limit instead, so the
  // monomer system closes even though the catalyst stays discrete.
  Network net = exemplar("crystallization").network;
  auto scaling = scaling_from_hints(net);
  REQUIRE(scaling.has_value());
  ODEModel ode = fluid_limit(net, *scaling);
  CHECK(ode.names == std::vector<std::string>{"A", "B"});
}

TEST_CASE("diffusion approximation carries the fluid drift plus channel noise") {
  Network net = exemplar("isom-1").network;
  SDEModel sde = diffusion_approx(net, 1000.0);
  REQUIRE(sde.dim == 3);
  CHECK(sde.n == doctest::Approx(1000.0));
  CHECK(sde.noise_scale() == doctest::Approx(1.0 / std::sqrt(1000.0)));

  std::vector<double> c{1.2, 0.6, 0.0};
  std::vector<double> rates = sde.channel_rates(c);
  REQUIRE(rates.size() == 3);
  CHECK(rates[0] == doctest::Approx(1.2));          // fwd
  CHECK(rates[1] == doctest::Approx(1.2));          // back at twice the level
  CHECK(rates[2] == doctest::Approx(5e-5 * 0.6));   // slowed production

  auto cols = sde.diffusion_columns(c);
  REQUIRE(cols.size() == 3);
  CHECK(cols[0][0] == doctest::Approx(-std::sqrt(1.2)));
  CHECK(cols[0][1] == doctest::Approx(std::sqrt(1.2)));
}

TEST_CASE("euler-maruyama is deterministic per seed and exact without noise") {
  Network net = exemplar("isom-1").network;
  SDEModel sde = diffusion_approx(net, 1000.0);
  OdePath a = simulate_em(sde, {1.2, 0.6, 0.0}, 1.0, 1e-3, 77, 4);
  OdePath b = simulate_em(sde, {1.2, 0.6, 0.0}, 1.0, 1e-3, 77, 4);
  CHECK(a.values == b.values);

  SDEModel quiet = sde;
  quiet.n = 1e18;  // noise at 1e-9, path collapses onto the ODE
  OdePath ode_like = simulate_em(quiet, {1.8, 0.0, 0.0}, 5.0, 1e-3, 1, 2);
  CHECK(ode_like.values.back()[0] == doctest::Approx(1.2).epsilon(1e-3));
}

TEST_CASE("hybrid limit splits the crystallization system") {
  Network net = exemplar("crystallization").network;
  auto scaling = scaling_from_hints(net);
  REQUIRE(scaling.has_value());
  HybridModel hm = hybrid_limit(net, *scaling);
  REQUIRE(hm.fluid_names == std::vector<std::string>{"A", "B"});
  REQUIRE(hm.discrete_names == std::vector<std::string>{"C"});
  REQUIRE(hm.channels.size() == 1);

  // Monomers pair off at rate z_A^2/10 regardless of the catalyst; the
  // catalyst is consumed at rate z_A * c.
  std::vector<double> y{1.0, 0.0};
  State d{10};
  std::vector<double> drift = hm.drift(0.0, y, d);
  CHECK(drift[0] == doctest::Approx(-0.1));
  CHECK(drift[1] == doctest::Approx(0.05));
  CHECK(hm.channels[0].rate(0.0, y, d) == doctest::Approx(1.0));

  HybridOptions opts;
  opts.grid_points = 10;
  HybridPath path = simulate_hybrid(hm, y, d, 10.0, 5, opts);
  REQUIRE(path.times.size() == 11);
  for (std::size_t g = 0; g < path.times.size(); ++g) {
    double t = path.times[g];
    CHECK(path.fluid[g][0] == doctest::Approx(1.0 / (1.0 + 0.1 * t)).epsilon(1e-6));
  }
  CHECK(path.final_discrete()[0] <= 10);
}

TEST_CASE("hybrid simulation is reproducible and method-consistent") {
  Network net = exemplar("crystallization").network;
  auto scaling = scaling_from_hints(net);
  HybridModel hm = hybrid_limit(net, *scaling);
  HybridOptions opts;
  opts.grid_points = 5;
  HybridPath a = simulate_hybrid(hm, {1.0, 0.0}, {10}, 8.0, 21, opts);
  HybridPath b = simulate_hybrid(hm, {1.0, 0.0}, {10}, 8.0, 21, opts);
  CHECK(a.discrete == b.discrete);
  CHECK(a.n_jumps == b.n_jumps);
}

TEST_CASE("template reduction reproduces the slow-genome law") {
  Exemplar ex = exemplar("viral");
  ReducedModel red = build_reduced(ex.network, ex.scaling);
  CHECK(red.kind == LimitCase::LogisticSlow);
  REQUIRE(red.logistic.has_value());
  CHECK(red.logistic->growth == doctest::Approx(7.5));
  CHECK(red.logistic->saturation == doctest::Approx(3.75));
  CHECK(red.logistic->growth_descaled == Rat(3, 40));
  CHECK(red.logistic->saturation_descaled == Rat(3, 8000));
  CHECK(red.logistic->equilibrium() == doctest::Approx(2.0));

  REQUIRE(red.ode.dim == 1);
  std::vector<double> v = ode_state_at(red.ode, {1.0}, 0.5);
  CHECK(v[0] == doctest::Approx(red.logistic->solution(1.0, 0.5)).epsilon(1e-8));
}

TEST_CASE("logistic closed form solves its own ode") {
  CHECK(logistic_solution(1.0, 0.0) == doctest::Approx(1.0));
  double v = logistic_solution(1.0, 0.4);
  double h = 1e-5;
  double dv = (logistic_solution(1.0, 0.4 + h) - logistic_solution(1.0, 0.4 - h)) / (2 * h);
  CHECK(dv == doctest::Approx(7.5 * v - 3.75 * v * v).epsilon(1e-5));
  CHECK(logistic_solution(1.0, 100.0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(logistic_solution(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("averaged moment polynomials match the recursion by hand") {
  CHECK(averaged_moment_poly(1, 0) == std::vector<Rat>{Rat(0), Rat(10)});
  CHECK(averaged_moment_poly(0, 1) == std::vector<Rat>{Rat(0), Rat(5)});
  CHECK(averaged_moment_poly(1, 1) == std::vector<Rat>{Rat(0), Rat(40, 9), Rat(50)});

  std::vector<Rat> y2 = averaged_moment_poly(0, 2);
  std::vector<Rat> zy = averaged_moment_poly(1, 1);
  REQUIRE(y2.size() == zy.size());
  for (std::size_t i = 0; i < y2.size(); ++i) CHECK(Rat(2) * y2[i] == zy[i]);

  CHECK(averaged_moments(2.0, 1, 0) == doctest::Approx(20.0));
  CHECK(averaged_moments(2.0, 1, 1) == doctest::Approx(40.0 / 9 * 2 + 50 * 4));
}

TEST_CASE("averaged fast law summarizes the stationary pair") {
  FastLaw law = averaged_fast_law(1.5);
  CHECK(law.z_mean == doctest::Approx(15.0));
  CHECK(law.y_mean() == doctest::Approx(7.5));
  CHECK(law.z_var() == doctest::Approx(15.0));
  CHECK(law.y_var() == doctest::Approx(20.0 / 9 * 1.5).epsilon(1e-9));
  CHECK(law.zy_cov() == doctest::Approx(40.0 / 9 * 1.5).epsilon(1e-9));
}

TEST_CASE("moment engine guards its degree and overflow limits") {
  Exemplar ex = exemplar("viral");
  ReducedModel red = build_reduced(ex.network, ex.scaling);
  REQUIRE(red.fast.has_value());
  AveragedMomentEngine engine(*red.fast, 4);
  CHECK(engine.max_degree() == 4);
  CHECK_THROWS_AS(engine.poly(3, 2), std::domain_error);
  CHECK(engine.eval(1.0, 1, 0) == doctest::Approx(10.0));
}
