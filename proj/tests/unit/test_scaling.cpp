#include <algorithm>

#include "doctest.h"
#include "rxscale/exemplars.hpp"
#include "rxscale/network.hpp"
#include "rxscale/scaling.hpp"

using namespace rxscale;

namespace {

ScalingExponents viral_reference(const Network& net) {
  ScalingExponents s;
  s.n0 = Rat(1000);
  s.gamma = Rat(2, 3);
  s.alpha.assign(net.n_species(), Rat(0));
  s.alpha[net.species_index("G")] = Rat(2, 3);
  s.alpha[net.species_index("S")] = Rat(1);
  s.beta.assign(net.n_reactions(), Rat(0));
  s.beta[net.reaction_index("template_conv")] = Rat(-2, 3);
  s.beta[net.reaction_index("struct_prod")] = Rat(1);
  s.beta[net.reaction_index("pair_loss")] = Rat(-5, 3);
  return s;
}

}  // namespace

TEST_CASE("rate constants split into order-one parts") {
  CHECK(split_rate_constant(1000.0, Rat(1), Rat(1000)) == doctest::Approx(1.0));
  CHECK(split_rate_constant(0.025, Rat(-2, 3), Rat(1000)) == doctest::Approx(2.5));

  auto exact = split_rate_constant_exact(Rat(1, 40), Rat(-2, 3), Rat(1000));
  CHECK(exact == Rat(5, 2));
  CHECK_FALSE(split_rate_constant_exact(Rat(1), Rat(1, 2), Rat(1000)).has_value());
}

TEST_CASE("scaling files round trip") {
  Network net = exemplar("viral").network;
  ScalingExponents ref = viral_reference(net);
  ScalingExponents parsed = parse_scaling(render_scaling(net, ref), net);
  CHECK(parsed.gamma == ref.gamma);
  CHECK(parsed.n0 == ref.n0);
  CHECK(parsed.alpha == ref.alpha);
  CHECK(parsed.beta == ref.beta);

  CHECK_THROWS(parse_scaling("gamma = 2/3\n", net));
  CHECK_THROWS_AS(parse_scaling("n0 = 1000\ngamma = 2/3\nalpha Q = 0\n", net), ParseError);
}

TEST_CASE("term orders follow the exponent bookkeeping") {
  Network net = exemplar("viral").network;
  ScalingExponents ref = viral_reference(net);
  std::vector<TermOrder> orders = term_orders(net, ref);

  auto order_of = [&](const char* species, const char* reaction) {
    int i = net.species_index(species);
    int k = net.reaction_index(reaction);
    auto it = std::find_if(orders.begin(), orders.end(), [&](const TermOrder& o) {
      return o.species == i && o.reaction == k;
    });
    REQUIRE(it != orders.end());
    return it->order;
  };

  // o_ik = gamma + beta_k + sum_j alpha_j nu_jk - alpha_i at the reference
  // viral assignment: every genome term sits at order 0 while the template
  // and structural pools run fast, at order 2/3.
  CHECK(order_of("G", "genome_prod") == Rat(0));
  CHECK(order_of("G", "template_conv") == Rat(0));
  CHECK(order_of("G", "pair_loss") == Rat(0));
  CHECK(order_of("T", "template_death") == Rat(2, 3));
  CHECK(order_of("S", "struct_prod") == Rat(2, 3));
  CHECK(order_of("S", "struct_death") == Rat(2, 3));
  CHECK(order_of("S", "pair_loss") == Rat(-1, 3));

  // Pairs with zero net stoichiometry do not appear.
  for (const TermOrder& o : orders)
    CHECK(net.stoichiometry_column(o.reaction)[o.species] != 0);
}

TEST_CASE("balance report accepts the reference assignment and flags a broken one") {
  Network net = exemplar("viral").network;
  ScalingExponents ref = viral_reference(net);
  BalanceReport ok = check_balance(net, ref);
  CHECK(ok.admissible());
  CHECK(ok.viral_schema);
  for (const BalanceCondition& c : ok.conditions) CHECK(c.satisfied);

  ScalingExponents bad = ref;
  bad.beta[net.reaction_index("struct_prod")] = Rat(2);
  BalanceReport broken = check_balance(net, bad);
  CHECK_FALSE(broken.admissible());
  CHECK(!broken.violated.empty());
}

TEST_CASE("classification covers the three template regimes") {
  Network net = exemplar("viral").network;
  ScalingExponents ref = viral_reference(net);
  CHECK(classify_case(net, ref) == LimitCase::LogisticSlow);

  // Template and genome at one common positive exponent; the structural
  // decay exponent separates the plain from the averaged regime.
  ScalingExponents full = ref;
  full.gamma = Rat(0);
  full.alpha[net.species_index("T")] = Rat(1);
  full.alpha[net.species_index("G")] = Rat(1);
  full.beta[net.reaction_index("struct_death")] = Rat(0);
  CHECK(classify_case(net, full) == LimitCase::FullODE);

  ScalingExponents averaged = full;
  averaged.beta[net.reaction_index("struct_death")] = Rat(1);
  CHECK(classify_case(net, averaged) == LimitCase::AveragedODE);

  Network isom = exemplar("isom-1").network;
  ScalingExponents id = ScalingExponents::identity(isom.n_species(), isom.n_reactions(), Rat(10));
  CHECK(classify_case(isom, id) == LimitCase::Unclassified);

  CHECK(std::string(to_string(LimitCase::LogisticSlow)) == "LogisticSlow");
}

TEST_CASE("proposal search recovers the reference viral assignment") {
  Network net = exemplar("viral").network;
  std::vector<ScalingExponents> props = propose_exponents(net, {}, Rat(1000), 3);
  CHECK(!props.empty());

  ScalingExponents ref = viral_reference(net);
  bool found = false;
  for (const ScalingExponents& p : props) {
    if (p.gamma == ref.gamma && p.alpha == ref.alpha && p.beta == ref.beta) found = true;
    BalanceReport rep = check_balance(net, p);
    CHECK(rep.admissible());
  }
  CHECK(found);
}

TEST_CASE("proposal search respects equal-exponent groups") {
  Network net = exemplar("isom-1").network;
  ProposeOptions opts;
  opts.equal_alpha = {{0, 1}};
  std::vector<ScalingExponents> props =
      propose_exponents(net, {1200.0, 600.0, 1.0}, Rat(1000), 3, opts);
  CHECK(!props.empty());
  for (const ScalingExponents& p : props) CHECK(p.alpha[0] == p.alpha[1]);
}

TEST_CASE("proposal search validates its inputs") {
  Network net = exemplar("isom-1").network;
  CHECK_THROWS_AS(propose_exponents(net, {1.0, -2.0, 1.0}, Rat(1000)), std::invalid_argument);
  CHECK_THROWS_AS(propose_exponents(net, {1.0}, Rat(1000)), std::invalid_argument);
  CHECK_THROWS_AS(propose_exponents(net, {}, Rat(1000), 0), std::invalid_argument);

  ProposeOptions tiny_budget;
  tiny_budget.max_candidates = 10;
  CHECK_THROWS_AS(propose_exponents(net, {}, Rat(1000), 6, tiny_budget), std::runtime_error);
}

TEST_CASE("descaled initial state divides by magnitude powers") {
  Network net = exemplar("viral").network;
  ScalingExponents ref = viral_reference(net);
  std::vector<double> z = descaled_initial_state(net, ref);
  CHECK(z[net.species_index("T")] == doctest::Approx(1.0));
  CHECK(z[net.species_index("G")] == doctest::Approx(0.0));
  CHECK(z[net.species_index("S")] == doctest::Approx(0.0));
}

TEST_CASE("hint annotations lift to a full scaling") {
  Network net = exemplar("viral").network;
  auto lifted = scaling_from_hints(net, Rat(2, 3));
  REQUIRE(lifted.has_value());
  ScalingExponents ref = viral_reference(net);
  CHECK(lifted->alpha == ref.alpha);
  CHECK(lifted->beta == ref.beta);
  CHECK(lifted->gamma == ref.gamma);
}
