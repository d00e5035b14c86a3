#include <string>

#include "doctest.h"
#include "rxscale/network.hpp"

using namespace rxscale;

namespace {

const char* kToy = R"(n0 = 100
species A init=50 alpha=1
species B init=0 alpha=1/2
species C init=3
reaction dimer: 2 A -> B @ 0.5 beta=-1
reaction feed: 0 -> A @ 4
reaction drain: B + C -> C @ 2
)";

}  // namespace

TEST_CASE("network parsing picks up species, reactions, and hints") {
  Network net = parse_network(kToy);
  REQUIRE(net.n_species() == 3);
  REQUIRE(net.n_reactions() == 3);
  CHECK(net.species_index("B") == 1);
  CHECK(net.species_index("nope") == -1);
  CHECK(net.reaction_index("feed") == 1);
  CHECK(net.n0() == Rat(100));

  CHECK(net.species()[0].init == 50);
  CHECK(net.species()[0].alpha == Rat(1));
  CHECK(net.species()[1].alpha == Rat(1, 2));
  CHECK_FALSE(net.species()[2].alpha.has_value());

  const Reaction& dimer = net.reactions()[0];
  CHECK(dimer.order() == 2);
  CHECK(dimer.kappa == doctest::Approx(0.5));
  CHECK(dimer.kappa_exact == Rat(1, 2));
  CHECK(dimer.beta == Rat(-1));

  const Reaction& feed = net.reactions()[1];
  CHECK(feed.inputs.empty());
  CHECK(feed.order() == 0);
  CHECK_FALSE(feed.beta.has_value());

  CHECK(net.initial_state() == State{50, 0, 3});
}

TEST_CASE("render and reparse is the identity") {
  Network net = parse_network(kToy);
  Network again = parse_network(render_network(net));
  REQUIRE(again.n_species() == net.n_species());
  REQUIRE(again.n_reactions() == net.n_reactions());
  for (int i = 0; i < net.n_species(); ++i) {
    CHECK(again.species()[i].name == net.species()[i].name);
    CHECK(again.species()[i].init == net.species()[i].init);
    CHECK(again.species()[i].alpha == net.species()[i].alpha);
  }
  for (int k = 0; k < net.n_reactions(); ++k) {
    CHECK(again.reactions()[k].name == net.reactions()[k].name);
    CHECK(again.reactions()[k].kappa_exact == net.reactions()[k].kappa_exact);
    CHECK(again.reactions()[k].beta == net.reactions()[k].beta);
    CHECK(again.stoichiometry_column(k) == net.stoichiometry_column(k));
  }
  CHECK(again.n0() == net.n0());
}

TEST_CASE("propensities count subsets") {
  Network net = parse_network(kToy);
  State x{5, 2, 3};
  CHECK(net.propensity(0, x) == doctest::Approx(0.5 * 10));  // C(5,2) pairs
  CHECK(net.propensity(1, x) == doctest::Approx(4.0));
  CHECK(net.propensity(2, x) == doctest::Approx(2.0 * 2 * 3));

  State short_x{1, 0, 3};
  CHECK(net.propensity(0, short_x) == 0.0);
  CHECK(net.propensity(2, short_x) == 0.0);

  CHECK(net.propensity_exact(0, x) == Rat(5));
}

TEST_CASE("stoichiometry and reaction application agree") {
  Network net = parse_network(kToy);
  CHECK(net.stoichiometry_column(0) == std::vector<std::int64_t>{-2, 1, 0});
  CHECK(net.stoichiometry_column(1) == std::vector<std::int64_t>{1, 0, 0});
  CHECK(net.stoichiometry_column(2) == std::vector<std::int64_t>{0, -1, 0});

  State x{5, 2, 3};
  net.apply_reaction(0, x);
  CHECK(x == State{3, 3, 3});

  State empty{1, 0, 0};
  CHECK_THROWS_AS(net.apply_reaction(0, empty), std::domain_error);
}

TEST_CASE("parse errors carry the offending line") {
  try {
    parse_network("species A init=1\nreaction r: A -> Z @ 1\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(std::string(e.what()).find("unknown species") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_network("species A init=1\nreaction r: A -> 0 @ 0\n"), ParseError);
  CHECK_THROWS_AS(parse_network("species A init=1\nreaction r: A -> 0 @ 1 junk\n"), ParseError);
  CHECK_THROWS_AS(parse_network("n0 = -5\n"), ParseError);
}

TEST_CASE("volume form rate conversion") {
  // A bimolecular classical constant becomes kappa * 2 / n in subset counts.
  std::vector<int> mults{2};
  CHECK(volume_form_kappa(0.05, std::span<const int>(mults), 1e6) ==
        doctest::Approx(0.05 * 2 / 1e6));
  std::vector<int> one{1};
  CHECK(volume_form_kappa(3.0, std::span<const int>(one), 1e6) == doctest::Approx(3.0));
  CHECK(volume_form_kappa(Rat(1, 20), std::span<const int>(mults), Rat(1000000)) ==
        Rat(1, 10000000));
}
