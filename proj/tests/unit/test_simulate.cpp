#include <cmath>
#include <sstream>

#include "cme.hpp"
#include "doctest.h"
#include "rxscale/network.hpp"
#include "rxscale/rng.hpp"
#include "rxscale/scaling.hpp"
#include "rxscale/simulate.hpp"
#include "rxscale/stats.hpp"

using namespace rxscale;

namespace {

Network tiny_isom() {
  return parse_network(R"(species X1 init=3
species X2 init=0
species X3 init=0
reaction fwd: X1 -> X2 @ 1
reaction back: X2 -> X1 @ 2
reaction prod: X2 -> X3 @ 1
)");
}

Network pure_birth(double kappa) {
  std::ostringstream os;
  os << "species A init=0\nreaction feed: 0 -> A @ " << kappa << "\n";
  return parse_network(os.str());
}

}  // namespace

TEST_CASE("no active reactions means the state never moves") {
  Network net = parse_network("species A init=2\nreaction decay: 3 A -> 0 @ 1\n");
  StopRule stop;
  stop.horizon = 5.0;
  Trajectory traj = ssa_run(net, net.initial_state(), stop, 1);
  CHECK(traj.n_jumps() == 0);
  CHECK(traj.final_time == 5.0);
  CHECK(traj.final_state == State{2});
  CHECK_FALSE(traj.truncated);
}

TEST_CASE("one seed gives one trajectory") {
  Network net = tiny_isom();
  StopRule stop;
  stop.horizon = 4.0;
  Trajectory a = ssa_run(net, net.initial_state(), stop, 42);
  Trajectory b = ssa_run(net, net.initial_state(), stop, 42);
  CHECK(a.times == b.times);
  CHECK(a.channels == b.channels);
  CHECK(a.final_state == b.final_state);

  Trajectory c = ssa_run(net, net.initial_state(), stop, 43);
  CHECK(a.times != c.times);
}

TEST_CASE("trajectory bookkeeping is consistent") {
  Network net = tiny_isom();
  StopRule stop;
  stop.horizon = 2.0;
  Trajectory traj = ssa_run(net, net.initial_state(), stop, 7);
  REQUIRE(traj.n_jumps() > 0);
  for (std::size_t j = 1; j < traj.times.size(); ++j) CHECK(traj.times[j] > traj.times[j - 1]);

  std::uint64_t total = 0;
  for (auto c : traj.reaction_counts) total += c;
  CHECK(total == traj.n_jumps());

  CHECK(traj.state_after(traj.n_jumps()) == traj.final_state);
  CHECK(traj.state_after(0) == net.initial_state());
  CHECK(traj.state_at(0.0) == net.initial_state());
  CHECK(traj.state_at(traj.final_time) == traj.final_state);

  // Molecule count is conserved by all three reactions.
  State end = traj.final_state;
  CHECK(end[0] + end[1] + end[2] == 3);
}

TEST_CASE("stop rules: event budget, predicate, fail predicate, fixed time") {
  Network net = pure_birth(4.0);

  StopRule budget;
  budget.max_events = 10;
  budget.horizon = 1e9;
  Trajectory t1 = ssa_run(net, {0}, budget, 5);
  CHECK(t1.truncated);
  CHECK(t1.n_jumps() == 10);

  StopRule until;
  until.horizon = 1e9;
  until.predicate = [](double, const State& x) { return x[0] >= 3; };
  Trajectory t2 = ssa_run(net, {0}, until, 5);
  CHECK(t2.hit);
  CHECK(t2.final_state[0] == 3);

  Network isom = tiny_isom();
  StopRule race;
  race.horizon = 1e9;
  race.predicate = [](double, const State& x) { return x[2] >= 2; };
  race.fail_predicate = [](double, const State& x) { return x[0] == 0 && x[1] == 0; };
  Trajectory t3 = ssa_run(isom, isom.initial_state(), race, 5);
  CHECK((t3.hit || t3.failed));

  Trajectory t4 = ssa_run(net, {0}, StopRule::at_time(2.5), 5);
  CHECK(t4.final_time == 2.5);
}

TEST_CASE("ssa_until stops at the crossing") {
  Network net = pure_birth(1.0);
  Trajectory traj =
      ssa_until(net, {0}, [](double, const State& x) { return x[0] >= 5; }, 1e9, 11);
  CHECK(traj.hit);
  CHECK(traj.final_state[0] == 5);
  CHECK(traj.n_jumps() == 5);
}

TEST_CASE("grid observation matches the jump record") {
  Network net = tiny_isom();
  StopRule stop;
  stop.horizon = 3.0;
  Trajectory traj = ssa_run(net, net.initial_state(), stop, 19);
  std::vector<double> grid{0.0, 0.5, 1.5, 3.0};
  std::vector<State> obs = observe_grid(traj, grid);
  REQUIRE(obs.size() == grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) CHECK(obs[g] == traj.state_at(grid[g]));

  GridSampler sampler(grid);
  RunOutcome out = ssa_stream(net, net.initial_state(), stop, 19, sampler);
  sampler.finish(out.final_time, out.final_state);
  CHECK(out.final_state == traj.final_state);
  REQUIRE(sampler.values().size() == grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) CHECK(sampler.values()[g] == obs[g]);
}

TEST_CASE("constant rate births are Poisson") {
  Network net = pure_birth(4.0);
  std::vector<std::int64_t> samples;
  StopRule stop;
  stop.horizon = 2.5;
  for (std::uint64_t i = 0; i < 3000; ++i) {
    Trajectory traj = ssa_run(net, {0}, stop, run_seed(501, i));
    samples.push_back(traj.final_state[0]);
  }
  GofResult gof = gof_poisson(samples, 10.0);
  CHECK(gof.p_value > 1e-3);
}

TEST_CASE("both samplers reproduce the exact law of a small chain") {
  Network net = tiny_isom();
  rxtest::ExactLaw law = rxtest::exact_law(net, net.initial_state(), 0.7);
  REQUIRE(law.states.size() == 10);
  double mass = 0.0;
  for (double p : law.probabilities) mass += p;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));

  for (SsaMethod method : {SsaMethod::Direct, SsaMethod::NextReaction}) {
    std::vector<std::int64_t> counts(law.states.size(), 0);
    const std::uint64_t runs = 4000;
    for (std::uint64_t i = 0; i < runs; ++i) {
      Trajectory traj = ssa_run(net, net.initial_state(), StopRule::at_time(0.7),
                                run_seed(method == SsaMethod::Direct ? 601 : 602, i), method);
      auto idx = law.index_of(traj.final_state);
      REQUIRE(idx >= 0);
      ++counts[idx];
    }
    GofResult gof = gof_categorical(counts, law.probabilities);
    CHECK(gof.p_value > 1e-3);
  }
}

TEST_CASE("trajectory csv emits one row per grid point and no duplicates") {
  Network net = tiny_isom();
  StopRule stop;
  stop.horizon = 0.0;
  Trajectory traj = ssa_run(net, net.initial_state(), stop, 3);

  std::ostringstream out;
  write_trajectory_csv(out, net, traj);
  std::istringstream lines(out.str());
  std::string header, row, extra;
  REQUIRE(std::getline(lines, header));
  CHECK(header == "time,X1,X2,X3");
  REQUIRE(std::getline(lines, row));
  CHECK(row == "0,3,0,0");
  CHECK_FALSE(std::getline(lines, extra));
}

TEST_CASE("rescaled paths divide by the magnitude powers") {
  Network net = parse_network(R"(n0 = 100
species A init=200 alpha=1
species B init=30 alpha=1/2
reaction swap: A -> B @ 1 beta=0
)");
  ScalingExponents s;
  s.alpha = {Rat(1), Rat(1, 2)};
  s.beta = {Rat(0)};
  s.gamma = Rat(0);
  s.n0 = Rat(100);

  StopRule stop;
  stop.horizon = 0.1;
  Trajectory traj = ssa_run(net, net.initial_state(), stop, 9);
  RescaledPath path = rescale_trajectory(traj, s, {0.0, 0.1});
  REQUIRE(path.times.size() == 2);
  CHECK(path.values[0][0] == doctest::Approx(2.0));
  CHECK(path.values[0][1] == doctest::Approx(3.0));

  std::vector<double> f = species_scale_factors(s);
  CHECK(f[0] == doctest::Approx(100.0));
  CHECK(f[1] == doctest::Approx(10.0));
  CHECK(time_scale_factor(s) == doctest::Approx(1.0));
}
