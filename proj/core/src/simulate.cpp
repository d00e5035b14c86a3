#include "rxscale/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "rxscale/scaling.hpp"

namespace rxscale {

namespace {

// Flat network view for the inner loop.
struct Compiled {
  struct R {
    double kappa;
    std::vector<std::pair<int, int>> inputs;   // (species, multiplicity)
    std::vector<std::pair<int, std::int64_t>> deltas;  // (species, net change)
  };
  std::vector<R> reactions;
  std::vector<std::vector<int>> affected;  // reactions to refresh after k fires

  explicit Compiled(const Network& net) {
    const int m = net.n_reactions();
    reactions.resize(m);
    for (int k = 0; k < m; ++k) {
      const auto& r = net.reactions()[k];
      reactions[k].kappa = r.kappa;
      for (const auto& t : r.inputs) reactions[k].inputs.emplace_back(t.species, t.mult);
      auto col = net.stoichiometry_column(k);
      for (int i = 0; i < net.n_species(); ++i)
        if (col[i] != 0) reactions[k].deltas.emplace_back(i, col[i]);
    }
    affected.resize(m);
    for (int k = 0; k < m; ++k) {
      for (int j = 0; j < m; ++j) {
        bool touches = false;
        for (const auto& [s, d] : reactions[k].deltas) {
          for (const auto& [si, mult] : reactions[j].inputs)
            if (si == s) {
              touches = true;
              break;
            }
          if (touches) break;
        }
        if (touches) affected[k].push_back(j);
      }
    }
  }

  double propensity(int k, const State& x) const {
    const R& r = reactions[k];
    double a = r.kappa;
    for (const auto& [s, m] : r.inputs) {
      const double xi = static_cast<double>(x[s]);
      switch (m) {
        case 1:
          a *= xi;
          break;
        case 2:
          a *= 0.5 * xi * (xi - 1.0);
          break;
        default: {
          double c = 1.0;
          for (int i = 0; i < m; ++i) c *= (xi - i);
          for (int i = 2; i <= m; ++i) c /= i;
          a *= c;
        }
      }
      if (a <= 0.0) return 0.0;
    }
    return a;
  }
};

struct StopFlags {
  bool hit = false;
  bool failed = false;
  bool truncated = false;
  bool done = false;
};

// Shared run skeleton; `Stepper` supplies the waiting time / channel draw.
template <typename Stepper>
RunOutcome run_loop(const Network& net, const Compiled& cnet, double t0, State x,
                    const StopRule& stop, Rng& rng, JumpObserver& observer, Stepper stepper) {
  const int m = net.n_reactions();
  RunOutcome out;
  out.reaction_counts.assign(m, 0);

  double t = t0;
  observer.on_start(t, x);

  StopFlags flags;
  auto check_state_predicates = [&](double now) {
    if (stop.predicate && stop.predicate(now, x)) {
      flags.hit = true;
      flags.done = true;
    } else if (stop.fail_predicate && stop.fail_predicate(now, x)) {
      flags.failed = true;
      flags.done = true;
    }
  };
  check_state_predicates(t);

  std::vector<double> a(m);
  for (int k = 0; k < m; ++k) a[k] = cnet.propensity(k, x);

  std::uint64_t events = 0;
  while (!flags.done) {
    double total = 0.0;
    for (int k = 0; k < m; ++k) total += a[k];

    // Absorbing state: nothing can fire, so the state holds to the horizon.
    if (total <= 0.0 && !stepper.pending(a)) {
      t = stop.horizon;
      break;
    }

    auto [dt, channel] = stepper.next(a, total, rng);
    if (t + dt >= stop.horizon) {
      t = stop.horizon;
      break;
    }
    t += dt;

    for (const auto& [s, d] : cnet.reactions[channel].deltas) x[s] += d;
    ++out.reaction_counts[channel];
    ++events;
    observer.on_jump(t, x, channel);
    stepper.fired(channel, rng);

    for (int j : cnet.affected[channel]) {
      double fresh = cnet.propensity(j, x);
      stepper.rate_changed(j, a[j], fresh);
      a[j] = fresh;
    }

    check_state_predicates(t);
    if (!flags.done && events >= stop.max_events) {
      flags.truncated = true;
      flags.done = true;
    }
  }

  out.final_time = t;
  out.final_state = std::move(x);
  out.n_events = events;
  out.truncated = flags.truncated;
  out.hit = flags.hit;
  out.failed = flags.failed;
  return out;
}

// Direct method: Exp(total) waiting time, categorical channel choice.
struct DirectStepper {
  std::pair<double, int> next(const std::vector<double>& a, double total, Rng& rng) {
    const double dt = rng.exponential(total);
    double r = rng.uniform() * total;
    int channel = -1;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (a[k] <= 0.0) continue;
      r -= a[k];
      channel = static_cast<int>(k);
      if (r <= 0.0) break;
    }
    return {dt, channel};
  }
  void fired(int, Rng&) {}
  void rate_changed(int, double, double) {}
  bool pending(const std::vector<double>&) const { return false; }
};

// Next-reaction method with per-channel unit-Poisson clocks: channel k fires
// when its integrated propensity reaches the next level P_k.
struct NextReactionStepper {
  std::vector<double> integrated;  // Lambda_k
  std::vector<double> level;       // P_k

  explicit NextReactionStepper(int m, Rng& rng) : integrated(m, 0.0), level(m) {
    for (int k = 0; k < m; ++k) level[k] = rng.exponential(1.0);
  }

  std::pair<double, int> next(const std::vector<double>& a, double /*total*/, Rng&) {
    double best = std::numeric_limits<double>::infinity();
    int channel = -1;
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (a[k] <= 0.0) continue;
      double dt = (level[k] - integrated[k]) / a[k];
      if (dt < best) {
        best = dt;
        channel = static_cast<int>(k);
      }
    }
    if (channel >= 0)
      for (std::size_t k = 0; k < a.size(); ++k) integrated[k] += a[k] * best;
    return {best, channel};
  }

  void fired(int channel, Rng& rng) { level[channel] += rng.exponential(1.0); }
  void rate_changed(int, double, double) {}
  // A channel with propensity zero still holds clock state, but it cannot
  // fire until a rate change revives it; absorption handling matches Direct.
  bool pending(const std::vector<double>&) const { return false; }
};

}  // namespace

RunOutcome ssa_stream_from(const Network& net, double t0, const State& x0, const StopRule& stop,
                           Rng& rng, JumpObserver& observer, SsaMethod method) {
  Compiled cnet(net);
  if (method == SsaMethod::Direct)
    return run_loop(net, cnet, t0, x0, stop, rng, observer, DirectStepper{});
  return run_loop(net, cnet, t0, x0, stop, rng, observer,
                  NextReactionStepper(net.n_reactions(), rng));
}

RunOutcome ssa_stream(const Network& net, const State& x0, const StopRule& stop,
                      std::uint64_t seed, JumpObserver& observer, SsaMethod method) {
  Rng rng = Rng::seeded(seed);
  return ssa_stream_from(net, 0.0, x0, stop, rng, observer, method);
}

namespace {

class TrajectoryRecorder : public JumpObserver {
 public:
  std::vector<double> times;
  std::vector<std::int32_t> channels;
  void on_jump(double t, const State&, int channel) override {
    times.push_back(t);
    channels.push_back(channel);
  }
};

}  // namespace

Trajectory ssa_run(const Network& net, const State& x0, const StopRule& stop, std::uint64_t seed,
                   SsaMethod method) {
  TrajectoryRecorder rec;
  RunOutcome out = ssa_stream(net, x0, stop, seed, rec, method);

  Trajectory traj;
  traj.x0 = x0;
  traj.times = std::move(rec.times);
  traj.channels = std::move(rec.channels);
  traj.stoich.resize(net.n_reactions());
  for (int k = 0; k < net.n_reactions(); ++k) traj.stoich[k] = net.stoichiometry_column(k);
  traj.final_time = out.final_time;
  traj.final_state = std::move(out.final_state);
  traj.reaction_counts = std::move(out.reaction_counts);
  traj.truncated = out.truncated;
  traj.hit = out.hit;
  traj.failed = out.failed;
  return traj;
}

Trajectory ssa_until(const Network& net, const State& x0,
                     std::function<bool(double, const State&)> predicate, double horizon,
                     std::uint64_t seed, SsaMethod method) {
  StopRule stop;
  stop.horizon = horizon;
  stop.predicate = std::move(predicate);
  return ssa_run(net, x0, stop, seed, method);
}

State Trajectory::state_after(std::size_t j) const {
  State x = x0;
  for (std::size_t i = 0; i < j && i < channels.size(); ++i)
    for (std::size_t s = 0; s < x.size(); ++s) x[s] += stoich[channels[i]][s];
  return x;
}

State Trajectory::state_at(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  return state_after(static_cast<std::size_t>(it - times.begin()));
}

void Trajectory::visit(const std::function<void(double, const State&, int)>& fn) const {
  State x = x0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const auto& col = stoich[channels[i]];
    for (std::size_t s = 0; s < x.size(); ++s) x[s] += col[s];
    fn(times[i], x, channels[i]);
  }
}

std::vector<State> observe_grid(const Trajectory& traj, const std::vector<double>& grid) {
  std::vector<State> out;
  out.reserve(grid.size());
  State x = traj.x0;
  std::size_t j = 0;
  for (double g : grid) {
    while (j < traj.times.size() && traj.times[j] <= g) {
      const auto& col = traj.stoich[traj.channels[j]];
      for (std::size_t s = 0; s < x.size(); ++s) x[s] += col[s];
      ++j;
    }
    out.push_back(x);
  }
  return out;
}

void GridSampler::on_start(double, const State& x) { last_ = x; }

void GridSampler::advance_to(double t) {
  while (next_ < grid_.size() && grid_[next_] < t) {
    values_.push_back(last_);
    ++next_;
  }
}

void GridSampler::on_jump(double t, const State& x, int) {
  advance_to(t);
  last_ = x;
}

void GridSampler::finish(double, const State& final_state) {
  last_ = final_state;
  while (next_ < grid_.size()) {
    values_.push_back(last_);
    ++next_;
  }
}

std::vector<double> species_scale_factors(const ScalingExponents& scaling) {
  std::vector<double> f(scaling.alpha.size());
  for (std::size_t i = 0; i < scaling.alpha.size(); ++i)
    f[i] = rat_pow_d(scaling.n0, scaling.alpha[i]);
  return f;
}

double time_scale_factor(const ScalingExponents& scaling) {
  return rat_pow_d(scaling.n0, scaling.gamma);
}

RescaledPath rescale_trajectory(const Trajectory& traj, const ScalingExponents& scaling,
                                const std::vector<double>& grid) {
  if (!traj.x0.empty() && scaling.alpha.size() != traj.x0.size())
    throw std::invalid_argument("rescale_trajectory: scaling covers " +
                                std::to_string(scaling.alpha.size()) + " species, trajectory has " +
                                std::to_string(traj.x0.size()));
  const auto factors = species_scale_factors(scaling);
  const double tf = time_scale_factor(scaling);

  RescaledPath path;
  path.times.reserve(grid.size());
  path.values.reserve(grid.size());
  auto states = observe_grid(traj, grid);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    path.times.push_back(grid[g] / tf);
    std::vector<double> row(states[g].size());
    for (std::size_t i = 0; i < row.size(); ++i)
      row[i] = static_cast<double>(states[g][i]) / factors[i];
    path.values.push_back(std::move(row));
  }
  return path;
}

namespace {

void print_time(std::ostream& out, double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", t);
  out << buf;
}

std::vector<double> even_grid(double t_end, int points) {
  std::vector<double> g;
  g.reserve(points + 1);
  for (int i = 0; i <= points; ++i) g.push_back(t_end * i / points);
  return g;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Network& net, const Trajectory& traj,
                          int grid_points) {
  out << "time";
  for (const auto& s : net.species()) out << "," << s.name;
  out << "\n";

  auto row = [&](double t, const State& x) {
    print_time(out, t);
    for (auto v : x) out << "," << v;
    out << "\n";
  };

  if (grid_points > 0) {
    auto grid = even_grid(traj.final_time, grid_points);
    auto states = observe_grid(traj, grid);
    for (std::size_t g = 0; g < grid.size(); ++g) row(grid[g], states[g]);
    return;
  }

  row(0.0, traj.x0);
  traj.visit([&](double t, const State& x, int) { row(t, x); });
  if (traj.final_time > (traj.times.empty() ? 0.0 : traj.times.back()))
    row(traj.final_time, traj.final_state);
}

void write_reaction_counts_csv(std::ostream& out, const Network& net, const Trajectory& traj,
                               int grid_points) {
  out << "time";
  for (const auto& r : net.reactions()) out << "," << r.name;
  out << "\n";

  std::vector<std::uint64_t> counts(net.n_reactions(), 0);
  auto row = [&](double t) {
    print_time(out, t);
    for (auto c : counts) out << "," << c;
    out << "\n";
  };

  if (grid_points > 0) {
    auto grid = even_grid(traj.final_time, grid_points);
    std::size_t j = 0;
    for (double g : grid) {
      while (j < traj.times.size() && traj.times[j] <= g) {
        ++counts[traj.channels[j]];
        ++j;
      }
      row(g);
    }
    return;
  }

  row(0.0);
  for (std::size_t j = 0; j < traj.times.size(); ++j) {
    ++counts[traj.channels[j]];
    row(traj.times[j]);
  }
  if (traj.final_time > (traj.times.empty() ? 0.0 : traj.times.back())) row(traj.final_time);
}

}  // namespace rxscale
