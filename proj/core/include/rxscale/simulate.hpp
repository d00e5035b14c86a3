#pragma once

// Exact stochastic simulation of reaction networks.
//
// Two samplers of the same jump process are provided: the direct method
// (exponential waiting time plus categorical channel choice) and a
// next-reaction method with per-channel internal clocks.  Both realize the
// random-time-change picture in which channel k carries an independent unit
// Poisson process run at its cumulative propensity, so trajectories satisfy
//
//   x(t) = x(0) + sum_k (net change of k) * R_k(t)
//
// with R_k the number of firings of channel k up to t.  That bookkeeping
// identity holds exactly, event by event.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "rxscale/network.hpp"
#include "rxscale/rng.hpp"

namespace rxscale {

struct ScalingExponents;  // scaling.hpp

enum class SsaMethod { Direct, NextReaction };

// Stop conditions, combined: the run ends at whichever of horizon, predicate
// hit, fail-predicate hit, or event budget comes first.
struct StopRule {
  double horizon = std::numeric_limits<double>::infinity();
  std::uint64_t max_events = 1'000'000'000;  // budget; exceeding it flags truncation

  // Stops the run when true (checked after every jump and at t = 0).
  std::function<bool(double t, const State& x)> predicate;
  // Abandons the run when true; used to cut hopeless attempts short in
  // conditioned sampling (e.g. infection died out).
  std::function<bool(double t, const State& x)> fail_predicate;

  static StopRule at_time(double t) {
    StopRule s;
    s.horizon = t;
    return s;
  }
};

// A realized jump path.  States are not stored per jump; they are
// reconstructed on demand from the initial state and the channel sequence,
// which keeps long runs cheap to hold.
struct Trajectory {
  State x0;
  std::vector<double> times;   // jump times, strictly increasing
  std::vector<std::int32_t> channels;  // reaction fired at each jump
  std::vector<std::vector<std::int64_t>> stoich;  // per-reaction net change

  double final_time = 0.0;  // horizon, predicate time, or truncation time
  State final_state;
  std::vector<std::uint64_t> reaction_counts;  // total firings per channel

  bool truncated = false;  // stopped by max_events
  bool hit = false;        // stopped by predicate
  bool failed = false;     // stopped by fail_predicate

  std::size_t n_jumps() const { return times.size(); }

  // State just after the j-th jump has been applied (j = jump count).
  // Walks the whole prefix; prefer visit() for sweeps.
  State state_after(std::size_t j) const;

  // Right-continuous state at time t.
  State state_at(double t) const;

  // Calls fn(t, x, k) after every jump, in order.
  void visit(const std::function<void(double, const State&, int)>& fn) const;
};

// Runs one trajectory from x0 under the stop rule.  Deterministic in seed.
Trajectory ssa_run(const Network& net, const State& x0, const StopRule& stop,
                   std::uint64_t seed, SsaMethod method = SsaMethod::Direct);

// Convenience wrapper: run until the predicate fires or the horizon passes.
// Returns the trajectory; .hit says whether the predicate was reached.
Trajectory ssa_until(const Network& net, const State& x0,
                     std::function<bool(double, const State&)> predicate, double horizon,
                     std::uint64_t seed, SsaMethod method = SsaMethod::Direct);

// Right-continuous states sampled on an increasing time grid.
std::vector<State> observe_grid(const Trajectory& traj, const std::vector<double>& grid);

// --- Streaming interface ----------------------------------------------------
//
// The ensemble and verification layers do not materialize trajectories.
// ssa_stream drives the sampler and hands every jump to the observer; the
// observer may also be invoked once at t=0 via on_start.

struct RunOutcome {
  double final_time = 0.0;
  State final_state;
  std::vector<std::uint64_t> reaction_counts;
  std::uint64_t n_events = 0;
  bool truncated = false;
  bool hit = false;
  bool failed = false;
};

class JumpObserver {
 public:
  virtual ~JumpObserver() = default;
  virtual void on_start(double /*t*/, const State& /*x*/) {}
  virtual void on_jump(double /*t*/, const State& /*x*/, int /*channel*/) {}
};

RunOutcome ssa_stream(const Network& net, const State& x0, const StopRule& stop,
                      std::uint64_t seed, JumpObserver& observer,
                      SsaMethod method = SsaMethod::Direct);

// Continues a run from a given (t, x) without reseeding; rng carries over.
RunOutcome ssa_stream_from(const Network& net, double t0, const State& x0, const StopRule& stop,
                           Rng& rng, JumpObserver& observer,
                           SsaMethod method = SsaMethod::Direct);

// Samples the state at fixed grid times while streaming (grid must be
// increasing).  values[g][i] is species i at grid time g, right-continuous.
class GridSampler : public JumpObserver {
 public:
  explicit GridSampler(std::vector<double> grid) : grid_(std::move(grid)) {}
  void on_start(double t, const State& x) override;
  void on_jump(double t, const State& x, int channel) override;
  // Call once after the run so trailing grid points take the final state.
  void finish(double final_time, const State& final_state);

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<State>& values() const { return values_; }

 private:
  std::vector<double> grid_;
  std::vector<State> values_;
  std::size_t next_ = 0;
  State last_;

  void advance_to(double t);
};

// --- Rescaling --------------------------------------------------------------

// A trajectory carried to normalized coordinates: species i divided by
// n0^alpha_i and times divided by n0^gamma.
struct RescaledPath {
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // values[point][species]
};

// Rescales the trajectory states on the given physical-time grid (pass the
// jump times for a full-resolution path).
RescaledPath rescale_trajectory(const Trajectory& traj, const ScalingExponents& scaling,
                                const std::vector<double>& grid);

// Scale factors n0^alpha_i per species and n0^gamma for time.
std::vector<double> species_scale_factors(const ScalingExponents& scaling);
double time_scale_factor(const ScalingExponents& scaling);

// --- CSV --------------------------------------------------------------------

// Header "time,<species...>"; one row per jump (plus t=0 and the final
// time), or on an evenly spaced grid of `grid_points`+1 rows when
// grid_points > 0.
void write_trajectory_csv(std::ostream& out, const Network& net, const Trajectory& traj,
                          int grid_points = 0);

// Header "time,<reaction names...>"; cumulative firing counts.
void write_reaction_counts_csv(std::ostream& out, const Network& net, const Trajectory& traj,
                               int grid_points = 0);

}  // namespace rxscale
