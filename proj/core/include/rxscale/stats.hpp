#pragma once

// Monte Carlo ensembles and the statistics used to verify them.
//
// Ensembles are reproducible by construction: run i is seeded with
// run_seed(base_seed, i) no matter which thread executes it, per-run values
// land in a matrix row indexed by i, and reductions sweep that matrix
// sequentially.  Results are therefore bit-identical for any thread count.

#include <cstdint>
#include <functional>
#include <vector>

#include "rxscale/network.hpp"
#include "rxscale/rng.hpp"
#include "rxscale/simulate.hpp"

namespace rxscale {

// --- Running moments ---------------------------------------------------------

// Welford accumulator; mergeable so partial streams can be combined.
class Accumulator {
 public:
  void add(double x);
  void merge(const Accumulator& other);

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  // Sample variance (n-1 denominator); 0 with fewer than two points.
  double variance() const;
  double stddev() const;
  double se_mean() const;
  double min() const { return min_; }
  double max() const { return max_; }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
};

// Two-pass column reduction of a run-value matrix.  se_variance uses the
// fourth central moment, so variance checks can carry honest error bars.
struct ColumnStats {
  std::uint64_t n = 0;
  double mean = 0.0;
  double variance = 0.0;     // sample variance
  double se_mean = 0.0;
  double se_variance = 0.0;
  double min = 0.0;
  double max = 0.0;
};

ColumnStats column_stats(const std::vector<std::vector<double>>& matrix, std::size_t column);
std::vector<double> column_values(const std::vector<std::vector<double>>& matrix,
                                  std::size_t column);

// --- Ensembles ---------------------------------------------------------------

struct EnsembleOptions {
  SsaMethod method = SsaMethod::Direct;
  int threads = 0;  // 0 = one worker per available core
  StopRule stop;    // horizon defaults to grid.back() when unset
};

// Per-run summary hook: receives the run outcome and the states sampled at
// the grid times, returns one fixed-width row of values.
using RunSummary =
    std::function<std::vector<double>(const RunOutcome&, const std::vector<State>&)>;

// Runs n_runs independent trajectories and collects one summary row per run;
// row i comes from the run seeded with run_seed(base_seed, i).
std::vector<std::vector<double>> run_ensemble(const Network& net, const State& x0,
                                              std::uint64_t n_runs, std::uint64_t base_seed,
                                              const std::vector<double>& grid,
                                              const RunSummary& summarize,
                                              const EnsembleOptions& opts = {});

// --- Conditioned sampling ------------------------------------------------------
//
// Rare-event ensembles condition on a first-passage hit: attempts are scanned
// in index order (attempt i seeded with run_seed(base_seed, i)) until
// n_accepted of them reach the stop predicate; each hit may then be continued
// with the same generator, so the conditioned path statistics stay exact.

struct ConditionedResult {
  std::uint64_t attempts = 0;  // total attempts scanned
  std::uint64_t hits = 0;
  std::uint64_t failures = 0;  // fail_predicate fired
  std::uint64_t timeouts = 0;  // horizon or event budget hit first
  std::vector<std::vector<double>> rows;  // one row per accepted attempt
  double hit_fraction() const {
    return attempts ? static_cast<double>(hits) / static_cast<double>(attempts) : 0.0;
  }
};

// Called for each accepted attempt with its index, the outcome at the hit
// time, and the generator mid-stream; returns the attempt's summary row.
using HitContinuation =
    std::function<std::vector<double>(std::uint64_t attempt, const RunOutcome& at_hit, Rng& rng)>;

// Scans attempts until n_accepted hits (or max_attempts).  `continuation` may
// be empty, in which case accepted rows are empty and only counts are kept.
ConditionedResult conditioned_ensemble(const Network& net, const State& x0,
                                       const StopRule& attempt_stop, std::uint64_t n_accepted,
                                       std::uint64_t base_seed,
                                       const HitContinuation& continuation,
                                       std::uint64_t max_attempts = 1'000'000,
                                       SsaMethod method = SsaMethod::Direct);

// --- Goodness of fit -----------------------------------------------------------

// Regularized upper incomplete gamma Q(a, x); series for small x, continued
// fraction otherwise.
double gamma_q(double a, double x);

// Survival function of the chi-square distribution.
double chi2_sf(double statistic, double dof);

double poisson_pmf(std::int64_t k, double mean);
double binomial_pmf(std::int64_t k, std::int64_t n, double p);

struct GofResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  std::size_t bins = 0;  // after merging
};

// Pearson chi-square of observed counts against expected counts.  Adjacent
// bins are merged until every expected count reaches min_expected; dof is
// merged bins - 1 - extra_constraints.
GofResult gof_counts(const std::vector<double>& observed, const std::vector<double>& expected,
                     int extra_constraints = 0, double min_expected = 5.0);

// Fit of integer samples to the named law.
GofResult gof_poisson(const std::vector<std::int64_t>& samples, double mean);
GofResult gof_binomial(const std::vector<std::int64_t>& samples, std::int64_t n_trials, double p);

// Fit of category counts (observed[i] outcomes of category i) against given
// probabilities.
GofResult gof_categorical(const std::vector<std::int64_t>& observed,
                          const std::vector<double>& probabilities);

// Two-sample chi-square: are two sets of integer samples drawn from one law?
GofResult chi2_two_sample(const std::vector<std::int64_t>& a,
                          const std::vector<std::int64_t>& b);

// --- Oracle comparison -----------------------------------------------------------

struct ZCheck {
  double estimate = 0.0;
  double truth = 0.0;
  double se = 0.0;
  double z = 0.0;  // (estimate - truth) / se
  bool ok = true;  // |z| within the limit
};

ZCheck compare_to_oracle(double estimate, double se, double truth, double z_limit = 3.0);

}  // namespace rxscale
