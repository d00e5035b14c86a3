#include "rxscale/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace rxscale {

void Accumulator::add(double x) {
  if (n_ == 0) {
    min_ = max_ = x;
  } else {
    min_ = std::min(min_, x);
    max_ = std::max(max_, x);
  }
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

void Accumulator::merge(const Accumulator& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(other.n_);
  const double d = other.mean_ - mean_;
  const double n = na + nb;
  mean_ += d * nb / n;
  m2_ += other.m2_ + d * d * na * nb / n;
  min_ = std::min(min_, other.min_);
  max_ = std::max(max_, other.max_);
  n_ += other.n_;
}

double Accumulator::variance() const {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double Accumulator::stddev() const { return std::sqrt(variance()); }

double Accumulator::se_mean() const {
  return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

std::vector<double> column_values(const std::vector<std::vector<double>>& matrix,
                                  std::size_t column) {
  std::vector<double> out;
  out.reserve(matrix.size());
  for (const auto& row : matrix) out.push_back(row.at(column));
  return out;
}

ColumnStats column_stats(const std::vector<std::vector<double>>& matrix, std::size_t column) {
  ColumnStats cs;
  cs.n = matrix.size();
  if (cs.n == 0) return cs;

  double sum = 0.0;
  cs.min = cs.max = matrix.front().at(column);
  for (const auto& row : matrix) {
    const double x = row.at(column);
    sum += x;
    cs.min = std::min(cs.min, x);
    cs.max = std::max(cs.max, x);
  }
  const double n = static_cast<double>(cs.n);
  cs.mean = sum / n;

  double m2 = 0.0, m4 = 0.0;
  for (const auto& row : matrix) {
    const double d = row.at(column) - cs.mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  if (cs.n > 1) {
    cs.variance = m2 / (n - 1.0);
    cs.se_mean = std::sqrt(cs.variance / n);
  }
  if (cs.n > 3) {
    // Var(s^2) = (mu4 - sigma^4 (n-3)/(n-1)) / n, with sample plug-ins.
    const double mu4 = m4 / n;
    const double v = cs.variance;
    const double var_s2 = (mu4 - v * v * (n - 3.0) / (n - 1.0)) / n;
    cs.se_variance = var_s2 > 0.0 ? std::sqrt(var_s2) : 0.0;
  }
  return cs;
}

std::vector<std::vector<double>> run_ensemble(const Network& net, const State& x0,
                                              std::uint64_t n_runs, std::uint64_t base_seed,
                                              const std::vector<double>& grid,
                                              const RunSummary& summarize,
                                              const EnsembleOptions& opts) {
  if (!summarize) throw std::invalid_argument("run_ensemble: summarize hook required");
  StopRule stop = opts.stop;
  if (!std::isfinite(stop.horizon) && !grid.empty()) stop.horizon = grid.back();

  std::vector<std::vector<double>> matrix(n_runs);

  auto worker = [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      GridSampler sampler(grid);
      RunOutcome out = ssa_stream(net, x0, stop, run_seed(base_seed, i), sampler, opts.method);
      sampler.finish(out.final_time, out.final_state);
      matrix[i] = summarize(out, sampler.values());
    }
  };

  int threads = opts.threads;
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  threads = static_cast<int>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(n_runs, 1)));

  if (threads == 1) {
    worker(0, n_runs);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::uint64_t chunk = (n_runs + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::uint64_t lo = chunk * t;
      const std::uint64_t hi = std::min(n_runs, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return matrix;
}

ConditionedResult conditioned_ensemble(const Network& net, const State& x0,
                                       const StopRule& attempt_stop, std::uint64_t n_accepted,
                                       std::uint64_t base_seed,
                                       const HitContinuation& continuation,
                                       std::uint64_t max_attempts, SsaMethod method) {
  ConditionedResult res;
  res.rows.reserve(n_accepted);
  for (std::uint64_t i = 0; i < max_attempts && res.hits < n_accepted; ++i) {
    ++res.attempts;
    Rng rng = Rng::seeded(run_seed(base_seed, i));
    JumpObserver null_obs;
    RunOutcome out = ssa_stream_from(net, 0.0, x0, attempt_stop, rng, null_obs, method);
    if (out.hit) {
      ++res.hits;
      if (continuation)
        res.rows.push_back(continuation(i, out, rng));
      else
        res.rows.emplace_back();
    } else if (out.failed) {
      ++res.failures;
    } else {
      ++res.timeouts;
    }
  }
  return res;
}

// --- Goodness of fit -----------------------------------------------------------

namespace {

// Lower regularized gamma P(a,x) by series.
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized gamma Q(a,x) by Lentz continued fraction.
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw std::invalid_argument("gamma_q: need a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi2_sf(double statistic, double dof) {
  if (dof <= 0.0) return 1.0;
  if (statistic <= 0.0) return 1.0;
  return gamma_q(dof / 2.0, statistic / 2.0);
}

double poisson_pmf(std::int64_t k, double mean) {
  if (k < 0) return 0.0;
  if (mean <= 0.0) return k == 0 ? 1.0 : 0.0;
  const double kk = static_cast<double>(k);
  return std::exp(kk * std::log(mean) - mean - std::lgamma(kk + 1.0));
}

double binomial_pmf(std::int64_t k, std::int64_t n, double p) {
  if (k < 0 || k > n) return 0.0;
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return k == n ? 1.0 : 0.0;
  const double kk = static_cast<double>(k), nn = static_cast<double>(n);
  const double logc =
      std::lgamma(nn + 1.0) - std::lgamma(kk + 1.0) - std::lgamma(nn - kk + 1.0);
  return std::exp(logc + kk * std::log(p) + (nn - kk) * std::log1p(-p));
}

GofResult gof_counts(const std::vector<double>& observed, const std::vector<double>& expected,
                     int extra_constraints, double min_expected) {
  if (observed.size() != expected.size())
    throw std::invalid_argument("gof_counts: length mismatch");
  if (observed.empty()) throw std::invalid_argument("gof_counts: no bins");

  // Merge adjacent bins left to right until each merged bin's expectation
  // reaches min_expected; a light trailing bin folds into its predecessor.
  std::vector<double> obs, exp;
  double co = 0.0, ce = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    co += observed[i];
    ce += expected[i];
    if (ce >= min_expected) {
      obs.push_back(co);
      exp.push_back(ce);
      co = ce = 0.0;
    }
  }
  if (ce > 0.0 || co > 0.0) {
    if (!exp.empty() && ce < min_expected) {
      obs.back() += co;
      exp.back() += ce;
    } else {
      obs.push_back(co);
      exp.push_back(ce);
    }
  }

  GofResult r;
  r.bins = exp.size();
  r.dof = static_cast<int>(exp.size()) - 1 - extra_constraints;
  for (std::size_t i = 0; i < exp.size(); ++i) {
    if (exp[i] <= 0.0) continue;
    const double d = obs[i] - exp[i];
    r.statistic += d * d / exp[i];
  }
  r.p_value = r.dof > 0 ? chi2_sf(r.statistic, r.dof) : 1.0;
  return r;
}

namespace {

// Counts of each value 0..max plus an overflow bin.
std::vector<double> tally(const std::vector<std::int64_t>& samples, std::int64_t max_value) {
  std::vector<double> counts(static_cast<std::size_t>(max_value) + 2, 0.0);
  for (auto s : samples) {
    if (s < 0) throw std::invalid_argument("negative sample in count data");
    const auto idx = std::min<std::int64_t>(s, max_value + 1);
    counts[static_cast<std::size_t>(idx)] += 1.0;
  }
  return counts;
}

}  // namespace

GofResult gof_poisson(const std::vector<std::int64_t>& samples, double mean) {
  if (samples.empty()) throw std::invalid_argument("gof_poisson: no samples");
  std::int64_t max_value = 0;
  for (auto s : samples) max_value = std::max(max_value, s);
  // Cover the law's own bulk too, so a distribution stuck below the mean
  // still pays for the missing tail.
  max_value = std::max<std::int64_t>(max_value, static_cast<std::int64_t>(mean + 6 * std::sqrt(std::max(mean, 1.0))));

  const auto observed = tally(samples, max_value);
  const double n = static_cast<double>(samples.size());
  std::vector<double> expected(observed.size());
  double tail = 1.0;
  for (std::int64_t k = 0; k <= max_value; ++k) {
    const double p = poisson_pmf(k, mean);
    expected[static_cast<std::size_t>(k)] = n * p;
    tail -= p;
  }
  expected.back() = n * std::max(tail, 0.0);
  return gof_counts(observed, expected);
}

GofResult gof_binomial(const std::vector<std::int64_t>& samples, std::int64_t n_trials,
                       double p) {
  if (samples.empty()) throw std::invalid_argument("gof_binomial: no samples");
  for (auto s : samples)
    if (s < 0 || s > n_trials)
      throw std::invalid_argument("gof_binomial: sample outside [0, n]");
  std::vector<double> observed(static_cast<std::size_t>(n_trials) + 1, 0.0);
  for (auto s : samples) observed[static_cast<std::size_t>(s)] += 1.0;
  std::vector<double> expected(observed.size());
  const double n = static_cast<double>(samples.size());
  for (std::int64_t k = 0; k <= n_trials; ++k)
    expected[static_cast<std::size_t>(k)] = n * binomial_pmf(k, n_trials, p);
  return gof_counts(observed, expected);
}

GofResult gof_categorical(const std::vector<std::int64_t>& observed,
                          const std::vector<double>& probabilities) {
  if (observed.size() != probabilities.size())
    throw std::invalid_argument("gof_categorical: length mismatch");
  double n = 0.0;
  for (auto c : observed) n += static_cast<double>(c);
  std::vector<double> obs(observed.size()), exp(observed.size());
  for (std::size_t i = 0; i < observed.size(); ++i) {
    obs[i] = static_cast<double>(observed[i]);
    exp[i] = n * probabilities[i];
  }
  return gof_counts(obs, exp);
}

GofResult chi2_two_sample(const std::vector<std::int64_t>& a,
                          const std::vector<std::int64_t>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("chi2_two_sample: empty sample");
  std::int64_t max_value = 0;
  for (auto s : a) max_value = std::max(max_value, s);
  for (auto s : b) max_value = std::max(max_value, s);
  auto ca = tally(a, max_value);
  auto cb = tally(b, max_value);

  // Merge adjacent bins until each holds at least 5 combined observations.
  std::vector<double> ma, mb;
  double sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    sa += ca[i];
    sb += cb[i];
    if (sa + sb >= 5.0) {
      ma.push_back(sa);
      mb.push_back(sb);
      sa = sb = 0.0;
    }
  }
  if (sa + sb > 0.0) {
    if (!ma.empty()) {
      ma.back() += sa;
      mb.back() += sb;
    } else {
      ma.push_back(sa);
      mb.push_back(sb);
    }
  }

  const double ka = static_cast<double>(a.size()), kb = static_cast<double>(b.size());
  GofResult r;
  r.bins = ma.size();
  r.dof = static_cast<int>(ma.size()) - 1;
  for (std::size_t i = 0; i < ma.size(); ++i) {
    const double tot = ma[i] + mb[i];
    if (tot <= 0.0) continue;
    const double d = std::sqrt(kb / ka) * ma[i] - std::sqrt(ka / kb) * mb[i];
    r.statistic += d * d / tot;
  }
  r.p_value = r.dof > 0 ? chi2_sf(r.statistic, r.dof) : 1.0;
  return r;
}

ZCheck compare_to_oracle(double estimate, double se, double truth, double z_limit) {
  ZCheck c;
  c.estimate = estimate;
  c.truth = truth;
  c.se = se;
  c.z = se > 0.0 ? (estimate - truth) / se
                 : (estimate == truth ? 0.0 : std::numeric_limits<double>::infinity());
  c.ok = std::fabs(c.z) <= z_limit;
  return c;
}

}  // namespace rxscale
