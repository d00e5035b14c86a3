#include "rxscale/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "rxscale/branching.hpp"
#include "rxscale/exemplars.hpp"
#include "rxscale/limits.hpp"
#include "rxscale/network.hpp"
#include "rxscale/rng.hpp"
#include "rxscale/scaling.hpp"
#include "rxscale/simulate.hpp"
#include "rxscale/stats.hpp"

namespace rxscale {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

class CheckBuilder {
 public:
  explicit CheckBuilder(std::string name) : start_(Clock::now()) {
    result_.name = std::move(name);
    result_.passed = true;
  }

  void note(const std::string& text) { append(text); }

  void require(bool ok, const std::string& text) {
    append(ok ? text : text + " [FAIL]");
    result_.passed = result_.passed && ok;
  }

  void require_z(const ZCheck& z, const std::string& label) {
    require(z.ok,
            label + "=" + fmt(z.estimate) + " vs " + fmt(z.truth) + " (z=" + fmt(z.z) + ")");
  }

  void require_p(const GofResult& g, const std::string& label, double p_min) {
    require(g.p_value > p_min, label + " p=" + fmt(g.p_value) + " (chi2=" + fmt(g.statistic) +
                                   ", " + std::to_string(g.dof) + " df, need p>" + fmt(p_min) +
                                   ")");
  }

  CheckResult done() {
    result_.seconds = std::chrono::duration<double>(Clock::now() - start_).count();
    return result_;
  }

 private:
  void append(const std::string& text) {
    if (!result_.detail.empty()) result_.detail += "; ";
    result_.detail += text;
  }

  CheckResult result_;
  Clock::time_point start_;
};

std::uint64_t full_or(const VerifyOptions& opts, std::uint64_t full, std::uint64_t fast) {
  return opts.level == VerifyLevel::Full ? full : fast;
}

// Every check draws from its own seed stream so reordering or skipping
// checks cannot shift another check's sample.
std::uint64_t check_seed(const VerifyOptions& opts, int slot) {
  return run_seed(opts.seed, 0xC0 + slot);
}

EnsembleOptions ensemble_opts(const VerifyOptions& opts) {
  EnsembleOptions eo;
  eo.threads = opts.threads;
  return eo;
}

std::vector<std::int64_t> as_counts(const std::vector<double>& xs) {
  std::vector<std::int64_t> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = std::llround(xs[i]);
  return out;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::size_t mid = xs.size() / 2;
  std::nth_element(xs.begin(), xs.begin() + mid, xs.end());
  double hi = xs[mid];
  if (xs.size() % 2 == 1) return hi;
  std::nth_element(xs.begin(), xs.begin() + mid - 1, xs.begin() + mid);
  return 0.5 * (hi + xs[mid - 1]);
}

// Attempt rule for viral first-passage ensembles: stop on the genome count
// crossing the establishment level, abandon once template and genome are both
// gone.
StopRule genome_crossing_attempt(const Network& net, const EstablishmentSpec& spec,
                                 double horizon) {
  StopRule stop;
  stop.horizon = horizon;
  stop.predicate = genome_crossing(spec, net.species_index("G"));
  stop.fail_predicate = lineage_dead(net.species_index("T"), net.species_index("G"));
  return stop;
}

}  // namespace

CheckResult check_crystallization_binomial_law(const VerifyOptions& opts) {
  CheckBuilder c("binomial-catalyst-law");
  Exemplar ex = exemplar("crystallization");
  const double n = 1e6;
  const std::uint64_t runs = full_or(opts, 10000, 1500);
  const int cells = opts.level == VerifyLevel::Full ? 500 : 200;
  std::vector<double> grid(cells + 1);
  for (int j = 0; j <= cells; ++j) grid[j] = 10.0 * j / cells;

  const int monomer = ex.network.species_index("A");
  const int catalyst = ex.network.species_index("C");
  auto summarize = [&](const RunOutcome&, const std::vector<State>& states) {
    double dev = 0.0;
    for (int j = 0; j <= cells; ++j) {
      double ref = 1.0 / (1.0 + 0.1 * grid[j]);
      dev = std::max(dev, std::fabs(static_cast<double>(states[j][monomer]) / n - ref));
    }
    return std::vector<double>{static_cast<double>(states[cells][catalyst]), dev};
  };
  auto rows = run_ensemble(ex.network, ex.network.initial_state(), runs, check_seed(opts, 1),
                           grid, summarize, ensemble_opts(opts));

  ColumnStats cs = column_stats(rows, 0);
  ColumnStats dev = column_stats(rows, 1);
  c.note("runs=" + std::to_string(runs));
  c.require_p(gof_binomial(as_counts(column_values(rows, 0)), 10, 0.5), "binomial(10,1/2) fit",
              1e-3);
  c.require_z(compare_to_oracle(cs.mean, cs.se_mean, oracle("crystallization", "E_X_C", 10.0)),
              "mean");
  c.require_z(
      compare_to_oracle(cs.variance, cs.se_variance, oracle("crystallization", "Var_X_C", 10.0)),
      "variance");
  c.require(dev.max <= 0.01, "worst monomer path deviation=" + fmt(dev.max) + " (tol 0.01)");
  return c.done();
}

CheckResult check_enzyme_abundant_product_curve(const VerifyOptions& opts) {
  CheckBuilder c("product-mean-curve");
  Exemplar ex = exemplar("enzyme-1");
  const std::uint64_t runs = full_or(opts, 1000, 300);
  const std::vector<double> grid = {10.0, 20.0, 30.0};
  const int product = ex.network.species_index("P");
  auto summarize = [&](const RunOutcome&, const std::vector<State>& states) {
    std::vector<double> row(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) row[j] = static_cast<double>(states[j][product]);
    return row;
  };
  auto rows = run_ensemble(ex.network, ex.network.initial_state(), runs, check_seed(opts, 2),
                           grid, summarize, ensemble_opts(opts));
  c.note("runs=" + std::to_string(runs));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    ColumnStats cs = column_stats(rows, j);
    double truth = oracle("enzyme-1", "E_X_P", grid[j]);
    c.require(std::fabs(cs.mean - truth) <= 0.05 * truth,
              "mean X_P(" + fmt(grid[j]) + ")=" + fmt(cs.mean) + " vs " + fmt(truth) +
                  " (tol 5%)");
  }
  return c.done();
}

CheckResult check_enzyme_scarce_poisson_products(const VerifyOptions& opts) {
  CheckBuilder c("poisson-product-counts");
  Exemplar ex = exemplar("enzyme-2");
  const std::uint64_t runs = full_or(opts, 2000, 600);
  const int product = ex.network.species_index("P");
  auto summarize = [&](const RunOutcome&, const std::vector<State>& states) {
    return std::vector<double>{static_cast<double>(states[0][product])};
  };
  auto rows = run_ensemble(ex.network, ex.network.initial_state(), runs, check_seed(opts, 3),
                           {5.0}, summarize, ensemble_opts(opts));
  ColumnStats cs = column_stats(rows, 0);
  double truth = oracle("enzyme-2", "E_X_P", 5.0);
  c.note("runs=" + std::to_string(runs));
  c.require_z(compare_to_oracle(cs.mean, cs.se_mean, truth), "mean X_P(5)");
  c.require_p(gof_poisson(as_counts(column_values(rows, 0)), truth), "poisson(5) fit", 1e-3);
  return c.done();
}

CheckResult check_isom_slow_poisson_counts(const VerifyOptions& opts) {
  CheckBuilder c("slow-poisson-counts");
  Exemplar ex = exemplar("isom-1");
  const std::uint64_t runs = full_or(opts, 500, 200);
  const int product = ex.network.species_index("X3");
  auto summarize = [&](const RunOutcome&, const std::vector<State>& states) {
    return std::vector<double>{static_cast<double>(states[0][product])};
  };
  auto rows = run_ensemble(ex.network, ex.network.initial_state(), runs, check_seed(opts, 4),
                           {100.0}, summarize, ensemble_opts(opts));
  ColumnStats cs = column_stats(rows, 0);
  double truth = oracle("isom-1", "E_X_3_slow", 1.0);
  c.note("runs=" + std::to_string(runs));
  c.require_z(compare_to_oracle(cs.mean, cs.se_mean, truth), "mean X_3");
  c.require_p(gof_poisson(as_counts(column_values(rows, 0)), truth), "poisson(3) fit", 1e-3);
  return c.done();
}

CheckResult check_isom_intermediate_averaging(const VerifyOptions& opts) {
  CheckBuilder c("intermediate-averaging");
  Exemplar ex = exemplar("isom-2");
  const std::uint64_t runs = full_or(opts, 500, 200);
  const int product = ex.network.species_index("X3");
  const int mid = ex.network.species_index("X2");

  auto take_product = [&](const RunOutcome&, const std::vector<State>& states) {
    return std::vector<double>{static_cast<double>(states[0][product])};
  };
  auto rows = run_ensemble(ex.network, ex.network.initial_state(), runs, check_seed(opts, 5),
                           {10.0}, take_product, ensemble_opts(opts));
  ColumnStats cs = column_stats(rows, 0);
  c.note("runs=" + std::to_string(runs));
  c.require_z(compare_to_oracle(cs.mean, cs.se_mean, oracle("isom-2", "E_X_3", 10.0)),
              "mean X_3(10)");
  c.require_z(compare_to_oracle(cs.variance, cs.se_variance, oracle("isom-2", "Var_X_3", 10.0)),
              "var X_3(10)");

  Network small = net_at_scale(ex.network, ex.scaling, 100);
  double horizon = 0.2 * rat_pow_d(Rat(100), ex.scalings.at("V").gamma);
  auto take_mid = [&](const RunOutcome&, const std::vector<State>& states) {
    return std::vector<double>{static_cast<double>(states[0][mid])};
  };
  auto mid_rows = run_ensemble(small, small.initial_state(), runs, check_seed(opts, 6),
                               {horizon}, take_mid, ensemble_opts(opts));
  double mid_mean = oracle("isom-2", "E_X_2_v", 0.2);
  c.require_p(gof_poisson(as_counts(column_values(mid_rows, 0)), mid_mean),
              "poisson(" + fmt(mid_mean) + ") intermediate fit at n=100", 1e-3);
  return c.done();
}

CheckResult check_viral_establishment_probability(const VerifyOptions& opts) {
  CheckBuilder c("establishment-probability");
  Exemplar ex = exemplar("viral");
  const std::uint64_t attempts = full_or(opts, 2000, 600);
  EstablishmentSpec spec(1000.0, 1.0);

  StopRule stop;
  stop.horizon = 2000.0;
  stop.predicate = weighted_crossing(spec, ex.network.species_index("T"),
                                     ex.network.species_index("G"));
  stop.fail_predicate = lineage_dead(ex.network.species_index("T"),
                                     ex.network.species_index("G"));
  auto res = conditioned_ensemble(ex.network, ex.network.initial_state(), stop, attempts,
                                  check_seed(opts, 7), HitContinuation{}, attempts);
  double fraction = res.hit_fraction();
  c.note("attempts=" + std::to_string(res.attempts));
  c.require(res.timeouts == 0, "unresolved attempts=" + std::to_string(res.timeouts));
  c.require(std::fabs(fraction - 0.75) <= 0.04,
            "establishment fraction=" + fmt(fraction) + " (window 0.75+-0.04)");

  double q = extinction_probability(OffspringLaw::shifted_geometric());
  c.require(std::fabs(q - 0.25) <= 1e-12, "fixed-point extinction=" + fmt(q) + " (tol 1e-12)");
  WalkEstimate walk = extinction_by_walk(OffspringLaw::shifted_geometric(),
                                         static_cast<std::int64_t>(full_or(opts, 200000, 50000)),
                                         check_seed(opts, 8));
  c.require(std::fabs(walk.estimate - 0.25) <= 2.0 * walk.se,
            "walk extinction=" + fmt(walk.estimate) + "+-" + fmt(walk.se) + " (tol 2 se)");
  return c.done();
}

CheckResult check_viral_logistic_mean_path(const VerifyOptions& opts) {
  CheckBuilder c("logistic-mean-path");
  Exemplar ex = exemplar("viral");
  const std::uint64_t runs = full_or(opts, 100, 40);
  const double tscale = rat_pow_d(Rat(1000), ex.scaling.gamma);
  const double gscale = rat_pow_d(Rat(1000), ex.scaling.alpha[ex.network.species_index("G")]);
  const int cells = 100;
  const int genome = ex.network.species_index("G");

  EstablishmentSpec spec(1000.0, 1.0);
  StopRule stop = genome_crossing_attempt(ex.network, spec, 50.0 * tscale);
  auto continuation = [&](std::uint64_t, const RunOutcome& at_hit, Rng& rng) {
    std::vector<double> grid(cells + 1);
    for (int j = 0; j <= cells; ++j)
      grid[j] = at_hit.final_time + tscale * static_cast<double>(j) / cells;
    GridSampler sampler(grid);
    RunOutcome out = ssa_stream_from(ex.network, at_hit.final_time, at_hit.final_state,
                                     StopRule::at_time(grid.back()), rng, sampler);
    sampler.finish(out.final_time, out.final_state);
    std::vector<double> row;
    row.reserve(cells + 2);
    row.push_back(at_hit.final_time);
    for (const State& s : sampler.values())
      row.push_back(static_cast<double>(s[genome]) / gscale);
    return row;
  };
  auto res = conditioned_ensemble(ex.network, ex.network.initial_state(), stop, runs,
                                  check_seed(opts, 9), continuation, 20 * runs);
  c.note("paths=" + std::to_string(res.hits) + " of " + std::to_string(res.attempts) +
         " attempts");
  c.require(res.hits == runs, "conditioned sample complete");

  double sup = 0.0, sup_t = 0.0;
  for (int j = 0; j <= cells; ++j) {
    double mean = column_stats(res.rows, 1 + j).mean;
    double ref = logistic_solution(1.0, static_cast<double>(j) / cells);
    if (std::fabs(mean - ref) > sup) {
      sup = std::fabs(mean - ref);
      sup_t = static_cast<double>(j) / cells;
    }
  }
  c.require(sup <= 0.15,
            "sup-norm of mean genome path vs logistic=" + fmt(sup) + " at t=" + fmt(sup_t) +
                " (tol 0.15)");
  return c.done();
}

CheckResult check_viral_fast_pair_law(const VerifyOptions& opts) {
  CheckBuilder c("fast-pair-moments");
  Exemplar ex = exemplar("viral");
  const std::uint64_t runs = full_or(opts, 250, 150);
  const double tscale = rat_pow_d(Rat(1000), ex.scaling.gamma);
  const int t_i = ex.network.species_index("T");
  const int g_i = ex.network.species_index("G");
  const int s_i = ex.network.species_index("S");

  EstablishmentSpec spec(1000.0, 1.0);
  StopRule stop = genome_crossing_attempt(ex.network, spec, 50.0 * tscale);
  auto continuation = [&](std::uint64_t, const RunOutcome& at_hit, Rng& rng) {
    JumpObserver null_obs;
    RunOutcome out = ssa_stream_from(ex.network, at_hit.final_time, at_hit.final_state,
                                     StopRule::at_time(at_hit.final_time + tscale), rng,
                                     null_obs);
    return std::vector<double>{static_cast<double>(out.final_state[t_i]),
                               static_cast<double>(out.final_state[g_i]),
                               static_cast<double>(out.final_state[s_i])};
  };
  auto res = conditioned_ensemble(ex.network, ex.network.initial_state(), stop, runs,
                                  check_seed(opts, 10), continuation, 20 * runs);
  c.require(res.hits == runs, "samples=" + std::to_string(res.hits));

  std::vector<double> templates = column_values(res.rows, 0);
  std::vector<double> genomes = column_values(res.rows, 1);
  std::vector<double> structs = column_values(res.rows, 2);
  for (double& s : structs) s /= 1000.0;

  double v = column_stats(res.rows, 1).mean / 100.0;
  c.note("genome level v=" + fmt(v) + " (logistic law " + fmt(logistic_solution(1.0, 1.0)) +
         ")");
  c.require_p(gof_poisson(as_counts(templates), oracle("viral", "fast_E_Z", v)),
              "template poisson fit", 1e-3);

  Accumulator va;
  for (double s : structs) va.add(s);
  c.require_z(compare_to_oracle(va.mean(), va.se_mean(), oracle("viral", "fast_E_Y", v)),
              "mean structure level");
  double var_truth = oracle("viral", "fast_Var_Y", v);
  c.require(std::fabs(va.variance() - var_truth) <= 0.25 * var_truth,
            "var structure level=" + fmt(va.variance()) + " vs " + fmt(var_truth) + " (tol 25%)");

  double t_mean = column_stats(res.rows, 0).mean;
  double cov = 0.0;
  for (std::size_t i = 0; i < templates.size(); ++i)
    cov += (templates[i] - t_mean) * (structs[i] - va.mean());
  cov /= static_cast<double>(templates.size() - 1);
  double cov_truth = oracle("viral", "fast_Cov_ZY", v);
  c.require(std::fabs(cov - cov_truth) <= 0.35 * cov_truth,
            "template/structure cov=" + fmt(cov) + " vs " + fmt(cov_truth) + " (tol 35%)");
  return c.done();
}

CheckResult check_moment_engine_polynomials(const VerifyOptions&) {
  CheckBuilder c("moment-polynomials");
  auto eq = [](const std::vector<Rat>& got, const std::vector<Rat>& want) {
    return got == want;
  };
  c.require(eq(averaged_moment_poly(1, 0), {Rat(0), Rat(10)}), "E[Z] = 10 v");
  c.require(eq(averaged_moment_poly(0, 1), {Rat(0), Rat(5)}), "E[Y] = 5 v");
  c.require(eq(averaged_moment_poly(1, 1), {Rat(0), Rat(40, 9), Rat(50)}),
            "E[ZY] = 40/9 v + 50 v^2");
  auto zy = averaged_moment_poly(1, 1);
  auto y2 = averaged_moment_poly(0, 2);
  bool half = y2.size() == zy.size();
  if (half)
    for (std::size_t i = 0; i < zy.size(); ++i) half = half && Rat(2) * y2[i] == zy[i];
  c.require(half, "E[Y^2] = E[ZY]/2");
  c.note("exact rational comparison, zero tolerance");
  return c.done();
}

CheckResult check_scaling_analyzer_reduction(const VerifyOptions&) {
  CheckBuilder c("scaling-reduction");
  Exemplar ex = exemplar("viral");
  auto proposals = propose_exponents(ex.network, {}, Rat(1000));
  bool found = false;
  for (const auto& cand : proposals)
    if (cand.alpha == ex.scaling.alpha && cand.beta == ex.scaling.beta &&
        cand.gamma == ex.scaling.gamma)
      found = true;
  c.note("proposals=" + std::to_string(proposals.size()));
  c.require(found, "reference assignment proposed");
  c.require(classify_case(ex.network, ex.scaling) == LimitCase::LogisticSlow,
            "reference assignment classifies as slow-genome logistic");

  const Rat growth_want(3, 40), sat_want(3, 8000);
  const int genome = ex.network.species_index("G");
  int slow = 0, exact_pairs = 0;
  bool exact_ok = true, law_present = true;
  double worst = 0.0;
  for (const auto& cand : proposals) {
    if (classify_case(ex.network, cand) != LimitCase::LogisticSlow) continue;
    ++slow;
    ReducedModel red = build_reduced(ex.network, cand);
    if (!red.logistic) {
      law_present = false;
      continue;
    }
    double g = red.logistic->growth * rat_pow_d(Rat(1000), -cand.gamma);
    double s = red.logistic->saturation * rat_pow_d(Rat(1000), -(cand.gamma + cand.alpha[genome]));
    worst = std::max({worst, std::fabs(g / 0.075 - 1.0), std::fabs(s / 3.75e-4 - 1.0)});
    if (red.logistic->growth_descaled && red.logistic->saturation_descaled) {
      ++exact_pairs;
      exact_ok = exact_ok && *red.logistic->growth_descaled == growth_want &&
                 *red.logistic->saturation_descaled == sat_want;
    }
  }
  c.require(slow > 0 && law_present,
            "slow-genome assignments found=" + std::to_string(slow) + ", all carry a logistic law");
  c.require(worst <= 1e-9, "molecule-unit coefficients 0.075 and 3.75e-4 invariant across all of "
                           "them (worst rel dev=" + fmt(worst) + ", tol 1e-9)");
  c.require(exact_pairs > 0 && exact_ok,
            "exact rational pairs equal 3/40 and 3/8000 (count=" + std::to_string(exact_pairs) +
                ")");
  return c.done();
}

CheckResult check_establishment_time_trend(const VerifyOptions& opts) {
  CheckBuilder c("establishment-time-trend");
  Exemplar ex = exemplar("viral");
  const double eps = 1.0;
  const double target = 4.0 / 45.0;
  struct Point {
    double n;
    std::uint64_t runs;
  };
  const Point points[2] = {{1e3, full_or(opts, 100, 40)}, {1e4, full_or(opts, 60, 25)}};

  double ratio[2] = {0.0, 0.0};
  bool complete = true;
  for (int p = 0; p < 2; ++p) {
    double n = points[p].n;
    Network net = net_at_scale(ex.network, ex.scaling, static_cast<std::int64_t>(n));
    EstablishmentSpec spec(n, eps);
    StopRule stop = genome_crossing_attempt(net, spec, 50.0 * std::pow(n, 2.0 / 3.0));
    auto continuation = [](std::uint64_t, const RunOutcome& at_hit, Rng&) {
      return std::vector<double>{at_hit.final_time};
    };
    auto res = conditioned_ensemble(net, net.initial_state(), stop, points[p].runs,
                                    check_seed(opts, 11 + p), continuation, 40 * points[p].runs);
    complete = complete && res.hits == points[p].runs;
    ratio[p] = median(column_values(res.rows, 0)) / (std::pow(n, 2.0 / 3.0) * std::log(n));
    c.require(ratio[p] > 0.02 && ratio[p] < 0.25,
              "median crossing ratio at n=" + fmt(n) + " is " + fmt(ratio[p]) +
                  " (window 0.02..0.25)");
  }
  c.require(complete, "conditioned samples complete");
  c.require(std::fabs(ratio[1] - target) < std::fabs(ratio[0] - target),
            "ratio moves toward 4/45=" + fmt(target) + " as n grows");
  return c.done();
}

CheckResult check_branching_eigen_identities(const VerifyOptions&) {
  CheckBuilder c("eigen-identities");
  bool resid_ok = true;
  double worst = 0.0;
  for (double n : {1e2, 1e3, 1e4, 1e6}) {
    double l = growth_rate(n), r = rho(n);
    double res1 = std::fabs((1.0 - 0.25 * r) - l * r);
    double res2 = std::fabs(2.5 * (r - 1.0) * std::pow(n, -2.0 / 3.0) - l);
    worst = std::max({worst, res1, res2});
    resid_ok = resid_ok && res1 <= 1e-10 && res2 <= 1e-10;
  }
  c.require(resid_ok, "eigen residuals at n in {1e2,1e3,1e4,1e6}: worst=" + fmt(worst) +
                          " (tol 1e-10)");
  double scaled_growth = std::pow(1e6, 2.0 / 3.0) * growth_rate(1e6);
  c.require(std::fabs(scaled_growth - 7.5) <= 0.05 * 7.5,
            "n^(2/3) growth at n=1e6 is " + fmt(scaled_growth) + " vs 7.5 (tol 5%)");
  double r6 = rho(1e6);
  c.require(std::fabs(r6 - 4.0) <= 0.02 * 4.0, "rho at n=1e6 is " + fmt(r6) + " vs 4 (tol 2%)");
  return c.done();
}

CheckResult check_diffusion_matches_fluid(const VerifyOptions& opts) {
  CheckBuilder c("diffusion-vs-fluid");
  Exemplar ex = exemplar("isom-1");
  const double n = 1000.0;
  const std::uint64_t paths = full_or(opts, 500, 200);

  ODEModel fluid = fluid_limit(ex.network);
  auto z0 = descaled_initial_state(ex.network, ex.scaling);
  std::vector<double> fluid_init;
  int fluid_coord = -1;
  for (std::size_t k = 0; k < fluid.species.size(); ++k) {
    fluid_init.push_back(z0[fluid.species[k]]);
    if (fluid.species[k] == ex.network.species_index("X1")) fluid_coord = static_cast<int>(k);
  }
  OdePath fp = integrate_ode(fluid, fluid_init, 1.0, 1e-3, 2);
  double ref_half = fp.values[1][fluid_coord];
  double ref_one = fp.values[2][fluid_coord];

  SDEModel sde = diffusion_approx(ex.network, n);
  std::vector<double> em_init(ex.network.n_species());
  for (int i = 0; i < ex.network.n_species(); ++i)
    em_init[i] = static_cast<double>(ex.network.species()[i].init) / n;
  Accumulator half, one;
  for (std::uint64_t i = 0; i < paths; ++i) {
    OdePath p = simulate_em(sde, em_init, 1.0, 1e-3, run_seed(check_seed(opts, 13), i), 2);
    half.add(p.values[1][0]);
    one.add(p.values[2][0]);
  }
  c.note("paths=" + std::to_string(paths));
  c.require_z(compare_to_oracle(half.mean(), half.se_mean(), ref_half), "mean Z_1(0.5)");
  c.require_z(compare_to_oracle(one.mean(), one.se_mean(), ref_one), "mean Z_1(1)");

  const int x1 = ex.network.species_index("X1");
  auto summarize = [&](const RunOutcome&, const std::vector<State>& states) {
    return std::vector<double>{static_cast<double>(states[0][x1]) / n};
  };
  auto rows = run_ensemble(ex.network, ex.network.initial_state(), paths, check_seed(opts, 14),
                           {1.0}, summarize, ensemble_opts(opts));
  double ssa_var = column_stats(rows, 0).variance;
  double ratio = one.variance() / ssa_var;
  c.require(ratio >= 1.0 / 3.0 && ratio <= 3.0,
            "var Z_1(1): em=" + fmt(one.variance()) + " ssa=" + fmt(ssa_var) + " ratio=" +
                fmt(ratio) + " (window 1/3..3)");
  return c.done();
}

std::vector<CheckResult> verify_exemplar(const std::string& exemplar_name,
                                         const VerifyOptions& opts) {
  exemplar(exemplar_name);  // validates the name

  std::vector<CheckResult> out;
  if (exemplar_name == "crystallization") {
    out.push_back(check_crystallization_binomial_law(opts));
  } else if (exemplar_name == "enzyme-1") {
    out.push_back(check_enzyme_abundant_product_curve(opts));
  } else if (exemplar_name == "enzyme-2") {
    out.push_back(check_enzyme_scarce_poisson_products(opts));
  } else if (exemplar_name == "isom-1") {
    out.push_back(check_isom_slow_poisson_counts(opts));
    out.push_back(check_diffusion_matches_fluid(opts));
  } else if (exemplar_name == "isom-2") {
    out.push_back(check_isom_intermediate_averaging(opts));
  } else if (exemplar_name == "viral") {
    out.push_back(check_viral_establishment_probability(opts));
    out.push_back(check_viral_logistic_mean_path(opts));
    out.push_back(check_viral_fast_pair_law(opts));
    out.push_back(check_moment_engine_polynomials(opts));
    out.push_back(check_scaling_analyzer_reduction(opts));
    out.push_back(check_establishment_time_trend(opts));
    out.push_back(check_branching_eigen_identities(opts));
  }
  return out;
}

}  // namespace rxscale
