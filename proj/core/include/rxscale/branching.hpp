#pragma once

// Branching-process analysis of the template model's early phase: the
// offspring law of a template lineage, its extinction probability, the
// two-type growth rate and eigenvector weight, and the predicted
// establishment times.

#include <array>
#include <cstdint>
#include <functional>

#include "rxscale/network.hpp"

namespace rxscale {

// --- Offspring law -------------------------------------------------------------

struct OffspringLaw {
  // P{xi = k} for k >= 0. Must sum to 1; sums are tail-checked to 1e-12.
  std::function<double(int)> probabilities;
  double mean = 0;

  // The template-model default: a template produces a shifted-geometric
  // number of genomes, P{xi = k} = (1/5)(4/5)^k, with mean 4.
  static OffspringLaw shifted_geometric();
};

// Probability generating function sum(P{xi=k} s^k). Throws
// std::invalid_argument outside 0 <= s <= 1 and std::runtime_error when the
// law's probabilities fail to accumulate to 1 within the tail tolerance.
double pgf_eval(const OffspringLaw& law, double s);

// Smallest fixed point of s = pgf(s): iteration from 0 to absolute tolerance
// 1e-12. Equals 1 for laws with mean <= 1.
double extinction_probability(const OffspringLaw& law);

// Brute-force check of the same quantity: the lineage dies out exactly when
// the random walk S_j = 1 + sum_{i<=j}(xi_i - 1) hits zero. Walks still alive
// at max_steps count as surviving, which biases the estimate down by less
// than 1e-4 for the default law.
struct WalkEstimate {
  double estimate = 0;
  double se = 0;
  std::int64_t walks = 0;
};
WalkEstimate extinction_by_walk(const OffspringLaw& law, std::int64_t n_walks, std::uint64_t seed,
                                int max_steps = 10000);

// --- Two-type mean dynamics -----------------------------------------------------

// Template/genome pair at scale n: templates die at `death`, convert from
// genomes at conv * n^{-2/3} each, and produce genomes at `birth`.
struct TwoTypeRates {
  double n = 1;
  double death = 0.25;
  double conv = 2.5;
  double birth = 1.0;

  // Mean dynamics matrix: row i gives d/dt of type i.
  std::array<std::array<double, 2>, 2> q_matrix() const;

  // Largest eigenvalue of q_matrix, always positive here (supercritical).
  double growth_rate() const;
  // Left eigenvector weight rho with the genome component normalized to 1:
  // conv (rho - 1) n^{-2/3} = growth_rate.
  double rho() const;
};

// Canonical template-model values at scale n.
double growth_rate(double n);
double rho(double n);

// --- Establishment --------------------------------------------------------------

// Crossing of R = rho X_template + X_genome above eps * n^{2/3}.
struct EstablishmentSpec {
  double n = 1;
  double eps = 1;
  double rho = 0;        // weight on the template count
  double threshold = 0;  // eps * n^{2/3}

  EstablishmentSpec() = default;
  EstablishmentSpec(double n_, double eps_);
};

// Stop predicates over the full jump process. The weighted form matches the
// analyzed crossing; the genome-only form is the cruder alternative.
std::function<bool(double, const State&)> weighted_crossing(const EstablishmentSpec& spec,
                                                            int species_template,
                                                            int species_genome);
std::function<bool(double, const State&)> genome_crossing(const EstablishmentSpec& spec,
                                                          int species_genome);
// Both counts zero: the lineage is extinct and can never establish.
std::function<bool(double, const State&)> lineage_dead(int species_template, int species_genome);

// Leading-order establishment time (4/45) n^{2/3} log n; the level eps only
// enters at lower order. Requires n > 1 and 0 < eps < 2.
double predict_establishment_time(double n, double eps);

// Lower-edge prediction of the time between crossing eps1 and eps2:
// (2/15) log(eps2/eps1) n^{2/3}. Requires 0 < eps1 <= eps2 < 2.
double predict_level_crossing_gap(double n, double eps1, double eps2);

}  // namespace rxscale
