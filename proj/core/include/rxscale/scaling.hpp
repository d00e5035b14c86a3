#pragma once

// Multiscale exponent calculus.
//
// A scaling assignment carries species i at magnitude n0^alpha_i, splits each
// rate constant as kappa_k = lambda_k * n0^beta_k with lambda_k of order one,
// and runs time at n0^gamma.  In the normalized, time-rescaled equations the
// contribution of reaction k to species i then enters at order
//
//   o_ik = gamma + beta_k + sum_j alpha_j nu_jk - alpha_i
//
// where nu_jk are the input multiplicities.  Orders are exact rationals and
// every admissibility decision here is made in exact rational arithmetic.
//
// Order zero means the term moves the normalized species at unit speed on the
// chosen time scale.  Positive order means a fast term; a species whose fast
// production and loss enter at the same top order can still be order one
// because the leading parts cancel (dominant balance).  Negative orders
// freeze out.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rxscale/network.hpp"
#include "rxscale/rational.hpp"

namespace rxscale {

struct ScalingExponents {
  std::vector<Rat> alpha;  // per species
  std::vector<Rat> beta;   // per reaction
  Rat gamma{0};
  Rat n0{10};  // anchor magnitude, > 1

  static ScalingExponents identity(int n_species, int n_reactions, Rat n0 = Rat(10)) {
    ScalingExponents s;
    s.alpha.assign(n_species, Rat(0));
    s.beta.assign(n_reactions, Rat(0));
    s.n0 = n0;
    return s;
  }
};

// lambda = kappa * n0^{-beta}, the order-one part of a split rate constant.
double split_rate_constant(double kappa, const Rat& beta, const Rat& n0);
// Exact variant; empty when n0^{-beta} is irrational or kappa has no exact form.
std::optional<Rat> split_rate_constant_exact(const std::optional<Rat>& kappa, const Rat& beta,
                                             const Rat& n0);

// All lambda_k for a network under a scaling.
std::vector<double> scaled_rate_constants(const Network& net, const ScalingExponents& scaling);
std::vector<std::optional<Rat>> scaled_rate_constants_exact(const Network& net,
                                                            const ScalingExponents& scaling);

// Initial species levels z_i = x_i(0) / n0^alpha_i.
std::vector<double> descaled_initial_state(const Network& net, const ScalingExponents& scaling);

struct TermOrder {
  int species = 0;
  int reaction = 0;
  Rat order{0};      // o_ik as above
  Rat jump_size{0};  // -alpha_i: each firing moves the normalized species by n0^{-alpha_i}
};

// One entry per (species, reaction) pair with nonzero net stoichiometry.
std::vector<TermOrder> term_orders(const Network& net, const ScalingExponents& scaling);

// --- Viral-template recognition ----------------------------------------------
//
// The three-species autocatalytic template
//
//   T -> T + G     (template copies a genome)
//   G -> T         (genome matures into a template)
//   T -> T + S     (template produces structural material)
//   T -> 0         (template death)
//   S -> 0         (structural decay)
//   G + S -> 0     (pairing removes both; any untracked product is ignored)
//
// gets a richer balance report with one named condition per structural
// requirement.  Species that never appear as reaction inputs are treated as
// untracked sinks when matching.

struct ViralSchema {
  int s_template = -1, s_genome = -1, s_struct = -1;
  int r_genome_prod = -1;     // T -> T + G
  int r_template_conv = -1;   // G -> T
  int r_struct_prod = -1;     // T -> T + S
  int r_template_death = -1;  // T -> 0
  int r_struct_death = -1;    // S -> 0
  int r_pair_loss = -1;       // G + S -> 0
};

std::optional<ViralSchema> match_viral_schema(const Network& net);

// --- Balance checking ---------------------------------------------------------

struct BalanceCondition {
  std::string name;
  std::string detail;  // the instantiated relation, numbers filled in
  bool satisfied = true;
};

struct BalanceReport {
  bool viral_schema = false;
  std::vector<TermOrder> orders;
  std::vector<BalanceCondition> conditions;
  std::vector<std::string> violated;  // names of failed conditions
  bool ordering_ok = true;            // rate-ordering chain (viral schema only)

  // Species whose top order is positive without a loss/production pair at
  // that order.  Informational on generic networks: a collapsing species is
  // legitimate there (it equilibrates below its nominal magnitude).
  std::vector<int> fast_unbalanced;

  bool admissible() const { return violated.empty(); }
};

// Evaluates the scaling against the network.  Viral-schema networks get the
// named template conditions; any other network gets the generic report:
// per-reaction order-one bands on lambda_k plus the requirement that some
// species actually evolves at order zero on the chosen time scale.
// `band_slack` is the multiplicative slack C of the lambda band [1/C, C].
BalanceReport check_balance(const Network& net, const ScalingExponents& scaling,
                            double band_slack = 50.0);

// --- Case classification ------------------------------------------------------

enum class LimitCase { FullODE, AveragedODE, LogisticSlow, Unclassified };

const char* to_string(LimitCase c);

// Viral-schema networks classify by the template/genome magnitudes and the
// structural decay exponent: equal magnitudes give an ODE limit (averaged
// when structural decay is fast), a heavier genome gives the slow logistic
// case.  Non-schema networks are Unclassified.
LimitCase classify_case(const Network& net, const ScalingExponents& scaling);

// --- Proposal search ----------------------------------------------------------

struct ProposeOptions {
  double band_slack = 50.0;  // lambda_k and magnitude bands: within factor C
  Rat gamma_min{0};
  Rat gamma_max{3};
  Rat exponent_cap{3};  // |alpha_i|, |beta_k| <= cap (alpha_i >= 0 always)
  std::size_t max_results = 0;              // 0 = return all
  double max_candidates = 2e7;              // generic-path search budget
  std::vector<std::vector<int>> equal_alpha;  // species groups sharing one alpha
};

// Enumerates admissible assignments with exponent denominators <= max_denominator.
//
// magnitudes[i] is the abundance scale of species i in the regime of
// interest; it anchors the alpha_i search band the same way kappa_k anchors
// beta_k.  Pass an empty vector to search the full exponent range instead
// (species that start at zero often reach their working magnitude later, so
// the initial state is deliberately not used as an anchor).
//
// Viral-schema networks are solved structurally: the genome equation pins
// every term to order zero, template and structural balances fix the
// dependent exponents, and only the four free exponents are searched.  Other
// networks search the banded grid directly and keep assignments whose rates
// sit in the order-one band with at least one species evolving at order
// zero.  Results are sorted by (gamma, sum |beta|, distance of alpha from
// the magnitude anchors) and every one of them passes check_balance.
//
// An empty result means no admissible assignment exists in the search space;
// a search space larger than max_candidates throws.
std::vector<ScalingExponents> propose_exponents(const Network& net,
                                                const std::vector<double>& magnitudes, Rat n0,
                                                long max_denominator = 6,
                                                const ProposeOptions& opts = {});

// Largest rate-constant magnitude, the default anchor when none is supplied.
Rat default_n0(const Network& net);

// --- Scaling files --------------------------------------------------------------
//
//   n0 = 1000
//   gamma = 2/3
//   alpha T = 0
//   beta b = -2/3
//
// Exponent values are exact rationals ("2/3", "-1", "0.25").  Every species
// needs an alpha line and every reaction a beta line; gamma defaults to 0.
// '#' starts a comment.

ScalingExponents parse_scaling(std::string_view text, const Network& net);
ScalingExponents load_scaling(const std::string& path, const Network& net);
std::string render_scaling(const Network& net, const ScalingExponents& scaling);

// Builds a scaling from the alpha/beta/n0 annotations carried by the network
// file, when all of them are present.
std::optional<ScalingExponents> scaling_from_hints(const Network& net, Rat gamma = Rat(0));

}  // namespace rxscale
