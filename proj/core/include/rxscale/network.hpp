#pragma once

// Reaction network model: species, reactions with integer stoichiometry,
// stochastic mass-action propensities, and the text format for loading and
// saving networks.
//
// Propensities use the subset-count convention: a reaction with rate
// constant kappa and input complex {nu_i} fires at rate
//
//     kappa * prod_i C(x_i, nu_i)
//
// i.e. kappa times the number of ways to pick the required molecules.
// Classical concentration-style constants convert via volume_form_kappa.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rxscale/rational.hpp"

namespace rxscale {

using State = std::vector<std::int64_t>;

// Maximum multiplicity of one species in one complex.  Anything larger is
// almost certainly a typo, and the falling-factorial propensity would be
// numerically useless anyway.
inline constexpr int kMaxMultiplicity = 8;

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& what_)
      : std::runtime_error("line " + std::to_string(line_) + ": " + what_), line(line_) {}
};

struct Term {
  int species = -1;  // index into Network::species()
  int mult = 1;
};

struct Species {
  std::string name;
  std::int64_t init = 0;
  std::optional<Rat> alpha;  // abundance exponent hint, if annotated
};

struct Reaction {
  std::string name;
  std::vector<Term> inputs;   // consumed complex; empty = source reaction
  std::vector<Term> outputs;  // produced complex; empty = untracked products
  double kappa = 0.0;         // subset-count rate constant
  std::optional<Rat> kappa_exact;  // exact value when known (decimal literals)
  std::optional<Rat> beta;         // rate exponent hint, if annotated

  // Total input multiplicity |nu| (the reaction order).
  int order() const;
};

class Network {
 public:
  int add_species(Species s);
  int add_reaction(Reaction r);

  const std::vector<Species>& species() const { return species_; }
  const std::vector<Reaction>& reactions() const { return reactions_; }
  int n_species() const { return static_cast<int>(species_.size()); }
  int n_reactions() const { return static_cast<int>(reactions_.size()); }

  // Index of a species by name; -1 if absent.
  int species_index(std::string_view name) const;
  int reaction_index(std::string_view name) const;

  const std::optional<Rat>& n0() const { return n0_; }
  void set_n0(Rat n0) { n0_ = std::move(n0); }

  State initial_state() const;

  // Net state change of reaction k: one entry per species.
  std::vector<std::int64_t> stoichiometry_column(int k) const;
  // Dense n_species x n_reactions net-change matrix, row-major by species.
  std::vector<std::vector<std::int64_t>> stoichiometry_matrix() const;

  // Subset-count propensity of reaction k in state x.  Zero whenever any
  // required molecule count falls short.
  double propensity(int k, const State& x) const;
  // Same value in exact rational arithmetic (requires kappa_exact).
  Rat propensity_exact(int k, const State& x) const;

  // Applies one firing of reaction k in place.  Throws std::domain_error if
  // the state lacks the required molecules.
  void apply_reaction(int k, State& x) const;

 private:
  std::vector<Species> species_;
  std::vector<Reaction> reactions_;
  std::optional<Rat> n0_;
};

// Converts a classical (concentration-style) rate constant into the
// subset-count constant used here:
//
//   kappa = kappa_classical * prod_i(nu_i!) * n^(1 - |nu|)
//
// where `multiplicities` are the input multiplicities nu_i and n is the
// volume/abundance anchor.  Order 1 reactions are unchanged.
double volume_form_kappa(double kappa_classical, std::span<const int> multiplicities, double n);
Rat volume_form_kappa(const Rat& kappa_classical, std::span<const int> multiplicities, const Rat& n);

// --- Text format -----------------------------------------------------------
//
//   # comment
//   n0 = 1000
//   species T init=1 alpha=0
//   reaction a: T -> T + G @ 1 beta=0
//   reaction f: G + S -> 0 @ 7.5e-6 beta=-5/3
//
// One declaration per line.  A complex is "0" (empty) or terms joined by
// "+", each term an optional integer multiplicity followed by a species
// name.  Species must be declared before use.  alpha/beta annotations and
// the n0 anchor are optional; rationals are INT or INT/INT.

Network parse_network(std::string_view text);
Network load_network(const std::string& path);

// Renders a network in the text format; parse_network(render_network(x))
// reproduces x exactly.
std::string render_network(const Network& net);

}  // namespace rxscale
