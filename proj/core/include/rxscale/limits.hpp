#pragma once

// Reduced models built from a scaled network: the fluid ODE limit, the
// diffusion approximation, piecewise-deterministic hybrid limits, the
// case-specific reductions of the three-species template model, and the
// averaged law of its fast template/structure pair.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rxscale/network.hpp"
#include "rxscale/rational.hpp"
#include "rxscale/scaling.hpp"

namespace rxscale {

// --- Deterministic limits -----------------------------------------------------

struct ODEModel {
  int dim = 0;
  std::vector<std::string> names;  // one per coordinate
  std::vector<int> species;        // network species behind each coordinate, -1 if synthetic
  std::function<std::vector<double>(double t, const std::vector<double>& y)> drift;
};

struct OdePath {
  std::vector<double> times;
  std::vector<std::vector<double>> values;

  const std::vector<double>& final_state() const { return values.back(); }
  // State at the last recorded time <= t (first point for t before the start).
  const std::vector<double>& state_at(double t) const;
};

// Classical fourth order fixed-step integration, reported on a uniform grid.
// grid_points = 0 records one point per step, capped at 1000 intervals.
// Throws std::runtime_error with a time stamp if the state leaves the finite
// range.
OdePath integrate_ode(const ODEModel& model, std::vector<double> init, double horizon,
                      double step = 1e-3, int grid_points = 0);

// Endpoint only.
std::vector<double> ode_state_at(const ODEModel& model, std::vector<double> init, double t,
                                 double step = 1e-3);

// Law of large numbers limit. When the network carries exponent annotations,
// the coordinates are the species with alpha > 0 and a mass-action term
// survives exactly when its order on the natural time scale is zero; slower
// terms are dropped. A term of positive order, or a surviving term that
// depends on a zero-alpha species, means no closed fluid system exists and
// raises std::runtime_error. Without annotations every species becomes a
// coordinate with the classical density normalization (alpha = 1,
// beta_k = 1 - |nu_k|), anchored at the network scale when one is declared.
ODEModel fluid_limit(const Network& net);
ODEModel fluid_limit(const Network& net, const ScalingExponents& scaling);

// --- Diffusion approximation ----------------------------------------------------

struct SDEModel {
  int dim = 0;
  double n = 1.0;  // abundance scale; noise enters at n^{-1/2}
  std::vector<std::string> names;
  std::vector<std::vector<double>> stoich;  // per channel, net change per coordinate
  std::function<std::vector<double>(const std::vector<double>& c)> drift;
  std::function<std::vector<double>(const std::vector<double>& c)> channel_rates;

  int n_channels() const { return static_cast<int>(stoich.size()); }
  double noise_scale() const;
  // Columns sqrt(rate_k(c)) * stoich_k, before the n^{-1/2} factor.
  std::vector<std::vector<double>> diffusion_columns(const std::vector<double>& c) const;
};

// Density-form drift and per-channel noise for the network at scale n.
SDEModel diffusion_approx(const Network& net, double n);

// Euler-Maruyama with one fresh normal variate per channel per step and
// componentwise reflection at zero. Deterministic for a fixed seed.
OdePath simulate_em(const SDEModel& model, std::vector<double> init, double horizon, double step,
                    std::uint64_t seed, int grid_points = 0);

// --- Hybrid piecewise-deterministic models --------------------------------------

struct HybridChannel {
  std::string name;
  std::function<double(double t, const std::vector<double>& y, const State& d)> rate;
  std::function<void(double t, std::vector<double>& y, State& d)> jump;
  // Time until the hazard integral along the deterministic flow from (t, y, d)
  // first reaches `target`; +inf if it never does. Optional; enables the
  // exact-inversion sampler.
  std::function<double(double t, const std::vector<double>& y, const State& d, double target)>
      inverse_hazard;
};

struct HybridModel {
  std::vector<std::string> fluid_names;
  std::vector<std::string> discrete_names;
  std::vector<int> fluid_species;  // network indices, -1 for hand-built models
  std::vector<int> discrete_species;
  std::function<std::vector<double>(double t, const std::vector<double>& y, const State& d)> drift;
  std::vector<HybridChannel> channels;
};

enum class HybridMethod { Thinning, Inversion };

struct HybridOptions {
  double step = 1e-3;  // ODE step; also the thinning bound refresh interval
  HybridMethod method = HybridMethod::Thinning;
  // Thinning bound per step: (1 + margin) * max(rate at both step ends).
  double bound_margin = 0.5;
  int grid_points = 0;
};

struct HybridPath {
  std::vector<double> times;
  std::vector<std::vector<double>> fluid;
  std::vector<State> discrete;
  std::int64_t n_jumps = 0;

  const std::vector<double>& final_fluid() const { return fluid.back(); }
  const State& final_discrete() const { return discrete.back(); }
};

// Integrates the continuous part between jumps and samples jumps either by
// thinning against a per-step rate bound or, when every channel provides
// inverse_hazard, by exact inversion. A true rate exceeding the thinning
// bound raises std::runtime_error: the bound refresh step is too coarse for
// the model. Deterministic for a fixed seed.
HybridPath simulate_hybrid(const HybridModel& model, std::vector<double> init, State discrete_init,
                           double horizon, std::uint64_t seed, const HybridOptions& opts = {});

// Hybrid limit of an annotated network: positive-alpha species become fluid
// coordinates, zero-alpha species stay discrete and jump at their limiting
// rates. Requires every discrete-changing reaction to run at order zero
// (slower ones freeze and are dropped); a diverging rate or drift term raises
// std::runtime_error.
HybridModel hybrid_limit(const Network& net, const ScalingExponents& scaling);

// --- Case reductions of the template model ---------------------------------------

struct LogisticLaw {
  double growth = 0;      // a in  v' = a v - b v^2
  double saturation = 0;  // b
  std::optional<Rat> growth_exact, saturation_exact;
  // The same coefficients mapped back to molecule units. For an admissible
  // slow-genome scaling these do not depend on the chosen exponents.
  std::optional<Rat> growth_descaled, saturation_descaled;

  double equilibrium() const { return growth / saturation; }
  double solution(double v0, double t) const;
};

// Jump rates of the fast template/structure pair at a frozen genome level v:
// templates appear at z_birth * v and die at z_death each; structure grows at
// y_prod per template and decays at y_decay per unit.
struct FastSubsystem {
  Rat z_birth{0};
  Rat z_death{0};
  Rat y_prod{0};
  Rat y_decay{0};
};

struct ReducedModel {
  LimitCase kind = LimitCase::Unclassified;
  ODEModel ode;
  ScalingExponents scaling;
  std::vector<double> lambdas;  // scaled rate constants lambda_1..lambda_6 in schema order
  std::optional<LogisticLaw> logistic;   // slow-genome case only
  std::optional<FastSubsystem> fast;     // slow-genome case, when exact rates are known
};

// Case-tagged reduction of a template-model network under an admissible
// scaling. Throws std::invalid_argument when the network does not match the
// template schema and std::runtime_error when the scaling classifies as
// Unclassified.
ReducedModel build_reduced(const Network& net, const ScalingExponents& scaling);

// Text block: case name, limit equations with numeric coefficients, descaled
// coefficients and the fast-law moment table where applicable.
std::string render_reduced_report(const ReducedModel& model);

// Closed form of v' = 7.5 v - 3.75 v^2 from v(0) = eps, the canonical
// slow-genome law. Throws std::invalid_argument unless eps > 0.
double logistic_solution(double eps, double t);

// --- Averaged fast-subsystem law --------------------------------------------------

// Stationary joint moments E[Z^n Y^m] of the fast pair at genome level v,
// exact polynomials in v. Z is the discrete template count, Y the rescaled
// structure level; the moments solve the stationarity identity of the pair's
// generator applied to monomials, in increasing total degree. The canonical
// rates give the Poisson(10 v) template marginal.
class AveragedMomentEngine {
 public:
  AveragedMomentEngine();  // canonical template-model rates
  explicit AveragedMomentEngine(const FastSubsystem& rates, int max_degree = 8);

  int max_degree() const;
  // Coefficients of E[Z^n Y^m] as a polynomial in v, index = power of v.
  // Throws std::domain_error beyond max_degree and std::overflow_error if a
  // coefficient leaves the 64-bit rational range.
  std::vector<Rat> poly(int n, int m) const;
  double eval(double v, int n, int m) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

// Canonical-rate conveniences.
double averaged_moments(double v2, int n, int m);
std::vector<Rat> averaged_moment_poly(int n, int m);

struct FastLaw {
  double v2 = 0;
  double z_mean = 0;  // Poisson parameter of the template marginal
  std::map<std::pair<int, int>, double> moments;  // (n, m) -> E[Z^n Y^m], degree <= 2

  double y_mean() const { return moments.at({0, 1}); }
  double z_var() const;
  double y_var() const;
  double zy_cov() const;
};

// Degree-two summary of the canonical averaged law at genome level v2.
FastLaw averaged_fast_law(double v2);

}  // namespace rxscale
