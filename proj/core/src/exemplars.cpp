#include "rxscale/exemplars.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace rxscale {

namespace {

ScalingExponents hints_scaling(const Network& net, Rat gamma) {
  auto sc = scaling_from_hints(net, std::move(gamma));
  if (!sc) throw std::logic_error("exemplar network is missing scaling hints");
  return *sc;
}

void set_default(Exemplar& ex, const std::string& key) {
  ex.default_scaling = key;
  ex.scaling = ex.scalings.at(key);
}

Exemplar make_crystallization() {
  Exemplar ex;
  ex.name = "crystallization";
  ex.notes =
      "Monomer pairing with a consumable catalyst: the monomer pool is "
      "macroscopic while the catalyst holds a handful of copies, so the "
      "catalyst count follows a binomial law driven by the fluid monomer "
      "decay.  All oracles take natural time.";
  ex.network = parse_network(R"(n0 = 1000000
species A init=1000000 alpha=1
species B init=0 alpha=1
species C init=10 alpha=0
reaction pair: 2 A -> B @ 1e-7 beta=-1
reaction consume: A + C -> 0 @ 1e-7 beta=-1
)");
  ex.scalings["Z"] = hints_scaling(ex.network, Rat(0));
  set_default(ex, "Z");
  ex.oracles["Z_A"] = [](double t) { return 1.0 / (1.0 + 0.1 * t); };
  ex.oracles["E_X_C"] = [](double t) { return 10.0 / (1.0 + 0.1 * t); };
  ex.oracles["Var_X_C"] = [](double t) {
    double p = 1.0 / (1.0 + 0.1 * t);
    return 10.0 * p * (1.0 - p);
  };
  return ex;
}

Network enzyme_network(std::int64_t n0, std::int64_t s0, std::int64_t e0,
                       const char* alphas[4], const char* convert_beta) {
  std::string dsl;
  dsl += "n0 = " + std::to_string(n0) + "\n";
  dsl += "species S init=" + std::to_string(s0) + " alpha=" + alphas[0] + "\n";
  dsl += "species E init=" + std::to_string(e0) + " alpha=" + alphas[1] + "\n";
  dsl += std::string("species ES init=0 alpha=") + alphas[2] + "\n";
  dsl += std::string("species P init=0 alpha=") + alphas[3] + "\n";
  dsl += "reaction bind: S + E -> ES @ 1 beta=0\n";
  dsl += "reaction unbind: ES -> S + E @ 1 beta=0\n";
  dsl += std::string("reaction convert: ES -> P + E @ 0.1 beta=") + convert_beta + "\n";
  return parse_network(dsl);
}

Exemplar make_enzyme_1() {
  Exemplar ex;
  ex.name = "enzyme-1";
  ex.notes =
      "Substrate conversion with abundant enzyme: free substrate is captured "
      "onto the complex in a fast initial layer, then the complex drains "
      "into product exponentially on the n0^(1/3) time scale.  V_ES and V_P "
      "take time in n0^(1/3) units and describe the post-capture phase; "
      "E_X_P takes natural time.";
  const char* alphas[4] = {"2/3", "1", "2/3", "2/3"};
  ex.network = enzyme_network(1000, 100, 1000, alphas, "-1/3");
  ex.scalings["V"] = hints_scaling(ex.network, Rat(1, 3));
  set_default(ex, "V");
  ex.oracles["V_ES"] = [](double t) { return std::exp(-t); };
  ex.oracles["V_P"] = [](double t) { return 1.0 - std::exp(-t); };
  ex.oracles["E_X_P"] = [](double t) { return 100.0 * (1.0 - std::exp(-t / 10.0)); };
  return ex;
}

Exemplar make_enzyme_2() {
  Exemplar ex;
  ex.name = "enzyme-2";
  ex.notes =
      "Substrate conversion with scarce enzyme: the enzyme sits almost "
      "entirely in the bound complex, and the product count is a unit-rate "
      "Poisson process.  E_X_P and Var_X_P take natural time.";
  const char* alphas[4] = {"1", "1/2", "1/2", "0"};
  ex.network = enzyme_network(100, 100, 10, alphas, "-1/2");
  ex.scalings["Z"] = hints_scaling(ex.network, Rat(0));
  set_default(ex, "Z");
  ex.oracles["E_X_P"] = [](double t) { return t; };
  ex.oracles["Var_X_P"] = [](double t) { return t; };
  return ex;
}

Exemplar make_isom_1() {
  Exemplar ex;
  ex.name = "isom-1";
  ex.notes =
      "Two isomer states flip quickly while the second leaks slowly into a "
      "product.  Z_1 and Z_2 take natural time; X_3_rate_slow and E_X_3_slow "
      "use n0^(2/3) units (the slow product clock); R_total_v uses n0^(5/3) "
      "units and tracks the decay of the total isomer mass.";
  ex.network = parse_network(R"(n0 = 1000
species X1 init=1200 alpha=1
species X2 init=600 alpha=1
species X3 init=0 alpha=0
reaction fwd: X1 -> X2 @ 1 beta=0
reaction back: X2 -> X1 @ 2 beta=0
reaction prod: X2 -> X3 @ 5e-5 beta=-5/3
)");
  ScalingExponents z = hints_scaling(ex.network, Rat(0));
  ScalingExponents u = z;
  u.gamma = Rat(2, 3);
  ScalingExponents v = z;
  v.gamma = Rat(5, 3);
  v.alpha[2] = Rat(1);
  ex.scalings["Z"] = z;
  ex.scalings["U"] = u;
  ex.scalings["V"] = v;
  set_default(ex, "Z");

  const double z1 = 1.2, z2 = 0.6;
  const double c = z1 + z2;
  const double d0 = z1 - 2.0 * z2;
  ex.oracles["Z_1"] = [=](double t) { return (2.0 * c + d0 * std::exp(-3.0 * t)) / 3.0; };
  ex.oracles["Z_2"] = [=](double t) { return (c - d0 * std::exp(-3.0 * t)) / 3.0; };
  ex.oracles["X_3_rate_slow"] = [=](double) { return 5.0 * c / 3.0; };
  ex.oracles["E_X_3_slow"] = [=](double t) { return 5.0 * c / 3.0 * t; };
  ex.oracles["R_total_v"] = [=](double t) { return c * std::exp(-5.0 / 3.0 * t); };
  return ex;
}

Exemplar make_isom_2() {
  Exemplar ex;
  ex.name = "isom-2";
  ex.notes =
      "Isomerization through an unstable intermediate: the intermediate "
      "holds O(1) copies governed by a quasi-stationary Poisson law while "
      "the stock drains on the n0 time scale.  E_X_3 and Var_X_3 take "
      "natural time; V_1 and E_X_2_v use n0 units (E_X_2_v is the Poisson "
      "mean of the raw intermediate count).";
  ex.network = parse_network(R"(n0 = 10000
species X1 init=2000 alpha=1
species X2 init=0 alpha=0
species X3 init=0 alpha=0
reaction fwd: X1 -> X2 @ 10 beta=0
reaction back: X2 -> X1 @ 40000 beta=1
reaction prod: X2 -> X3 @ 2 beta=0
)");
  ScalingExponents z = hints_scaling(ex.network, Rat(0));
  ScalingExponents v = z;
  v.gamma = Rat(1);
  v.alpha[2] = Rat(1);
  ex.scalings["Z"] = z;
  ex.scalings["V"] = v;
  set_default(ex, "Z");

  ex.oracles["E_X_3"] = [](double t) { return t; };
  ex.oracles["Var_X_3"] = [](double t) { return t; };
  ex.oracles["V_1"] = [](double t) { return 0.2 * std::exp(-5.0 * t); };
  ex.oracles["E_X_2_v"] = [](double t) { return 0.5 * std::exp(-5.0 * t); };
  return ex;
}

Exemplar make_viral(bool original_rates) {
  Exemplar ex;
  ex.name = "viral";
  ex.notes =
      "Template, genome, and structural counts at three separated sizes: "
      "after conditioning on establishment the genome level follows a "
      "logistic law on the n0^(2/3) scale, while templates and structural "
      "units form a fast pair whose stationary moments are polynomial in "
      "the genome level.  V_2_logistic takes time in n0^(2/3) units and "
      "starts from level 1; fast_* quantities take the frozen genome level "
      "as argument; the remaining quantities are constants.";
  std::string dsl = R"(n0 = 1000
species T init=1 alpha=0
species G init=0 alpha=2/3
species S init=0 alpha=1
reaction genome_prod: T -> T + G @ 1 beta=0
reaction template_conv: G -> T @ 0.025 beta=-2/3
reaction struct_prod: T -> T + S @ 1000 beta=1
reaction template_death: T -> 0 @ 0.25 beta=0
reaction struct_death: S -> 0 @ )";
  dsl += original_rates ? "1.9985" : "2";
  dsl += R"( beta=0
reaction pair_loss: G + S -> 0 @ 7.5e-6 beta=-5/3
)";
  ex.network = parse_network(dsl);
  ex.scalings["V"] = hints_scaling(ex.network, Rat(2, 3));
  set_default(ex, "V");

  const double d = original_rates ? 1.9985 : 2.0;
  const double growth = 7.5;
  const double sat = 1.875 / (0.25 * d);
  ex.oracles["V_2_logistic"] = [=](double t) {
    return growth / (sat + (growth - sat) * std::exp(-growth * t));
  };
  ex.oracles["logistic_growth"] = [=](double) { return growth; };
  ex.oracles["logistic_saturation"] = [=](double) { return sat; };
  ex.oracles["extinction_prob"] = [](double) { return 0.25; };
  ex.oracles["establishment_constant"] = [](double) { return 4.0 / 45.0; };
  ex.oracles["fast_E_Z"] = [](double v) { return 10.0 * v; };
  ex.oracles["fast_Var_Z"] = [](double v) { return 10.0 * v; };
  ex.oracles["fast_E_Y"] = [=](double v) { return 10.0 * v / d; };
  ex.oracles["fast_E_ZY"] = [=](double v) {
    return (10.0 * v + (25.0 / d + 100.0) * v * v) / (d + 0.25);
  };
  ex.oracles["fast_E_Y2"] = [=](double v) {
    return (10.0 * v + (25.0 / d + 100.0) * v * v) / (d * (d + 0.25));
  };
  ex.oracles["fast_Cov_ZY"] = [=](double v) {
    return (10.0 * v + (25.0 / d + 100.0) * v * v) / (d + 0.25) - 100.0 * v * v / d;
  };
  ex.oracles["fast_Var_Y"] = [=](double v) {
    return (10.0 * v + (25.0 / d + 100.0) * v * v) / (d * (d + 0.25)) -
           100.0 * v * v / (d * d);
  };
  return ex;
}

}  // namespace

const std::vector<std::string>& exemplar_names() {
  static const std::vector<std::string> names = {
      "crystallization", "enzyme-1", "enzyme-2", "isom-1", "isom-2", "viral",
  };
  return names;
}

Exemplar exemplar(const std::string& name, bool original_rates) {
  if (name == "crystallization") return make_crystallization();
  if (name == "enzyme-1") return make_enzyme_1();
  if (name == "enzyme-2") return make_enzyme_2();
  if (name == "isom-1") return make_isom_1();
  if (name == "isom-2") return make_isom_2();
  if (name == "viral") return make_viral(original_rates);
  throw std::out_of_range("unknown exemplar '" + name + "'");
}

double oracle(const std::string& name, const std::string& quantity, double arg) {
  Exemplar ex = exemplar(name);
  auto it = ex.oracles.find(quantity);
  if (it == ex.oracles.end()) {
    std::string msg = "exemplar '" + name + "' has no oracle '" + quantity + "'; available:";
    for (const auto& [key, fn] : ex.oracles) msg += " " + key;
    throw std::out_of_range(msg);
  }
  return it->second(arg);
}

Network net_at_scale(const Network& net, const ScalingExponents& scaling, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("net_at_scale: n must be positive");
  if (static_cast<int>(scaling.alpha.size()) != net.n_species() ||
      static_cast<int>(scaling.beta.size()) != net.n_reactions())
    throw std::invalid_argument("net_at_scale: scaling shape does not match network");

  const Rat rn(n);
  Network out;
  for (int i = 0; i < net.n_species(); ++i) {
    Species s = net.species()[i];
    s.alpha = scaling.alpha[i];
    double z = static_cast<double>(s.init) / rat_pow_d(scaling.n0, scaling.alpha[i]);
    s.init = std::llround(z * rat_pow_d(rn, scaling.alpha[i]));
    out.add_species(std::move(s));
  }
  for (int k = 0; k < net.n_reactions(); ++k) {
    Reaction r = net.reactions()[k];
    r.beta = scaling.beta[k];
    double lambda = split_rate_constant(r.kappa, scaling.beta[k], scaling.n0);
    double kappa = lambda * rat_pow_d(rn, scaling.beta[k]);
    auto lambda_exact = split_rate_constant_exact(r.kappa_exact, scaling.beta[k], scaling.n0);
    r.kappa = kappa;
    r.kappa_exact.reset();
    if (lambda_exact) {
      if (auto pw = rat_pow_exact(rn, scaling.beta[k])) r.kappa_exact = *lambda_exact * *pw;
    }
    out.add_reaction(std::move(r));
  }
  out.set_n0(rn);
  return out;
}

}  // namespace rxscale
