#include "rxscale/branching.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rxscale/rng.hpp"

namespace rxscale {

OffspringLaw OffspringLaw::shifted_geometric() {
  OffspringLaw law;
  law.probabilities = [](int k) { return 0.2 * std::pow(0.8, k); };
  law.mean = 4.0;
  return law;
}

double pgf_eval(const OffspringLaw& law, double s) {
  if (!(s >= 0.0 && s <= 1.0))
    throw std::invalid_argument("pgf_eval: argument must lie in [0, 1]");
  double mass = 0, value = 0, power = 1;
  constexpr int kMaxTerms = 1 << 22;
  for (int k = 0; k < kMaxTerms; ++k) {
    const double p = law.probabilities(k);
    if (p < 0) throw std::runtime_error("pgf_eval: negative probability in offspring law");
    mass += p;
    value += p * power;
    power *= s;
    if (mass >= 1.0 - 1e-12) return value;
  }
  throw std::runtime_error("pgf_eval: offspring probabilities do not accumulate to 1");
}

double extinction_probability(const OffspringLaw& law) {
  double q = 0;
  for (int i = 0; i < 1000000; ++i) {
    const double next = pgf_eval(law, std::min(q, 1.0));
    if (std::fabs(next - q) < 1e-14) return std::min(next, 1.0);
    q = next;
  }
  return std::min(q, 1.0);
}

WalkEstimate extinction_by_walk(const OffspringLaw& law, std::int64_t n_walks, std::uint64_t seed,
                                int max_steps) {
  if (n_walks <= 0) throw std::invalid_argument("extinction_by_walk: need at least one walk");
  std::vector<double> cum;
  double mass = 0;
  for (int k = 0; k < (1 << 16) && mass < 1.0 - 1e-12; ++k) {
    mass += law.probabilities(k);
    cum.push_back(mass);
  }
  Rng rng = Rng::seeded(seed);
  auto sample = [&]() -> std::int64_t {
    const double u = rng.uniform() * mass;
    auto it = std::lower_bound(cum.begin(), cum.end(), u);
    return it == cum.end() ? static_cast<std::int64_t>(cum.size()) : (it - cum.begin());
  };
  std::int64_t extinct = 0;
  for (std::int64_t w = 0; w < n_walks; ++w) {
    std::int64_t s = 1;
    for (int step = 0; step < max_steps && s > 0; ++step) s += sample() - 1;
    if (s <= 0) ++extinct;
  }
  WalkEstimate out;
  out.walks = n_walks;
  out.estimate = static_cast<double>(extinct) / static_cast<double>(n_walks);
  out.se = std::sqrt(out.estimate * (1.0 - out.estimate) / static_cast<double>(n_walks));
  return out;
}

std::array<std::array<double, 2>, 2> TwoTypeRates::q_matrix() const {
  const double ct = conv * std::pow(n, -2.0 / 3.0);
  return {{{-death, ct}, {birth, -ct}}};
}

double TwoTypeRates::growth_rate() const {
  const double ct = conv * std::pow(n, -2.0 / 3.0);
  const double s = death + ct;
  const double disc = s * s + 4.0 * ct * (birth - death);
  return 0.5 * (-s + std::sqrt(disc));
}

double TwoTypeRates::rho() const { return 1.0 + growth_rate() * std::pow(n, 2.0 / 3.0) / conv; }

double growth_rate(double n) {
  if (!(n > 0)) throw std::invalid_argument("growth_rate: scale must be positive");
  return TwoTypeRates{n}.growth_rate();
}

double rho(double n) {
  if (!(n > 0)) throw std::invalid_argument("rho: scale must be positive");
  return TwoTypeRates{n}.rho();
}

EstablishmentSpec::EstablishmentSpec(double n_, double eps_) : n(n_), eps(eps_) {
  if (!(n > 0)) throw std::invalid_argument("establishment: scale must be positive");
  if (!(eps > 0 && eps < 2)) throw std::invalid_argument("establishment: level must lie in (0, 2)");
  rho = rxscale::rho(n);
  threshold = eps * std::pow(n, 2.0 / 3.0);
}

std::function<bool(double, const State&)> weighted_crossing(const EstablishmentSpec& spec,
                                                            int species_template,
                                                            int species_genome) {
  const double w = spec.rho, thr = spec.threshold;
  return [w, thr, species_template, species_genome](double, const State& x) {
    return w * static_cast<double>(x[species_template]) +
               static_cast<double>(x[species_genome]) >=
           thr;
  };
}

std::function<bool(double, const State&)> genome_crossing(const EstablishmentSpec& spec,
                                                          int species_genome) {
  const double thr = spec.threshold;
  return [thr, species_genome](double, const State& x) {
    return static_cast<double>(x[species_genome]) >= thr;
  };
}

std::function<bool(double, const State&)> lineage_dead(int species_template, int species_genome) {
  return [species_template, species_genome](double, const State& x) {
    return x[species_template] == 0 && x[species_genome] == 0;
  };
}

double predict_establishment_time(double n, double eps) {
  if (!(n > 1)) throw std::invalid_argument("predict_establishment_time: scale must exceed 1");
  if (!(eps > 0 && eps < 2))
    throw std::invalid_argument("predict_establishment_time: level must lie in (0, 2)");
  return 4.0 / 45.0 * std::pow(n, 2.0 / 3.0) * std::log(n);
}

double predict_level_crossing_gap(double n, double eps1, double eps2) {
  if (!(n > 0)) throw std::invalid_argument("predict_level_crossing_gap: scale must be positive");
  if (!(eps1 > 0 && eps1 <= eps2 && eps2 < 2))
    throw std::invalid_argument("predict_level_crossing_gap: need 0 < eps1 <= eps2 < 2");
  return 2.0 / 15.0 * std::log(eps2 / eps1) * std::pow(n, 2.0 / 3.0);
}

}  // namespace rxscale
