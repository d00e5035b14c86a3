#include "rxscale/limits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "rxscale/rng.hpp"

namespace rxscale {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double fact_d(int m) {
  double f = 1;
  for (int r = 2; r <= m; ++r) f *= r;
  return f;
}

// Subset count C(x, m) as a double, zero when x < m.
double binom_count(std::int64_t x, int m) {
  if (x < m) return 0.0;
  double p = 1;
  for (int r = 0; r < m; ++r) p *= static_cast<double>(x - r) / (r + 1);
  return p;
}

std::string fmt_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void check_finite(const std::vector<double>& y, double t, const char* what) {
  for (double v : y)
    if (!std::isfinite(v))
      throw std::runtime_error(std::string(what) + ": state became nonfinite at t = " + fmt_g(t));
}

// One classical fourth order step of size h from (t, y).
template <class F>
void rk4_step(F&& f, double t, double h, std::vector<double>& y, std::vector<double>& tmp) {
  const std::vector<double> k1 = f(t, y);
  const int n = static_cast<int>(y.size());
  tmp.resize(n);
  for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  const std::vector<double> k2 = f(t + 0.5 * h, tmp);
  for (int i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  const std::vector<double> k3 = f(t + 0.5 * h, tmp);
  for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
  const std::vector<double> k4 = f(t + h, tmp);
  for (int i = 0; i < n; ++i) y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
}

// Advances y from t0 to t1 in uniform substeps no longer than `step`.
template <class F>
void rk4_advance(F&& f, double t0, double t1, double step, std::vector<double>& y,
                 std::vector<double>& tmp) {
  const double span = t1 - t0;
  if (span <= 0) return;
  auto m = static_cast<std::int64_t>(std::ceil(span / step - 1e-12));
  if (m < 1) m = 1;
  const double h = span / static_cast<double>(m);
  for (std::int64_t s = 0; s < m; ++s) rk4_step(f, t0 + h * static_cast<double>(s), h, y, tmp);
}

int pick_grid(double horizon, double step, int grid_points) {
  if (grid_points > 0) return grid_points;
  if (horizon <= 0 || step <= 0) return 1;
  const double steps = std::ceil(horizon / step);
  return static_cast<int>(std::min(steps, 1000.0));
}

// A single mass-action drift term: coeff * prod_f y[f]^e * prod_d C(d[j], e).
struct DriftTerm {
  int coord = 0;
  double coeff = 0;
  std::vector<std::pair<int, int>> fluid_factors;
  std::vector<std::pair<int, int>> disc_factors;
};

double eval_term(const DriftTerm& t, const std::vector<double>& y, const State* d) {
  double p = t.coeff;
  for (auto [c, m] : t.fluid_factors)
    for (int r = 0; r < m; ++r) p *= y[c];
  if (d)
    for (auto [j, m] : t.disc_factors) p *= binom_count((*d)[j], m);
  return p;
}

}  // namespace

// --- ODE integration -----------------------------------------------------------

const std::vector<double>& OdePath::state_at(double t) const {
  auto it = std::upper_bound(times.begin(), times.end(), t);
  auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - times.begin() - 1, 0));
  return values[idx];
}

OdePath integrate_ode(const ODEModel& model, std::vector<double> init, double horizon, double step,
                      int grid_points) {
  if (step <= 0) throw std::invalid_argument("integrate_ode: step must be positive");
  if (horizon < 0) throw std::invalid_argument("integrate_ode: horizon must be nonnegative");
  if (static_cast<int>(init.size()) != model.dim)
    throw std::invalid_argument("integrate_ode: initial state has wrong dimension");
  OdePath path;
  const int grid = pick_grid(horizon, step, grid_points);
  path.times.reserve(grid + 1);
  path.values.reserve(grid + 1);
  std::vector<double> y = std::move(init);
  std::vector<double> tmp;
  path.times.push_back(0.0);
  path.values.push_back(y);
  check_finite(y, 0.0, "integrate_ode");
  for (int i = 1; i <= grid; ++i) {
    const double t0 = horizon * (i - 1) / grid;
    const double t1 = horizon * i / grid;
    rk4_advance(model.drift, t0, t1, step, y, tmp);
    check_finite(y, t1, "integrate_ode");
    path.times.push_back(t1);
    path.values.push_back(y);
  }
  return path;
}

std::vector<double> ode_state_at(const ODEModel& model, std::vector<double> init, double t,
                                 double step) {
  return integrate_ode(model, std::move(init), t, step, 1).values.back();
}

// --- Fluid limit -----------------------------------------------------------------

ODEModel fluid_limit(const Network& net, const ScalingExponents& scaling) {
  if (static_cast<int>(scaling.alpha.size()) != net.n_species() ||
      static_cast<int>(scaling.beta.size()) != net.n_reactions())
    throw std::invalid_argument("fluid_limit: scaling does not match the network");
  std::vector<int> coord_of(net.n_species(), -1);
  ODEModel model;
  for (int i = 0; i < net.n_species(); ++i) {
    if (scaling.alpha[i] > Rat(0)) {
      coord_of[i] = model.dim++;
      model.names.push_back(net.species()[i].name);
      model.species.push_back(i);
    }
  }
  if (model.dim == 0)
    throw std::invalid_argument("fluid_limit: no species has a positive abundance exponent");

  const std::vector<double> lambdas = scaled_rate_constants(net, scaling);
  std::vector<DriftTerm> terms;
  for (const TermOrder& to : term_orders(net, scaling)) {
    if (coord_of[to.species] < 0) continue;
    if (to.order < Rat(0)) continue;
    const Reaction& r = net.reactions()[to.reaction];
    if (to.order > Rat(0))
      throw std::runtime_error("fluid_limit: reaction " + r.name + " drives species " +
                               net.species()[to.species].name +
                               " at a diverging rate on this time scale");
    DriftTerm term;
    term.coord = coord_of[to.species];
    double zeta = 0;
    const auto column = net.stoichiometry_column(to.reaction);
    zeta = static_cast<double>(column[to.species]);
    term.coeff = lambdas[to.reaction] * zeta;
    for (const Term& in : r.inputs) {
      if (coord_of[in.species] < 0)
        throw std::runtime_error("fluid_limit: surviving term of reaction " + r.name +
                                 " depends on discrete species " + net.species()[in.species].name +
                                 "; no closed fluid system at this scaling");
      term.coeff /= fact_d(in.mult);
      term.fluid_factors.emplace_back(coord_of[in.species], in.mult);
    }
    terms.push_back(std::move(term));
  }

  const int dim = model.dim;
  model.drift = [terms, dim](double, const std::vector<double>& y) {
    std::vector<double> dy(dim, 0.0);
    for (const DriftTerm& t : terms) dy[t.coord] += eval_term(t, y, nullptr);
    return dy;
  };
  return model;
}

ODEModel fluid_limit(const Network& net) {
  if (auto hinted = scaling_from_hints(net)) return fluid_limit(net, *hinted);
  ScalingExponents s;
  s.alpha.assign(net.n_species(), Rat(1));
  s.beta.reserve(net.n_reactions());
  for (const Reaction& r : net.reactions()) s.beta.push_back(Rat(1 - r.order()));
  s.gamma = Rat(0);
  s.n0 = net.n0().value_or(Rat(1));
  return fluid_limit(net, s);
}

// --- Diffusion approximation -------------------------------------------------------

double SDEModel::noise_scale() const { return 1.0 / std::sqrt(n); }

std::vector<std::vector<double>> SDEModel::diffusion_columns(const std::vector<double>& c) const {
  const std::vector<double> rates = channel_rates(c);
  std::vector<std::vector<double>> cols(stoich.size());
  for (std::size_t k = 0; k < stoich.size(); ++k) {
    const double s = std::sqrt(std::max(rates[k], 0.0));
    cols[k] = stoich[k];
    for (double& v : cols[k]) v *= s;
  }
  return cols;
}

SDEModel diffusion_approx(const Network& net, double n) {
  if (!(n > 0)) throw std::invalid_argument("diffusion_approx: scale must be positive");
  SDEModel model;
  model.dim = net.n_species();
  model.n = n;
  for (const Species& s : net.species()) model.names.push_back(s.name);

  struct Channel {
    double ktilde = 0;
    std::vector<std::pair<int, int>> factors;
  };
  std::vector<Channel> channels(net.n_reactions());
  for (int k = 0; k < net.n_reactions(); ++k) {
    const Reaction& r = net.reactions()[k];
    Channel& ch = channels[k];
    ch.ktilde = r.kappa * std::pow(n, r.order() - 1);
    for (const Term& in : r.inputs) {
      ch.ktilde /= fact_d(in.mult);
      ch.factors.emplace_back(in.species, in.mult);
    }
    auto column = net.stoichiometry_column(k);
    model.stoich.emplace_back(column.begin(), column.end());
  }

  const int dim = model.dim;
  auto rate_of = [](const Channel& ch, const std::vector<double>& c) {
    double p = ch.ktilde;
    for (auto [i, m] : ch.factors)
      for (int r = 0; r < m; ++r) p *= c[i];
    return p;
  };
  model.channel_rates = [channels, rate_of](const std::vector<double>& c) {
    std::vector<double> rates(channels.size());
    for (std::size_t k = 0; k < channels.size(); ++k)
      rates[k] = std::max(rate_of(channels[k], c), 0.0);
    return rates;
  };
  const auto stoich = model.stoich;
  model.drift = [channels, rate_of, stoich, dim](const std::vector<double>& c) {
    std::vector<double> dy(dim, 0.0);
    for (std::size_t k = 0; k < channels.size(); ++k) {
      const double rate = rate_of(channels[k], c);
      for (int i = 0; i < dim; ++i) dy[i] += rate * stoich[k][i];
    }
    return dy;
  };
  return model;
}

OdePath simulate_em(const SDEModel& model, std::vector<double> init, double horizon, double step,
                    std::uint64_t seed, int grid_points) {
  if (step <= 0) throw std::invalid_argument("simulate_em: step must be positive");
  if (horizon < 0) throw std::invalid_argument("simulate_em: horizon must be nonnegative");
  if (static_cast<int>(init.size()) != model.dim)
    throw std::invalid_argument("simulate_em: initial state has wrong dimension");
  Rng rng = Rng::seeded(seed);
  const int grid = pick_grid(horizon, step, grid_points);
  const int channels = model.n_channels();
  const double ns = model.noise_scale();

  OdePath path;
  path.times.reserve(grid + 1);
  path.values.reserve(grid + 1);
  std::vector<double> y = std::move(init);
  path.times.push_back(0.0);
  path.values.push_back(y);
  for (int i = 1; i <= grid; ++i) {
    const double t0 = horizon * (i - 1) / grid;
    const double t1 = horizon * i / grid;
    auto m = static_cast<std::int64_t>(std::ceil((t1 - t0) / step - 1e-12));
    if (m < 1) m = 1;
    const double h = (t1 - t0) / static_cast<double>(m);
    const double sh = std::sqrt(h);
    for (std::int64_t s = 0; s < m; ++s) {
      const std::vector<double> f = model.drift(y);
      const std::vector<double> rates = model.channel_rates(y);
      for (int j = 0; j < model.dim; ++j) y[j] += f[j] * h;
      for (int k = 0; k < channels; ++k) {
        const double xi = rng.normal();
        const double amp = std::sqrt(std::max(rates[k], 0.0)) * sh * ns * xi;
        if (amp == 0) continue;
        const auto& col = model.stoich[k];
        for (int j = 0; j < model.dim; ++j) y[j] += amp * col[j];
      }
      for (double& v : y) v = std::fabs(v);
    }
    check_finite(y, t1, "simulate_em");
    path.times.push_back(t1);
    path.values.push_back(y);
  }
  return path;
}

// --- Hybrid simulation ----------------------------------------------------------

namespace {

HybridPath simulate_hybrid_thinning(const HybridModel& model, std::vector<double> y, State d,
                                    double horizon, Rng& rng, const HybridOptions& opts) {
  const int grid = pick_grid(horizon, opts.step, opts.grid_points);
  const std::size_t nch = model.channels.size();
  HybridPath path;
  path.times.reserve(grid + 1);
  path.times.push_back(0.0);
  path.fluid.push_back(y);
  path.discrete.push_back(d);

  auto drift = [&](double t, const std::vector<double>& yy) { return model.drift(t, yy, d); };
  std::vector<double> tmp, y_end, bounds(nch), rates(nch);
  for (int i = 1; i <= grid; ++i) {
    double t = horizon * (i - 1) / grid;
    const double seg_end = horizon * i / grid;
    while (seg_end - t > 1e-12 * std::max(1.0, seg_end)) {
      const double h = std::min(opts.step, seg_end - t);
      y_end = y;
      rk4_step(drift, t, h, y_end, tmp);
      double total = 0;
      for (std::size_t k = 0; k < nch; ++k) {
        const double r0 = model.channels[k].rate(t, y, d);
        const double r1 = model.channels[k].rate(t + h, y_end, d);
        bounds[k] = (1.0 + opts.bound_margin) * std::max(r0, r1);
        total += bounds[k];
      }
      if (total <= 0) {
        y.swap(y_end);
        t += h;
        continue;
      }
      const double wait = rng.exponential(total);
      if (wait >= h) {
        y.swap(y_end);
        t += h;
        continue;
      }
      rk4_step(drift, t, wait, y, tmp);
      t += wait;
      double live = 0;
      for (std::size_t k = 0; k < nch; ++k) {
        rates[k] = model.channels[k].rate(t, y, d);
        if (rates[k] > bounds[k] * (1 + 1e-9) + 1e-12)
          throw std::runtime_error(
              "simulate_hybrid: rate of channel " + model.channels[k].name +
              " exceeded its thinning bound; the bound refresh step is too coarse");
        live += rates[k];
      }
      double u = rng.uniform() * total;
      if (u < live) {
        std::size_t k = 0;
        while (k + 1 < nch && u >= rates[k]) u -= rates[k], ++k;
        model.channels[k].jump(t, y, d);
        ++path.n_jumps;
      }
      check_finite(y, t, "simulate_hybrid");
    }
    check_finite(y, seg_end, "simulate_hybrid");
    path.times.push_back(seg_end);
    path.fluid.push_back(y);
    path.discrete.push_back(d);
  }
  return path;
}

HybridPath simulate_hybrid_inversion(const HybridModel& model, std::vector<double> y, State d,
                                     double horizon, Rng& rng, const HybridOptions& opts) {
  for (const HybridChannel& ch : model.channels)
    if (!ch.inverse_hazard)
      throw std::invalid_argument("simulate_hybrid: channel " + ch.name +
                                  " has no inverse hazard; use thinning");
  const int grid = pick_grid(horizon, opts.step, opts.grid_points);
  HybridPath path;
  path.times.push_back(0.0);
  path.fluid.push_back(y);
  path.discrete.push_back(d);

  auto drift = [&](double t, const std::vector<double>& yy) { return model.drift(t, yy, d); };
  std::vector<double> tmp;
  double t = 0;
  int next = 1;
  // Advances the deterministic part to time target, recording grid points.
  auto advance_to = [&](double target) {
    while (next <= grid) {
      const double g = horizon * next / grid;
      if (g > target + 1e-12 * std::max(1.0, target)) break;
      rk4_advance(drift, t, g, opts.step, y, tmp);
      check_finite(y, g, "simulate_hybrid");
      t = g;
      path.times.push_back(g);
      path.fluid.push_back(y);
      path.discrete.push_back(d);
      ++next;
    }
    rk4_advance(drift, t, target, opts.step, y, tmp);
    check_finite(y, target, "simulate_hybrid");
    t = target;
  };

  while (t < horizon) {
    double best = kInf;
    std::size_t kbest = 0;
    for (std::size_t k = 0; k < model.channels.size(); ++k) {
      const double target = rng.exponential(1.0);
      const double delta = model.channels[k].inverse_hazard(t, y, d, target);
      if (delta < best) {
        best = delta;
        kbest = k;
      }
    }
    if (!(best >= 0))
      throw std::runtime_error("simulate_hybrid: inverse hazard returned a negative waiting time");
    if (t + best >= horizon || !std::isfinite(best)) {
      advance_to(horizon);
      break;
    }
    advance_to(t + best);
    model.channels[kbest].jump(t, y, d);
    ++path.n_jumps;
  }
  while (next <= grid) {
    path.times.push_back(horizon * next / grid);
    path.fluid.push_back(y);
    path.discrete.push_back(d);
    ++next;
  }
  return path;
}

}  // namespace

HybridPath simulate_hybrid(const HybridModel& model, std::vector<double> init, State discrete_init,
                           double horizon, std::uint64_t seed, const HybridOptions& opts) {
  if (opts.step <= 0) throw std::invalid_argument("simulate_hybrid: step must be positive");
  if (horizon < 0) throw std::invalid_argument("simulate_hybrid: horizon must be nonnegative");
  if (init.size() != model.fluid_names.size() || discrete_init.size() != model.discrete_names.size())
    throw std::invalid_argument("simulate_hybrid: initial state has wrong dimensions");
  Rng rng = Rng::seeded(seed);
  if (opts.method == HybridMethod::Inversion)
    return simulate_hybrid_inversion(model, std::move(init), std::move(discrete_init), horizon, rng,
                                     opts);
  return simulate_hybrid_thinning(model, std::move(init), std::move(discrete_init), horizon, rng,
                                  opts);
}

HybridModel hybrid_limit(const Network& net, const ScalingExponents& scaling) {
  if (static_cast<int>(scaling.alpha.size()) != net.n_species() ||
      static_cast<int>(scaling.beta.size()) != net.n_reactions())
    throw std::invalid_argument("hybrid_limit: scaling does not match the network");
  HybridModel model;
  std::vector<int> fluid_pos(net.n_species(), -1), disc_pos(net.n_species(), -1);
  for (int i = 0; i < net.n_species(); ++i) {
    if (scaling.alpha[i] > Rat(0)) {
      fluid_pos[i] = static_cast<int>(model.fluid_species.size());
      model.fluid_species.push_back(i);
      model.fluid_names.push_back(net.species()[i].name);
    } else if (scaling.alpha[i] == Rat(0)) {
      disc_pos[i] = static_cast<int>(model.discrete_species.size());
      model.discrete_species.push_back(i);
      model.discrete_names.push_back(net.species()[i].name);
    } else {
      throw std::invalid_argument("hybrid_limit: negative abundance exponent for species " +
                                  net.species()[i].name);
    }
  }

  const std::vector<double> lambdas = scaled_rate_constants(net, scaling);
  std::vector<DriftTerm> terms;
  struct JumpChannel {
    std::string name;
    double lambda = 0;
    std::vector<std::pair<int, int>> fluid_factors;
    std::vector<std::pair<int, int>> disc_factors;
    std::vector<std::pair<int, std::int64_t>> jumps;  // discrete position, net change
  };
  std::vector<JumpChannel> jump_channels;

  for (int k = 0; k < net.n_reactions(); ++k) {
    const Reaction& r = net.reactions()[k];
    const auto column = net.stoichiometry_column(k);
    Rat rho = scaling.gamma + scaling.beta[k];
    for (const Term& in : r.inputs) rho += scaling.alpha[in.species] * in.mult;

    bool disc_changed = false;
    for (int i = 0; i < net.n_species(); ++i)
      if (column[i] != 0 && disc_pos[i] >= 0) disc_changed = true;

    if (disc_changed) {
      if (rho > Rat(0))
        throw std::runtime_error("hybrid_limit: reaction " + r.name +
                                 " changes a discrete species at a diverging rate");
      if (rho == Rat(0)) {
        JumpChannel ch;
        ch.name = r.name;
        ch.lambda = lambdas[k];
        for (const Term& in : r.inputs) {
          if (fluid_pos[in.species] >= 0) {
            ch.lambda /= fact_d(in.mult);
            ch.fluid_factors.emplace_back(fluid_pos[in.species], in.mult);
          } else {
            ch.disc_factors.emplace_back(disc_pos[in.species], in.mult);
          }
        }
        for (int i = 0; i < net.n_species(); ++i)
          if (column[i] != 0 && disc_pos[i] >= 0) ch.jumps.emplace_back(disc_pos[i], column[i]);
        jump_channels.push_back(std::move(ch));
      }
    }

    for (int i = 0; i < net.n_species(); ++i) {
      if (column[i] == 0 || fluid_pos[i] < 0) continue;
      const Rat o = rho - scaling.alpha[i];
      if (o < Rat(0)) continue;
      if (o > Rat(0))
        throw std::runtime_error("hybrid_limit: reaction " + r.name + " drives species " +
                                 net.species()[i].name + " at a diverging rate");
      DriftTerm term;
      term.coord = fluid_pos[i];
      term.coeff = lambdas[k] * static_cast<double>(column[i]);
      for (const Term& in : r.inputs) {
        if (fluid_pos[in.species] >= 0) {
          term.coeff /= fact_d(in.mult);
          term.fluid_factors.emplace_back(fluid_pos[in.species], in.mult);
        } else {
          term.disc_factors.emplace_back(disc_pos[in.species], in.mult);
        }
      }
      terms.push_back(std::move(term));
    }
  }

  const int dim = static_cast<int>(model.fluid_species.size());
  model.drift = [terms, dim](double, const std::vector<double>& y, const State& d) {
    std::vector<double> dy(dim, 0.0);
    for (const DriftTerm& t : terms) dy[t.coord] += eval_term(t, y, &d);
    return dy;
  };
  for (const JumpChannel& ch : jump_channels) {
    HybridChannel out;
    out.name = ch.name;
    out.rate = [ch](double, const std::vector<double>& y, const State& d) {
      double p = ch.lambda;
      for (auto [c, m] : ch.fluid_factors)
        for (int r = 0; r < m; ++r) p *= y[c];
      for (auto [j, m] : ch.disc_factors) p *= binom_count(d[j], m);
      return std::max(p, 0.0);
    };
    out.jump = [ch](double, std::vector<double>&, State& d) {
      for (auto [j, delta] : ch.jumps) d[j] += delta;
    };
    model.channels.push_back(std::move(out));
  }
  return model;
}

// --- Template-model case reductions ------------------------------------------------

double LogisticLaw::solution(double v0, double t) const {
  if (saturation == 0) return growth == 0 ? v0 : v0 * std::exp(growth * t);
  if (growth == 0) return v0 / (1 + saturation * v0 * t);
  const double e = std::exp(-growth * t);
  return growth * v0 / (saturation * v0 + (growth - saturation * v0) * e);
}

double logistic_solution(double eps, double t) {
  if (!(eps > 0)) throw std::invalid_argument("logistic_solution: initial value must be positive");
  return 2.0 * eps / (eps + (2.0 - eps) * std::exp(-7.5 * t));
}

ReducedModel build_reduced(const Network& net, const ScalingExponents& scaling) {
  const auto schema = match_viral_schema(net);
  if (!schema)
    throw std::invalid_argument(
        "build_reduced: case reductions are defined for the three-species template model");
  const LimitCase kind = classify_case(net, scaling);
  if (kind == LimitCase::Unclassified)
    throw std::runtime_error("build_reduced: the scaling does not match a supported case");

  ReducedModel model;
  model.kind = kind;
  model.scaling = scaling;

  const std::vector<double> all = scaled_rate_constants(net, scaling);
  const auto all_exact = scaled_rate_constants_exact(net, scaling);
  const int rk[6] = {schema->r_genome_prod,    schema->r_template_conv, schema->r_struct_prod,
                     schema->r_template_death, schema->r_struct_death,  schema->r_pair_loss};
  double l[6];
  std::optional<Rat> le[6];
  model.lambdas.resize(6);
  for (int j = 0; j < 6; ++j) {
    l[j] = all[rk[j]];
    le[j] = all_exact[rk[j]];
    model.lambdas[j] = l[j];
  }

  const std::string tname = net.species()[schema->s_template].name;
  const std::string gname = net.species()[schema->s_genome].name;
  const std::string sname = net.species()[schema->s_struct].name;

  switch (kind) {
    case LimitCase::FullODE: {
      model.ode.dim = 3;
      model.ode.names = {tname, gname, sname};
      model.ode.species = {schema->s_template, schema->s_genome, schema->s_struct};
      const double l1 = l[0], l2 = l[1], l3 = l[2], l4 = l[3], l5 = l[4], l6 = l[5];
      model.ode.drift = [l1, l2, l3, l4, l5, l6](double, const std::vector<double>& v) {
        return std::vector<double>{l2 * v[1] - l4 * v[0],
                                   l1 * v[0] - l2 * v[1] - l6 * v[1] * v[2],
                                   l3 * v[0] - l5 * v[2]};
      };
      break;
    }
    case LimitCase::AveragedODE: {
      model.ode.dim = 2;
      model.ode.names = {tname, gname};
      model.ode.species = {schema->s_template, schema->s_genome};
      const double l1 = l[0], l2 = l[1], l4 = l[3];
      const double c = l[5] * l[2] / l[4];
      model.ode.drift = [l1, l2, l4, c](double, const std::vector<double>& v) {
        return std::vector<double>{l2 * v[1] - l4 * v[0], l1 * v[0] - l2 * v[1] - c * v[1] * v[0]};
      };
      break;
    }
    case LimitCase::LogisticSlow: {
      model.ode.dim = 1;
      model.ode.names = {gname};
      model.ode.species = {schema->s_genome};
      LogisticLaw law;
      law.growth = l[0] * l[1] / l[3] - l[1];
      law.saturation = l[5] * l[2] * l[1] / (l[4] * l[3]);
      if (le[0] && le[1] && le[3] && *le[3] != Rat(0))
        law.growth_exact = (*le[0]) * (*le[1]) / (*le[3]) - (*le[1]);
      if (le[1] && le[2] && le[3] && le[4] && le[5] && *le[3] != Rat(0) && *le[4] != Rat(0))
        law.saturation_exact = (*le[5]) * (*le[2]) * (*le[1]) / ((*le[4]) * (*le[3]));
      if (law.growth_exact)
        if (auto p = rat_pow_exact(scaling.n0, -scaling.gamma))
          law.growth_descaled = (*law.growth_exact) * (*p);
      if (law.saturation_exact) {
        const Rat alpha_g = scaling.alpha[schema->s_genome];
        if (auto p = rat_pow_exact(scaling.n0, -(alpha_g + scaling.gamma)))
          law.saturation_descaled = (*law.saturation_exact) * (*p);
      }
      const double a = law.growth, b = law.saturation;
      model.ode.drift = [a, b](double, const std::vector<double>& v) {
        return std::vector<double>{a * v[0] - b * v[0] * v[0]};
      };
      model.logistic = std::move(law);
      if (le[1] && le[3] && le[2] && le[4])
        model.fast = FastSubsystem{*le[1], *le[3], *le[2], *le[4]};
      break;
    }
    case LimitCase::Unclassified:
      break;
  }
  return model;
}

// --- Averaged moment engine --------------------------------------------------------

namespace {

using Big = boost::multiprecision::cpp_int;
using BigRat = boost::rational<Big>;
using BigPoly = std::vector<BigRat>;  // index = power of v

BigRat to_big(const Rat& r) { return {Big(r.numerator()), Big(r.denominator())}; }

void add_scaled(BigPoly& dst, const BigPoly& src, const BigRat& c, int shift) {
  if (dst.size() < src.size() + shift) dst.resize(src.size() + shift);
  for (std::size_t i = 0; i < src.size(); ++i) dst[i + shift] += src[i] * c;
}

double big_to_double(const BigRat& r) {
  return r.numerator().convert_to<double>() / r.denominator().convert_to<double>();
}

Rat big_to_rat(const BigRat& r) {
  static const Big lo = Big(std::numeric_limits<std::int64_t>::min());
  static const Big hi = Big(std::numeric_limits<std::int64_t>::max());
  if (r.numerator() < lo || r.numerator() > hi || r.denominator() > hi)
    throw std::overflow_error("averaged moment coefficient exceeds the 64-bit rational range");
  return {r.numerator().convert_to<std::int64_t>(), r.denominator().convert_to<std::int64_t>()};
}

}  // namespace

struct AveragedMomentEngine::Impl {
  int cap = 8;
  // table[m][n] = E[Z^n Y^m] as a polynomial in v.
  std::vector<std::vector<BigPoly>> table;
};

AveragedMomentEngine::AveragedMomentEngine()
    : AveragedMomentEngine(FastSubsystem{Rat(5, 2), Rat(1, 4), Rat(1), Rat(2)}) {}

AveragedMomentEngine::AveragedMomentEngine(const FastSubsystem& rates, int max_degree) {
  if (rates.z_birth < Rat(0) || rates.y_prod < Rat(0) || rates.z_death <= Rat(0) ||
      rates.y_decay <= Rat(0))
    throw std::invalid_argument("averaged moments: rates must be nonnegative with positive decay");
  if (max_degree < 2 || max_degree > 32)
    throw std::invalid_argument("averaged moments: max degree must lie in [2, 32]");

  const BigRat zb = to_big(rates.z_birth), zd = to_big(rates.z_death);
  const BigRat yp = to_big(rates.y_prod), yd = to_big(rates.y_decay);
  std::vector<std::vector<Big>> binom(max_degree + 1, std::vector<Big>(max_degree + 1, 0));
  for (int i = 0; i <= max_degree; ++i) {
    binom[i][0] = 1;
    for (int j = 1; j <= i; ++j) binom[i][j] = binom[i - 1][j - 1] + (j <= i - 1 ? binom[i - 1][j] : 0);
  }

  auto impl = std::make_shared<Impl>();
  impl->cap = max_degree;
  impl->table.resize(max_degree + 1);
  for (int m = 0; m <= max_degree; ++m) {
    impl->table[m].resize(max_degree - m + 1);
    for (int n = 0; n <= max_degree - m; ++n) {
      if (n == 0 && m == 0) {
        impl->table[0][0] = {BigRat(1)};
        continue;
      }
      // Stationarity of the generator on z^n y^m:
      //   (yd m + zd n) E[Z^n Y^m] = zb v sum_{j<n} C(n,j) E[Z^j Y^m]
      //     + zd sum_{j<=n-2} C(n,j) (-1)^{n-j} E[Z^{j+1} Y^m]
      //     + yp m E[Z^{n+1} Y^{m-1}]
      BigPoly rhs;
      for (int j = 0; j < n; ++j)
        add_scaled(rhs, impl->table[m][j], zb * BigRat(binom[n][j]), 1);
      for (int j = 0; j + 2 <= n; ++j) {
        const BigRat sign = ((n - j) % 2 == 0) ? BigRat(1) : BigRat(-1);
        add_scaled(rhs, impl->table[m][j + 1], zd * sign * BigRat(binom[n][j]), 0);
      }
      if (m > 0) add_scaled(rhs, impl->table[m - 1][n + 1], yp * BigRat(m), 0);
      const BigRat denom = yd * BigRat(m) + zd * BigRat(n);
      for (BigRat& c : rhs) c /= denom;
      impl->table[m][n] = std::move(rhs);
    }
  }
  impl_ = std::move(impl);
}

int AveragedMomentEngine::max_degree() const { return impl_->cap; }

std::vector<Rat> AveragedMomentEngine::poly(int n, int m) const {
  if (n < 0 || m < 0) throw std::domain_error("averaged moments: orders must be nonnegative");
  if (n + m > impl_->cap)
    throw std::domain_error("averaged moments: total order exceeds the degree cap");
  const BigPoly& p = impl_->table[m][n];
  std::vector<Rat> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = big_to_rat(p[i]);
  return out;
}

double AveragedMomentEngine::eval(double v, int n, int m) const {
  if (n < 0 || m < 0) throw std::domain_error("averaged moments: orders must be nonnegative");
  if (n + m > impl_->cap)
    throw std::domain_error("averaged moments: total order exceeds the degree cap");
  const BigPoly& p = impl_->table[m][n];
  double acc = 0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * v + big_to_double(p[i]);
  return acc;
}

namespace {
const AveragedMomentEngine& canonical_engine() {
  static const AveragedMomentEngine engine;
  return engine;
}
}  // namespace

double averaged_moments(double v2, int n, int m) { return canonical_engine().eval(v2, n, m); }

std::vector<Rat> averaged_moment_poly(int n, int m) { return canonical_engine().poly(n, m); }

double FastLaw::z_var() const { return moments.at({2, 0}) - moments.at({1, 0}) * moments.at({1, 0}); }
double FastLaw::y_var() const { return moments.at({0, 2}) - moments.at({0, 1}) * moments.at({0, 1}); }
double FastLaw::zy_cov() const {
  return moments.at({1, 1}) - moments.at({1, 0}) * moments.at({0, 1});
}

FastLaw averaged_fast_law(double v2) {
  if (v2 < 0) throw std::invalid_argument("averaged_fast_law: slow value must be nonnegative");
  const AveragedMomentEngine& eng = canonical_engine();
  FastLaw law;
  law.v2 = v2;
  law.z_mean = eng.eval(v2, 1, 0);
  for (int n = 0; n <= 2; ++n)
    for (int m = 0; m + n <= 2; ++m)
      if (n + m > 0) law.moments[{n, m}] = eng.eval(v2, n, m);
  return law;
}

// --- Report rendering ----------------------------------------------------------------

namespace {

std::string poly_in_v(const std::vector<Rat>& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == Rat(0)) continue;
    if (!out.empty()) out += " + ";
    out += to_string(p[i]);
    if (i == 1) out += "*v";
    if (i > 1) out += "*v^" + std::to_string(i);
  }
  return out.empty() ? "0" : out;
}

}  // namespace

std::string render_reduced_report(const ReducedModel& model) {
  std::ostringstream os;
  os << "case: " << to_string(model.kind) << "\n";
  if (model.scaling.gamma != Rat(0))
    os << "time scale: n0^" << to_string(model.scaling.gamma) << " with n0 = "
       << to_string(model.scaling.n0) << "\n";
  const auto& nm = model.ode.names;
  const auto& l = model.lambdas;
  switch (model.kind) {
    case LimitCase::FullODE:
      os << "  d" << nm[0] << "/dt = " << fmt_g(l[1]) << "*" << nm[1] << " - " << fmt_g(l[3]) << "*"
         << nm[0] << "\n";
      os << "  d" << nm[1] << "/dt = " << fmt_g(l[0]) << "*" << nm[0] << " - " << fmt_g(l[1]) << "*"
         << nm[1] << " - " << fmt_g(l[5]) << "*" << nm[1] << "*" << nm[2] << "\n";
      os << "  d" << nm[2] << "/dt = " << fmt_g(l[2]) << "*" << nm[0] << " - " << fmt_g(l[4]) << "*"
         << nm[2] << "\n";
      break;
    case LimitCase::AveragedODE:
      os << "  d" << nm[0] << "/dt = " << fmt_g(l[1]) << "*" << nm[1] << " - " << fmt_g(l[3]) << "*"
         << nm[0] << "\n";
      os << "  d" << nm[1] << "/dt = " << fmt_g(l[0]) << "*" << nm[0] << " - " << fmt_g(l[1]) << "*"
         << nm[1] << " - " << fmt_g(l[5] * l[2] / l[4]) << "*" << nm[1] << "*" << nm[0]
         << "   (structure averaged out)\n";
      break;
    case LimitCase::LogisticSlow: {
      const LogisticLaw& law = *model.logistic;
      os << "  d" << nm[0] << "/dt = " << fmt_g(law.growth) << "*" << nm[0] << " - "
         << fmt_g(law.saturation) << "*" << nm[0] << "^2\n";
      if (law.growth_descaled && law.saturation_descaled)
        os << "molecule-unit coefficients: growth = " << to_string(*law.growth_descaled)
           << ", saturation = " << to_string(*law.saturation_descaled) << "\n";
      if (model.fast) {
        const AveragedMomentEngine eng(*model.fast);
        os << "fast subsystem at " << nm[0] << " level v (Z templates, Y structure):\n";
        os << "  E[Z]   = " << poly_in_v(eng.poly(1, 0)) << "   (Poisson marginal)\n";
        os << "  E[Y]   = " << poly_in_v(eng.poly(0, 1)) << "\n";
        os << "  E[Z*Y] = " << poly_in_v(eng.poly(1, 1)) << "\n";
        os << "  E[Y^2] = " << poly_in_v(eng.poly(0, 2)) << "\n";
      }
      break;
    }
    case LimitCase::Unclassified:
      break;
  }
  return os.str();
}

}  // namespace rxscale
