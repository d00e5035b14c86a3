#include "rxscale/scaling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace rxscale {

namespace {

Rat rat_abs(const Rat& r) { return r < Rat(0) ? -r : r; }

void require_complete(const Network& net, const ScalingExponents& s) {
  if (static_cast<int>(s.alpha.size()) != net.n_species() ||
      static_cast<int>(s.beta.size()) != net.n_reactions())
    throw std::invalid_argument("scaling covers " + std::to_string(s.alpha.size()) +
                                " species and " + std::to_string(s.beta.size()) +
                                " reactions; network has " + std::to_string(net.n_species()) +
                                " and " + std::to_string(net.n_reactions()));
}

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

double log_in_base(double x, double base) { return std::log(x) / std::log(base); }

}  // namespace

double split_rate_constant(double kappa, const Rat& beta, const Rat& n0) {
  if (!(n0 > Rat(1))) throw std::invalid_argument("split_rate_constant: n0 must exceed 1");
  return kappa * rat_pow_d(n0, -beta);
}

std::optional<Rat> split_rate_constant_exact(const std::optional<Rat>& kappa, const Rat& beta,
                                             const Rat& n0) {
  if (!kappa) return std::nullopt;
  auto p = rat_pow_exact(n0, -beta);
  if (!p) return std::nullopt;
  return *kappa * *p;
}

std::vector<double> scaled_rate_constants(const Network& net, const ScalingExponents& s) {
  require_complete(net, s);
  std::vector<double> out(net.n_reactions());
  for (int k = 0; k < net.n_reactions(); ++k)
    out[k] = split_rate_constant(net.reactions()[k].kappa, s.beta[k], s.n0);
  return out;
}

std::vector<std::optional<Rat>> scaled_rate_constants_exact(const Network& net,
                                                            const ScalingExponents& s) {
  require_complete(net, s);
  std::vector<std::optional<Rat>> out(net.n_reactions());
  for (int k = 0; k < net.n_reactions(); ++k)
    out[k] = split_rate_constant_exact(net.reactions()[k].kappa_exact, s.beta[k], s.n0);
  return out;
}

std::vector<double> descaled_initial_state(const Network& net, const ScalingExponents& s) {
  require_complete(net, s);
  std::vector<double> z(net.n_species());
  for (int i = 0; i < net.n_species(); ++i)
    z[i] = static_cast<double>(net.species()[i].init) / rat_pow_d(s.n0, s.alpha[i]);
  return z;
}

std::vector<TermOrder> term_orders(const Network& net, const ScalingExponents& s) {
  require_complete(net, s);
  std::vector<TermOrder> out;
  for (int k = 0; k < net.n_reactions(); ++k) {
    Rat insum(0);
    for (const auto& t : net.reactions()[k].inputs) insum += s.alpha[t.species] * Rat(t.mult);
    const auto col = net.stoichiometry_column(k);
    for (int i = 0; i < net.n_species(); ++i) {
      if (col[i] == 0) continue;
      out.push_back({i, k, s.gamma + s.beta[k] + insum - s.alpha[i], -s.alpha[i]});
    }
  }
  return out;
}

std::optional<ViralSchema> match_viral_schema(const Network& net) {
  if (net.n_reactions() != 6) return std::nullopt;

  std::vector<char> used_as_input(net.n_species(), 0);
  for (const auto& r : net.reactions())
    for (const auto& t : r.inputs) used_as_input[t.species] = 1;

  std::vector<int> core;
  for (int i = 0; i < net.n_species(); ++i)
    if (used_as_input[i]) core.push_back(i);
  if (core.size() != 3) return std::nullopt;

  std::vector<int> role_of(net.n_species(), -1);  // filled per permutation

  // Role multisets per pattern slot: inputs, then outputs restricted to the
  // three matched species.  Roles: 0 template, 1 genome, 2 struct.
  struct Slot {
    std::vector<int> in, out;
  };
  static const std::array<Slot, 6> pattern = {{
      {{0}, {0, 1}},  // T -> T + G
      {{1}, {0}},     // G -> T
      {{0}, {0, 2}},  // T -> T + S
      {{0}, {}},      // T -> 0
      {{2}, {}},      // S -> 0
      {{1, 2}, {}},   // G + S -> 0
  }};

  std::array<int, 3> perm = {0, 1, 2};
  std::sort(perm.begin(), perm.end());
  do {
    for (int i = 0; i < net.n_species(); ++i) role_of[i] = -1;
    for (int r = 0; r < 3; ++r) role_of[core[perm[r]]] = r;

    std::array<int, 6> slot_to_reaction;
    slot_to_reaction.fill(-1);
    bool ok = true;
    for (int k = 0; k < 6 && ok; ++k) {
      const auto& rxn = net.reactions()[k];
      std::vector<int> in, out;
      for (const auto& t : rxn.inputs) {
        if (t.mult != 1 || role_of[t.species] < 0) {
          ok = false;
          break;
        }
        in.push_back(role_of[t.species]);
      }
      if (!ok) break;
      for (const auto& t : rxn.outputs) {
        if (role_of[t.species] < 0) continue;  // untracked sink product
        if (t.mult != 1) {
          ok = false;
          break;
        }
        out.push_back(role_of[t.species]);
      }
      if (!ok) break;
      std::sort(in.begin(), in.end());
      std::sort(out.begin(), out.end());

      int matched = -1;
      for (int sl = 0; sl < 6; ++sl)
        if (pattern[sl].in == in && pattern[sl].out == out) {
          matched = sl;
          break;
        }
      if (matched < 0 || slot_to_reaction[matched] >= 0) {
        ok = false;
        break;
      }
      slot_to_reaction[matched] = k;
    }
    if (ok) {
      ViralSchema sch;
      sch.s_template = core[perm[0]];
      sch.s_genome = core[perm[1]];
      sch.s_struct = core[perm[2]];
      sch.r_genome_prod = slot_to_reaction[0];
      sch.r_template_conv = slot_to_reaction[1];
      sch.r_struct_prod = slot_to_reaction[2];
      sch.r_template_death = slot_to_reaction[3];
      sch.r_struct_death = slot_to_reaction[4];
      sch.r_pair_loss = slot_to_reaction[5];
      return sch;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

namespace {

// Order-one band check for lambda = kappa * n0^{-beta}; exact when the rate
// constant and the power of n0 both have exact rational forms and the slack
// is integral, double otherwise.
bool lambda_in_band(const Reaction& rxn, const Rat& beta, const Rat& n0, double slack,
                    double* lambda_out = nullptr) {
  const double lam = split_rate_constant(rxn.kappa, beta, n0);
  if (lambda_out) *lambda_out = lam;
  const double ls = std::floor(slack);
  if (ls == slack && ls >= 1.0) {
    if (auto ex = split_rate_constant_exact(rxn.kappa_exact, beta, n0)) {
      const Rat c(static_cast<std::int64_t>(ls));
      const Rat lo = Rat(1) / c;
      return *ex >= lo && *ex <= c;
    }
  }
  return lam >= 1.0 / slack - 1e-12 && lam <= slack + 1e-12;
}

}  // namespace

BalanceReport check_balance(const Network& net, const ScalingExponents& s, double band_slack) {
  BalanceReport rep;
  rep.orders = term_orders(net, s);

  auto add = [&rep](std::string name, std::string detail, bool ok) {
    if (!ok) rep.violated.push_back(name);
    rep.conditions.push_back({std::move(name), std::move(detail), ok});
  };

  for (int k = 0; k < net.n_reactions(); ++k) {
    double lam = 0.0;
    const bool ok = lambda_in_band(net.reactions()[k], s.beta[k], s.n0, band_slack, &lam);
    add("rate_band(" + net.reactions()[k].name + ")",
        "lambda = " + fmt_double(lam) + " in [" + fmt_double(1.0 / band_slack) + ", " +
            fmt_double(band_slack) + "]",
        ok);
  }

  // Top order per species and whether production/loss both reach it.
  std::vector<std::optional<Rat>> top(net.n_species());
  for (const auto& t : rep.orders)
    if (!top[t.species] || t.order > *top[t.species]) top[t.species] = t.order;
  std::vector<char> prod_at_top(net.n_species(), 0), loss_at_top(net.n_species(), 0);
  for (const auto& t : rep.orders) {
    if (t.order != *top[t.species]) continue;
    const auto col = net.stoichiometry_column(t.reaction);
    (col[t.species] > 0 ? prod_at_top : loss_at_top)[t.species] = 1;
  }
  for (int i = 0; i < net.n_species(); ++i)
    if (top[i] && *top[i] > Rat(0) && !(prod_at_top[i] && loss_at_top[i]))
      rep.fast_unbalanced.push_back(i);

  const auto schema = match_viral_schema(net);
  if (schema) {
    rep.viral_schema = true;
    const auto& a = s.alpha;
    const auto& b = s.beta;
    const Rat& g = s.gamma;
    const int T = schema->s_template, G = schema->s_genome, S = schema->s_struct;
    const int ra = schema->r_genome_prod, rb = schema->r_template_conv,
              rc = schema->r_struct_prod, rd = schema->r_template_death,
              re = schema->r_struct_death, rf = schema->r_pair_loss;
    auto bn = [&](int k) { return "beta[" + net.reactions()[k].name + "]"; };
    auto an = [&](int i) { return "alpha[" + net.species()[i].name + "]"; };

    add("template_rate_normalized", bn(ra) + " = 0, got " + to_string(b[ra]), b[ra] == Rat(0));
    add("genome_production_balance",
        an(G) + " = gamma + " + an(T) + ": " + to_string(a[G]) + " vs " + to_string(g + a[T]),
        a[G] == g + a[T]);
    add("genome_conversion_balance",
        "gamma + " + bn(rb) + " = 0, got " + to_string(g + b[rb]), g + b[rb] == Rat(0));
    add("genome_pairing_balance",
        "gamma + " + bn(rf) + " + " + an(S) + " = 0, got " + to_string(g + b[rf] + a[S]),
        g + b[rf] + a[S] == Rat(0));
    add("template_turnover_balance",
        bn(rb) + " + " + an(G) + " = " + bn(rd) + " + " + an(T) + ": " + to_string(b[rb] + a[G]) +
            " vs " + to_string(b[rd] + a[T]),
        b[rb] + a[G] == b[rd] + a[T]);

    const Rat prod = g + b[rc] + a[T];
    const Rat loss_decay = g + b[re] + a[S];
    const Rat loss_pair = g + b[rf] + a[G] + a[S];
    add("struct_production_dominates",
        "production order " + to_string(prod) + " vs losses " + to_string(loss_decay) + ", " +
            to_string(loss_pair),
        prod >= loss_decay && prod >= loss_pair);
    add("struct_dominant_balance",
        "production order " + to_string(prod) + " equals a loss order",
        prod == loss_decay || prod == loss_pair);

    const bool chain = b[rf] <= b[rb] && b[rb] <= b[rd] && b[rd] <= b[ra] && b[ra] <= b[re] &&
                       b[re] < b[rc];
    add("rate_ordering",
        bn(rf) + " <= " + bn(rb) + " <= " + bn(rd) + " <= " + bn(ra) + " <= " + bn(re) + " < " +
            bn(rc),
        chain);
    rep.ordering_ok = chain;
  } else {
    bool any_zero = rep.orders.empty();
    std::string zeros;
    for (int i = 0; i < net.n_species(); ++i)
      if (top[i] && *top[i] == Rat(0)) {
        any_zero = true;
        zeros += (zeros.empty() ? "" : ", ") + net.species()[i].name;
      }
    add("time_scale_active",
        zeros.empty() ? "no species has top term order 0"
                      : "species at top order 0: " + zeros,
        any_zero);
    rep.ordering_ok = true;
  }
  return rep;
}

const char* to_string(LimitCase c) {
  switch (c) {
    case LimitCase::FullODE:
      return "FullODE";
    case LimitCase::AveragedODE:
      return "AveragedODE";
    case LimitCase::LogisticSlow:
      return "LogisticSlow";
    default:
      return "Unclassified";
  }
}

LimitCase classify_case(const Network& net, const ScalingExponents& s) {
  require_complete(net, s);
  const auto schema = match_viral_schema(net);
  if (!schema) return LimitCase::Unclassified;
  const Rat& a1 = s.alpha[schema->s_template];
  const Rat& a2 = s.alpha[schema->s_genome];
  const Rat& b5 = s.beta[schema->r_struct_death];
  if (a1 == a2 && a1 > Rat(0)) {
    if (b5 == Rat(0)) return LimitCase::FullODE;
    if (b5 > Rat(0)) return LimitCase::AveragedODE;
    return LimitCase::Unclassified;
  }
  if (a2 > a1 && a1 >= Rat(0)) return LimitCase::LogisticSlow;
  return LimitCase::Unclassified;
}

// --- Proposal search ----------------------------------------------------------

namespace {

// All reduced fractions p/q with q <= max_den in [lo, hi].
std::vector<Rat> rational_grid(double lo, double hi, long max_den) {
  std::vector<Rat> out;
  if (hi < lo) return out;
  const double eps = 1e-9;
  for (long q = 1; q <= max_den; ++q) {
    const auto p_lo = static_cast<std::int64_t>(std::ceil((lo - eps) * static_cast<double>(q)));
    const auto p_hi = static_cast<std::int64_t>(std::floor((hi + eps) * static_cast<double>(q)));
    for (std::int64_t p = p_lo; p <= p_hi; ++p) {
      if (std::gcd(p, q) != 1) continue;
      out.emplace_back(p, q);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Rat rat_approximate(double x, std::int64_t max_den) {
  // Continued-fraction convergents.
  double v = x;
  std::int64_t p0 = 1, q0 = 0, p1 = 0, q1 = 1;
  for (int it = 0; it < 64; ++it) {
    const double fl = std::floor(v);
    const auto a = static_cast<std::int64_t>(fl);
    const std::int64_t p2 = a * p0 + p1, q2 = a * q0 + q1;
    if (q2 > max_den || q2 < 0) break;
    p1 = p0;
    q1 = q0;
    p0 = p2;
    q0 = q2;
    const double frac = v - fl;
    if (frac < 1e-15) break;
    v = 1.0 / frac;
  }
  if (q0 == 0) return Rat(static_cast<std::int64_t>(std::llround(x)));
  return Rat(p0, q0);
}

struct SearchContext {
  const Network& net;
  Rat n0;
  double n0d;
  long max_den;
  const ProposeOptions& opts;
  double w;  // band half-width in exponent units
  std::vector<double> centers;       // per-species anchor, empty if no magnitudes
  std::vector<int> group_rep;        // equal-alpha representative per species
  std::vector<ScalingExponents> out;

  bool lambda_ok(int k, const Rat& beta) const {
    return lambda_in_band(net.reactions()[k], beta, n0, opts.band_slack);
  }

  std::vector<Rat> alpha_grid(int species) const {
    const double cap = to_double(opts.exponent_cap);
    double lo = 0.0, hi = cap;
    if (!centers.empty()) {
      lo = std::max(0.0, centers[species] - w);
      hi = std::max(0.0, std::min(cap, centers[species] + w));
    }
    return rational_grid(lo, hi, max_den);
  }

  std::vector<Rat> beta_grid(int k) const {
    const double cap = to_double(opts.exponent_cap);
    const double c = log_in_base(net.reactions()[k].kappa, n0d);
    std::vector<Rat> g = rational_grid(std::max(-cap, c - w), std::min(cap, c + w), max_den);
    // The double band can clip exact edge cases; keep only true band members.
    std::erase_if(g, [&](const Rat& b) { return !lambda_ok(k, b); });
    return g;
  }

  bool alpha_in_band(int species, const Rat& a) const {
    if (a < Rat(0) || a > opts.exponent_cap) return false;
    if (centers.empty()) return true;
    const double v = to_double(a);
    return v >= centers[species] - w - 1e-9 && v <= centers[species] + w + 1e-9;
  }

  bool equal_alpha_ok(const std::vector<Rat>& alpha) const {
    for (const auto& grp : opts.equal_alpha) {
      if (grp.empty()) continue;
      for (std::size_t j = 1; j < grp.size(); ++j)
        if (alpha[grp[j]] != alpha[grp[0]]) return false;
    }
    return true;
  }
};

void propose_viral(const ViralSchema& sch, SearchContext& ctx) {
  const auto& net = ctx.net;
  const int T = sch.s_template, G = sch.s_genome, S = sch.s_struct;
  const int ra = sch.r_genome_prod, rb = sch.r_template_conv, rc = sch.r_struct_prod,
            rd = sch.r_template_death, re = sch.r_struct_death, rf = sch.r_pair_loss;

  // The template production rate is the unit: its exponent is pinned to 0,
  // so its rate constant must already sit in the order-one band.
  if (!ctx.lambda_ok(ra, Rat(0))) return;

  const auto a1s = ctx.alpha_grid(T);
  const auto a3s = ctx.alpha_grid(S);
  const auto gs = rational_grid(to_double(ctx.opts.gamma_min), to_double(ctx.opts.gamma_max),
                                ctx.max_den);
  auto b5s = ctx.beta_grid(re);
  std::erase_if(b5s, [](const Rat& b) { return b < Rat(0); });

  const long D = ctx.max_den;
  for (const Rat& a1 : a1s)
    for (const Rat& g : gs) {
      const Rat a2 = g + a1;
      if (a2.denominator() > D || !ctx.alpha_in_band(G, a2)) continue;
      const Rat b2 = -g;
      if (!ctx.lambda_ok(rb, b2)) continue;
      if (!ctx.lambda_ok(rd, Rat(0))) continue;
      for (const Rat& a3 : a3s) {
        const Rat b6 = -g - a3;
        if (b6.denominator() > D || rat_abs(b6) > ctx.opts.exponent_cap) continue;
        if (!ctx.lambda_ok(rf, b6)) continue;
        for (const Rat& b5 : b5s) {
          Rat b3 = b5 + a3 - a1;
          if (b3 < Rat(0)) b3 = Rat(0);
          if (!(b3 > b5)) continue;
          if (b3.denominator() > D || b3 > ctx.opts.exponent_cap) continue;
          if (!ctx.lambda_ok(rc, b3)) continue;

          ScalingExponents s;
          s.n0 = ctx.n0;
          s.gamma = g;
          s.alpha.assign(net.n_species(), Rat(0));
          s.alpha[T] = a1;
          s.alpha[G] = a2;
          s.alpha[S] = a3;
          s.beta.assign(net.n_reactions(), Rat(0));
          s.beta[ra] = Rat(0);
          s.beta[rb] = b2;
          s.beta[rc] = b3;
          s.beta[rd] = Rat(0);
          s.beta[re] = b5;
          s.beta[rf] = b6;
          if (!ctx.equal_alpha_ok(s.alpha)) continue;
          ctx.out.push_back(std::move(s));
        }
      }
    }
}

void propose_generic(SearchContext& ctx) {
  const auto& net = ctx.net;
  const int ns = net.n_species(), nr = net.n_reactions();

  // Collapse equal-alpha groups to one slot each; a slot's grid is the
  // intersection of its members' bands.
  std::vector<int> slot_of(ns, -1);
  std::vector<std::vector<int>> slot_members;
  for (int i = 0; i < ns; ++i) {
    const int r = ctx.group_rep[i];
    if (slot_of[r] < 0) {
      slot_of[r] = static_cast<int>(slot_members.size());
      slot_members.push_back({});
    }
    slot_of[i] = slot_of[r];
    slot_members[slot_of[r]].push_back(i);
  }

  std::vector<std::vector<Rat>> alpha_grids(slot_members.size());
  for (std::size_t sl = 0; sl < slot_members.size(); ++sl) {
    std::vector<Rat> g = ctx.alpha_grid(slot_members[sl][0]);
    std::erase_if(g, [&](const Rat& a) {
      for (int i : slot_members[sl])
        if (!ctx.alpha_in_band(i, a)) return true;
      return false;
    });
    alpha_grids[sl] = std::move(g);
  }
  std::vector<std::vector<Rat>> beta_grids(nr);
  for (int k = 0; k < nr; ++k) beta_grids[k] = ctx.beta_grid(k);

  double total = 1.0;
  for (const auto& g : alpha_grids) total *= static_cast<double>(g.size());
  for (const auto& g : beta_grids) total *= static_cast<double>(g.size());
  if (total == 0.0) return;
  if (total > ctx.opts.max_candidates)
    throw std::runtime_error(
        "propose_exponents: search space of about " + fmt_double(total) +
        " candidates exceeds the budget; supply magnitudes, lower max_denominator, or raise "
        "max_candidates");

  std::vector<std::vector<int>> terms(ns);  // reactions with nonzero net change per species
  for (int k = 0; k < nr; ++k) {
    const auto col = net.stoichiometry_column(k);
    for (int i = 0; i < ns; ++i)
      if (col[i] != 0) terms[i].push_back(k);
  }

  std::vector<Rat> alpha(ns, Rat(0)), beta(nr, Rat(0));
  std::vector<Rat> insum(nr, Rat(0));
  const Rat gmin = ctx.opts.gamma_min, gmax = ctx.opts.gamma_max;
  const long D = ctx.max_den;

  // Odometer over alpha slots, then over betas; gamma is solved, not swept:
  // an admissible gamma must put some species' top term at order zero, so
  // gamma = -max_k(beta_k + insum_k - alpha_i) for at least one species i.
  std::vector<std::size_t> ai(alpha_grids.size(), 0), bi(nr, 0);
  auto set_alphas = [&]() {
    for (std::size_t sl = 0; sl < alpha_grids.size(); ++sl)
      for (int i : slot_members[sl]) alpha[i] = alpha_grids[sl][ai[sl]];
    for (int k = 0; k < nr; ++k) {
      insum[k] = Rat(0);
      for (const auto& t : net.reactions()[k].inputs)
        insum[k] += alpha[t.species] * Rat(t.mult);
    }
  };

  std::vector<Rat> gammas;
  for (;;) {
    set_alphas();
    std::fill(bi.begin(), bi.end(), 0);
    for (;;) {
      for (int k = 0; k < nr; ++k) beta[k] = beta_grids[k][bi[k]];

      gammas.clear();
      for (int i = 0; i < ns; ++i) {
        if (terms[i].empty()) continue;
        Rat top = beta[terms[i][0]] + insum[terms[i][0]] - alpha[i];
        for (std::size_t j = 1; j < terms[i].size(); ++j) {
          const int k = terms[i][j];
          const Rat o = beta[k] + insum[k] - alpha[i];
          if (o > top) top = o;
        }
        const Rat g = -top;
        if (g < gmin || g > gmax || g.denominator() > D) continue;
        if (std::find(gammas.begin(), gammas.end(), g) == gammas.end()) gammas.push_back(g);
      }
      for (const Rat& g : gammas) {
        ScalingExponents s;
        s.n0 = ctx.n0;
        s.gamma = g;
        s.alpha = alpha;
        s.beta = beta;
        ctx.out.push_back(std::move(s));
      }

      int k = 0;
      for (; k < nr; ++k) {
        if (++bi[k] < beta_grids[k].size()) break;
        bi[k] = 0;
      }
      if (k == nr) break;
    }

    std::size_t sl = 0;
    for (; sl < alpha_grids.size(); ++sl) {
      if (++ai[sl] < alpha_grids[sl].size()) break;
      ai[sl] = 0;
    }
    if (sl == alpha_grids.size()) break;
  }
}

}  // namespace

Rat default_n0(const Network& net) {
  int best = -1;
  double mag = 0.0;
  for (int k = 0; k < net.n_reactions(); ++k) {
    const double m = std::fabs(net.reactions()[k].kappa);
    if (m > mag) {
      mag = m;
      best = k;
    }
  }
  if (best < 0) throw std::invalid_argument("default_n0: network has no reactions");
  if (const auto& ex = net.reactions()[best].kappa_exact) return rat_abs(*ex);
  return rat_approximate(mag, 1'000'000);
}

std::vector<ScalingExponents> propose_exponents(const Network& net,
                                                const std::vector<double>& magnitudes, Rat n0,
                                                long max_denominator,
                                                const ProposeOptions& opts) {
  if (max_denominator < 1) throw std::invalid_argument("max_denominator must be at least 1");
  if (!magnitudes.empty() && static_cast<int>(magnitudes.size()) != net.n_species())
    throw std::invalid_argument("magnitudes size mismatch");
  for (double m : magnitudes)
    if (!(m > 0.0)) throw std::invalid_argument("magnitudes must be positive");
  if (!(opts.band_slack > 1.0)) throw std::invalid_argument("band_slack must exceed 1");
  if (n0 <= Rat(1)) n0 = default_n0(net);
  if (n0 <= Rat(1)) throw std::invalid_argument("n0 must exceed 1");
  for (const auto& grp : opts.equal_alpha)
    for (int i : grp)
      if (i < 0 || i >= net.n_species())
        throw std::invalid_argument("equal_alpha species index out of range");

  SearchContext ctx{net,   std::move(n0), 0.0, max_denominator, opts, 0.0, {},
                    {},    {}};
  ctx.n0d = to_double(ctx.n0);
  ctx.w = log_in_base(opts.band_slack, ctx.n0d);
  if (!magnitudes.empty()) {
    ctx.centers.resize(net.n_species());
    for (int i = 0; i < net.n_species(); ++i) ctx.centers[i] = log_in_base(magnitudes[i], ctx.n0d);
  }
  ctx.group_rep.resize(net.n_species());
  for (int i = 0; i < net.n_species(); ++i) ctx.group_rep[i] = i;
  for (const auto& grp : opts.equal_alpha)
    for (std::size_t j = 1; j < grp.size(); ++j) {
      // Tiny union: point everything sharing a group at one representative.
      int a = ctx.group_rep[grp[0]], b = ctx.group_rep[grp[j]];
      while (a != ctx.group_rep[a]) a = ctx.group_rep[a];
      while (b != ctx.group_rep[b]) b = ctx.group_rep[b];
      ctx.group_rep[b] = a;
    }
  for (int i = 0; i < net.n_species(); ++i) {
    int r = i;
    while (r != ctx.group_rep[r]) r = ctx.group_rep[r];
    ctx.group_rep[i] = r;
  }

  if (const auto schema = match_viral_schema(net))
    propose_viral(*schema, ctx);
  else
    propose_generic(ctx);

  const auto& centers = ctx.centers;
  auto anchor_distance = [&](const ScalingExponents& s) {
    if (centers.empty()) return 0.0;
    double d = 0.0;
    for (std::size_t i = 0; i < s.alpha.size(); ++i) d += std::fabs(to_double(s.alpha[i]) - centers[i]);
    return d;
  };
  std::sort(ctx.out.begin(), ctx.out.end(),
            [&](const ScalingExponents& x, const ScalingExponents& y) {
              if (x.gamma != y.gamma) return x.gamma < y.gamma;
              Rat bx(0), by(0);
              for (const auto& b : x.beta) bx += rat_abs(b);
              for (const auto& b : y.beta) by += rat_abs(b);
              if (bx != by) return bx < by;
              const double dx = anchor_distance(x), dy = anchor_distance(y);
              if (dx != dy) return dx < dy;
              if (x.alpha != y.alpha) return x.alpha < y.alpha;
              return x.beta < y.beta;
            });
  if (opts.max_results > 0 && ctx.out.size() > opts.max_results)
    ctx.out.resize(opts.max_results);
  return ctx.out;
}

// --- Scaling files --------------------------------------------------------------

ScalingExponents parse_scaling(std::string_view text, const Network& net) {
  ScalingExponents s;
  s.alpha.assign(net.n_species(), Rat(0));
  s.beta.assign(net.n_reactions(), Rat(0));
  std::vector<char> have_alpha(net.n_species(), 0), have_beta(net.n_reactions(), 0);
  bool have_n0 = false;

  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string line(text.substr(pos, nl == std::string_view::npos ? nl : nl - pos));
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++lineno;

    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;

    auto read_value = [&](const std::string& what) {
      std::string eq, value, extra;
      if (!(ls >> eq) || eq != "=" || !(ls >> value) || (ls >> extra))
        throw ParseError(lineno, "expected '" + what + " = VALUE'");
      try {
        return rat_from_string(value);
      } catch (const std::exception& e) {
        throw ParseError(lineno, e.what());
      }
    };
    auto read_named_value = [&](const std::string& what, std::string& name) {
      if (!(ls >> name)) throw ParseError(lineno, "expected '" + what + " NAME = VALUE'");
      return read_value(what + " " + name);
    };

    if (head == "n0") {
      s.n0 = read_value("n0");
      have_n0 = true;
    } else if (head == "gamma") {
      s.gamma = read_value("gamma");
    } else if (head == "alpha") {
      std::string name;
      const Rat v = read_named_value("alpha", name);
      const int i = net.species_index(name);
      if (i < 0) throw ParseError(lineno, "unknown species '" + name + "'");
      s.alpha[i] = v;
      have_alpha[i] = 1;
    } else if (head == "beta") {
      std::string name;
      const Rat v = read_named_value("beta", name);
      const int k = net.reaction_index(name);
      if (k < 0) throw ParseError(lineno, "unknown reaction '" + name + "'");
      s.beta[k] = v;
      have_beta[k] = 1;
    } else {
      throw ParseError(lineno, "expected n0, gamma, alpha, or beta, got '" + head + "'");
    }
  }

  std::string missing;
  for (int i = 0; i < net.n_species(); ++i)
    if (!have_alpha[i]) missing += " alpha " + net.species()[i].name;
  for (int k = 0; k < net.n_reactions(); ++k)
    if (!have_beta[k]) missing += " beta " + net.reactions()[k].name;
  if (!have_n0) missing += " n0";
  if (!missing.empty()) throw std::runtime_error("scaling incomplete; missing:" + missing);
  if (!(s.n0 > Rat(1))) throw std::runtime_error("scaling n0 must exceed 1");
  return s;
}

ScalingExponents load_scaling(const std::string& path, const Network& net) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scaling file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scaling(ss.str(), net);
}

std::string render_scaling(const Network& net, const ScalingExponents& s) {
  require_complete(net, s);
  std::string out = "n0 = " + to_string(s.n0) + "\n";
  out += "gamma = " + to_string(s.gamma) + "\n";
  for (int i = 0; i < net.n_species(); ++i)
    out += "alpha " + net.species()[i].name + " = " + to_string(s.alpha[i]) + "\n";
  for (int k = 0; k < net.n_reactions(); ++k)
    out += "beta " + net.reactions()[k].name + " = " + to_string(s.beta[k]) + "\n";
  return out;
}

std::optional<ScalingExponents> scaling_from_hints(const Network& net, Rat gamma) {
  if (!net.n0()) return std::nullopt;
  ScalingExponents s;
  s.n0 = *net.n0();
  s.gamma = std::move(gamma);
  s.alpha.reserve(net.n_species());
  for (const auto& sp : net.species()) {
    if (!sp.alpha) return std::nullopt;
    s.alpha.push_back(*sp.alpha);
  }
  s.beta.reserve(net.n_reactions());
  for (const auto& r : net.reactions()) {
    if (!r.beta) return std::nullopt;
    s.beta.push_back(*r.beta);
  }
  return s;
}

}  // namespace rxscale
