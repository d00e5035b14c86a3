#include <algorithm>
#include <cstdint>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rxscale/branching.hpp"
#include "rxscale/exemplars.hpp"
#include "rxscale/limits.hpp"
#include "rxscale/network.hpp"
#include "rxscale/rng.hpp"
#include "rxscale/scaling.hpp"
#include "rxscale/simulate.hpp"
#include "rxscale/stats.hpp"
#include "rxscale/verify.hpp"

namespace {

using namespace rxscale;

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kParse = 2;
constexpr int kVerifyFail = 3;
constexpr int kRuntime = 4;

struct ParseFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RuntimeFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseFailure("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Network load_network(const std::string& net_file, const std::string& exemplar_name) {
  if (!exemplar_name.empty()) {
    try {
      return exemplar(exemplar_name).network;
    } catch (const std::out_of_range&) {
      std::string names;
      for (const auto& n : exemplar_names()) names += " " + n;
      throw ParseFailure("unknown exemplar '" + exemplar_name + "'; available:" + names);
    }
  }
  try {
    return parse_network(read_file(net_file));
  } catch (const ParseFailure&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseFailure(net_file + ": " + e.what());
  }
}

// Output sink: a file when a path is given, stdout otherwise.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary);
      if (!file_) throw RuntimeFailure("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Rat parse_rat_arg(const std::string& text) {
  try {
    return rat_from_string(text);
  } catch (const std::exception& e) {
    throw ParseFailure(std::string("bad rational '") + text + "': " + e.what());
  }
}

// --- ensemble observables -------------------------------------------------------
//
// mean(X)@t   sample mean and variance of species X at time t
// var(X)@t    sample variance of X at t (se column is the variance se)
// dist(X)@t   empirical distribution of X at t, one row per observed value

struct Observable {
  enum Kind { Mean, Var, Dist } kind = Mean;
  std::string species;
  int index = -1;
  double time = 0;
  std::string text;
};

Observable parse_observable(const std::string& spec, const Network& net) {
  Observable o;
  o.text = spec;
  auto open = spec.find('(');
  auto close = spec.find(')', open == std::string::npos ? 0 : open);
  auto at = spec.find('@', close == std::string::npos ? 0 : close);
  if (open == std::string::npos || close == std::string::npos || at == std::string::npos ||
      at != close + 1 || at + 1 >= spec.size())
    throw ParseFailure("bad observable '" + spec + "' (want kind(SPECIES)@time)");
  std::string kind = spec.substr(0, open);
  if (kind == "mean")
    o.kind = Observable::Mean;
  else if (kind == "var")
    o.kind = Observable::Var;
  else if (kind == "dist")
    o.kind = Observable::Dist;
  else
    throw ParseFailure("bad observable kind '" + kind + "' (want mean, var, or dist)");
  o.species = spec.substr(open + 1, close - open - 1);
  o.index = net.species_index(o.species);
  if (o.index < 0) throw ParseFailure("observable names unknown species '" + o.species + "'");
  try {
    std::size_t used = 0;
    o.time = std::stod(spec.substr(at + 1), &used);
    if (used != spec.size() - at - 1) throw std::invalid_argument("trailing text");
  } catch (const std::exception&) {
    throw ParseFailure("bad observable time in '" + spec + "'");
  }
  if (o.time < 0) throw ParseFailure("observable time must be >= 0");
  return o;
}

// Anchor magnitudes for the exponent search: n0^alpha from the annotation
// hints when the network is fully annotated, initial counts when they are all
// positive, nothing otherwise (full-range sweep).
std::vector<double> default_magnitudes(const Network& net) {
  bool all_hinted = net.n0().has_value();
  for (const auto& s : net.species()) all_hinted = all_hinted && s.alpha.has_value();
  std::vector<double> m;
  if (all_hinted) {
    for (const auto& s : net.species()) m.push_back(rat_pow_d(*net.n0(), *s.alpha));
    return m;
  }
  for (const auto& s : net.species()) {
    if (s.init <= 0) return {};
    m.push_back(static_cast<double>(s.init));
  }
  return m;
}

// Species sharing an identical alpha hint search over one shared exponent.
std::vector<std::vector<int>> hinted_alpha_groups(const Network& net) {
  std::map<Rat, std::vector<int>> by_hint;
  for (int i = 0; i < net.n_species(); ++i)
    if (net.species()[i].alpha) by_hint[*net.species()[i].alpha].push_back(i);
  std::vector<std::vector<int>> groups;
  for (auto& [hint, members] : by_hint)
    if (members.size() > 1) groups.push_back(std::move(members));
  return groups;
}

// Runs the exponent search, stepping the denominator cap down when the raw
// search space would blow the candidate budget.  An explicitly requested cap
// is honored as-is.
std::vector<ScalingExponents> propose_with_backoff(const Network& net,
                                                   const std::vector<double>& magnitudes, Rat n0,
                                                   long max_denom, bool denom_explicit,
                                                   long& used_denom) {
  ProposeOptions popts;
  popts.equal_alpha = hinted_alpha_groups(net);
  std::vector<long> ladder = {max_denom};
  if (!denom_explicit)
    for (long d : {4L, 3L, 2L})
      if (d < max_denom) ladder.push_back(d);
  std::string first_error;
  for (long d : ladder) {
    try {
      used_denom = d;
      return propose_exponents(net, magnitudes, n0, d, popts);
    } catch (const std::runtime_error& e) {
      if (first_error.empty()) first_error = e.what();
    }
  }
  throw RuntimeFailure(first_error);
}

// --- subcommand bodies ------------------------------------------------------------

struct SimulateArgs {
  std::string net_file, exemplar_name, out;
  double t_end = 0;
  std::uint64_t seed = 12345;
  int grid = 0;
};

int cmd_simulate(const SimulateArgs& a) {
  Network net = load_network(a.net_file, a.exemplar_name);
  StopRule stop;
  stop.horizon = a.t_end;
  Trajectory traj = ssa_run(net, net.initial_state(), stop, a.seed);
  Sink sink(a.out);
  write_trajectory_csv(sink.stream(), net, traj, a.grid);
  if (traj.truncated) {
    std::cerr << "run truncated at t=" << traj.final_time << " after " << traj.n_jumps()
              << " events\n";
    return kRuntime;
  }
  return kOk;
}

struct EnsembleArgs {
  std::string net_file, exemplar_name, out;
  double t_end = 0;
  std::uint64_t seed = 12345;
  std::uint64_t runs = 0;
  int threads = 0;
  std::vector<std::string> observables;
};

int cmd_ensemble(const EnsembleArgs& a) {
  Network net = load_network(a.net_file, a.exemplar_name);

  std::vector<Observable> obs;
  for (const auto& spec : a.observables) obs.push_back(parse_observable(spec, net));
  if (obs.empty())
    for (const auto& s : net.species()) {
      Observable o;
      o.kind = Observable::Mean;
      o.species = s.name;
      o.index = net.species_index(s.name);
      o.time = a.t_end;
      o.text = "mean(" + s.name + ")";
      obs.push_back(o);
    }

  std::vector<double> grid;
  for (const auto& o : obs) grid.push_back(o.time);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty() || grid.back() < a.t_end) grid.push_back(a.t_end);
  std::map<double, std::size_t> grid_pos;
  for (std::size_t g = 0; g < grid.size(); ++g) grid_pos[grid[g]] = g;

  const int n_sp = net.n_species();
  std::uint64_t truncated = 0;
  auto summarize = [&](const RunOutcome& out, const std::vector<State>& states) {
    std::vector<double> row;
    row.reserve(states.size() * n_sp + 1);
    for (const auto& x : states)
      for (auto v : x) row.push_back(static_cast<double>(v));
    row.push_back(out.truncated ? 1.0 : 0.0);
    return row;
  };
  EnsembleOptions eo;
  eo.threads = a.threads;
  auto rows = run_ensemble(net, net.initial_state(), a.runs, a.seed, grid, summarize, eo);
  for (const auto& r : rows)
    if (r.back() != 0.0) ++truncated;

  Sink sink(a.out);
  std::ostream& out = sink.stream();
  out << "time,observable,mean,var,se,n\n";
  for (const auto& o : obs) {
    std::size_t col = grid_pos.at(o.time) * n_sp + static_cast<std::size_t>(o.index);
    ColumnStats cs = column_stats(rows, col);
    std::string label = o.text.substr(0, o.text.find('@'));
    if (o.kind == Observable::Mean) {
      out << num(o.time) << "," << label << "," << num(cs.mean) << "," << num(cs.variance) << ","
          << num(cs.se_mean) << "," << cs.n << "\n";
    } else if (o.kind == Observable::Var) {
      out << num(o.time) << "," << label << "," << num(cs.variance) << ","
          << num(cs.se_variance * cs.se_variance) << "," << num(cs.se_variance) << "," << cs.n
          << "\n";
    } else {
      std::map<std::int64_t, std::uint64_t> hist;
      for (const auto& r : rows) ++hist[std::llround(r[col])];
      for (const auto& [value, count] : hist) {
        double p = static_cast<double>(count) / static_cast<double>(rows.size());
        double se = std::sqrt(p * (1 - p) / static_cast<double>(rows.size()));
        out << num(o.time) << "," << label << "=" << value << "," << num(p) << ","
            << num(p * (1 - p)) << "," << num(se) << "," << count << "\n";
      }
    }
  }
  if (truncated) {
    std::cerr << truncated << " of " << rows.size() << " runs truncated\n";
    return kRuntime;
  }
  return kOk;
}

struct ScaleArgs {
  std::string net_file, exemplar_name, n0_text, csv_out;
  long max_denom = 6;
  bool denom_explicit = false;
  std::size_t limit = 5;
};

void print_balance(std::ostream& out, const Network& net, const BalanceReport& rep) {
  out << "balance (" << (rep.viral_schema ? "template schema" : "generic bands")
      << "): " << (rep.admissible() ? "admissible" : "violated") << "\n";
  std::size_t w = 0;
  for (const auto& c : rep.conditions) w = std::max(w, c.name.size());
  for (const auto& c : rep.conditions) {
    out << "  " << (c.satisfied ? "ok   " : "FAIL ") << c.name
        << std::string(w - c.name.size() + 2, ' ') << c.detail << "\n";
  }
  if (!rep.fast_unbalanced.empty()) {
    out << "  note: fast unbalanced species:";
    for (int i : rep.fast_unbalanced) out << " " << net.species()[i].name;
    out << "\n";
  }
}

void print_orders(std::ostream& out, const Network& net, const std::vector<TermOrder>& orders) {
  std::size_t ws = 0, wr = 0;
  for (const auto& t : orders) {
    ws = std::max(ws, net.species()[t.species].name.size());
    wr = std::max(wr, net.reactions()[t.reaction].name.size());
  }
  out << "term orders:\n";
  for (const auto& t : orders) {
    const auto& sn = net.species()[t.species].name;
    const auto& rn = net.reactions()[t.reaction].name;
    out << "  " << sn << std::string(ws - sn.size() + 2, ' ') << rn
        << std::string(wr - rn.size() + 2, ' ') << to_string(t.order) << "\n";
  }
}

int cmd_scale(const ScaleArgs& a) {
  Network net = load_network(a.net_file, a.exemplar_name);
  Rat n0 = !a.n0_text.empty() ? parse_rat_arg(a.n0_text)
                              : (net.n0() ? *net.n0() : default_n0(net));

  std::vector<double> magnitudes = default_magnitudes(net);
  long used_denom = a.max_denom;
  std::vector<ScalingExponents> props =
      propose_with_backoff(net, magnitudes, n0, a.max_denom, a.denom_explicit, used_denom);

  std::cout << "network: " << net.n_species() << " species, " << net.n_reactions()
            << " reactions; n0 = " << to_string(n0) << "\n";
  std::cout << "admissible assignments: " << props.size() << " (exponent denominators <= "
            << used_denom << (magnitudes.empty() ? ", no magnitude anchors" : "") << ")\n";
  if (used_denom != a.max_denom)
    std::cout << "note: denominator cap lowered from " << a.max_denom
              << " to keep the search inside its budget\n";

  std::size_t shown = std::min(a.limit, props.size());
  for (std::size_t i = 0; i < shown; ++i) {
    std::cout << "\n--- proposal " << (i + 1) << " of " << props.size() << " ---\n";
    std::cout << render_scaling(net, props[i]);
    if (i == 0) {
      BalanceReport rep = check_balance(net, props[i]);
      print_balance(std::cout, net, rep);
      print_orders(std::cout, net, rep.orders);
    }
  }
  if (shown < props.size())
    std::cout << "\n(" << (props.size() - shown) << " more; raise --limit to see them)\n";

  if (!a.csv_out.empty() && !props.empty()) {
    Sink sink(a.csv_out);
    std::ostream& out = sink.stream();
    out << "species,reaction,order\n";
    for (const auto& t : term_orders(net, props.front())) {
      out << net.species()[t.species].name << "," << net.reactions()[t.reaction].name << ","
          << to_string(t.order) << "\n";
    }
  }
  return kOk;
}

struct ReduceArgs {
  std::string net_file, exemplar_name, scaling_file, path_out, hybrid_out;
  bool auto_scaling = false;
  double t_end = 1.0;
  double step = 1e-3;
  int grid = 0;
  std::uint64_t seed = 12345;
};

int cmd_reduce(const ReduceArgs& a) {
  if (!a.auto_scaling && a.scaling_file.empty()) {
    std::cerr << "reduce needs either --scaling FILE or --auto\n";
    return kUsage;
  }
  Network net = load_network(a.net_file, a.exemplar_name);
  ScalingExponents scaling;
  if (a.auto_scaling) {
    Rat n0 = net.n0() ? *net.n0() : default_n0(net);
    long used_denom = 6;
    std::vector<ScalingExponents> props =
        propose_with_backoff(net, default_magnitudes(net), n0, 6, false, used_denom);
    if (props.empty()) throw RuntimeFailure("no admissible scaling found for this network");
    scaling = props.front();
  } else {
    try {
      scaling = parse_scaling(read_file(a.scaling_file), net);
    } catch (const ParseFailure&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseFailure(a.scaling_file + ": " + e.what());
    }
  }

  bool is_template = match_viral_schema(net).has_value();
  ReducedModel red;
  ODEModel fluid;
  bool have_fluid = false;
  std::string fluid_refusal;
  if (is_template) {
    try {
      red = build_reduced(net, scaling);
    } catch (const std::exception& e) {
      throw RuntimeFailure(std::string("reduction failed: ") + e.what());
    }
    std::cout << render_reduced_report(red);
  } else {
    std::cout << "case: generic network, no closed-form reduction\n\n";
    std::cout << render_scaling(net, scaling);
    try {
      fluid = fluid_limit(net, scaling);
      have_fluid = true;
      std::cout << "\nfluid limit: ode in";
      for (const auto& n : fluid.names) std::cout << " " << n;
      std::cout << "\n";
    } catch (const std::exception& e) {
      fluid_refusal = e.what();
      std::cout << "\nfluid limit: not available (" << fluid_refusal << ")\n";
    }
    try {
      HybridModel probe = hybrid_limit(net, scaling);
      std::cout << "hybrid limit: fluid";
      for (const auto& n : probe.fluid_names) std::cout << " " << n;
      std::cout << " driven by discrete";
      for (const auto& n : probe.discrete_names) std::cout << " " << n;
      std::cout << "\n";
    } catch (const std::exception& e) {
      std::cout << "hybrid limit: not available (" << e.what() << ")\n";
    }
  }

  if (!a.path_out.empty()) {
    const ODEModel* ode = nullptr;
    if (is_template && red.ode.dim > 0) {
      ode = &red.ode;
    } else if (have_fluid && fluid.dim > 0) {
      ode = &fluid;
    }
    if (!ode) {
      std::string msg = "no deterministic part to integrate";
      if (!fluid_refusal.empty()) msg += ": " + fluid_refusal;
      throw RuntimeFailure(msg);
    }
    std::vector<double> z0 = descaled_initial_state(net, scaling);
    std::vector<double> init;
    for (int sp : ode->species) init.push_back(z0[sp]);
    OdePath path = integrate_ode(*ode, init, a.t_end, a.step, a.grid);
    Sink sink(a.path_out);
    std::ostream& out = sink.stream();
    out << "time";
    for (const auto& n : ode->names) out << "," << n;
    out << "\n";
    for (std::size_t r = 0; r < path.times.size(); ++r) {
      out << num(path.times[r]);
      for (double v : path.values[r]) out << "," << num(v);
      out << "\n";
    }
  }

  if (!a.hybrid_out.empty()) {
    HybridModel hm;
    try {
      hm = hybrid_limit(net, scaling);
    } catch (const std::exception& e) {
      throw RuntimeFailure(std::string("no hybrid limit: ") + e.what());
    }
    std::vector<double> z0 = descaled_initial_state(net, scaling);
    std::vector<double> fluid_init;
    for (int sp : hm.fluid_species) fluid_init.push_back(z0[sp]);
    State discrete_init;
    for (int sp : hm.discrete_species) discrete_init.push_back(net.species()[sp].init);
    HybridOptions ho;
    ho.step = a.step;
    ho.grid_points = a.grid;
    HybridPath hp;
    try {
      hp = simulate_hybrid(hm, fluid_init, discrete_init, a.t_end, a.seed, ho);
    } catch (const std::exception& e) {
      throw RuntimeFailure(std::string("hybrid simulation failed: ") + e.what());
    }
    Sink sink(a.hybrid_out);
    std::ostream& out = sink.stream();
    out << "time";
    for (const auto& n : hm.fluid_names) out << "," << n;
    for (const auto& n : hm.discrete_names) out << "," << n;
    out << "\n";
    for (std::size_t r = 0; r < hp.times.size(); ++r) {
      out << num(hp.times[r]);
      for (double v : hp.fluid[r]) out << "," << num(v);
      for (auto v : hp.discrete[r]) out << "," << v;
      out << "\n";
    }
  }
  return kOk;
}

struct VerifyArgs {
  std::string exemplar_name;
  std::string level = "full";
  std::uint64_t seed = 12345;
  int threads = 0;
};

int cmd_verify(const VerifyArgs& a) {
  try {
    exemplar(a.exemplar_name);
  } catch (const std::out_of_range&) {
    std::string names;
    for (const auto& n : exemplar_names()) names += " " + n;
    std::cerr << "unknown exemplar '" << a.exemplar_name << "'; available:" << names << "\n";
    return kUsage;
  }
  VerifyOptions opts;
  opts.level = a.level == "fast" ? VerifyLevel::Fast : VerifyLevel::Full;
  opts.seed = a.seed;
  opts.threads = a.threads;

  auto results = verify_exemplar(a.exemplar_name, opts);
  if (results.empty()) {
    std::cout << "no checks registered for " << a.exemplar_name << "\n";
    return kOk;
  }
  bool all_ok = true;
  for (const auto& r : results) {
    std::printf("[%s] %s (%.1fs)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.seconds);
    if (!r.detail.empty()) std::printf("       %s\n", r.detail.c_str());
    if (!r.passed) {
      all_ok = false;
      std::cerr << "verification failed: " << r.name << "\n";
    }
  }
  return all_ok ? kOk : kVerifyFail;
}

int cmd_list_exemplars(const std::string& export_dir) {
  for (const auto& name : exemplar_names()) {
    Exemplar ex = exemplar(name);
    std::cout << name << ": " << ex.network.n_species() << " species, "
              << ex.network.n_reactions() << " reactions\n";
    std::cout << "  " << ex.notes << "\n";
    std::cout << "  scalings:";
    for (const auto& [key, sc] : ex.scalings)
      std::cout << " " << key << (key == ex.default_scaling ? "*" : "");
    std::cout << "\n  oracles:";
    for (const auto& [key, fn] : ex.oracles) std::cout << " " << key;
    std::cout << "\n";
    if (!export_dir.empty()) {
      std::string path = export_dir + "/" + name + ".rxn";
      std::ofstream out(path, std::ios::binary);
      if (!out) throw RuntimeFailure("cannot write " + path);
      out << render_network(ex.network);
      std::cout << "  wrote " << path << "\n";
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiscale reaction network toolkit: exact simulation, scaling analysis, "
               "reduced limit models, and statistical verification"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Run one exact trajectory, write CSV");
  auto* sim_net = c_sim->add_option("--net", sim.net_file, "Network file");
  c_sim->add_option("--exemplar", sim.exemplar_name, "Built-in exemplar name")
      ->excludes(sim_net);
  c_sim->add_option("--t-end", sim.t_end, "Simulation horizon")->required()
      ->check(CLI::NonNegativeNumber);
  c_sim->add_option("--seed", sim.seed, "RNG seed")->envname("RXSCALE_SEED");
  c_sim->add_option("--grid", sim.grid, "Sample on an even grid of this many cells instead of "
                                        "jump times")
      ->check(CLI::NonNegativeNumber);
  c_sim->add_option("--out", sim.out, "Output CSV path (default stdout)");

  EnsembleArgs ens;
  auto* c_ens = app.add_subcommand("ensemble", "Run many trajectories, write summary CSV");
  auto* ens_net = c_ens->add_option("--net", ens.net_file, "Network file");
  c_ens->add_option("--exemplar", ens.exemplar_name, "Built-in exemplar name")
      ->excludes(ens_net);
  c_ens->add_option("--t-end", ens.t_end, "Simulation horizon")->required()
      ->check(CLI::NonNegativeNumber);
  c_ens->add_option("--runs", ens.runs, "Number of runs")->required()
      ->check(CLI::PositiveNumber);
  c_ens->add_option("--seed", ens.seed, "Base RNG seed")->envname("RXSCALE_SEED");
  c_ens->add_option("--threads", ens.threads, "Worker threads (0 = one per core); does not "
                                              "affect results")
      ->envname("RXSCALE_THREADS")
      ->check(CLI::NonNegativeNumber);
  c_ens->add_option("--observable", ens.observables,
                    "What to record: mean(X)@t, var(X)@t, or dist(X)@t; repeatable "
                    "(default: mean of every species at --t-end)");
  c_ens->add_option("--out", ens.out, "Output CSV path (default stdout)");

  ScaleArgs sca;
  auto* c_sca = app.add_subcommand("scale", "Propose scaling exponents and report balance");
  auto* sca_net = c_sca->add_option("--net", sca.net_file, "Network file");
  c_sca->add_option("--exemplar", sca.exemplar_name, "Built-in exemplar name")
      ->excludes(sca_net);
  c_sca->add_option("--n0", sca.n0_text, "Anchor magnitude (integer or p/q; default: the "
                                         "network's n0, else the largest rate magnitude)");
  auto* sca_denom = c_sca->add_option("--max-denom", sca.max_denom,
                                      "Largest exponent denominator")
                        ->check(CLI::PositiveNumber);
  c_sca->add_option("--limit", sca.limit, "How many proposals to print");
  c_sca->add_option("--csv", sca.csv_out, "Write species,reaction,order table for the top "
                                          "proposal");

  ReduceArgs red;
  auto* c_red = app.add_subcommand("reduce", "Build the reduced limit model for a scaling");
  auto* red_net = c_red->add_option("--net", red.net_file, "Network file");
  c_red->add_option("--exemplar", red.exemplar_name, "Built-in exemplar name")
      ->excludes(red_net);
  auto* red_sc = c_red->add_option("--scaling", red.scaling_file, "Scaling file");
  c_red->add_flag("--auto", red.auto_scaling, "Use the top proposed scaling")
      ->excludes(red_sc);
  c_red->add_option("--t-end", red.t_end, "Horizon for exported paths")
      ->check(CLI::NonNegativeNumber);
  c_red->add_option("--step", red.step, "Integrator step for exported paths")
      ->check(CLI::PositiveNumber);
  c_red->add_option("--grid", red.grid, "Even output grid cells for exported paths")
      ->check(CLI::NonNegativeNumber);
  c_red->add_option("--seed", red.seed, "Seed for the hybrid path")->envname("RXSCALE_SEED");
  c_red->add_option("--path-out", red.path_out, "Write the deterministic reduced path CSV");
  c_red->add_option("--hybrid-out", red.hybrid_out, "Simulate the hybrid limit once, write CSV");

  VerifyArgs ver;
  auto* c_ver = app.add_subcommand("verify", "Run an exemplar's statistical checks");
  c_ver->add_option("exemplar", ver.exemplar_name, "Exemplar name")->required();
  c_ver->add_option("--level", ver.level, "fast (reduced counts) or full")
      ->check(CLI::IsMember({"fast", "full"}));
  c_ver->add_option("--seed", ver.seed, "Base RNG seed")->envname("RXSCALE_SEED");
  c_ver->add_option("--threads", ver.threads, "Worker threads (0 = one per core); does not "
                                              "affect results")
      ->envname("RXSCALE_THREADS")
      ->check(CLI::NonNegativeNumber);

  std::string export_dir;
  auto* c_list = app.add_subcommand("list-exemplars", "List built-in exemplars");
  c_list->add_option("--export", export_dir, "Also write each network file into this directory");

  try {
    app.parse(argc, argv);
    sca.denom_explicit = sca_denom->count() > 0;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (c_sim->parsed()) return cmd_simulate(sim);
    if (c_ens->parsed()) return cmd_ensemble(ens);
    if (c_sca->parsed()) return cmd_scale(sca);
    if (c_red->parsed()) return cmd_reduce(red);
    if (c_ver->parsed()) return cmd_verify(ver);
    if (c_list->parsed()) return cmd_list_exemplars(export_dir);
  } catch (const ParseFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kParse;
  } catch (const RuntimeFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
