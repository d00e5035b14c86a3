#include "rxscale/network.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace rxscale {

int Reaction::order() const {
  int total = 0;
  for (const auto& t : inputs) total += t.mult;
  return total;
}

namespace {

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

void check_terms(const std::vector<Term>& terms, int n_species, const char* side) {
  for (const auto& t : terms) {
    if (t.species < 0 || t.species >= n_species)
      throw std::invalid_argument(std::string(side) + " references unknown species");
    if (t.mult < 1 || t.mult > kMaxMultiplicity)
      throw std::invalid_argument(std::string(side) + " multiplicity out of range");
  }
}

// Number of ways to choose m molecules out of x, as a double.  Exact for the
// counts this library deals with (x < 2^53 / x^(m-1)).
double falling_binomial(std::int64_t x, int m) {
  if (x < m) return 0.0;
  double acc = 1.0;
  for (int i = 0; i < m; ++i) acc *= static_cast<double>(x - i);
  for (int i = 2; i <= m; ++i) acc /= static_cast<double>(i);
  return acc;
}

std::int64_t binomial_count(std::int64_t x, int m) {
  if (x < m) return 0;
  __int128 acc = 1;
  for (int i = 0; i < m; ++i) acc *= (x - i);
  for (int i = 2; i <= m; ++i) acc /= i;
  if (acc > std::numeric_limits<std::int64_t>::max())
    throw std::overflow_error("binomial_count overflow");
  return static_cast<std::int64_t>(acc);
}

}  // namespace

int Network::add_species(Species s) {
  if (!valid_name(s.name)) throw std::invalid_argument("invalid species name '" + s.name + "'");
  if (species_index(s.name) >= 0)
    throw std::invalid_argument("duplicate species '" + s.name + "'");
  if (s.init < 0) throw std::invalid_argument("negative initial count for '" + s.name + "'");
  species_.push_back(std::move(s));
  return n_species() - 1;
}

int Network::add_reaction(Reaction r) {
  if (!valid_name(r.name)) throw std::invalid_argument("invalid reaction name '" + r.name + "'");
  if (reaction_index(r.name) >= 0)
    throw std::invalid_argument("duplicate reaction '" + r.name + "'");
  check_terms(r.inputs, n_species(), "input");
  check_terms(r.outputs, n_species(), "output");
  if (!(r.kappa > 0.0)) throw std::invalid_argument("non-positive rate constant in '" + r.name + "'");
  if (r.kappa_exact && !(*r.kappa_exact > Rat(0)))
    throw std::invalid_argument("non-positive rate constant in '" + r.name + "'");
  reactions_.push_back(std::move(r));
  return n_reactions() - 1;
}

int Network::species_index(std::string_view name) const {
  for (int i = 0; i < n_species(); ++i)
    if (species_[i].name == name) return i;
  return -1;
}

int Network::reaction_index(std::string_view name) const {
  for (int i = 0; i < n_reactions(); ++i)
    if (reactions_[i].name == name) return i;
  return -1;
}

State Network::initial_state() const {
  State x(species_.size());
  for (std::size_t i = 0; i < species_.size(); ++i) x[i] = species_[i].init;
  return x;
}

std::vector<std::int64_t> Network::stoichiometry_column(int k) const {
  std::vector<std::int64_t> col(species_.size(), 0);
  const auto& r = reactions_.at(k);
  for (const auto& t : r.inputs) col[t.species] -= t.mult;
  for (const auto& t : r.outputs) col[t.species] += t.mult;
  return col;
}

std::vector<std::vector<std::int64_t>> Network::stoichiometry_matrix() const {
  std::vector<std::vector<std::int64_t>> m(species_.size(),
                                           std::vector<std::int64_t>(reactions_.size(), 0));
  for (int k = 0; k < n_reactions(); ++k) {
    auto col = stoichiometry_column(k);
    for (int i = 0; i < n_species(); ++i) m[i][k] = col[i];
  }
  return m;
}

double Network::propensity(int k, const State& x) const {
  const auto& r = reactions_.at(k);
  double a = r.kappa;
  for (const auto& t : r.inputs) {
    a *= falling_binomial(x[t.species], t.mult);
    if (a == 0.0) return 0.0;
  }
  return a;
}

Rat Network::propensity_exact(int k, const State& x) const {
  const auto& r = reactions_.at(k);
  if (!r.kappa_exact)
    throw std::domain_error("propensity_exact: rate constant of '" + r.name +
                            "' has no exact representation");
  Rat a = *r.kappa_exact;
  for (const auto& t : r.inputs) a *= Rat(binomial_count(x[t.species], t.mult), 1);
  return a;
}

void Network::apply_reaction(int k, State& x) const {
  const auto& r = reactions_.at(k);
  for (const auto& t : r.inputs) {
    if (x[t.species] < t.mult)
      throw std::domain_error("apply_reaction: insufficient molecules of '" +
                              species_[t.species].name + "' for '" + r.name + "'");
  }
  for (const auto& t : r.inputs) x[t.species] -= t.mult;
  for (const auto& t : r.outputs) x[t.species] += t.mult;
}

double volume_form_kappa(double kappa_classical, std::span<const int> multiplicities, double n) {
  double kappa = kappa_classical;
  int order = 0;
  for (int m : multiplicities) {
    order += m;
    for (int i = 2; i <= m; ++i) kappa *= i;
  }
  return kappa * std::pow(n, 1.0 - order);
}

Rat volume_form_kappa(const Rat& kappa_classical, std::span<const int> multiplicities,
                      const Rat& n) {
  Rat kappa = kappa_classical;
  long order = 0;
  for (int m : multiplicities) {
    order += m;
    for (int i = 2; i <= m; ++i) kappa *= Rat(i, 1);
  }
  return kappa * rat_pow(n, 1 - order);
}

// --- Text format -----------------------------------------------------------

namespace {

struct Tokenizer {
  std::string_view line;
  std::size_t pos = 0;
  int lineno;

  explicit Tokenizer(std::string_view l, int n) : line(l), lineno(n) {}

  void skip_ws() {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
  }

  bool done() {
    skip_ws();
    return pos >= line.size();
  }

  // Token kinds: names, numbers (incl. scientific), and the punctuation
  // ":", "->", "+", "=", "/", "@".
  std::string next() {
    skip_ws();
    if (pos >= line.size()) throw ParseError(lineno, "unexpected end of line");
    char c = line[pos];
    if (c == '-' && pos + 1 < line.size() && line[pos + 1] == '>') {
      pos += 2;
      return "->";
    }
    if (c == ':' || c == '+' || c == '=' || c == '/' || c == '@' || c == '-') {
      ++pos;
      return std::string(1, c);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < line.size() &&
             (std::isalnum(static_cast<unsigned char>(line[pos])) || line[pos] == '_'))
        ++pos;
      return std::string(line.substr(start, pos - start));
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos;
      while (pos < line.size()) {
        char d = line[pos];
        if (std::isdigit(static_cast<unsigned char>(d)) || d == '.') {
          ++pos;
        } else if ((d == 'e' || d == 'E') && pos + 1 < line.size() &&
                   (std::isdigit(static_cast<unsigned char>(line[pos + 1])) ||
                    ((line[pos + 1] == '+' || line[pos + 1] == '-') && pos + 2 < line.size() &&
                     std::isdigit(static_cast<unsigned char>(line[pos + 2]))))) {
          pos += 2;  // consume 'e' and sign-or-digit
        } else {
          break;
        }
      }
      return std::string(line.substr(start, pos - start));
    }
    throw ParseError(lineno, std::string("unexpected character '") + c + "'");
  }

  std::string peek() {
    std::size_t save = pos;
    if (done()) return "";
    std::string t = next();
    pos = save;
    return t;
  }

  void expect(std::string_view want) {
    std::string got = next();
    if (got != want)
      throw ParseError(lineno, "expected '" + std::string(want) + "', got '" + got + "'");
  }
};

bool is_number_token(const std::string& t) {
  return !t.empty() && (std::isdigit(static_cast<unsigned char>(t[0])) || t[0] == '.');
}

Rat parse_rational(Tokenizer& tz) {
  bool neg = false;
  std::string t = tz.next();
  if (t == "-") {
    neg = true;
    t = tz.next();
  }
  if (!is_number_token(t)) throw ParseError(tz.lineno, "expected a number, got '" + t + "'");
  std::string text = t;
  if (tz.peek() == "/") {
    tz.expect("/");
    std::string den = tz.next();
    if (!is_number_token(den)) throw ParseError(tz.lineno, "expected denominator");
    text += "/" + den;
  }
  try {
    Rat v = rat_from_string(text);
    return neg ? -v : v;
  } catch (const std::exception& e) {
    throw ParseError(tz.lineno, e.what());
  }
}

std::int64_t parse_int(Tokenizer& tz, const char* what) {
  std::string t = tz.next();
  if (!is_number_token(t) || t.find_first_of(".eE") != std::string::npos)
    throw ParseError(tz.lineno, std::string("expected integer ") + what + ", got '" + t + "'");
  try {
    return std::stoll(t);
  } catch (const std::exception&) {
    throw ParseError(tz.lineno, std::string("integer out of range: ") + t);
  }
}

std::vector<Term> parse_complex(Tokenizer& tz, const Network& net) {
  std::vector<Term> terms;
  if (tz.peek() == "0") {
    tz.next();
    return terms;
  }
  for (;;) {
    int mult = 1;
    std::string t = tz.next();
    if (is_number_token(t)) {
      if (t.find_first_of(".eE") != std::string::npos)
        throw ParseError(tz.lineno, "multiplicity must be an integer");
      mult = std::stoi(t);
      t = tz.next();
    }
    if (!valid_name(t)) throw ParseError(tz.lineno, "expected species name, got '" + t + "'");
    int idx = net.species_index(t);
    if (idx < 0) throw ParseError(tz.lineno, "unknown species '" + t + "'");
    if (mult < 1) throw ParseError(tz.lineno, "multiplicity must be positive");

    // "A + A" folds into multiplicity 2.
    bool merged = false;
    for (auto& existing : terms) {
      if (existing.species == idx) {
        existing.mult += mult;
        merged = true;
        break;
      }
    }
    if (!merged) terms.push_back({idx, mult});

    if (tz.peek() == "+")
      tz.expect("+");
    else
      break;
  }
  for (const auto& t : terms)
    if (t.mult > kMaxMultiplicity)
      throw ParseError(tz.lineno,
                       "multiplicity exceeds " + std::to_string(kMaxMultiplicity));
  return terms;
}

}  // namespace

Network parse_network(std::string_view text) {
  Network net;
  std::istringstream in{std::string(text)};
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    Tokenizer tz(raw, lineno);
    if (tz.done()) continue;
    std::string head = tz.next();

    try {
      if (head == "species") {
        Species s;
        s.name = tz.next();
        if (!valid_name(s.name)) throw ParseError(lineno, "invalid species name '" + s.name + "'");
        tz.expect("init");
        tz.expect("=");
        s.init = parse_int(tz, "initial count");
        if (!tz.done()) {
          tz.expect("alpha");
          tz.expect("=");
          s.alpha = parse_rational(tz);
        }
        if (!tz.done()) throw ParseError(lineno, "trailing tokens after species declaration");
        net.add_species(std::move(s));
      } else if (head == "reaction") {
        Reaction r;
        r.name = tz.next();
        if (!valid_name(r.name)) throw ParseError(lineno, "invalid reaction name '" + r.name + "'");
        tz.expect(":");
        r.inputs = parse_complex(tz, net);
        tz.expect("->");
        r.outputs = parse_complex(tz, net);
        tz.expect("@");
        Rat kappa = parse_rational(tz);
        if (!(kappa > Rat(0))) throw ParseError(lineno, "non-positive rate constant");
        r.kappa_exact = kappa;
        r.kappa = to_double(kappa);
        if (!tz.done()) {
          tz.expect("beta");
          tz.expect("=");
          r.beta = parse_rational(tz);
        }
        if (!tz.done()) throw ParseError(lineno, "trailing tokens after reaction declaration");
        net.add_reaction(std::move(r));
      } else if (head == "n0") {
        tz.expect("=");
        Rat n0 = parse_rational(tz);
        if (!(n0 > Rat(0))) throw ParseError(lineno, "n0 must be positive");
        if (!tz.done()) throw ParseError(lineno, "trailing tokens after n0");
        net.set_n0(n0);
      } else {
        throw ParseError(lineno, "unknown declaration '" + head + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(lineno, e.what());
    }
  }
  return net;
}

Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open network file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_network(buf.str());
}

namespace {

std::string render_kappa(const Reaction& r) {
  if (r.kappa_exact) {
    try {
      return to_decimal_string(*r.kappa_exact);
    } catch (const std::domain_error&) {
      // fall through to double formatting
    }
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", r.kappa);
  return buf;
}

std::string render_complex(const Network& net, const std::vector<Term>& terms) {
  if (terms.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out += " + ";
    if (terms[i].mult != 1) out += std::to_string(terms[i].mult) + " ";
    out += net.species()[terms[i].species].name;
  }
  return out;
}

}  // namespace

std::string render_network(const Network& net) {
  std::ostringstream out;
  if (net.n0()) out << "n0 = " << to_decimal_string(*net.n0()) << "\n";
  for (const auto& s : net.species()) {
    out << "species " << s.name << " init=" << s.init;
    if (s.alpha) out << " alpha=" << to_string(*s.alpha);
    out << "\n";
  }
  for (int k = 0; k < net.n_reactions(); ++k) {
    const auto& r = net.reactions()[k];
    out << "reaction " << r.name << ": " << render_complex(net, r.inputs) << " -> "
        << render_complex(net, r.outputs) << " @ " << render_kappa(r);
    if (r.beta) out << " beta=" << to_string(*r.beta);
    out << "\n";
  }
  return out.str();
}

}  // namespace rxscale
