#include "cme.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace rxtest {

using rxscale::Network;
using rxscale::State;

std::ptrdiff_t ExactLaw::index_of(const State& x) const {
  auto it = std::find(states.begin(), states.end(), x);
  if (it == states.end()) return -1;
  return it - states.begin();
}

ExactLaw exact_law(const Network& net, const State& x0, double t, std::size_t max_states) {
  if (t < 0) throw std::invalid_argument("exact_law: negative time");

  std::map<State, std::size_t> index;
  std::vector<State> states{x0};
  index.emplace(x0, 0);
  for (std::size_t head = 0; head < states.size(); ++head) {
    State x = states[head];
    for (int k = 0; k < net.n_reactions(); ++k) {
      if (net.propensity(k, x) <= 0.0) continue;
      State y = x;
      net.apply_reaction(k, y);
      if (index.emplace(y, states.size()).second) {
        states.push_back(std::move(y));
        if (states.size() > max_states)
          throw std::runtime_error("exact_law: reachable state space exceeds the cap");
      }
    }
  }

  const std::size_t m = states.size();
  struct Edge {
    std::size_t from, to;
    double a;
  };
  std::vector<Edge> edges;
  std::vector<double> exit(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (int k = 0; k < net.n_reactions(); ++k) {
      double a = net.propensity(k, states[i]);
      if (a <= 0.0) continue;
      State y = states[i];
      net.apply_reaction(k, y);
      edges.push_back({i, index.at(y), a});
      exit[i] += a;
    }
  }

  ExactLaw law;
  law.states = states;
  law.probabilities.assign(m, 0.0);

  double lam = *std::max_element(exit.begin(), exit.end());
  if (lam == 0.0 || t == 0.0) {
    law.probabilities[0] = 1.0;
    return law;
  }
  if (lam * t > 500.0)
    throw std::runtime_error("exact_law: uniformization rate too large for this horizon");

  // Transition matrix P = I + Q/lam, iterated against the point mass at x0;
  // the Poisson(lam t) mixture of the iterates is the law at time t.
  std::vector<double> v(m, 0.0), w(m, 0.0);
  v[0] = 1.0;
  double weight = std::exp(-lam * t);
  double covered = weight;
  for (std::size_t j = 0; j < m; ++j) law.probabilities[j] += weight * v[j];
  for (std::size_t k = 1; covered < 1.0 - 1e-14; ++k) {
    if (k > 200000) throw std::runtime_error("exact_law: uniformization failed to converge");
    for (std::size_t j = 0; j < m; ++j) w[j] = (1.0 - exit[j] / lam) * v[j];
    for (const Edge& e : edges) w[e.to] += v[e.from] * e.a / lam;
    v.swap(w);
    weight *= lam * t / static_cast<double>(k);
    covered += weight;
    for (std::size_t j = 0; j < m; ++j) law.probabilities[j] += weight * v[j];
  }
  return law;
}

}  // namespace rxtest
