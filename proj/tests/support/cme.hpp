#pragma once

#include <cstddef>
#include <vector>

#include "rxscale/network.hpp"

namespace rxtest {

// Exact law of a small network at one time point.  The reachable state space
// is enumerated breadth first from x0 and the master equation is solved by
// uniformization, so the result is exact up to a truncation tail below 1e-13.
// Intended for cross-validating the stochastic simulators on instances with
// at most a few hundred states.
struct ExactLaw {
  std::vector<rxscale::State> states;
  std::vector<double> probabilities;

  // Index of a state in `states`, or -1 when it is unreachable.
  std::ptrdiff_t index_of(const rxscale::State& x) const;
};

ExactLaw exact_law(const rxscale::Network& net, const rxscale::State& x0, double t,
                   std::size_t max_states = 500);

}  // namespace rxtest
