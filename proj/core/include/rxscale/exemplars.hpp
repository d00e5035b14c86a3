#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "rxscale/network.hpp"
#include "rxscale/scaling.hpp"

namespace rxscale {

// A worked reaction system bundled with the exponent assignments that expose
// its multiscale structure and with closed-form reference curves for
// validating simulation and reduction output against.
//
// Oracle argument conventions are spelled out per quantity in `notes`; most
// quantities take time in the units of one of the named scalings, the viral
// fast_* quantities take the frozen genome level instead.
struct Exemplar {
  std::string name;
  std::string notes;
  Network network;
  ScalingExponents scaling;                          // the default assignment
  std::string default_scaling;                       // its key in `scalings`
  std::map<std::string, ScalingExponents> scalings;  // every named assignment
  std::map<std::string, std::function<double(double)>> oracles;
};

// Names of the bundled exemplars, in catalog display order.
const std::vector<std::string>& exemplar_names();

// Looks up a bundled exemplar; throws std::out_of_range for unknown names.
// `original_rates` selects unrounded historical rate constants where a
// system has them (currently the viral structural decay rate).
Exemplar exemplar(const std::string& name, bool original_rates = false);

// Convenience lookup, equivalent to exemplar(name).oracles.at(quantity)(arg)
// but with a diagnostic listing the available quantities on a miss.
double oracle(const std::string& name, const std::string& quantity, double arg);

// The same reaction system re-anchored at size n: rate constants become
// lambda_k * n^beta_k and initial counts round(z_i * n^alpha_i), where
// lambda_k and z_i are the descaled rate constants and levels of `net` under
// `scaling`.  Hint annotations and n0 are rewritten so the result carries
// the same assignment at the new anchor.
Network net_at_scale(const Network& net, const ScalingExponents& scaling, std::int64_t n);

}  // namespace rxscale
