#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rxscale {

enum class VerifyLevel { Fast, Full };

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::Full;
  std::uint64_t seed = 12345;
  int threads = 0;  // ensemble workers; 0 means one per core
};

// Outcome of one named verification check.  `detail` carries the measured
// numbers next to the pinned tolerances so a failure is diagnosable from the
// one-line report alone.
struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Each check validates one closed-form law or exact identity against the
// simulators and reduction machinery.  Fast level cuts the Monte Carlo run
// counts for quick sweeps; Full level runs the counts the tolerances were
// calibrated for.

CheckResult check_crystallization_binomial_law(const VerifyOptions& opts = {});
CheckResult check_enzyme_abundant_product_curve(const VerifyOptions& opts = {});
CheckResult check_enzyme_scarce_poisson_products(const VerifyOptions& opts = {});
CheckResult check_isom_slow_poisson_counts(const VerifyOptions& opts = {});
CheckResult check_isom_intermediate_averaging(const VerifyOptions& opts = {});
CheckResult check_viral_establishment_probability(const VerifyOptions& opts = {});
CheckResult check_viral_logistic_mean_path(const VerifyOptions& opts = {});
CheckResult check_viral_fast_pair_law(const VerifyOptions& opts = {});
CheckResult check_moment_engine_polynomials(const VerifyOptions& opts = {});
CheckResult check_scaling_analyzer_reduction(const VerifyOptions& opts = {});
CheckResult check_establishment_time_trend(const VerifyOptions& opts = {});
CheckResult check_branching_eigen_identities(const VerifyOptions& opts = {});
CheckResult check_diffusion_matches_fluid(const VerifyOptions& opts = {});

// The checks bound to one bundled exemplar, in a stable order.  Throws
// std::out_of_range for names that are not in the exemplar registry.
std::vector<CheckResult> verify_exemplar(const std::string& exemplar_name,
                                         const VerifyOptions& opts = {});

}  // namespace rxscale
