#pragma once

#include "ucp/problem.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ucp {

/// Brute-force references used to check the solver from outside.
struct OracleConfig {
  double u_lo = -30.0;
  double u_hi = 30.0;
  std::size_t steps = 100001;
  std::size_t mc_samples = 1000000;
  std::uint64_t seed = 20191;

  void validate() const;
  double step() const { return (u_hi - u_lo) / static_cast<double>(steps - 1); }
};

/// argmin of C_m(., y) over the uniform candidate list u_lo + k (u_hi - u_lo) / (steps - 1).
/// Ties go to the smallest candidate.
double exhaustive_argmin(const ProblemSpec& problem, std::size_t m, double y, const ControllerSet& U,
                         const OracleConfig& oc);

/// Same search over an explicit candidate list, ties to the earliest entry.
double exhaustive_argmin(const StageCost& cost, double y, std::span<const double> candidates);

/// The partial-exhaustion candidate list at node i, found by scanning the
/// whole grid rather than by window lookup.
std::vector<double> window_candidates(const Grid& grid, const SampledController& controller, std::size_t i, double r);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double stderr_ = 0.0;
};

/// Sample mean of the simulated total cost; reproducible for a fixed seed.
MonteCarloEstimate monte_carlo_objective(const ProblemSpec& problem, const ControllerSet& U, const OracleConfig& oc);

/// Reference values computed by independent high-resolution quadrature or
/// exhaustion, frozen into the regression tests.
struct PinnedValue {
  std::string name;
  double value = 0.0;
  std::string method;
};

std::vector<PinnedValue> compute_pinned_values();

}  // namespace ucp
