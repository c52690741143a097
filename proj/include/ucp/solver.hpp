#pragma once

#include "ucp/problem.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ucp {

struct SolverConfig {
  int iterations_per_round = 20;         // N
  double precision = 1e-10;              // p
  double step_size = 0.1;                // tau, gradient fallback
  std::optional<double> radius;          // r; unset: (b - a) / 100 of each stage grid
  double fd_step = 1e-4;                 // h0, finite-difference step is h0 (1 + |u|)
  double curvature_floor = 1e-9;         // Newton only when C'' exceeds this
  std::optional<double> newton_cap;      // max |Newton step|; unset: (b - a) / 10
  int backtracks = 4;                    // halvings tried when a local step raises C_m; < 0 disables the check
  std::size_t max_rounds = 10000;
  std::size_t workers = 1;
  std::optional<int> fixed_local;        // fixed N_L : N - N_L schedule instead of adaptive

  /// Throws std::invalid_argument naming the first offending field.
  void validate() const;

  /// Copy with radius and newton_cap filled in for a stage grid.
  SolverConfig resolved_for(const Grid& grid) const;
};

struct RoundReport {
  std::size_t round = 0;
  double J = 0.0;           // after the partial-exhaustion block
  double J_local = 0.0;     // after the local-update block
  double I_L = 0.0;
  double I_P = 0.0;
  int N_L = 0;
  int N_P = 0;
  double wall_ms = 0.0;
};

enum class Termination { converged, max_rounds_reached };

std::string to_string(Termination t);

struct SolveResult {
  ControllerSet controllers;
  double final_J = 0.0;
  double initial_J = 0.0;
  std::vector<RoundReport> rounds;
  Termination termination = Termination::max_rounds_reached;
  double wall_ms = 0.0;
};

/// Newton step u - C'/C'' (clamped to +-newton_cap) when C'' > curvature_floor,
/// otherwise the gradient step u - tau C'.
double newton_or_gradient_step(double c1, double c2, double u, const SolverConfig& cfg);

/// One local-update sweep of stage m. Reads the snapshot U, returns the new
/// (projected) stage-m values.
Vector local_update_phase(const ProblemSpec& problem, std::size_t m, const ControllerSet& U, const SolverConfig& cfg);

/// One partial-exhaustion sweep of stage m: every node takes the candidate
/// u_m(y_j), |y_j - y_i| <= r, minimising C_m(., y_i); ties go to the smallest j.
Vector partial_exhaustion_phase(const ProblemSpec& problem, std::size_t m, const ControllerSet& U,
                                const SolverConfig& cfg);

struct Allocation {
  int local = 0;
  int exhaustion = 0;
};

/// Splits N iterations in proportion to the last round's improvements,
/// keeping at least one iteration for each method.
Allocation adaptive_allocation(double improvement_local, double improvement_exhaustion, int N);

using RoundObserver = std::function<void(const RoundReport&, const ControllerSet&)>;

SolveResult solve(const ProblemSpec& problem, const SolverConfig& cfg,
                  std::optional<ControllerSet> initial = std::nullopt, const RoundObserver& observer = {});

}  // namespace ucp
