#include "ucp/solver.hpp"

#include "ucp/numerics.hpp"
#include "ucp/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace ucp {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

void require(bool ok, const std::string& field, const std::string& why) {
  if (!ok) throw std::invalid_argument(field + ": " + why);
}

}  // namespace

void SolverConfig::validate() const {
  require(iterations_per_round >= 2, "solver.N", "must be at least 2");
  require(std::isfinite(precision) && precision >= 0, "solver.p", "must be finite and >= 0");
  require(std::isfinite(step_size) && step_size > 0, "solver.tau", "must be positive");
  require(!radius || (std::isfinite(*radius) && *radius > 0), "solver.r", "must be positive");
  require(std::isfinite(fd_step) && fd_step > 0, "solver.h0", "must be positive");
  require(std::isfinite(curvature_floor) && curvature_floor > 0, "solver.curvature_floor", "must be positive");
  require(!newton_cap || *newton_cap > 0, "solver.newton_cap", "must be positive");
  require(max_rounds >= 1, "solver.max_rounds", "must be at least 1");
  require(workers >= 1, "solver.workers", "must be at least 1");
  require(!fixed_local || (*fixed_local >= 1 && *fixed_local <= iterations_per_round - 1), "mode.fixed_split",
          "n_local must lie in [1, N-1]");
}

SolverConfig SolverConfig::resolved_for(const Grid& grid) const {
  SolverConfig out = *this;
  const double span = grid.upper() - grid.lower();
  if (!out.radius) out.radius = span / 100.0;
  if (!out.newton_cap) out.newton_cap = span / 10.0;
  return out;
}

std::string to_string(Termination t) {
  return t == Termination::converged ? "converged" : "max_rounds_reached";
}

double newton_or_gradient_step(double c1, double c2, double u, const SolverConfig& cfg) {
  if (c2 > cfg.curvature_floor) {
    const double cap = cfg.newton_cap.value_or(std::numeric_limits<double>::infinity());
    return u - std::clamp(c1 / c2, -cap, cap);
  }
  return u - cfg.step_size * c1;
}

Vector local_update_phase(const ProblemSpec& problem, std::size_t m, const ControllerSet& U,
                          const SolverConfig& config) {
  const Grid& grid = problem.grid(m);
  const SolverConfig cfg = config.resolved_for(grid);
  const auto cost = problem.stage_cost(m, U, cfg.workers);
  const SampledController& current = U[m];
  Vector next(static_cast<Eigen::Index>(grid.size()));

  parallel_for(grid.size(), cfg.workers, [&](std::size_t i) {
    const double u = current[i];
    CostDerivatives dc;
    if (auto analytic = cost->derivatives(i, u)) {
      dc = *analytic;
    } else {
      try {
        const auto fd = fd_both([&](double v) { return cost->at_node(i, v); }, u, fd_step(u, cfg.fd_step));
        dc = {fd.first, fd.second};
      } catch (const std::domain_error&) {
        throw NumericError("local update: non-finite marginal cost", m, grid.point(i));
      }
    }
    if (!std::isfinite(dc.first) || !std::isfinite(dc.second))
      throw NumericError("local update: non-finite marginal cost derivative", m, grid.point(i));
    double v = newton_or_gradient_step(dc.first, dc.second, u, cfg);
    if (!std::isfinite(v)) throw NumericError("local update: non-finite step", m, grid.point(i));
    if (cfg.backtracks >= 0 && v != u) {
      const double c0 = cost->at_node(i, u);
      int halvings = 0;
      while (!(cost->at_node(i, v) <= c0)) {
        if (halvings++ == cfg.backtracks) {
          v = u;
          break;
        }
        v = u + 0.5 * (v - u);
      }
    }
    next[static_cast<Eigen::Index>(i)] = v;
  });
  problem.project(m, next);
  return next;
}

Vector partial_exhaustion_phase(const ProblemSpec& problem, std::size_t m, const ControllerSet& U,
                                const SolverConfig& config) {
  const Grid& grid = problem.grid(m);
  const SolverConfig cfg = config.resolved_for(grid);
  const auto cost = problem.stage_cost(m, U, cfg.workers);
  const SampledController& current = U[m];
  Vector next(static_cast<Eigen::Index>(grid.size()));

  parallel_for(grid.size(), cfg.workers, [&](std::size_t i) {
    const IndexRange window = window_indices(grid, grid.point(i), *cfg.radius);
    double best = current[window.first];
    double best_cost = cost->at_node(i, best);
    if (!std::isfinite(best_cost)) throw NumericError("partial exhaustion: non-finite marginal cost", m, grid.point(i));
    double previous = best;
    for (std::size_t j = window.first + 1; j < window.last; ++j) {
      const double candidate = current[j];
      // a repeated value has the same cost and can never win a strict comparison
      if (candidate == previous) continue;
      previous = candidate;
      const double c = cost->at_node(i, candidate);
      if (!std::isfinite(c)) throw NumericError("partial exhaustion: non-finite marginal cost", m, grid.point(i));
      if (c < best_cost) {
        best_cost = c;
        best = candidate;
      }
    }
    next[static_cast<Eigen::Index>(i)] = best;
  });
  problem.project(m, next);
  return next;
}

Allocation adaptive_allocation(double improvement_local, double improvement_exhaustion, int N) {
  const double total = improvement_local + improvement_exhaustion;
  int local;
  if (!(total > 0)) {
    local = N / 2;
  } else {
    const double share = std::floor(improvement_local * N / total);
    local = static_cast<int>(std::clamp(share, 1.0, static_cast<double>(N - 1)));
  }
  return {local, N - local};
}

SolveResult solve(const ProblemSpec& problem, const SolverConfig& cfg, std::optional<ControllerSet> initial,
                  const RoundObserver& observer) {
  cfg.validate();
  const auto start = Clock::now();
  SolveResult result;
  result.controllers = initial ? std::move(*initial) : problem.identity_controllers();
  ControllerSet& U = result.controllers;
  problem.check_conforms(U);

  const int N = cfg.iterations_per_round;
  double current_J = problem.objective(U, cfg.workers);
  result.initial_J = current_J;
  Allocation alloc = cfg.fixed_local ? Allocation{*cfg.fixed_local, N - *cfg.fixed_local} : Allocation{N / 2, N - N / 2};

  for (std::size_t round = 1;; ++round) {
    const auto round_start = Clock::now();
    RoundReport report;
    report.round = round;
    report.N_L = alloc.local;
    report.N_P = alloc.exhaustion;

    for (int it = 0; it < alloc.local; ++it)
      for (std::size_t m = 0; m < problem.stages(); ++m) U[m].values = local_update_phase(problem, m, U, cfg);
    report.J_local = problem.objective(U, cfg.workers);
    report.I_L = std::abs(current_J - report.J_local);

    for (int it = 0; it < alloc.exhaustion; ++it)
      for (std::size_t m = 0; m < problem.stages(); ++m) U[m].values = partial_exhaustion_phase(problem, m, U, cfg);
    report.J = problem.objective(U, cfg.workers);
    report.I_P = std::abs(report.J_local - report.J);
    report.wall_ms = elapsed_ms(round_start);

    current_J = report.J;
    result.rounds.push_back(report);
    if (observer) observer(report, U);

    if (report.I_L + report.I_P <= cfg.precision) {
      result.termination = Termination::converged;
      break;
    }
    if (round >= cfg.max_rounds) {
      result.termination = Termination::max_rounds_reached;
      break;
    }
    alloc = cfg.fixed_local ? Allocation{*cfg.fixed_local, N - *cfg.fixed_local}
                            : adaptive_allocation(report.I_L, report.I_P, N);
  }

  result.final_J = current_J;
  result.wall_ms = elapsed_ms(start);
  return result;
}

}  // namespace ucp
