#include "ucp/oracle.hpp"

#include "ucp/numerics.hpp"
#include "ucp/problems.hpp"

#include <cmath>
#include <stdexcept>

namespace ucp {

void OracleConfig::validate() const {
  if (!(u_lo < u_hi)) throw std::invalid_argument("oracle: u_lo must be below u_hi");
  if (steps < 2) throw std::invalid_argument("oracle: steps must be at least 2");
}

double exhaustive_argmin(const StageCost& cost, double y, std::span<const double> candidates) {
  if (candidates.empty()) throw std::invalid_argument("exhaustive_argmin: empty candidate list");
  double best = candidates[0];
  double best_cost = cost.at(best, y);
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const double c = cost.at(candidates[k], y);
    if (!std::isfinite(c)) throw NumericError("exhaustive_argmin: non-finite marginal cost", 0, y);
    if (c < best_cost) {
      best_cost = c;
      best = candidates[k];
    }
  }
  return best;
}

double exhaustive_argmin(const ProblemSpec& problem, std::size_t m, double y, const ControllerSet& U,
                         const OracleConfig& oc) {
  oc.validate();
  const auto cost = problem.stage_cost(m, U);
  const double h = oc.step();
  double best = oc.u_lo;
  double best_cost = cost->at(best, y);
  for (std::size_t k = 0; k < oc.steps; ++k) {
    const double u = (k + 1 == oc.steps) ? oc.u_hi : oc.u_lo + static_cast<double>(k) * h;
    const double c = cost->at(u, y);
    if (!std::isfinite(c)) throw NumericError("exhaustive_argmin: non-finite marginal cost", m, y);
    if (c < best_cost) {
      best_cost = c;
      best = u;
    }
  }
  return best;
}

std::vector<double> window_candidates(const Grid& grid, const SampledController& controller, std::size_t i,
                                      double r) {
  std::vector<double> out;
  const double yi = grid.point(i);
  for (std::size_t j = 0; j < grid.size(); ++j)
    if (j == i || std::abs(grid.point(j) - yi) <= r) out.push_back(controller[j]);
  return out;
}

MonteCarloEstimate monte_carlo_objective(const ProblemSpec& problem, const ControllerSet& U, const OracleConfig& oc) {
  problem.check_conforms(U);
  if (oc.mc_samples < 2) throw std::invalid_argument("monte_carlo_objective: need at least 2 samples");
  Rng rng(oc.seed);
  // Welford running mean / variance
  double mean = 0.0, m2 = 0.0;
  for (std::size_t n = 1; n <= oc.mc_samples; ++n) {
    const double x = problem.sample_cost(U, rng);
    const double delta = x - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (x - mean);
  }
  const double variance = m2 / static_cast<double>(oc.mc_samples - 1);
  return {mean, std::sqrt(variance / static_cast<double>(oc.mc_samples))};
}

namespace {

// Observation weight of the spacing-wide box around an off-grid y.
double gaussian_box(double y, double x, double spacing) {
  return (std_normal_cdf(y + spacing / 2 - x) - std_normal_cdf(y - spacing / 2 - x)) / spacing;
}

double uniform_box(double y, double centre, double spacing) {
  const double lo = std::max(y - spacing / 2, centre - 1.0);
  const double hi = std::min(y + spacing / 2, centre + 1.0);
  return hi > lo ? (hi - lo) / (2.0 * spacing) : 0.0;
}

/// Trapezoid average of g over [-1, 1] (the demand law) on `points` nodes.
template <typename G>
double demand_average(G&& g, std::size_t points) {
  return expectation(Density(Uniform{-1.0, 1.0}), std::forward<G>(g), points);
}

/// Next-stage cost-to-go of the inventory problem at every stage-1 node, by
/// brute-force quadrature of the demand.
Vector inventory_terminal_stage(const Inventory& problem, const SampledController& u1, std::size_t points) {
  const Grid& g = problem.grid(1);
  const auto& p = problem.params();
  Vector v(static_cast<Eigen::Index>(g.size()));
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = g.point(j), u = u1[j];
    v[static_cast<Eigen::Index>(j)] = p.xi * u + demand_average([&](double w) { return p.gamma(x + u - w); }, points);
  }
  return v;
}

double inventory_stage0_value(const Inventory& problem, const Vector& next, double x, double u, std::size_t points) {
  const auto& p = problem.params();
  const Grid& g1 = problem.grid(1);
  return p.xi * u + demand_average(
                        [&](double w) {
                          const double s = x + u - w;
                          return p.gamma(s) + next[static_cast<Eigen::Index>(g1.nearest(s))];
                        },
                        points);
}

}  // namespace

std::vector<PinnedValue> compute_pinned_values() {
  std::vector<PinnedValue> out;
  constexpr std::size_t fine = 200001;

  {
    const Witsenhausen w;
    const double s = w.grid(1).spacing();
    const double value = expectation(
        Density(Gaussian{0.0, w.params().sigma}),
        [&](double x0) { return (x0 - 0.5) * (x0 - 0.5) * gaussian_box(1.0, x0, s); }, fine);
    out.push_back({"witsenhausen.C1(u=0.5,y=1.0|u0=0)", value, "trapezoid over x0, 200001 points"});

    OracleConfig oc;
    oc.u_lo = -25.0;
    oc.u_hi = 25.0;
    oc.steps = 100001;
    const double argmin = exhaustive_argmin(w, 1, 1.0, w.constant_controllers(0.0), oc);
    out.push_back({"witsenhausen.argmin C1(.,y=1.0|u0=0)", argmin, "exhaustion over [-25,25], 100001 steps"});
  }
  {
    const ZeroDelay z;
    const double s = z.grid(1).spacing();
    const double value = expectation(
        Density(Gaussian{0.0, 1.0}), [&](double x0) { return (0.2 - x0) * (0.2 - x0) * uniform_box(0.5, x0, s); },
        fine);
    out.push_back({"zero_delay.C1(u=0.2,y=0.5|u0=identity)", value, "trapezoid over x0, 200001 points"});
  }
  {
    const Inventory inv;
    const ControllerSet U = inv.identity_controllers();
    const Vector next = inventory_terminal_stage(inv, U[1], 20001);
    // stage-0 density is 1/2 on the interior of [-1, 1]
    const double c0 = 0.5 * inventory_stage0_value(inv, next, -0.2, 0.3, 1000001);
    out.push_back({"inventory.C0(u=0.3,y=-0.2|U=identity)", c0, "nested trapezoid over demand"});
    const double u0 = eval_controller(U[0], 0.3);
    const double v0 = inventory_stage0_value(inv, next, 0.3, u0, 1000001);
    out.push_back({"inventory.V0(x=0.3|U=identity)", v0, "nested trapezoid over demand"});
  }
  return out;
}

}  // namespace ucp
