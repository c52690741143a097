#pragma once

#include "ucp/numerics.hpp"
#include "ucp/problem.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ucp {

// Observations are read through step-function controllers, so the noise that
// links a state to the next stage's observation is integrated exactly against
// the controller cells: node j of a grid carries the probability of its cell
// divided by its trapezoid weight. This makes J and every C_m two views of the
// same discrete functional.

/// x0 ~ N(0, sigma^2), x1 = x0 + u0(x0), y1 = x1 + w with w ~ N(0, 1),
/// x2 = x1 - u1(y1); J = E[k^2 u0^2 + x2^2].
struct WitsenhausenParams {
  double k = 0.2;
  double sigma = 5.0;
};

class Witsenhausen final : public ProblemSpec {
 public:
  static std::vector<GridSpec> default_grids();

  explicit Witsenhausen(WitsenhausenParams params = {}, std::vector<GridSpec> grids = default_grids());

  std::string name() const override { return "witsenhausen"; }
  const WitsenhausenParams& params() const { return params_; }

  double objective(const ControllerSet& controllers, std::size_t workers = 1) const override;
  std::unique_ptr<StageCost> stage_cost(std::size_t m, const ControllerSet& controllers,
                                        std::size_t workers = 1) const override;
  double sample_cost(const ControllerSet& controllers, Rng& rng) const override;

  /// E_w[(x - u1(x + w))^2] with u1 a step function.
  double expected_terminal_cost(double x1, const SampledController& u1) const;

 private:
  WitsenhausenParams params_;
  Density source_;
};

/// x0 ~ N(0, 1), x1 = u0(x0) + w with w ~ U(-1, 1), y1 = x1;
/// J = E[lambda u0^2 + (u1(x1) - x0)^2].
struct ZeroDelayParams {
  double lambda = 2.0;
};

class ZeroDelay final : public ProblemSpec {
 public:
  static std::vector<GridSpec> default_grids();

  explicit ZeroDelay(ZeroDelayParams params = {}, std::vector<GridSpec> grids = default_grids());

  std::string name() const override { return "zero_delay"; }
  const ZeroDelayParams& params() const { return params_; }

  double objective(const ControllerSet& controllers, std::size_t workers = 1) const override;
  std::unique_ptr<StageCost> stage_cost(std::size_t m, const ControllerSet& controllers,
                                        std::size_t workers = 1) const override;
  double sample_cost(const ControllerSet& controllers, Rng& rng) const override;

  /// E_w[(u1(c + w) - x0)^2] with u1 a step function.
  double expected_distortion(double channel_input, double x0, const SampledController& u1) const;

 private:
  ZeroDelayParams params_;
  Density source_;
};

/// Stage cost gamma, minimised at 0.
struct StageCostShape {
  enum class Kind { quadratic, piecewise_linear };
  Kind kind = Kind::piecewise_linear;
  double holding = 1.0;    // slope for x > 0
  double shortage = 1.0;   // slope for x < 0

  double operator()(double x) const;
  /// E[gamma(c - w)] for w ~ U(-1, 1), in closed form.
  double expected_shifted(double c) const;
};

/// x0 ~ U(-1, 1), x_{m+1} = x_m + u_m(x_m) - w_m with w_m ~ U(-1, 1), u_m >= 0;
/// J = E[sum_m xi u_m(x_m) + gamma(x_{m+1})].
struct InventoryParams {
  std::size_t stages = 2;
  double xi = 0.1;
  StageCostShape gamma{};
};

class Inventory final : public ProblemSpec {
 public:
  static std::vector<GridSpec> default_grids(std::size_t stages = 2);

  explicit Inventory(InventoryParams params = {}, std::optional<std::vector<GridSpec>> grids = std::nullopt);

  std::string name() const override { return "inventory"; }
  const InventoryParams& params() const { return params_; }

  double objective(const ControllerSet& controllers, std::size_t workers = 1) const override;
  std::unique_ptr<StageCost> stage_cost(std::size_t m, const ControllerSet& controllers,
                                        std::size_t workers = 1) const override;
  double sample_cost(const ControllerSet& controllers, Rng& rng) const override;

  void project(std::size_t m, Vector& values) const override;
  bool constrained() const override { return true; }

  /// State density at stage m sampled on the stage-m grid (cell averages).
  Vector forward_density(std::size_t m, const ControllerSet& controllers) const;

  /// V_m at every node of the stage-m grid; m == stages() gives an empty vector.
  Vector cost_to_go_nodes(std::size_t m, const ControllerSet& controllers) const;

  /// V_m(x) = xi u_m(x) + E_w[gamma(x + u_m(x) - w) + V_{m+1}(x + u_m(x) - w)],
  /// with V_{m+1} piecewise constant over the stage-(m+1) cells and V_M = 0.
  double cost_to_go(std::size_t m, double x, const ControllerSet& controllers) const;

  /// xi u + E_w[gamma(x + u - w) + V_{m+1}(x + u - w)] given V_{m+1} on its nodes.
  double stage_value(std::size_t m, double u, double x, const Vector& next_cost_to_go) const;

 private:
  InventoryParams params_;
};

/// x0 ~ N(0, 1); J = E[(u0(x0) - a x0)^2]. Optimum u0(y) = a y with J = 0.
struct QuadraticParams {
  double a_track = 2.0;
};

class QuadraticSynthetic final : public ProblemSpec {
 public:
  static std::vector<GridSpec> default_grids();

  explicit QuadraticSynthetic(QuadraticParams params = {}, std::vector<GridSpec> grids = default_grids());

  std::string name() const override { return "quadratic"; }
  const QuadraticParams& params() const { return params_; }

  double objective(const ControllerSet& controllers, std::size_t workers = 1) const override;
  std::unique_ptr<StageCost> stage_cost(std::size_t m, const ControllerSet& controllers,
                                        std::size_t workers = 1) const override;
  double sample_cost(const ControllerSet& controllers, Rng& rng) const override;

 private:
  QuadraticParams params_;
  Density source_;
};

/// Probability that c + w lands in node j's cell, w ~ U(-half, half).
double uniform_noise_cell_mass(const Grid& grid, std::size_t j, double c, double half);

}  // namespace ucp
