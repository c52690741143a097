#pragma once

#include "ucp/grid.hpp"
#include "ucp/random.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ucp {

/// Non-finite value met while evaluating an objective or marginal cost.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, std::size_t stage, double y)
      : std::runtime_error(what + " (stage " + std::to_string(stage) + ", y = " + std::to_string(y) + ")"),
        stage_(stage),
        y_(y) {}

  std::size_t stage() const { return stage_; }
  double y() const { return y_; }

 private:
  std::size_t stage_;
  double y_;
};

struct GridSpec {
  double a = 0.0;
  double b = 1.0;
  std::size_t d = 2;

  Grid make() const { return make_grid(a, b, d); }
};

struct CostDerivatives {
  double first = 0.0;
  double second = 0.0;
};

/// Marginal cost C_m(., .) of one stage with every other controller frozen.
///
/// Built once per phase from a snapshot of U and then only read, possibly
/// from many threads at once.
class StageCost {
 public:
  virtual ~StageCost() = default;

  /// C_m(u, y_i) at node i of the stage grid.
  virtual double at_node(std::size_t i, double u) const = 0;

  /// C_m(u, y) at an arbitrary observation y. Agrees with at_node on nodes.
  virtual double at(double u, double y) const = 0;

  /// Analytic (C', C'') at node i, when the problem supplies them.
  virtual std::optional<CostDerivatives> derivatives(std::size_t /*i*/, double /*u*/) const {
    return std::nullopt;
  }
};

/// An unconstrained control problem with an integral objective J[U].
///
/// For every stage m and interior node y_i, J must respond to changing the
/// single value u_m(y_i) from u to v by weight_i * (C_m(v, y_i) - C_m(u, y_i)).
class ProblemSpec {
 public:
  virtual ~ProblemSpec() = default;

  virtual std::string name() const = 0;

  std::size_t stages() const { return grids_.size(); }
  const Grid& grid(std::size_t m) const { return grids_.at(m); }
  const std::vector<Grid>& grids() const { return grids_; }

  /// J[U] by quadrature. Deterministic, independent of `workers`.
  virtual double objective(const ControllerSet& controllers, std::size_t workers = 1) const = 0;

  virtual std::unique_ptr<StageCost> stage_cost(std::size_t m, const ControllerSet& controllers,
                                                std::size_t workers = 1) const = 0;

  double marginal_cost(std::size_t m, double u, double y, const ControllerSet& controllers) const {
    return stage_cost(m, controllers)->at(u, y);
  }

  /// Maps stage-m values onto the feasible set; identity when unconstrained.
  virtual void project(std::size_t /*m*/, Vector& /*values*/) const {}

  virtual bool constrained() const { return false; }

  /// One pseudorandom realisation of the total cost under U (Monte Carlo).
  virtual double sample_cost(const ControllerSet& controllers, Rng& rng) const = 0;

  /// Identity initialisation on every stage grid.
  ControllerSet identity_controllers() const {
    ControllerSet out;
    for (const auto& g : grids_) out.push_back(init_identity(g));
    return out;
  }

  ControllerSet constant_controllers(double c) const {
    ControllerSet out;
    for (const auto& g : grids_) out.push_back(init_constant(g, c));
    return out;
  }

  /// Throws std::invalid_argument unless U has one controller per stage on the stage grids.
  void check_conforms(const ControllerSet& controllers) const;

 protected:
  explicit ProblemSpec(std::vector<Grid> grids) : grids_(std::move(grids)) {}

 private:
  std::vector<Grid> grids_;
};

}  // namespace ucp
