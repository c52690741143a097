#include "internal.hpp"
#include "ucp/parallel.hpp"
#include "ucp/problems.hpp"

#include <algorithm>
#include <cmath>

namespace ucp {

namespace {

// Demand w_m ~ U(-1, 1); initial stock x_0 ~ U(-1, 1).
constexpr double kDemandHalfWidth = 1.0;

double positive_part(double x) { return x > 0 ? x : 0.0; }

/// Probability-mass-per-weight of the next state x + u - w over the cells of `next`.
template <typename Visit>
void for_each_next_cell(const Grid& next, double pre_demand, Visit&& visit) {
  const std::size_t lo = next.nearest(pre_demand - kDemandHalfWidth);
  const std::size_t hi = next.nearest(pre_demand + kDemandHalfWidth);
  for (std::size_t j = lo; j <= hi; ++j) visit(j, uniform_noise_cell_mass(next, j, pre_demand, kDemandHalfWidth));
}

class InventoryStageCost final : public StageCost {
 public:
  InventoryStageCost(const Inventory& problem, std::size_t stage, Vector density, Vector next_cost)
      : problem_(problem), stage_(stage), density_(std::move(density)), next_cost_(std::move(next_cost)) {}

  double at_node(std::size_t i, double u) const override {
    return density_[static_cast<Eigen::Index>(i)] * value(u, problem_.grid(stage_).point(i));
  }

  double at(double u, double y) const override {
    const std::size_t i = problem_.grid(stage_).nearest(y);
    return density_[static_cast<Eigen::Index>(i)] * value(u, y);
  }

 private:
  double value(double u, double x) const { return problem_.stage_value(stage_, u, x, next_cost_); }

  const Inventory& problem_;
  std::size_t stage_;
  Vector density_;
  Vector next_cost_;
};

}  // namespace

double StageCostShape::operator()(double x) const {
  if (kind == Kind::quadratic) return x * x;
  return holding * positive_part(x) + shortage * positive_part(-x);
}

double StageCostShape::expected_shifted(double c) const {
  // c - w is uniform on [c - 1, c + 1]
  if (kind == Kind::quadratic) return c * c + 1.0 / 3.0;
  const double over = (positive_part(c + 1) * positive_part(c + 1) - positive_part(c - 1) * positive_part(c - 1)) / 4;
  const double under =
      (positive_part(1 - c) * positive_part(1 - c) - positive_part(-c - 1) * positive_part(-c - 1)) / 4;
  return holding * over + shortage * under;
}

std::vector<GridSpec> Inventory::default_grids(std::size_t stages) {
  return std::vector<GridSpec>(stages, GridSpec{-3.0, 3.0, 601});
}

Inventory::Inventory(InventoryParams params, std::optional<std::vector<GridSpec>> grids)
    : ProblemSpec(detail::build_grids(grids ? *grids : default_grids(params.stages), params.stages, "inventory")),
      params_(params) {
  if (params.stages == 0) throw std::invalid_argument("inventory.stages must be positive");
  if (!(params.xi >= 0)) throw std::invalid_argument("inventory.xi must be non-negative");
  if (params.gamma.kind == StageCostShape::Kind::piecewise_linear &&
      !(params.gamma.holding > 0 && params.gamma.shortage > 0))
    throw std::invalid_argument("inventory.gamma slopes must be positive");
}

void Inventory::project(std::size_t, Vector& values) const { values = values.cwiseMax(0.0); }

Vector Inventory::forward_density(std::size_t m, const ControllerSet& U) const {
  if (m >= stages()) throw std::out_of_range("inventory forward_density: stage out of range");
  const Density initial(Uniform{-kDemandHalfWidth, kDemandHalfWidth});
  const Grid& g0 = grid(0);
  Vector density(static_cast<Eigen::Index>(g0.size()));
  for (std::size_t j = 0; j < g0.size(); ++j)
    density[static_cast<Eigen::Index>(j)] = interval_mass(initial, g0.cell_lower(j), g0.cell_upper(j)) / g0.weight(j);

  for (std::size_t k = 0; k < m; ++k) {
    const Grid& from = grid(k);
    const Grid& to = grid(k + 1);
    Vector next = Vector::Zero(static_cast<Eigen::Index>(to.size()));
    for (std::size_t i = 0; i < from.size(); ++i) {
      const double w = from.weight(i) * density[static_cast<Eigen::Index>(i)];
      if (w == 0.0) continue;
      for_each_next_cell(to, from.point(i) + U[k][i],
                         [&](std::size_t j, double mass) { next[static_cast<Eigen::Index>(j)] += w * mass; });
    }
    for (std::size_t j = 0; j < to.size(); ++j) next[static_cast<Eigen::Index>(j)] /= to.weight(j);
    density = std::move(next);
  }
  return density;
}

double Inventory::stage_value(std::size_t m, double u, double x, const Vector& next_cost_to_go) const {
  double total = params_.xi * u + params_.gamma.expected_shifted(x + u);
  if (m + 1 < stages())
    for_each_next_cell(grid(m + 1), x + u,
                       [&](std::size_t j, double mass) { total += mass * next_cost_to_go[static_cast<Eigen::Index>(j)]; });
  return total;
}

Vector Inventory::cost_to_go_nodes(std::size_t m, const ControllerSet& U) const {
  if (m > stages()) throw std::out_of_range("inventory cost_to_go: stage out of range");
  Vector next;
  for (std::size_t k = stages(); k-- > m;) {
    const Grid& g = grid(k);
    Vector current(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i)
      current[static_cast<Eigen::Index>(i)] = stage_value(k, U[k][i], g.point(i), next);
    next = std::move(current);
  }
  return next;
}

double Inventory::cost_to_go(std::size_t m, double x, const ControllerSet& U) const {
  check_conforms(U);
  if (m == stages()) return 0.0;
  const Vector next = cost_to_go_nodes(m + 1, U);
  return stage_value(m, eval_controller(U[m], x), x, next);
}

double Inventory::objective(const ControllerSet& U, std::size_t) const {
  check_conforms(U);
  const Vector density = forward_density(0, U);
  const Vector value = cost_to_go_nodes(0, U);
  const Grid& g0 = grid(0);
  Vector integrand = density.cwiseProduct(value);
  for (std::size_t i = 0; i < g0.size(); ++i)
    if (!std::isfinite(integrand[static_cast<Eigen::Index>(i)]))
      throw NumericError("inventory objective: non-finite integrand", 0, g0.point(i));
  return trapezoid(integrand, g0.spacing());
}

std::unique_ptr<StageCost> Inventory::stage_cost(std::size_t m, const ControllerSet& U, std::size_t) const {
  check_conforms(U);
  if (m >= stages()) throw std::out_of_range("inventory stage out of range");
  Vector next = m + 1 < stages() ? cost_to_go_nodes(m + 1, U) : Vector();
  return std::make_unique<InventoryStageCost>(*this, m, forward_density(m, U), std::move(next));
}

double Inventory::sample_cost(const ControllerSet& U, Rng& rng) const {
  double x = rng.uniform(-kDemandHalfWidth, kDemandHalfWidth);
  double total = 0.0;
  for (std::size_t m = 0; m < stages(); ++m) {
    const double u = eval_controller(U[m], x);
    const double next = x + u - rng.uniform(-kDemandHalfWidth, kDemandHalfWidth);
    total += params_.xi * u + params_.gamma(next);
    x = next;
  }
  return total;
}

}  // namespace ucp
