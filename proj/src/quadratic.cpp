#include "internal.hpp"
#include "ucp/parallel.hpp"
#include "ucp/problems.hpp"

#include <cmath>

namespace ucp {

namespace {

class TrackingCost final : public StageCost {
 public:
  TrackingCost(const Grid& grid, double slope) : grid_(grid), slope_(slope), source_(Gaussian{0.0, 1.0}) {}

  double at_node(std::size_t i, double u) const override { return at(u, grid_.point(i)); }

  double at(double u, double y) const override {
    const double e = u - slope_ * y;
    return e * e * pdf(source_, y);
  }

  std::optional<CostDerivatives> derivatives(std::size_t i, double u) const override {
    const double y = grid_.point(i);
    const double f = pdf(source_, y);
    return CostDerivatives{2.0 * (u - slope_ * y) * f, 2.0 * f};
  }

 private:
  const Grid& grid_;
  double slope_;
  Density source_;
};

}  // namespace

std::vector<GridSpec> QuadraticSynthetic::default_grids() { return {{-5.0, 5.0, 1001}}; }

QuadraticSynthetic::QuadraticSynthetic(QuadraticParams params, std::vector<GridSpec> grids)
    : ProblemSpec(detail::build_grids(grids, 1, "quadratic")), params_(params), source_(Gaussian{0.0, 1.0}) {}

double QuadraticSynthetic::objective(const ControllerSet& U, std::size_t workers) const {
  check_conforms(U);
  const Grid& g = grid(0);
  TrackingCost cost(g, params_.a_track);
  Vector integrand(static_cast<Eigen::Index>(g.size()));
  parallel_for(g.size(), workers, [&](std::size_t i) {
    const double v = cost.at_node(i, U[0][i]);
    if (!std::isfinite(v)) throw NumericError("quadratic objective: non-finite integrand", 0, g.point(i));
    integrand[static_cast<Eigen::Index>(i)] = v;
  });
  return trapezoid(integrand, g.spacing());
}

std::unique_ptr<StageCost> QuadraticSynthetic::stage_cost(std::size_t m, const ControllerSet& U, std::size_t) const {
  check_conforms(U);
  if (m != 0) throw std::out_of_range("quadratic problem has a single stage");
  return std::make_unique<TrackingCost>(grid(0), params_.a_track);
}

double QuadraticSynthetic::sample_cost(const ControllerSet& U, Rng& rng) const {
  const double x0 = rng.normal(0.0, 1.0);
  const double e = eval_controller(U[0], x0) - params_.a_track * x0;
  return e * e;
}

}  // namespace ucp
