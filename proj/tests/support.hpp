#pragma once

#include "ucp/problem.hpp"

#include <cmath>
#include <random>

namespace ucp::test {

// Smooth random controller with a few jumps, so step structure and curvature
// both show up.
inline SampledController random_controller(const Grid& g, std::mt19937_64& gen, double scale = 1.0) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const double c0 = scale * coef(gen), c1 = coef(gen), c2 = coef(gen), jump = scale * coef(gen);
  const double where = g.lower() + (g.upper() - g.lower()) * (0.5 + 0.3 * coef(gen));
  const double freq = 2.0 / (g.upper() - g.lower());
  Vector v(static_cast<Eigen::Index>(g.size()));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double y = g.point(i);
    v[static_cast<Eigen::Index>(i)] = c0 + c1 * y + scale * c2 * std::sin(7.0 * freq * y) + (y > where ? jump : 0.0);
  }
  return {g, v};
}

inline ControllerSet random_controllers(const ProblemSpec& p, std::mt19937_64& gen, double scale = 1.0) {
  ControllerSet U;
  for (const auto& g : p.grids()) U.push_back(random_controller(g, gen, scale));
  return U;
}

inline ControllerSet with_value(ControllerSet U, std::size_t m, std::size_t i, double v) {
  Vector values = U[m].values;
  values[static_cast<Eigen::Index>(i)] = v;
  U[m] = SampledController(U[m].grid, values);
  return U;
}

}  // namespace ucp::test
