#include "support.hpp"
#include "ucp/oracle.hpp"
#include "ucp/problems.hpp"

#include <doctest.h>

using namespace ucp;
using test::random_controllers;
using test::with_value;

namespace {

// Frozen from `ucp pin`; see tests/fixtures/pinned.json.
constexpr double kWitsenhausenC1 = 0.09014925190045435;
constexpr double kWitsenhausenArgminC1 = 0.96150000000000091;
constexpr double kZeroDelayC1 = 0.095156972199117631;
constexpr double kInventoryC0 = 0.81917455390000016;
constexpr double kInventoryV0 = 2.2130158700000031;

ControllerSet affine(const ProblemSpec& p, const std::vector<std::pair<double, double>>& coef) {
  ControllerSet U;
  for (std::size_t m = 0; m < p.stages(); ++m) {
    const auto& g = p.grid(m);
    U.emplace_back(g, Vector(coef[m].first + coef[m].second * g.points().array()));
  }
  return U;
}

void check_consistency(const ProblemSpec& p, int points, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const ControllerSet U = random_controllers(p, gen);
  const double J = p.objective(U);
  std::uniform_int_distribution<std::size_t> stage(0, p.stages() - 1);
  std::uniform_real_distribution<double> delta(-0.5, 0.5);
  for (int k = 0; k < points; ++k) {
    const std::size_t m = stage(gen);
    const Grid& g = p.grid(m);
    std::uniform_int_distribution<std::size_t> node(1, g.size() - 2);
    const std::size_t i = node(gen);
    const double u = U[m][i], v = u + delta(gen);
    const auto cost = p.stage_cost(m, U);
    const double predicted = g.weight(i) * (cost->at_node(i, v) - cost->at_node(i, u));
    const double actual = p.objective(with_value(U, m, i, v)) - J;
    INFO(p.name(), " stage ", m, " node ", i);
    REQUIRE(std::abs(actual - predicted) <= 1e-6 * (1.0 + std::abs(J)));
    REQUIRE(cost->at(v, g.point(i)) == cost->at_node(i, v));
  }
}

}  // namespace

TEST_CASE("witsenhausen objective") {
  const Witsenhausen w;
  CHECK(std::abs(w.objective(w.constant_controllers(0.0)) - 25.0) <= 0.01);
  CHECK(std::abs(w.objective(affine(w, {{0.0, -1.0}, {0.0, 0.0}})) - 1.0) <= 0.01);
}

TEST_CASE("witsenhausen stage-0 argmin with u1 = 0") {
  const Witsenhausen w;
  OracleConfig oc;
  const double u = exhaustive_argmin(w, 0, 5.0, w.constant_controllers(0.0), oc);
  CHECK(std::abs(u - (-5.0 / 1.04)) <= oc.step() / 2);
}

TEST_CASE("witsenhausen stage-1 argmin with u0 = 0 at y = 0 is 0") {
  const Witsenhausen w;
  OracleConfig oc;
  oc.u_lo = -1.0;
  oc.u_hi = 1.0;
  oc.steps = 20001;
  CHECK(std::abs(exhaustive_argmin(w, 1, 0.0, w.constant_controllers(0.0), oc)) <= oc.step() / 2);
}

TEST_CASE("witsenhausen pinned marginal cost and minimiser") {
  const Witsenhausen w;
  const ControllerSet U = w.constant_controllers(0.0);
  CHECK(w.marginal_cost(1, 0.5, 1.0, U) == doctest::Approx(kWitsenhausenC1).epsilon(1e-9));
  OracleConfig oc;
  oc.u_lo = -25.0;
  oc.u_hi = 25.0;
  oc.steps = 100001;
  CHECK(exhaustive_argmin(w, 1, 1.0, U, oc) == kWitsenhausenArgminC1);
  // posterior mean E[x0 | y1 = 1] = sigma^2 / (sigma^2 + 1)
  CHECK(std::abs(kWitsenhausenArgminC1 - 25.0 / 26.0) <= oc.step());
}

TEST_CASE("zero-delay objective") {
  const ZeroDelay z;
  CHECK(std::abs(z.objective(z.constant_controllers(0.0)) - 1.0) <= 0.001);
  for (double c : {-1.5, 0.7, 2.0}) {
    ControllerSet U = z.constant_controllers(0.0);
    U[1] = init_constant(z.grid(1), c);
    CHECK(std::abs(z.objective(U) - (1.0 + c * c)) <= 0.001);
  }
}

TEST_CASE("zero-delay marginal-cost minimisers") {
  const ZeroDelay z;
  OracleConfig oc;
  oc.u_lo = -3.0;
  oc.u_hi = 3.0;
  oc.steps = 6001;
  const ControllerSet zero = z.constant_controllers(0.0);
  for (double y : {-2.0, 0.0, 1.3})
    CHECK(std::abs(exhaustive_argmin(z, 0, y, zero, oc)) <= oc.step() / 2);
  for (double y : {-0.6, 0.0, 0.45})
    CHECK(std::abs(exhaustive_argmin(z, 1, y, zero, oc)) <= oc.step() / 2);
}

TEST_CASE("zero-delay pinned marginal cost") {
  // the uniform kernel is only one receiver cell wide, so the source grid
  // must be fine before the sum over x0 nodes reaches the reference integral
  const ZeroDelay z(ZeroDelayParams{}, {{-8.0, 8.0, 320001}, {-6.0, 6.0, 2000}});
  CHECK(z.marginal_cost(1, 0.2, 0.5, z.identity_controllers()) == doctest::Approx(kZeroDelayC1).epsilon(1e-8));
}

TEST_CASE("quadratic synthetic") {
  const QuadraticSynthetic q;
  CHECK(std::abs(q.objective(affine(q, {{0.0, 2.0}}))) <= 1e-9);
  CHECK(std::abs(q.objective(q.constant_controllers(0.0)) - 4.0) <= 0.004);
  OracleConfig oc;
  oc.u_lo = -5.0;
  oc.u_hi = 5.0;
  oc.steps = 2001;
  CHECK(exhaustive_argmin(q, 0, 0.15, q.identity_controllers(), oc) == doctest::Approx(0.30).epsilon(1e-12));
}

TEST_CASE("inventory forward densities") {
  const Inventory inv;
  const Grid& g0 = inv.grid(0);
  const Vector f0 = inv.forward_density(0, inv.constant_controllers(0.0));
  CHECK(f0[static_cast<Eigen::Index>(g0.nearest(0.0))] == doctest::Approx(0.5));
  CHECK(f0[static_cast<Eigen::Index>(g0.nearest(-2.0))] == 0.0);
  CHECK(f0[static_cast<Eigen::Index>(g0.nearest(1.5))] == 0.0);

  const Grid& g1 = inv.grid(1);
  const Vector tri = inv.forward_density(1, inv.constant_controllers(0.0));
  CHECK(tri[static_cast<Eigen::Index>(g1.nearest(0.0))] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(tri[static_cast<Eigen::Index>(g1.nearest(1.0))] == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(tri[static_cast<Eigen::Index>(g1.nearest(-2.5))] == 0.0);

  const Vector shifted = inv.forward_density(1, inv.constant_controllers(1.0));
  CHECK(shifted[static_cast<Eigen::Index>(g1.nearest(1.0))] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(shifted[static_cast<Eigen::Index>(g1.nearest(2.0))] == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(shifted[static_cast<Eigen::Index>(g1.nearest(-1.5))] == 0.0);
}

TEST_CASE("inventory densities integrate to one at every stage") {
  InventoryParams params;
  params.stages = 4;
  const Inventory inv(params);
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 5; ++trial) {
    ControllerSet U = random_controllers(inv, gen, 0.5);
    for (std::size_t m = 0; m < U.size(); ++m) {
      Vector v = U[m].values;
      inv.project(m, v);
      U[m] = SampledController(U[m].grid, v);
    }
    for (std::size_t m = 0; m < inv.stages(); ++m)
      REQUIRE(std::abs(trapezoid(inv.forward_density(m, U), inv.grid(m).spacing()) - 1.0) <= 1e-6);
  }
}

TEST_CASE("inventory cost-to-go matches the closed form for zero orders and quadratic cost") {
  // with u = 0, V_{M-k}(x) = k x^2 + k/3 + k(k-1)/6
  for (std::size_t M : {1u, 2u, 3u}) {
    InventoryParams params;
    params.stages = M;
    params.gamma.kind = StageCostShape::Kind::quadratic;
    const Inventory inv(params, std::vector<GridSpec>(M, GridSpec{-4.0, 4.0, 8001}));
    const ControllerSet zero = inv.constant_controllers(0.0);
    for (std::size_t m = 0; m <= M; ++m) {
      const double k = static_cast<double>(M - m);
      for (double x : {-0.7, 0.0, 0.25, 1.0}) {
        const double expected = k * x * x + k / 3.0 + k * (k - 1.0) / 6.0;
        INFO("M = ", M, " m = ", m, " x = ", x);
        CHECK(std::abs(inv.cost_to_go(m, x, zero) - expected) <= 1e-6);
      }
    }
  }
}

TEST_CASE("inventory marginal-cost minimisers with one stage") {
  InventoryParams params;
  params.stages = 1;
  params.xi = 0.0;
  params.gamma.kind = StageCostShape::Kind::quadratic;
  const Inventory inv(params);
  OracleConfig oc;
  oc.u_lo = -2.0;
  oc.u_hi = 2.0;
  oc.steps = 4001;
  const ControllerSet zero = inv.constant_controllers(0.0);
  CHECK(std::abs(exhaustive_argmin(inv, 0, 0.0, zero, oc)) <= oc.step() / 2);
  CHECK(std::abs(exhaustive_argmin(inv, 0, -0.5, zero, oc) - 0.5) <= oc.step() / 2);
}

TEST_CASE("inventory pinned values") {
  const Inventory inv;
  const ControllerSet U = inv.identity_controllers();
  CHECK(inv.marginal_cost(0, 0.3, -0.2, U) == doctest::Approx(kInventoryC0).epsilon(1e-6));
  CHECK(inv.cost_to_go(0, 0.3, U) == doctest::Approx(kInventoryV0).epsilon(1e-6));
}

TEST_CASE("inventory projection") {
  const Inventory inv(InventoryParams{}, std::vector<GridSpec>(2, GridSpec{-1.0, 1.0, 3}));
  Vector v{{-0.5, 0.2, 0.0}};
  inv.project(0, v);
  CHECK(v == Vector{{0.0, 0.2, 0.0}});
  const Vector once = v;
  inv.project(0, v);
  CHECK(v == once);
  Vector w{{-3.0, 4.0, 1.0}};
  Witsenhausen().project(0, w);
  CHECK(w == Vector{{-3.0, 4.0, 1.0}});
}

TEST_CASE("stage-cost closed forms") {
  StageCostShape pl;
  pl.holding = 2.0;
  pl.shortage = 3.0;
  StageCostShape quad;
  quad.kind = StageCostShape::Kind::quadratic;
  for (double c : {-2.5, -0.4, 0.0, 0.9, 1.7}) {
    CHECK(pl.expected_shifted(c) ==
          doctest::Approx(expectation(Uniform{-1.0, 1.0}, [&](double w) { return pl(c - w); }, 400001)).epsilon(1e-9));
    CHECK(quad.expected_shifted(c) == doctest::Approx(c * c + 1.0 / 3.0).epsilon(1e-12));
  }
}

TEST_CASE("marginal costs satisfy the single-point perturbation identity") {
  check_consistency(Witsenhausen(), 10, 101);
  check_consistency(ZeroDelay(), 10, 102);
  check_consistency(Inventory(), 10, 103);
  check_consistency(QuadraticSynthetic(), 10, 104);
}

TEST_CASE("objective ignores values where the density weight vanishes") {
  const Inventory inv;
  ControllerSet U = inv.constant_controllers(0.2);
  const double J = inv.objective(U);
  // stage-0 state is uniform on [-1, 1]; nodes beyond 2 carry no mass
  const std::size_t far = inv.grid(0).nearest(2.5);
  CHECK(inv.objective(with_value(U, 0, far, 0.9)) == J);
}

TEST_CASE("odd controllers give symmetric marginal costs") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> uu(-3.0, 3.0);
  auto odd = [&](const ProblemSpec& p) {
    ControllerSet U;
    for (const auto& g : p.grids()) {
      const double a = coef(gen), b = coef(gen);
      Vector v(static_cast<Eigen::Index>(g.size()));
      for (std::size_t i = 0; i < g.size(); ++i) v[static_cast<Eigen::Index>(i)] = a * g.point(i) + b * std::sin(g.point(i));
      // make the stored values exactly odd about the symmetric grid
      for (std::size_t i = 0; i < g.size() / 2; ++i) v[static_cast<Eigen::Index>(g.size() - 1 - i)] = -v[static_cast<Eigen::Index>(i)];
      if (g.size() % 2 == 1) v[static_cast<Eigen::Index>(g.size() / 2)] = 0.0;
      U.emplace_back(g, v);
    }
    return U;
  };
  std::vector<std::unique_ptr<ProblemSpec>> problems;
  problems.push_back(std::make_unique<Witsenhausen>());
  problems.push_back(std::make_unique<ZeroDelay>());
  for (const auto& p : problems) {
    const ControllerSet U = odd(*p);
    for (std::size_t m = 0; m < 2; ++m) {
      const auto cost = p->stage_cost(m, U);
      const Grid& g = p->grid(m);
      for (int k = 0; k < 20; ++k) {
        std::uniform_int_distribution<std::size_t> node(0, g.size() - 1);
        const std::size_t i = node(gen);
        const std::size_t mirror = g.size() - 1 - i;
        const double u = uu(gen);
        const double l = cost->at_node(i, u), r = cost->at_node(mirror, -u);
        INFO(p->name(), " stage ", m, " node ", i);
        REQUIRE(std::abs(l - r) <= 1e-12 * (1.0 + std::abs(l)));
      }
    }
  }
}
