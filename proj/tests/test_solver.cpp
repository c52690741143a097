#include "support.hpp"
#include "ucp/oracle.hpp"
#include "ucp/problems.hpp"
#include "ucp/solver.hpp"

#include <doctest.h>

using namespace ucp;

TEST_CASE("newton_or_gradient_step") {
  SolverConfig cfg;
  cfg.newton_cap = 10.0;
  CHECK(newton_or_gradient_step(-6.0, 2.0, 0.0, cfg) == 3.0);
  CHECK(newton_or_gradient_step(-6.0, -1.0, 0.0, cfg) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(newton_or_gradient_step(0.0, 5.0, 1.25, cfg) == 1.25);
  CHECK(newton_or_gradient_step(0.0, -5.0, 1.25, cfg) == 1.25);
  // capped Newton step and the curvature floor
  CHECK(newton_or_gradient_step(-100.0, 1.0, 0.0, cfg) == 10.0);
  CHECK(newton_or_gradient_step(-1.0, 1e-12, 0.0, cfg) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("adaptive_allocation examples") {
  auto check = [](double il, double ip, int n, int nl, int np) {
    const auto a = adaptive_allocation(il, ip, n);
    CHECK(a.local == nl);
    CHECK(a.exhaustion == np);
  };
  check(1, 1, 20, 10, 10);
  check(0, 5, 20, 1, 19);
  check(5, 0, 20, 19, 1);
  check(3, 1, 20, 15, 5);
  check(0, 0, 20, 10, 10);
  check(0, 0, 7, 3, 4);
}

TEST_CASE("adaptive_allocation invariants over random triples") {
  std::mt19937_64 gen(2019);
  std::uniform_real_distribution<double> mag(-12.0, 2.0);
  std::uniform_int_distribution<int> n(2, 200), zero(0, 9);
  for (int k = 0; k < 10000; ++k) {
    const double il = zero(gen) == 0 ? 0.0 : std::pow(10.0, mag(gen));
    const double ip = zero(gen) == 0 ? 0.0 : std::pow(10.0, mag(gen));
    const int N = n(gen);
    const auto a = adaptive_allocation(il, ip, N);
    REQUIRE(a.local + a.exhaustion == N);
    REQUIRE(a.local >= 1);
    REQUIRE(a.local <= N - 1);
  }
}

TEST_CASE("solver config validation names the field") {
  SolverConfig cfg;
  cfg.iterations_per_round = 1;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("solver.N"), std::invalid_argument);
  cfg = {};
  cfg.step_size = 0.0;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("solver.tau"), std::invalid_argument);
  cfg = {};
  cfg.radius = -1.0;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("solver.r"), std::invalid_argument);
  cfg = {};
  cfg.fixed_local = 20;
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("fixed_split"), std::invalid_argument);
  cfg = {};
  cfg.precision = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("local update solves the quadratic problem in one phase") {
  const QuadraticSynthetic q;
  SolverConfig cfg;
  cfg.newton_cap = 100.0;
  const Vector next = local_update_phase(q, 0, q.constant_controllers(0.0), cfg);
  const Grid& g = q.grid(0);
  for (std::size_t i = 0; i < g.size(); ++i) REQUIRE(next[static_cast<Eigen::Index>(i)] == doctest::Approx(2.0 * g.point(i)).epsilon(1e-12));
}

TEST_CASE("local update on witsenhausen with zero controllers reaches -y/(1+k^2)") {
  const Witsenhausen w;
  SolverConfig cfg;
  cfg.newton_cap = 100.0;
  const Vector next = local_update_phase(w, 0, w.constant_controllers(0.0), cfg);
  const Grid& g = w.grid(0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    INFO("y = ", g.point(i));
    REQUIRE(std::abs(next[static_cast<Eigen::Index>(i)] + g.point(i) / 1.04) <= 1e-6 * (1.0 + std::abs(g.point(i))));
  }
}

TEST_CASE("local update projects inventory orders onto u >= 0") {
  const Inventory inv;
  std::mt19937_64 gen(4);
  const ControllerSet U = test::random_controllers(inv, gen, 2.0);
  SolverConfig cfg;
  for (std::size_t m = 0; m < inv.stages(); ++m) {
    const Vector next = local_update_phase(inv, m, U, cfg);
    CHECK(next.minCoeff() >= 0.0);
    CHECK(partial_exhaustion_phase(inv, m, U, cfg).minCoeff() >= 0.0);
  }
}

TEST_CASE("partial exhaustion leaves constant controllers and degenerate windows alone") {
  const Witsenhausen w;
  SolverConfig cfg;
  const ControllerSet c = w.constant_controllers(0.7);
  for (std::size_t m = 0; m < 2; ++m) CHECK(partial_exhaustion_phase(w, m, c, cfg) == c[m].values);

  std::mt19937_64 gen(8);
  const ControllerSet U = test::random_controllers(w, gen);
  cfg.radius = w.grid(0).spacing() / 3;
  for (std::size_t m = 0; m < 2; ++m) CHECK(partial_exhaustion_phase(w, m, U, cfg) == U[m].values);
}

TEST_CASE("partial exhaustion matches the windowed brute-force argmin") {
  const Witsenhausen w;
  std::mt19937_64 gen(12);
  ControllerSet U = test::random_controllers(w, gen, 3.0);
  U[0] = init_constant(w.grid(0), 0.0);
  SolverConfig cfg;
  const double r = (w.grid(1).upper() - w.grid(1).lower()) / 100.0;
  const Vector next = partial_exhaustion_phase(w, 1, U, cfg);
  const auto cost = w.stage_cost(1, U);
  for (std::size_t i = 0; i < w.grid(1).size(); i += 7) {
    const auto cand = window_candidates(w.grid(1), U[1], i, r);
    REQUIRE(next[static_cast<Eigen::Index>(i)] == exhaustive_argmin(*cost, w.grid(1).point(i), cand));
  }
}

TEST_CASE("partial exhaustion never raises J") {
  std::mt19937_64 gen(21);
  const Witsenhausen w;
  const ZeroDelay z;
  const Inventory inv;
  for (const ProblemSpec* p : {static_cast<const ProblemSpec*>(&w), static_cast<const ProblemSpec*>(&z),
                               static_cast<const ProblemSpec*>(&inv)}) {
    ControllerSet U = test::random_controllers(*p, gen);
    if (p->constrained())
      for (std::size_t m = 0; m < U.size(); ++m) {
        Vector v = U[m].values;
        p->project(m, v);
        U[m].values = v;
      }
    SolverConfig cfg;
    double J = p->objective(U);
    for (int it = 0; it < 3; ++it)
      for (std::size_t m = 0; m < p->stages(); ++m) {
        U[m].values = partial_exhaustion_phase(*p, m, U, cfg);
        const double next = p->objective(U);
        INFO(p->name(), " stage ", m);
        REQUIRE(next <= J + 1e-9 * (1.0 + std::abs(J)));
        J = next;
      }
  }
}

TEST_CASE("local update never raises the marginal cost at any node") {
  std::mt19937_64 gen(23);
  const Witsenhausen w;
  const ZeroDelay z;
  for (const ProblemSpec* p : {static_cast<const ProblemSpec*>(&w), static_cast<const ProblemSpec*>(&z)}) {
    ControllerSet U = test::random_controllers(*p, gen);
    SolverConfig cfg;
    double J = p->objective(U);
    for (int it = 0; it < 3; ++it)
      for (std::size_t m = 0; m < p->stages(); ++m) {
        const auto cost = p->stage_cost(m, U);
        const Vector next = local_update_phase(*p, m, U, cfg);
        for (std::size_t i = 0; i < p->grid(m).size(); ++i)
          REQUIRE(cost->at_node(i, next[static_cast<Eigen::Index>(i)]) <= cost->at_node(i, U[m][i]));
        U[m].values = next;
        const double after = p->objective(U);
        INFO(p->name(), " stage ", m);
        REQUIRE(after <= J + 1e-9 * (1.0 + std::abs(J)));
        J = after;
      }
  }
}

TEST_CASE("negative backtracks takes the raw Newton or gradient step") {
  std::mt19937_64 gen(29);
  const Witsenhausen w(WitsenhausenParams{}, {{-25.0, 25.0, 300}, {-25.0, 25.0, 300}});
  const ControllerSet U = test::random_controllers(w, gen, 4.0);
  SolverConfig cfg;
  cfg.backtracks = -1;
  for (std::size_t m = 0; m < 2; ++m) {
    const auto cost = w.stage_cost(m, U);
    const Vector next = local_update_phase(w, m, U, cfg);
    const SolverConfig resolved = cfg.resolved_for(w.grid(m));
    for (std::size_t i = 0; i < w.grid(m).size(); ++i) {
      const auto d = cost->derivatives(i, U[m][i]);
      REQUIRE(d);
      REQUIRE(next[static_cast<Eigen::Index>(i)] == newton_or_gradient_step(d->first, d->second, U[m][i], resolved));
    }
  }
}

TEST_CASE("phases are bitwise identical across worker counts") {
  const Witsenhausen w(WitsenhausenParams{}, {{-25.0, 25.0, 600}, {-25.0, 25.0, 600}});
  std::mt19937_64 gen(31);
  const ControllerSet U = test::random_controllers(w, gen, 4.0);
  SolverConfig one, many;
  many.workers = 5;
  for (std::size_t m = 0; m < 2; ++m) {
    CHECK(local_update_phase(w, m, U, one) == local_update_phase(w, m, U, many));
    CHECK(partial_exhaustion_phase(w, m, U, one) == partial_exhaustion_phase(w, m, U, many));
  }
  CHECK(w.objective(U, 1) == w.objective(U, 7));
}

TEST_CASE("solve converges on the quadratic problem") {
  const QuadraticSynthetic q(QuadraticParams{}, {{-5.0, 5.0, 101}});
  const SolveResult r = solve(q, SolverConfig{});
  CHECK(r.termination == Termination::converged);
  CHECK(r.rounds.size() <= 2);
  CHECK(r.final_J == r.rounds.back().J);
  const Grid& g = q.grid(0);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(r.controllers[0][i] == doctest::Approx(2.0 * g.point(i)).epsilon(1e-12));
}

TEST_CASE("solve records allocation invariants and honours fixed_split") {
  const Witsenhausen w(WitsenhausenParams{}, {{-25.0, 25.0, 300}, {-25.0, 25.0, 300}});
  SolverConfig cfg;
  cfg.max_rounds = 4;
  const SolveResult adaptive = solve(w, cfg);
  REQUIRE(!adaptive.rounds.empty());
  CHECK(adaptive.rounds.front().N_L == 10);
  for (const auto& r : adaptive.rounds) {
    CHECK(r.N_L + r.N_P == cfg.iterations_per_round);
    CHECK(r.N_L >= 1);
    CHECK(r.N_L <= cfg.iterations_per_round - 1);
  }
  cfg.fixed_local = 19;
  const SolveResult fixed = solve(w, cfg);
  for (const auto& r : fixed.rounds) {
    CHECK(r.N_L == 19);
    CHECK(r.N_P == 1);
  }
  CHECK(fixed.termination == Termination::max_rounds_reached);
  CHECK(fixed.rounds.size() == 4);
}

TEST_CASE("solve with zero precision still runs a round") {
  const QuadraticSynthetic q(QuadraticParams{}, {{-5.0, 5.0, 51}});
  SolverConfig cfg;
  cfg.precision = 0.0;
  cfg.max_rounds = 50;
  const SolveResult r = solve(q, cfg);
  CHECK(r.rounds.size() >= 1);
  CHECK(r.termination == Termination::converged);
  CHECK(r.rounds.back().I_L + r.rounds.back().I_P == 0.0);
}

TEST_CASE("an exhaustion fixed point yields I_P = 0") {
  const QuadraticSynthetic q(QuadraticParams{}, {{-5.0, 5.0, 101}});
  const SolveResult r = solve(q, SolverConfig{});
  SolverConfig cfg;
  cfg.max_rounds = 1;
  const SolveResult again = solve(q, cfg, r.controllers);
  CHECK(again.rounds.front().I_P == 0.0);
}

TEST_CASE("solve rejects non-conforming initial controllers") {
  const QuadraticSynthetic q;
  ControllerSet bad{init_identity(make_grid(-1.0, 1.0, 11))};
  CHECK_THROWS_AS(solve(q, SolverConfig{}, bad), std::invalid_argument);
}
