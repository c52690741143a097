#include "internal.hpp"
#include "ucp/parallel.hpp"
#include "ucp/problems.hpp"

#include <cmath>
#include <numbers>

namespace ucp {

namespace {

// Gaussian observation noise w ~ N(0, 1).
constexpr double kReach = kGaussianTruncation;

struct TerminalCost {
  double value = 0.0;
  double first = 0.0;   // d/dx1
  double second = 0.0;  // d2/dx1^2
};

double truncated_normal_pdf(double z) {
  return std::abs(z) >= kGaussianTruncation ? 0.0 : std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// E_w[(x - u1(x + w))^2] written over the jumps of u1: with cells lo..hi
// covering x +- kReach, g_j = (x - u_j)^2 and beta_k the boundary after cell k,
//   E = g_hi - sum_k Phi(beta_k - x) (g_{k+1} - g_k).
// Flat stretches of u1 contribute nothing.
TerminalCost terminal_cost(double x, const SampledController& u1) {
  const Grid& g = u1.grid;
  const std::size_t lo = g.nearest(x - kReach);
  const std::size_t hi = g.nearest(x + kReach);
  const double tail = x - u1[hi];
  TerminalCost out{tail * tail, 2.0 * tail, 2.0};
  for (std::size_t k = lo; k < hi; ++k) {
    const double jump = u1[k + 1] - u1[k];
    if (jump == 0.0) continue;
    const double z = g.cell_upper(k) - x;
    const double lever = u1[k + 1] + u1[k] - 2.0 * x;
    const double cdf = std_normal_cdf(z);
    const double density = truncated_normal_pdf(z);
    out.value -= cdf * jump * lever;
    out.first += jump * (density * lever + 2.0 * cdf);
    out.second += jump * (z * density * lever - 4.0 * density);
  }
  return out;
}

class SenderCost final : public StageCost {
 public:
  SenderCost(const Witsenhausen& problem, const Grid& grid, const SampledController& receiver)
      : problem_(problem), grid_(grid), receiver_(receiver), source_(Gaussian{0.0, problem.params().sigma}) {}

  double at_node(std::size_t i, double u) const override { return at(u, grid_.point(i)); }

  double at(double u, double y) const override {
    const double k = problem_.params().k;
    const double x1 = y + u;
    return (k * k * u * u + terminal_cost(x1, receiver_).value) * pdf(source_, y);
  }

  std::optional<CostDerivatives> derivatives(std::size_t i, double u) const override {
    const double k = problem_.params().k;
    const double y = grid_.point(i);
    const TerminalCost t = terminal_cost(y + u, receiver_);
    const double f = pdf(source_, y);
    return CostDerivatives{f * (2.0 * k * k * u + t.first), f * (2.0 * k * k + t.second)};
  }

 private:
  const Witsenhausen& problem_;
  const Grid& grid_;
  const SampledController& receiver_;
  Density source_;
};

/// C_1(u, y_j) = A_j (u - mean_j)^2 + residual_j; quadratic in u because the
/// receiver only enters through the squared estimation error.
class ReceiverCost final : public StageCost {
 public:
  ReceiverCost(const Grid& grid, const SampledController& sender, const Density& source, std::size_t workers)
      : grid_(grid), sender_(sender), source_(source) {
    const auto d = static_cast<Eigen::Index>(grid.size());
    scale_ = Vector::Zero(d);
    mean_ = Vector::Zero(d);
    residual_ = Vector::Zero(d);

    const Grid& g0 = sender.grid;
    const std::size_t d0 = g0.size();
    Vector x1(static_cast<Eigen::Index>(d0)), mass(static_cast<Eigen::Index>(d0));
    for (std::size_t i = 0; i < d0; ++i) {
      const double y0 = g0.point(i);
      x1[static_cast<Eigen::Index>(i)] = y0 + sender[i];
      mass[static_cast<Eigen::Index>(i)] = g0.weight(i) * pdf(source, y0);
    }

    // Workers own disjoint blocks of receiver nodes; each node sums over
    // sender nodes in ascending order.
    const std::size_t blocks = std::max<std::size_t>(workers, 1);
    parallel_for(blocks, workers, [&](std::size_t blk) {
      const std::size_t jfirst = grid.size() * blk / blocks;
      const std::size_t jlast = grid.size() * (blk + 1) / blocks;
      if (jfirst == jlast) return;
      std::vector<double> s0(jlast - jfirst, 0.0), s1(jlast - jfirst, 0.0), s2(jlast - jfirst, 0.0);
      for (std::size_t i = 0; i < d0; ++i) {
        const double x = x1[static_cast<Eigen::Index>(i)];
        const double wi = mass[static_cast<Eigen::Index>(i)];
        if (wi == 0.0) continue;
        const std::size_t lo = std::max(jfirst, grid.nearest(x - kReach));
        const std::size_t hi = std::min(jlast - 1, grid.nearest(x + kReach));
        if (lo > hi) continue;
        double below = std_normal_cdf(grid.cell_lower(lo) - x);
        for (std::size_t j = lo; j <= hi; ++j) {
          const double above = std_normal_cdf(grid.cell_upper(j) - x);
          const double p = wi * (above - below);
          below = above;
          s0[j - jfirst] += p;
          s1[j - jfirst] += p * x;
          s2[j - jfirst] += p * x * x;
        }
      }
      for (std::size_t j = jfirst; j < jlast; ++j) finish_node(j, s0[j - jfirst], s1[j - jfirst], s2[j - jfirst]);
    });
  }

  double at_node(std::size_t j, double u) const override {
    const auto jj = static_cast<Eigen::Index>(j);
    const double e = u - mean_[jj];
    return scale_[jj] * e * e + residual_[jj];
  }

  double at(double u, double y) const override {
    if (grid_.point(grid_.nearest(y)) == y) return at_node(grid_.nearest(y), u);
    const auto cell = grid_.observation_cell(y);
    const Grid& g0 = sender_.grid;
    double total = 0.0;
    for (std::size_t i = 0; i < g0.size(); ++i) {
      const double y0 = g0.point(i);
      const double x = y0 + sender_[i];
      const double p = std_normal_cdf(cell.upper - x) - std_normal_cdf(cell.lower - x);
      const double e = x - u;
      total += g0.weight(i) * pdf(source_, y0) * p * e * e;
    }
    return total / cell.weight;
  }

  std::optional<CostDerivatives> derivatives(std::size_t j, double u) const override {
    const auto jj = static_cast<Eigen::Index>(j);
    return CostDerivatives{2.0 * scale_[jj] * (u - mean_[jj]), 2.0 * scale_[jj]};
  }

 private:
  void finish_node(std::size_t j, double s0, double s1, double s2) {
    const auto jj = static_cast<Eigen::Index>(j);
    const double w = grid_.weight(j);
    if (s0 <= 0.0) return;
    const double mean = s1 / s0;
    scale_[jj] = s0 / w;
    mean_[jj] = mean;
    residual_[jj] = std::max(0.0, s2 - s1 * mean) / w;
  }

  const Grid& grid_;
  const SampledController& sender_;
  Density source_;
  Vector scale_, mean_, residual_;
};

}  // namespace

std::vector<GridSpec> Witsenhausen::default_grids() { return {{-25.0, 25.0, 2000}, {-25.0, 25.0, 2000}}; }

Witsenhausen::Witsenhausen(WitsenhausenParams params, std::vector<GridSpec> grids)
    : ProblemSpec(detail::build_grids(grids, 2, "witsenhausen")), params_(params), source_(Gaussian{0.0, params.sigma}) {
  if (!(params.k > 0)) throw std::invalid_argument("witsenhausen.k must be positive");
}

double Witsenhausen::expected_terminal_cost(double x1, const SampledController& u1) const {
  return terminal_cost(x1, u1).value;
}

double Witsenhausen::objective(const ControllerSet& U, std::size_t workers) const {
  check_conforms(U);
  const Grid& g0 = grid(0);
  Vector integrand(static_cast<Eigen::Index>(g0.size()));
  SenderCost cost(*this, g0, U[1]);
  parallel_for(g0.size(), workers, [&](std::size_t i) {
    const double v = cost.at_node(i, U[0][i]);
    if (!std::isfinite(v)) throw NumericError("witsenhausen objective: non-finite integrand", 0, g0.point(i));
    integrand[static_cast<Eigen::Index>(i)] = v;
  });
  return trapezoid(integrand, g0.spacing());
}

std::unique_ptr<StageCost> Witsenhausen::stage_cost(std::size_t m, const ControllerSet& U, std::size_t workers) const {
  check_conforms(U);
  if (m == 0) return std::make_unique<SenderCost>(*this, grid(0), U[1]);
  if (m == 1) return std::make_unique<ReceiverCost>(grid(1), U[0], source_, workers);
  throw std::out_of_range("witsenhausen has stages 0 and 1");
}

double Witsenhausen::sample_cost(const ControllerSet& U, Rng& rng) const {
  const double x0 = rng.normal(0.0, params_.sigma);
  const double u0 = eval_controller(U[0], x0);
  const double x1 = x0 + u0;
  const double y1 = x1 + rng.normal(0.0, 1.0);
  const double x2 = x1 - eval_controller(U[1], y1);
  return params_.k * params_.k * u0 * u0 + x2 * x2;
}

}  // namespace ucp
