#include "internal.hpp"
#include "ucp/parallel.hpp"
#include "ucp/problems.hpp"

#include <algorithm>
#include <cmath>

namespace ucp {

namespace {

// Channel noise w ~ U(-1, 1).
constexpr double kNoiseHalfWidth = 1.0;

class EncoderCost final : public StageCost {
 public:
  EncoderCost(const ZeroDelay& problem, const Grid& grid, const SampledController& decoder)
      : problem_(problem), grid_(grid), decoder_(decoder), source_(Gaussian{0.0, 1.0}) {}

  double at_node(std::size_t i, double u) const override { return at(u, grid_.point(i)); }

  double at(double u, double y) const override {
    const double lambda = problem_.params().lambda;
    return (lambda * u * u + problem_.expected_distortion(u, y, decoder_)) * pdf(source_, y);
  }

 private:
  const ZeroDelay& problem_;
  const Grid& grid_;
  const SampledController& decoder_;
  Density source_;
};

/// C_1(u, y_j) = A_j (u - mean_j)^2 + residual_j, mean_j the conditional mean
/// of the source given the channel output landed in cell j.
class DecoderCost final : public StageCost {
 public:
  DecoderCost(const Grid& grid, const SampledController& encoder, std::size_t workers)
      : grid_(grid), encoder_(encoder), source_(Gaussian{0.0, 1.0}) {
    const auto d = static_cast<Eigen::Index>(grid.size());
    scale_ = Vector::Zero(d);
    mean_ = Vector::Zero(d);
    residual_ = Vector::Zero(d);

    const Grid& g0 = encoder.grid;
    const std::size_t blocks = std::max<std::size_t>(workers, 1);
    parallel_for(blocks, workers, [&](std::size_t blk) {
      const std::size_t jfirst = grid.size() * blk / blocks;
      const std::size_t jlast = grid.size() * (blk + 1) / blocks;
      if (jfirst == jlast) return;
      std::vector<double> s0(jlast - jfirst, 0.0), s1(jlast - jfirst, 0.0), s2(jlast - jfirst, 0.0);
      for (std::size_t i = 0; i < g0.size(); ++i) {
        const double x0 = g0.point(i);
        const double wi = g0.weight(i) * pdf(source_, x0);
        const double c = encoder[i];
        const std::size_t lo = std::max(jfirst, grid.nearest(c - kNoiseHalfWidth));
        const std::size_t hi = std::min(jlast - 1, grid.nearest(c + kNoiseHalfWidth));
        for (std::size_t j = lo; j <= hi && lo <= hi; ++j) {
          const double p = wi * uniform_noise_cell_mass(grid, j, c, kNoiseHalfWidth);
          s0[j - jfirst] += p;
          s1[j - jfirst] += p * x0;
          s2[j - jfirst] += p * x0 * x0;
        }
      }
      for (std::size_t j = jfirst; j < jlast; ++j) {
        const double s = s0[j - jfirst];
        if (s <= 0.0) continue;
        const auto jj = static_cast<Eigen::Index>(j);
        const double w = grid.weight(j);
        mean_[jj] = s1[j - jfirst] / s;
        scale_[jj] = s / w;
        residual_[jj] = std::max(0.0, s2[j - jfirst] - s1[j - jfirst] * mean_[jj]) / w;
      }
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
    const Grid& g0 = encoder_.grid;
    double total = 0.0;
    for (std::size_t i = 0; i < g0.size(); ++i) {
      const double x0 = g0.point(i);
      const double c = encoder_[i];
      const double lo = std::max(cell.lower, c - kNoiseHalfWidth);
      const double hi = std::min(cell.upper, c + kNoiseHalfWidth);
      if (hi <= lo) continue;
      const double p = (hi - lo) / (2.0 * kNoiseHalfWidth);
      const double e = u - x0;
      total += g0.weight(i) * pdf(source_, x0) * p * e * e;
    }
    return total / cell.weight;
  }

  std::optional<CostDerivatives> derivatives(std::size_t j, double u) const override {
    const auto jj = static_cast<Eigen::Index>(j);
    return CostDerivatives{2.0 * scale_[jj] * (u - mean_[jj]), 2.0 * scale_[jj]};
  }

 private:
  const Grid& grid_;
  const SampledController& encoder_;
  Density source_;
  Vector scale_, mean_, residual_;
};

}  // namespace

double uniform_noise_cell_mass(const Grid& grid, std::size_t j, double c, double half) {
  const double lo = std::max(grid.cell_lower(j), c - half);
  const double hi = std::min(grid.cell_upper(j), c + half);
  return hi > lo ? (hi - lo) / (2.0 * half) : 0.0;
}

std::vector<GridSpec> ZeroDelay::default_grids() { return {{-5.0, 5.0, 2000}, {-6.0, 6.0, 2000}}; }

ZeroDelay::ZeroDelay(ZeroDelayParams params, std::vector<GridSpec> grids)
    : ProblemSpec(detail::build_grids(grids, 2, "zero_delay")), params_(params), source_(Gaussian{0.0, 1.0}) {
  if (!(params.lambda > 0)) throw std::invalid_argument("zero_delay.lambda must be positive");
}

double ZeroDelay::expected_distortion(double channel_input, double x0, const SampledController& u1) const {
  const Grid& g = u1.grid;
  const std::size_t lo = g.nearest(channel_input - kNoiseHalfWidth);
  const std::size_t hi = g.nearest(channel_input + kNoiseHalfWidth);
  double total = 0.0;
  for (std::size_t j = lo; j <= hi; ++j) {
    const double p = uniform_noise_cell_mass(g, j, channel_input, kNoiseHalfWidth);
    const double e = u1[j] - x0;
    total += p * e * e;
  }
  return total;
}

double ZeroDelay::objective(const ControllerSet& U, std::size_t workers) const {
  check_conforms(U);
  const Grid& g0 = grid(0);
  EncoderCost cost(*this, g0, U[1]);
  Vector integrand(static_cast<Eigen::Index>(g0.size()));
  parallel_for(g0.size(), workers, [&](std::size_t i) {
    const double v = cost.at_node(i, U[0][i]);
    if (!std::isfinite(v)) throw NumericError("zero_delay objective: non-finite integrand", 0, g0.point(i));
    integrand[static_cast<Eigen::Index>(i)] = v;
  });
  return trapezoid(integrand, g0.spacing());
}

std::unique_ptr<StageCost> ZeroDelay::stage_cost(std::size_t m, const ControllerSet& U, std::size_t workers) const {
  check_conforms(U);
  if (m == 0) return std::make_unique<EncoderCost>(*this, grid(0), U[1]);
  if (m == 1) return std::make_unique<DecoderCost>(grid(1), U[0], workers);
  throw std::out_of_range("zero_delay has stages 0 and 1");
}

double ZeroDelay::sample_cost(const ControllerSet& U, Rng& rng) const {
  const double x0 = rng.normal(0.0, 1.0);
  const double c = eval_controller(U[0], x0);
  const double x1 = c + rng.uniform(-kNoiseHalfWidth, kNoiseHalfWidth);
  const double e = eval_controller(U[1], x1) - x0;
  return params_.lambda * c * c + e * e;
}

}  // namespace ucp
