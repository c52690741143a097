#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>

namespace ucp {

struct Gaussian {
  double mean = 0.0;
  double stddev = 1.0;
};

struct Uniform {
  double lo = -1.0;
  double hi = 1.0;
};

/// Law of a scalar random variable; only the two families the example problems need.
class Density {
 public:
  Density(Gaussian g) : kind_(g) {
    if (!(g.stddev > 0) || !std::isfinite(g.mean))
      throw std::invalid_argument("gaussian density needs finite mean and stddev > 0");
  }
  Density(Uniform u) : kind_(u) {
    if (!(u.lo < u.hi)) throw std::invalid_argument("uniform density needs lo < hi");
  }

  bool is_gaussian() const { return std::holds_alternative<Gaussian>(kind_); }
  const Gaussian& gaussian() const { return std::get<Gaussian>(kind_); }
  const Uniform& uniform() const { return std::get<Uniform>(kind_); }

 private:
  std::variant<Gaussian, Uniform> kind_;
};

/// Gaussian tails are cut at this many standard deviations everywhere.
inline constexpr double kGaussianTruncation = 8.0;

inline double pdf(const Density& density, double x) {
  if (density.is_gaussian()) {
    const auto& g = density.gaussian();
    const double z = (x - g.mean) / g.stddev;
    return std::exp(-0.5 * z * z) / (g.stddev * std::sqrt(2.0 * std::numbers::pi));
  }
  const auto& u = density.uniform();
  return (x >= u.lo && x <= u.hi) ? 1.0 / (u.hi - u.lo) : 0.0;
}

/// Standard normal CDF truncated to exactly 0 / 1 beyond kGaussianTruncation.
inline double std_normal_cdf(double z) {
  if (z <= -kGaussianTruncation) return 0.0;
  if (z >= kGaussianTruncation) return 1.0;
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

/// CDF of the density; gaussian tails truncated consistently with std_normal_cdf.
inline double cdf(const Density& density, double x) {
  if (density.is_gaussian()) {
    const auto& g = density.gaussian();
    return std_normal_cdf((x - g.mean) / g.stddev);
  }
  const auto& u = density.uniform();
  if (x <= u.lo) return 0.0;
  if (x >= u.hi) return 1.0;
  return (x - u.lo) / (u.hi - u.lo);
}

/// Probability mass of [lo, hi]; either bound may be infinite.
inline double interval_mass(const Density& density, double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  if (density.is_gaussian()) {
    // difference of upper tails is more accurate on the right side
    const auto& g = density.gaussian();
    const double zl = (lo - g.mean) / g.stddev;
    const double zh = (hi - g.mean) / g.stddev;
    if (zl > 0) return std_normal_cdf(-zl) - std_normal_cdf(-zh);
    return std_normal_cdf(zh) - std_normal_cdf(zl);
  }
  const auto& u = density.uniform();
  const double l = std::max(lo, u.lo);
  const double h = std::min(hi, u.hi);
  return h > l ? (h - l) / (u.hi - u.lo) : 0.0;
}

/// Composite trapezoid rule, summed in ascending index order.
template <typename Derived>
double trapezoid(const Eigen::DenseBase<Derived>& samples, double spacing) {
  const Eigen::Index n = samples.size();
  if (n == 0) throw std::invalid_argument("trapezoid: empty sample vector");
  if (!(spacing > 0)) throw std::invalid_argument("trapezoid: spacing must be positive");
  if (n == 1) return 0.0;
  double interior = 0.0;
  for (Eigen::Index i = 1; i + 1 < n; ++i) interior += static_cast<double>(samples[i]);
  return spacing * (0.5 * static_cast<double>(samples[0]) + interior + 0.5 * static_cast<double>(samples[n - 1]));
}

/// Relative finite-difference step h0 * (1 + |u|).
inline double fd_step(double u, double h0) { return h0 * (1.0 + std::abs(u)); }

namespace detail {
inline void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw std::domain_error(std::string(what) + ": non-finite function value");
}
}  // namespace detail

template <typename F>
double fd_first(F&& f, double u, double h) {
  if (!(h > 0)) throw std::invalid_argument("fd_first: step must be positive");
  const double fp = f(u + h);
  const double fm = f(u - h);
  detail::require_finite(fp, "fd_first");
  detail::require_finite(fm, "fd_first");
  return (fp - fm) / (2.0 * h);
}

template <typename F>
double fd_second(F&& f, double u, double h) {
  if (!(h > 0)) throw std::invalid_argument("fd_second: step must be positive");
  const double fp = f(u + h);
  const double f0 = f(u);
  const double fm = f(u - h);
  detail::require_finite(fp, "fd_second");
  detail::require_finite(f0, "fd_second");
  detail::require_finite(fm, "fd_second");
  return (fp - 2.0 * f0 + fm) / (h * h);
}

struct FiniteDifferences {
  double first = 0.0;
  double second = 0.0;
};

/// fd_first and fd_second from one shared set of three evaluations.
template <typename F>
FiniteDifferences fd_both(F&& f, double u, double h) {
  if (!(h > 0)) throw std::invalid_argument("fd_both: step must be positive");
  const double fp = f(u + h);
  const double f0 = f(u);
  const double fm = f(u - h);
  detail::require_finite(fp, "fd_both");
  detail::require_finite(f0, "fd_both");
  detail::require_finite(fm, "fd_both");
  return {(fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h)};
}

/// E[g(X)] for X ~ density by trapezoid quadrature on a dedicated grid
/// (mu +- 8 sigma for gaussians, the support for uniforms).
template <typename F>
double expectation(const Density& density, F&& g, std::size_t points = 1025) {
  if (points < 2) throw std::invalid_argument("expectation: need at least 2 integration points");
  double lo, hi;
  if (density.is_gaussian()) {
    const auto& gs = density.gaussian();
    lo = gs.mean - kGaussianTruncation * gs.stddev;
    hi = gs.mean + kGaussianTruncation * gs.stddev;
  } else {
    lo = density.uniform().lo;
    hi = density.uniform().hi;
  }
  const double h = (hi - lo) / static_cast<double>(points - 1);
  Eigen::VectorXd s(static_cast<Eigen::Index>(points));
  for (std::size_t i = 0; i < points; ++i) {
    const double x = (i + 1 == points) ? hi : lo + static_cast<double>(i) * h;
    s[static_cast<Eigen::Index>(i)] = g(x) * pdf(density, x);
  }
  return trapezoid(s, h);
}

}  // namespace ucp
