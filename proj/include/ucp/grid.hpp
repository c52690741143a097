#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace ucp {

/// Linearly spaced sampling vector over [a, b] with d points.
template <typename Scalar>
class BasicGrid {
 public:
  using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BasicGrid() = default;

  BasicGrid(Scalar a, Scalar b, std::size_t d) : a_(a), b_(b), d_(d) {
    if (!std::isfinite(a) || !std::isfinite(b))
      throw std::invalid_argument("grid: bounds must be finite");
    if (!(a < b))
      throw std::invalid_argument("grid: lower bound must be below upper bound (a < b)");
    if (d < 2) throw std::invalid_argument("grid.d: need at least 2 sample points, got " + std::to_string(d));
    spacing_ = (b - a) / static_cast<Scalar>(d - 1);
  }

  Scalar lower() const { return a_; }
  Scalar upper() const { return b_; }
  std::size_t size() const { return d_; }
  Scalar spacing() const { return spacing_; }

  /// y_i; the last point is pinned to b so both endpoints are exact.
  Scalar point(std::size_t i) const {
    if (i + 1 == d_) return b_;
    return a_ + static_cast<Scalar>(i) * spacing_;
  }

  VectorType points() const {
    VectorType p(static_cast<Eigen::Index>(d_));
    for (std::size_t i = 0; i < d_; ++i) p[static_cast<Eigen::Index>(i)] = point(i);
    return p;
  }

  /// Composite-trapezoid weight of node i.
  Scalar weight(std::size_t i) const {
    return (i == 0 || i + 1 == d_) ? spacing_ / 2 : spacing_;
  }

  /// Nearest grid index, clamped to [0, d-1]. Exact midpoints round down.
  std::size_t nearest(Scalar y) const {
    if (!(y > a_)) return 0;
    if (!(y < b_)) return d_ - 1;
    const Scalar t = (y - a_) / spacing_;
    auto lo = static_cast<std::size_t>(std::floor(t));
    if (lo + 1 >= d_) return d_ - 1;
    // compare against actual node positions so ties are decided on the points
    const Scalar dlo = y - point(lo);
    const Scalar dhi = point(lo + 1) - y;
    return dhi < dlo ? lo + 1 : lo;
  }

  /// Step-function cell of node i: the set of y whose nearest node is i.
  /// Boundary cells absorb the tails beyond [a, b].
  Scalar cell_lower(std::size_t i) const {
    if (i == 0) return -std::numeric_limits<Scalar>::infinity();
    return boundary(i - 1);
  }
  Scalar cell_upper(std::size_t i) const {
    if (i + 1 == d_) return std::numeric_limits<Scalar>::infinity();
    return boundary(i);
  }

  /// Cell used to weigh an observation y: the node cell (with its trapezoid
  /// weight) when y is a node, otherwise the spacing-wide box centred on y.
  struct ObservationCell {
    Scalar lower;
    Scalar upper;
    Scalar weight;
  };
  ObservationCell observation_cell(Scalar y) const {
    const std::size_t i = nearest(y);
    if (point(i) == y) return {cell_lower(i), cell_upper(i), weight(i)};
    return {y - spacing_ / 2, y + spacing_ / 2, spacing_};
  }

  friend bool operator==(const BasicGrid& l, const BasicGrid& r) {
    return l.a_ == r.a_ && l.b_ == r.b_ && l.d_ == r.d_;
  }

 private:
  // midpoint between nodes i and i+1; shared by both neighbouring cells
  Scalar boundary(std::size_t i) const { return a_ + (static_cast<Scalar>(i) + Scalar(0.5)) * spacing_; }

  Scalar a_ = 0;
  Scalar b_ = 1;
  std::size_t d_ = 2;
  Scalar spacing_ = 1;
};

/// Half-open index range [first, last).
struct IndexRange {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const { return last - first; }
  bool contains(std::size_t i) const { return i >= first && i < last; }
};

/// Step-function approximation of one controller on its grid.
template <typename Scalar>
struct BasicSampledController {
  using VectorType = typename BasicGrid<Scalar>::VectorType;

  BasicGrid<Scalar> grid;
  VectorType values;

  BasicSampledController() = default;
  BasicSampledController(BasicGrid<Scalar> g, VectorType v) : grid(g), values(std::move(v)) {
    if (static_cast<std::size_t>(values.size()) != grid.size())
      throw std::invalid_argument("controller: values length does not match grid size");
  }

  Scalar operator[](std::size_t i) const { return values[static_cast<Eigen::Index>(i)]; }
};

template <typename Scalar>
BasicGrid<Scalar> make_grid(Scalar a, Scalar b, std::size_t d) {
  return BasicGrid<Scalar>(a, b, d);
}

template <typename Scalar>
BasicSampledController<Scalar> init_identity(const BasicGrid<Scalar>& grid) {
  return {grid, grid.points()};
}

template <typename Scalar>
BasicSampledController<Scalar> init_constant(const BasicGrid<Scalar>& grid, Scalar c) {
  return {grid, BasicGrid<Scalar>::VectorType::Constant(static_cast<Eigen::Index>(grid.size()), c)};
}

/// Nearest-neighbour evaluation, clamped to the boundary values outside [a, b].
template <typename Scalar>
Scalar eval_controller(const BasicSampledController<Scalar>& ctrl, Scalar y) {
  return ctrl[ctrl.grid.nearest(y)];
}

/// Indices i with |y_i - center| <= r. Always contains nearest(center).
template <typename Scalar>
IndexRange window_indices(const BasicGrid<Scalar>& grid, Scalar center, Scalar r) {
  if (!(r > 0)) throw std::invalid_argument("window radius must be positive");
  const std::size_t c = grid.nearest(center);
  std::size_t first = c;
  while (first > 0 && std::abs(grid.point(first - 1) - center) <= r) --first;
  std::size_t last = c + 1;
  while (last < grid.size() && std::abs(grid.point(last) - center) <= r) ++last;
  return {first, last};
}

using Grid = BasicGrid<double>;
using SampledController = BasicSampledController<double>;
using Vector = Eigen::VectorXd;

/// One controller per stage; stages may use different grids.
using ControllerSet = std::vector<SampledController>;

}  // namespace ucp
