#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace curvelab {

/// Dense nodal storage on a 2-D grid, indexed (i, j) with i along x.
/// Column-major, so the flat index is i + nx * j (rows of constant y are
/// contiguous).
template <typename Scalar>
using GridArray = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using ArrayXXd = GridArray<double>;
using Mask = GridArray<bool>;
using Point = Eigen::Vector2d;

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DomainError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned closed rectangle [lo.x, hi.x] x [lo.y, hi.y].
struct Rect {
  Point lo{0.0, 0.0};
  Point hi{0.0, 0.0};

  double width() const { return hi.x() - lo.x(); }
  double height() const { return hi.y() - lo.y(); }
  double area() const { return width() * height(); }
  bool contains(const Point& p) const {
    return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y();
  }
  Rect expanded(double r) const { return {lo.array() - r, hi.array() + r}; }
  /// Euclidean distance from p to the rectangle (0 inside).
  double distance(const Point& p) const {
    const double ex = std::max({lo.x() - p.x(), 0.0, p.x() - hi.x()});
    const double ey = std::max({lo.y() - p.y(), 0.0, p.y() - hi.y()});
    return std::hypot(ex, ey);
  }
};

/// Uniform square-cell node grid. Node (i, j) sits at origin + dx * (i, j).
struct Grid2D {
  int nx = 0;
  int ny = 0;
  double dx = 1.0;
  Point origin{0.0, 0.0};

  Grid2D() = default;
  Grid2D(int nx_, int ny_, double dx_, Point origin_ = Point::Zero())
      : nx(nx_), ny(ny_), dx(dx_), origin(std::move(origin_)) {
    if (nx < 4 || ny < 4) throw ParameterError("Grid2D: nx, ny must be >= 4");
    if (!(dx > 0.0)) throw ParameterError("Grid2D: dx must be positive");
  }

  /// Smallest grid with spacing dx covering the rectangle.
  static Grid2D covering(const Rect& r, double dx) {
    const int nx = static_cast<int>(std::ceil(r.width() / dx - 1e-9)) + 1;
    const int ny = static_cast<int>(std::ceil(r.height() / dx - 1e-9)) + 1;
    return Grid2D(std::max(nx, 4), std::max(ny, 4), dx, r.lo);
  }

  Eigen::Index size() const { return Eigen::Index(nx) * ny; }
  Eigen::Index flat(int i, int j) const { return i + Eigen::Index(nx) * j; }

  Point node(int i, int j) const { return origin + dx * Point(i, j); }
  Rect extent() const { return {origin, node(nx - 1, ny - 1)}; }

  /// Index of the node nearest to p, clamped into the grid.
  Eigen::Vector2i nearest(const Point& p) const {
    const Point q = (p - origin) / dx;
    int i = static_cast<int>(std::lround(q.x()));
    int j = static_cast<int>(std::lround(q.y()));
    return {std::clamp(i, 0, nx - 1), std::clamp(j, 0, ny - 1)};
  }

  bool operator==(const Grid2D& o) const {
    return nx == o.nx && ny == o.ny && dx == o.dx && origin == o.origin;
  }
  bool operator!=(const Grid2D& o) const { return !(*this == o); }
};

/// Boolean occupancy mask on a grid; a node-based representation of a closed
/// subset of the plane.
struct GridSet {
  Grid2D grid;
  Mask mask;

  GridSet() = default;
  explicit GridSet(const Grid2D& g) : grid(g), mask(Mask::Constant(g.nx, g.ny, false)) {}
  GridSet(const Grid2D& g, Mask m) : grid(g), mask(std::move(m)) {
    if (mask.rows() != g.nx || mask.cols() != g.ny)
      throw ParameterError("GridSet: mask dimensions do not match grid");
  }

  template <typename Pred>
  static GridSet from_predicate(const Grid2D& g, Pred&& inside) {
    GridSet s(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) s.mask(i, j) = inside(g.node(i, j));
    return s;
  }

  Eigen::Index count() const { return mask.count(); }
  bool empty() const { return !mask.any(); }
  bool full() const { return mask.all(); }

  bool operator==(const GridSet& o) const { return grid == o.grid && (mask == o.mask).all(); }
};

inline GridSet operator|(const GridSet& a, const GridSet& b) { return {a.grid, a.mask || b.mask}; }
inline GridSet operator&(const GridSet& a, const GridSet& b) { return {a.grid, a.mask && b.mask}; }
inline GridSet complement(const GridSet& a) { return {a.grid, !a.mask}; }
/// a is a subset of b node-wise.
inline bool subset_of(const GridSet& a, const GridSet& b) { return !(a.mask && !b.mask).any(); }

}  // namespace curvelab
