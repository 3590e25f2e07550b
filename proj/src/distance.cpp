#include "curvelab/distance.hpp"

#include <cmath>

namespace curvelab {

ArrayXXd signed_distance(const GridSet& s) {
  const double half = 0.5 * s.grid.dx;
  // Degenerate sets get a finite value beyond any in-grid distance.
  const double far = (s.grid.nx + s.grid.ny) * s.grid.dx;
  if (s.empty()) return ArrayXXd::Constant(s.grid.nx, s.grid.ny, far);
  if (s.full()) return ArrayXXd::Constant(s.grid.nx, s.grid.ny, -far);
  const ArrayXXd out = distance_to(s);
  const ArrayXXd in = distance_to(complement(s));
  return s.mask.select(-(in - half), out - half);
}

double point_distance(const GridSet& s, const Point& p) {
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < s.grid.ny; ++j)
    for (int i = 0; i < s.grid.nx; ++i)
      if (s.mask(i, j)) best = std::min(best, (s.grid.node(i, j) - p).squaredNorm());
  return std::sqrt(best);
}

Components label_components(const Mask& select, Connectivity conn) {
  const int nx = static_cast<int>(select.rows());
  const int ny = static_cast<int>(select.cols());
  Components c;
  c.label = GridArray<int>::Constant(nx, ny, -1);
  static constexpr int off4[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  static constexpr int off8[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1},
                                     {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  const int noff = conn == Connectivity::Four ? 4 : 8;
  const auto& off = conn == Connectivity::Four ? off4 : off8;

  std::vector<std::pair<int, int>> stack;
  for (int j0 = 0; j0 < ny; ++j0) {
    for (int i0 = 0; i0 < nx; ++i0) {
      if (!select(i0, j0) || c.label(i0, j0) >= 0) continue;
      const int id = c.count++;
      bool boundary = false;
      Eigen::Index n = 0;
      stack.assign(1, {i0, j0});
      c.label(i0, j0) = id;
      while (!stack.empty()) {
        const auto [i, j] = stack.back();
        stack.pop_back();
        ++n;
        if (i == 0 || j == 0 || i == nx - 1 || j == ny - 1) boundary = true;
        for (int k = 0; k < noff; ++k) {
          const int a = i + off[k][0];
          const int b = j + off[k][1];
          if (a < 0 || b < 0 || a >= nx || b >= ny) continue;
          if (!select(a, b) || c.label(a, b) >= 0) continue;
          c.label(a, b) = id;
          stack.emplace_back(a, b);
        }
      }
      c.touches_boundary.push_back(boundary);
      c.size.push_back(n);
    }
  }
  return c;
}

}  // namespace curvelab
