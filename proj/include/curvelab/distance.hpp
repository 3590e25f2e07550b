#pragma once

#include "curvelab/grid.hpp"

#include <limits>
#include <vector>

namespace curvelab {

namespace detail {

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher), one line.
template <typename Scalar>
void edt_1d(const Scalar* f, Scalar* d, int n, int* v, Scalar* z) {
  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
  int k = 0;
  int first = 0;
  while (first < n && f[first] == inf) ++first;
  if (first == n) {
    for (int q = 0; q < n; ++q) d[q] = inf;
    return;
  }
  v[0] = first;
  z[0] = -inf;
  z[1] = inf;
  auto meet = [&](int q, int p) {
    return ((f[q] + Scalar(q) * q) - (f[p] + Scalar(p) * p)) / (Scalar(2) * (q - p));
  };
  for (int q = first + 1; q < n; ++q) {
    if (f[q] == inf) continue;
    Scalar s = meet(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = meet(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = inf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const Scalar t = Scalar(q - v[k]);
    d[q] = t * t + f[v[k]];
  }
}

}  // namespace detail

/// Exact squared Euclidean distance (in cell units) from every node to the
/// nearest node where `sources` is true. +inf everywhere if there is none.
template <typename Scalar = double>
GridArray<Scalar> squared_distance_transform(const Mask& sources) {
  constexpr Scalar inf = std::numeric_limits<Scalar>::infinity();
  const int nx = static_cast<int>(sources.rows());
  const int ny = static_cast<int>(sources.cols());
  GridArray<Scalar> out(nx, ny);
  const int n = std::max(nx, ny);
  std::vector<Scalar> f(n), d(n), z(n + 1);
  std::vector<int> v(n);

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) f[i] = sources(i, j) ? Scalar(0) : inf;
    detail::edt_1d(f.data(), d.data(), nx, v.data(), z.data());
    for (int i = 0; i < nx; ++i) out(i, j) = d[i];
  }
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) f[j] = out(i, j);
    detail::edt_1d(f.data(), d.data(), ny, v.data(), z.data());
    for (int j = 0; j < ny; ++j) out(i, j) = d[j];
  }
  return out;
}

/// Physical distance from each node to the nearest node of the set.
template <typename Scalar = double>
GridArray<Scalar> distance_to(const GridSet& s) {
  return squared_distance_transform<Scalar>(s.mask).sqrt() * Scalar(s.grid.dx);
}

/// Signed distance with the interface placed halfway between nodes:
/// negative on the set, positive off it; {u <= 0} reproduces the mask.
/// Empty and full sets map to a finite constant beyond every grid distance.
ArrayXXd signed_distance(const GridSet& s);

/// Distance from an arbitrary point to the nearest node of the set (+inf if
/// empty).
double point_distance(const GridSet& s, const Point& p);

enum class Connectivity { Four, Eight };

struct Components {
  GridArray<int> label;               // -1 off the selection
  int count = 0;
  std::vector<bool> touches_boundary;  // per label
  std::vector<Eigen::Index> size;      // per label
};

/// Connected components of the nodes where `select` is true.
Components label_components(const Mask& select, Connectivity conn);

}  // namespace curvelab
