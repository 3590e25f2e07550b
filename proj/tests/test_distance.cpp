#include <doctest.h>

#include "curvelab/distance.hpp"

#include <random>

using namespace curvelab;

namespace {

// O(n^2) reference: squared distance in cells to the nearest source node.
ArrayXXd brute_sq(const Mask& m) {
  ArrayXXd out = ArrayXXd::Constant(m.rows(), m.cols(), INFINITY);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index b = 0; b < m.cols(); ++b)
        for (Eigen::Index a = 0; a < m.rows(); ++a)
          if (m(a, b)) out(i, j) = std::min(out(i, j), double((i - a) * (i - a) + (j - b) * (j - b)));
  return out;
}

}  // namespace

TEST_CASE("distance transform matches brute force on random masks") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    std::bernoulli_distribution on(trial % 5 == 0 ? 0.01 : 0.1);
    Mask m(17 + trial % 4, 13 + trial % 3);
    for (Eigen::Index k = 0; k < m.size(); ++k) m(k) = on(rng);
    m(trial % m.rows(), 0) = true;
    const ArrayXXd fast = squared_distance_transform<double>(m);
    CHECK((fast - brute_sq(m)).abs().maxCoeff() == 0.0);
    const auto fastf = squared_distance_transform<float>(m);
    CHECK((fastf.cast<double>() - brute_sq(m)).abs().maxCoeff() == 0.0);
  }
}

TEST_CASE("no sources gives infinite distance") {
  const Mask m = Mask::Constant(6, 5, false);
  CHECK(std::isinf(squared_distance_transform<double>(m)(2, 2)));
}

TEST_CASE("distance_to is in physical units and matches point_distance at nodes") {
  const Grid2D g(20, 15, 0.25, Point(-1, 2));
  GridSet s(g);
  s.mask(4, 3) = s.mask(15, 10) = true;
  const ArrayXXd d = distance_to(s);
  for (int j = 0; j < g.ny; j += 3)
    for (int i = 0; i < g.nx; i += 3)
      CHECK(d(i, j) == doctest::Approx(point_distance(s, g.node(i, j))));
}

TEST_CASE("signed distance is negative exactly on the set") {
  const Grid2D g(30, 30, 1.0);
  const GridSet s = GridSet::from_predicate(g, [](const Point& p) {
    return (p - Point(15, 15)).norm() <= 7.0;
  });
  const ArrayXXd u = signed_distance(s);
  CHECK(((u <= 0.0) == s.mask).all());
  CHECK(u.abs().minCoeff() == doctest::Approx(0.5));
}

TEST_CASE("component labelling respects the connectivity convention") {
  // two nodes touching diagonally
  Mask m = Mask::Constant(6, 6, false);
  m(2, 2) = m(3, 3) = true;
  CHECK(label_components(m, Connectivity::Four).count == 2);
  CHECK(label_components(m, Connectivity::Eight).count == 1);

  Mask ring = Mask::Constant(7, 7, true);
  ring(3, 3) = false;
  const Components c = label_components(!ring.array(), Connectivity::Four);
  REQUIRE(c.count == 1);
  CHECK_FALSE(c.touches_boundary[0]);
  CHECK(c.size[0] == 1);
  const Components outer = label_components(ring, Connectivity::Eight);
  CHECK(outer.touches_boundary[0]);
}
