#include <doctest.h>

#include "curvelab/distance.hpp"
#include "curvelab/field.hpp"
#include "curvelab/levelset.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace curvelab;

namespace {

Grid2D centred(double half, int n) {
  return Grid2D(n, n, 2.0 * half / (n - 1), Point(-half, -half));
}

GridSet disk(const Grid2D& g, Point c, double r) {
  return GridSet::from_predicate(g, [&](const Point& p) { return (p - c).norm() <= r; });
}

double radius(const GridSet& s) { return oracle::area_radius(double(s.count()), s.grid.dx); }

// Largest distance from a node of a to the node set b (0 when a is inside b).
double excess(const GridSet& a, const GridSet& b) {
  if (b.empty()) return a.empty() ? 0.0 : INFINITY;
  const ArrayXXd d = distance_to(b);
  return a.mask.select(d, 0.0).maxCoeff();
}

}  // namespace

TEST_CASE("cfl_dt follows the stated bound") {
  const Grid2D g(8, 8, 0.5);
  CHECK(cfl_dt(g, 1.0, 2.0, 0.5) == doctest::Approx(0.03125).epsilon(1e-9));
  CHECK(cfl_dt(g, 0.0, 2.0, 0.5) == doctest::Approx(0.5 * 0.5 / 2.0).epsilon(1e-9));
  CHECK(cfl_dt(g, 1.0, 0.0, 0.5) == doctest::Approx(0.5 * 0.25 / 4.0).epsilon(1e-9));
}

TEST_CASE("solver parameters are validated") {
  SolverParams p;
  p.cfl = 1.5;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = {};
  p.reinit_every = 0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = {};
  p.band = 3;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p.band = 12;
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("init_from_set gives a signed distance with an exact round trip") {
  const Grid2D g = centred(10.0, 81);
  const GridSet s = disk(g, Point::Zero(), 5.0);
  const LevelSetState st = init_from_set(s);
  const auto n = g.nearest(Point(3.0, 0.0));
  CHECK(std::abs(st.u(n.x(), n.y()) - (-2.0)) <= g.dx);
  CHECK(st.zero_set() == s);

  const GridSet all(g, Mask::Constant(g.nx, g.ny, true));
  CHECK((init_from_set(all).u <= 0.0).all());
  CHECK(init_from_set(GridSet(g)).zero_set().empty());
}

TEST_CASE("reinit keeps the mask and fixes signed distances") {
  const Grid2D g = centred(12.0, 97);
  const GridSet s = disk(g, Point(0.3, -0.2), 6.0);
  LevelSetState st = init_from_set(s);

  LevelSetState exact = st;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) exact.u(i, j) = (g.node(i, j) - Point(0.3, -0.2)).norm() - 6.0;
  const LevelSetState again = reinit(exact);
  const Mask near = exact.u.abs() <= 6 * g.dx;
  CHECK(near.select((again.u - exact.u).abs(), 0.0).maxCoeff() <= 0.5 * g.dx);

  LevelSetState scaled = st;
  scaled.u *= 10.0;
  const LevelSetState back = reinit(scaled);
  CHECK(back.zero_set() == s);

  // gradient audit in the 6-cell band
  LevelSetState steep = exact;
  steep.u *= 10.0;
  const ArrayXXd u = reinit(steep).u;
  double lo = 10, hi = 0;
  for (int j = 1; j < g.ny - 1; ++j)
    for (int i = 1; i < g.nx - 1; ++i) {
      if (std::abs(u(i, j)) > 6 * g.dx) continue;
      const double gx = (u(i + 1, j) - u(i - 1, j)) / (2 * g.dx);
      const double gy = (u(i, j + 1) - u(i, j - 1)) / (2 * g.dx);
      const double n = std::hypot(gx, gy);
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
  CHECK(lo >= 0.8);
  CHECK(hi <= 1.2);
}

TEST_CASE("band reinit preserves the sign of every node") {
  const Grid2D g = centred(12.0, 97);
  LevelSetState st = init_from_set(disk(g, Point::Zero(), 4.0), 12);
  st.u = st.u.cube();
  const LevelSetState r = reinit(st, 12);
  CHECK((r.zero_set().mask == st.zero_set().mask).all());
  CHECK(r.u.abs().maxCoeff() <= 13 * g.dx + 1e-12);
}

TEST_CASE("planar front moves at unit speed under F = 1, a = 0") {
  const Grid2D g(64, 16, 0.5);
  const CoefficientField f = CoefficientField::uniform(0.0, 1.0);
  const SampledField sf = sample(f, g);
  const GridSet s = GridSet::from_predicate(g, [](const Point& p) { return p.x() <= 5.0; });
  SolverParams p;
  const GridSet out = evolve_final(s, sf, 10.0, p);
  // front position from the count of one row
  const double front = (out.mask.col(8).count() - 1) * g.dx;
  CHECK(std::abs(front - 15.0) <= g.dx + 1e-9);
}

TEST_CASE("expanding circle follows the radial ODE") {
  const Grid2D g = centred(30.0, 241);
  const SampledField sf = sample(CoefficientField::uniform(1.0, 1.0), g);
  SolverParams p;
  p.record_dt = 1.0;
  const Trajectory tr = evolve(disk(g, Point::Zero(), 8.0), sf, 12.0, p);
  REQUIRE(tr.size() == 13);
  for (const Snapshot& s : tr) {
    const double exact = oracle::radial(8.0, 1.0, 1.0, s.t);
    CHECK(radius(s.set) == doctest::Approx(exact).epsilon(0.02));
  }
}

TEST_CASE("shrinking circle follows rho^2 = rho0^2 - 2t") {
  const Grid2D g = centred(12.0, 121);
  const SampledField sf = sample(CoefficientField::uniform(1.0, 0.0), g);
  SolverParams p;
  p.record_dt = 2.0;
  const Trajectory tr = evolve(disk(g, Point::Zero(), 10.0), sf, 40.0, p);
  for (const Snapshot& s : tr) {
    const double exact = std::sqrt(100.0 - 2.0 * s.t);
    if (exact < 4 * g.dx) break;
    CHECK(radius(s.set) == doctest::Approx(exact).epsilon(0.02));
  }
}

TEST_CASE("zero horizon returns the initial set") {
  const Grid2D g = centred(5.0, 21);
  const GridSet s = disk(g, Point::Zero(), 2.0);
  const Trajectory tr = evolve(s, sample(CoefficientField::uniform(1.0, 1.0), g), 0.0, {});
  REQUIRE(tr.size() == 1);
  CHECK(tr[0].set == s);
  CHECK(tr[0].t == 0.0);
}

TEST_CASE("snapshots land on multiples of record_dt and end at the horizon") {
  const Grid2D g = centred(5.0, 21);
  SolverParams p;
  p.record_dt = 0.3;
  const Trajectory tr = evolve(disk(g, Point::Zero(), 2.0),
                               sample(CoefficientField::uniform(0.1, 0.2), g), 1.0, p);
  REQUIRE(tr.size() == 5);
  CHECK(tr[1].t == doctest::Approx(0.3));
  CHECK(tr[3].t == doctest::Approx(0.9));
  CHECK(tr.back().t == 1.0);
}

TEST_CASE("narrow band agrees with the full grid within one cell") {
  const Grid2D g = centred(20.0, 161);
  const Rect dom = g.extent();
  const auto pts = sample_poisson(dom, 0.05, 1.0, 7);
  const CoefficientField f =
      CoefficientField::with_obstacles(0.5, 1.0, ObstacleShape::cone(1.5), pts);
  const SampledField sf = sample(f, g);
  const GridSet s = disk(g, Point::Zero(), 6.0);
  SolverParams full;
  SolverParams band;
  band.band = 12;
  const GridSet a = evolve_final(s, sf, 6.0, full);
  const GridSet b = evolve_final(s, sf, 6.0, band);
  CHECK(excess(a, b) <= g.dx * 1.0001);
  CHECK(excess(b, a) <= g.dx * 1.0001);
}

TEST_CASE("comparison holds on a random field") {
  const Grid2D g = centred(15.0, 121);
  const auto pts = sample_poisson(g.extent(), 0.1, 1.0, 11);
  const SampledField sf =
      sample(CoefficientField::with_obstacles(0.5, 0.6, ObstacleShape::cone(2.0), pts), g);
  const GridSet s1 = disk(g, Point(1, 0), 4.0);
  const GridSet s2 = s1 | disk(g, Point(-2, 1), 5.0);
  SolverParams p;
  p.record_dt = 0.5;
  const Trajectory t1 = evolve(s1, sf, 8.0, p);
  const Trajectory t2 = evolve(s2, sf, 8.0, p);
  REQUIRE(t1.size() == t2.size());
  for (std::size_t k = 0; k < t1.size(); ++k) CHECK(subset_of(t1[k].set, t2[k].set));
}

TEST_CASE("non-finite values are reported as numeric errors") {
  const Grid2D g = centred(5.0, 21);
  LevelSetState st = init_from_set(disk(g, Point::Zero(), 2.0));
  st.u(3, 4) = NAN;
  const SampledField sf = sample(CoefficientField::uniform(1.0, 1.0), g);
  CHECK_THROWS_AS(step(st, sf, 0.01), NumericError);
}
