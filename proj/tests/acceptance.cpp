// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// fails. Pass criterion numbers as arguments to run a subset.

#include "curvelab/arrival.hpp"
#include "curvelab/concentration.hpp"
#include "curvelab/distance.hpp"
#include "curvelab/field.hpp"
#include "curvelab/geom.hpp"
#include "curvelab/homog.hpp"
#include "curvelab/io.hpp"
#include "curvelab/levelset.hpp"
#include "curvelab/mcharness.hpp"
#include "curvelab/pool.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <set>
#include <string>

using namespace curvelab;

namespace {

// Tolerances.
constexpr double kRadialRel = 0.02;
constexpr double kRadialSeconds = 60.0;
constexpr double kCurvatureRel = 0.02;
constexpr double kBandCells = 2.0;
constexpr double kVhomRel = 0.05;
constexpr double kVhomSeconds = 900.0;
constexpr double kSlopeMax = 0.6;
constexpr double kConcSeconds = 60.0;
constexpr double kBoxHigh = 0.95;
constexpr double kBoxLow = 0.05;

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

Grid2D centred(double half, double dx) {
  const int n = static_cast<int>(std::lround(2 * half / dx)) + 1;
  return Grid2D(n, n, dx, Point(-half, -half));
}

GridSet disk(const Grid2D& g, Point c, double r) {
  return GridSet::from_predicate(g, [&](const Point& p) { return (p - c).norm() <= r; });
}

double area_radius(const GridSet& s) { return oracle::area_radius(double(s.count()), s.grid.dx); }

// Union of a few random disks around the origin.
GridSet blob(const Grid2D& g, std::mt19937_64& rng, int n, double spread, double rmin, double rmax) {
  std::uniform_real_distribution<double> c(-spread, spread), r(rmin, rmax);
  GridSet s(g);
  for (int k = 0; k < n; ++k) s = s | disk(g, Point(c(rng), c(rng)), r(rng));
  return s;
}

CoefficientField random_field(const Grid2D& g, std::uint64_t seed, double a, double f_uni,
                              double intensity, const ObstacleShape& shape) {
  return CoefficientField::with_obstacles(a, f_uni, shape, sample_poisson(g.extent(), intensity, 1.0, seed));
}

std::vector<GridSet> snapshots(const LevelSetState& init, const SampledField& f, double horizon,
                               const SolverParams& p) {
  std::vector<GridSet> out;
  LevelSetState s = init;
  evolve(s, f, horizon, p, [&](const LevelSetState& x) {
    out.push_back(x.zero_set());
    return true;
  });
  return out;
}

Outcome radial_ode() {
  const auto t0 = Clock::now();
  const int n = 512;
  const double half = 50.0;
  const Grid2D g(n, n, 2 * half / (n - 1), Point(-half, -half));
  const SampledField f = sample(CoefficientField::uniform(1.0, 1.0), g);
  const double t_end = oracle::radial_hit(10.0, 1.0, 1.0, 40.0);
  SolverParams p;
  p.band = 12;
  p.record_dt = t_end / 10.0;
  const Trajectory tr = evolve(disk(g, Point::Zero(), 10.0), f, t_end, p);
  double worst = 0.0;
  int checked = 0;
  for (std::size_t k = 1; k < tr.size(); ++k) {
    const double exact = oracle::radial(10.0, 1.0, 1.0, tr[k].t);
    worst = std::max(worst, std::abs(area_radius(tr[k].set) / exact - 1.0));
    ++checked;
  }
  const double secs = seconds_since(t0);
  return {checked == 10 && worst <= kRadialRel && secs < kRadialSeconds,
          fmt("%g checkpoints, max rel err %.4f (tol %.2f), %.1f s", checked, worst, kRadialRel, secs)};
}

Outcome pure_curvature() {
  const Grid2D g = centred(12.0, 0.2);
  const SampledField f = sample(CoefficientField::uniform(1.0, 0.0), g);
  const double rho0 = 10.0;
  SolverParams p;
  p.record_dt = 1.0;
  const double t_end = (rho0 * rho0 - std::pow(4 * g.dx, 2)) / 2.0;
  const Trajectory tr = evolve(disk(g, Point::Zero(), rho0), f, t_end, p);
  double worst = 0.0;
  int checked = 0;
  for (const Snapshot& s : tr) {
    const double exact = std::sqrt(rho0 * rho0 - 2.0 * s.t);
    if (exact < 4 * g.dx) break;
    worst = std::max(worst, std::abs(area_radius(s.set) / exact - 1.0));
    ++checked;
  }
  return {worst <= kCurvatureRel, fmt("%g snapshots down to rho = 4dx, max rel err %.4f (tol %.2f)",
                                      checked, worst, kCurvatureRel)};
}

Outcome comparison() {
  std::mt19937_64 rng(31);
  const Grid2D g = centred(10.0, 0.25);
  SolverParams p;
  p.record_dt = 0.25;
  int violations = 0, snaps = 0;
  for (int inst = 0; inst < 100; ++inst) {
    const SampledField f = sample(random_field(g, 1000 + inst, 0.5, 0.6, 0.15, ObstacleShape::cone(2.0)), g);
    const GridSet s1 = blob(g, rng, 3, 3.0, 1.0, 2.5);
    const GridSet s2 = s1 | blob(g, rng, 2, 4.0, 1.0, 3.0);
    const Trajectory a = evolve(s1, f, 4.0, p);
    const Trajectory b = evolve(s2, f, 4.0, p);
    for (std::size_t k = 0; k < a.size(); ++k, ++snaps)
      if (!subset_of(a[k].set, b[k].set)) ++violations;
  }
  return {violations == 0, fmt("100 pairs, %g snapshots, %g violations", snaps, violations)};
}

Outcome max_speed_bound() {
  std::mt19937_64 rng(41);
  const Grid2D g = centred(14.0, 0.25);
  const double v = max_speed(1.0, 1.0, 2.0);
  SolverParams p;
  p.record_dt = 0.1;
  int violations = 0, snaps = 0;
  for (int inst = 0; inst < 50; ++inst) {
    // |F| <= 2 and Lip F <= 2
    const CoefficientField cf =
        random_field(g, 2000 + inst, 1.0, 2.0, 0.1, ObstacleShape::cone(2.0)).with_bounds(1.0, 2.0);
    const SampledField f = sample(cf, g);
    const GridSet s = blob(g, rng, 3, 2.0, 1.0, 2.0);
    const ArrayXXd d = distance_to(s);
    const Trajectory tr = evolve(s, f, 1.0, p);
    for (const Snapshot& sn : tr) {
      ++snaps;
      const double reach = 1.0 + v * sn.t + 2.0 * g.dx;
      if (sn.set.mask.select(d, 0.0).maxCoeff() > reach) ++violations;
    }
  }
  return {violations == 0, fmt("50 fields, v_max = %g, %g snapshots, %g violations", v, snaps, violations)};
}

Outcome semigroup_reparam() {
  std::mt19937_64 rng(51);
  const Grid2D g = centred(10.0, 0.25);
  const double band = kBandCells * g.dx * (1 + 1e-9);
  SolverParams p;
  p.record_dt = 0.5;
  double worst_sg = 0.0, worst_rp = 0.0;
  int bad_sg = 0, bad_rp = 0;
  for (int inst = 0; inst < 20; ++inst) {
    const SampledField f = sample(random_field(g, 3000 + inst, 0.5, 0.8, 0.1, ObstacleShape::cone(1.5)), g);
    const GridSet s = blob(g, rng, 3, 3.0, 1.5, 3.0);
    const GridSet once = evolve_final(s, f, 3.0, p);
    const GridSet twice = evolve_final(evolve_final(s, f, 1.5, p), f, 1.5, p);
    const double dsg = hausdorff_distance(once, twice);
    worst_sg = std::max(worst_sg, dsg);
    if (dsg > band) ++bad_sg;

    LevelSetState u0 = init_from_set(s, 0);
    LevelSetState w0 = u0;
    w0.u = u0.u.tanh();
    const auto a = snapshots(u0, f, 3.0, p);
    const auto b = snapshots(w0, f, 3.0, p);
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double drp = hausdorff_distance(a[k], b[k]);
      worst_rp = std::max(worst_rp, drp);
      if (drp > band) ++bad_rp;
    }
  }
  return {bad_sg == 0 && bad_rp == 0,
          fmt("semigroup max %.3f, tanh reparametrization max %.3f (band %.3f), %g violations",
              worst_sg, worst_rp, band, bad_sg + bad_rp)};
}

Outcome restricted_trapping() {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> side(3.0, 8.0);
  const double dx = 0.25;
  SolverParams p;
  p.record_dt = 0.25;
  double worst = 0.0;
  int violations = 0;
  for (int inst = 0; inst < 20; ++inst) {
    const Rect q{Point(-side(rng), -side(rng)), Point(side(rng), side(rng))};
    const Grid2D g = Grid2D::covering(q.expanded(3.0), dx);
    const CoefficientField base = random_field(g, 4000 + inst, 1.0, 1.5, 0.1, ObstacleShape::cone(1.0));
    const SampledField f = sample(restrict(base, Restriction::rectangle(q)), g);
    const GridSet s = GridSet::from_predicate(g, [&](const Point& x) {
      return q.distance(x) == 0.0 && (x - 0.5 * (q.lo + q.hi)).norm() <= 2.5;
    });
    const Trajectory tr = evolve(s, f, 8.0, p);
    for (const Snapshot& sn : tr)
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
          if (sn.set.mask(i, j)) {
            const double d = q.distance(g.node(i, j));
            worst = std::max(worst, d);
            if (d > 2.0 / 3.0 + 2.0 * dx) ++violations;
          }
  }
  return {violations == 0, fmt("20 instances, max dist to Q %.3f (bound %.3f), %g violating nodes",
                               worst, 2.0 / 3.0 + 2.0 * dx, violations)};
}

Outcome pinning_barrier() {
  const Grid2D g = centred(14.0, 0.25);
  const double a = 1.0, f_uni = 1.0, ring = 5.0, t_max = 30.0;
  const ObstacleShape shape = ObstacleShape::plateau(f_uni + a / ring + 1.0);
  const GridSet s = GridSet::from_predicate(g, [](const Point& p) { return p.norm() >= 11.0; });
  SolverParams p;
  p.band = 12;
  p.record_dt = 0.5;
  int censored = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    PoissonPoints pts = sample_poisson(g.extent(), 0.02, 1.0, 5000 + seed);
    const auto extra = ring_points(Point::Zero(), ring, 0.5);
    pts.points.insert(pts.points.end(), extra.begin(), extra.end());
    const SampledField f = sample(CoefficientField::with_obstacles(a, f_uni, shape, pts), g);
    const ArrivalRecord r = arrival_time(f, s, Point::Zero(), t_max, p);
    if (r.censored && r.value == t_max) ++censored;
  }
  return {censored == 100, fmt("%g/100 censored at t_max = %g", censored, t_max)};
}

Outcome vhom_calibration(const WorkerPool& pool) {
  const auto t0 = Clock::now();
  FieldConfig fc;
  VhomOptions o;
  o.beta = 2.0;
  const VhomEstimate est = estimate_vhom(fc, Point(0, 1), {50.0, 100.0, 200.0}, 0.5, 100, 0.0, o, pool);
  const double secs = seconds_since(t0);
  const double v50 = est.v_hat[0], v100 = est.v_hat[1], v200 = est.v_hat[2];
  const bool near = std::abs(v200 - 1.0) <= kVhomRel;
  const bool cauchy = std::abs(v200 - v100) <= std::abs(v100 - v50);
  return {near && cauchy && secs < kVhomSeconds,
          fmt("v_hat = %.4f, %.4f, %.4f; |v_hat(200) - 1| = %.4f ", v50, v100, v200, std::abs(v200 - 1.0)) +
              (near ? "ok" : "too large") + ", Cauchy trend " + (cauchy ? "ok" : "violated") + ", " +
              fmt("%.0f s with %g workers", secs, pool.workers())};
}

Outcome df_monotonicity(const WorkerPool& pool) {
  FieldConfig fc;
  fc.seed = 9;
  fc.intensity = 0.05;
  fc.shape = ObstacleShape::cone(1.5);
  VhomOptions o;
  const std::vector<double> scales = {25.0, 50.0};
  std::vector<VhomEstimate> est;
  for (double df : {0.0, 0.1, 0.2})
    est.push_back(estimate_vhom(fc, Point(0, 1), scales, 0.5, 20, df, o, pool));
  int violations = 0, flagged = 0;
  for (std::size_t k = 0; k < scales.size(); ++k)
    for (std::size_t m = 1; m < est.size(); ++m) {
      if (est[m].flagged[k] || est[m - 1].flagged[k]) ++flagged;
      else if (est[m].v_hat[k] < est[m - 1].v_hat[k]) ++violations;
    }
  return {violations == 0 && flagged == 0,
          fmt("scales 25, 50; 20 coupled seeds; v_hat(50) = %.4f, %.4f, %.4f; %g violations", est[0].v_hat[1],
              est[1].v_hat[1], est[2].v_hat[1], violations) +
              (flagged ? fmt(", %g flagged comparisons", flagged) : "")};
}

Outcome fluctuation_shape(const WorkerPool& pool) {
  EnsembleConfig c;
  c.master_seed = 10;
  c.n_seeds = 200;
  c.field.f_uni = 1.0;
  c.field.intensity = 0.01;
  c.field.shape = ObstacleShape::cone(2.0);
  c.dists = {50.0, 100.0, 200.0, 400.0};
  c.h_exponent = 0.5;
  c.dx = 0.5;
  const EnsembleResult r = run_ensemble(c, pool);
  const EnsembleStats& st = r.stats;
  std::string d = fmt("std =");
  for (const ScaleStats& s : st.scales) d += fmt(" %.3f", s.std);
  d += fmt("; slope %.3f [%.3f, %.3f] (max %.1f)", st.slope, st.slope_lo, st.slope_hi, kSlopeMax);
  d += fmt("; normalized slope %.3f [%.3f, %.3f], bound %.3f", st.normalized_slope, st.normalized_slope_lo,
           st.normalized_slope_hi, st.normalized_bound);
  return {r.complete && st.has_slope && st.slope <= kSlopeMax && st.normalized_bounded, d};
}

Outcome concentration() {
  const auto t0 = Clock::now();
  const MartingalePaths m = reflected_walk(100000, 64, 8, 11);
  const AltReport alt = mc_verify_alt(m, 3);
  const FiltrationSpec f;
  const HoeffdingReport hoeff = conditional_hoeffding_check(m, f);
  std::vector<char> touched(m.paths());
  for (int p = 0; p < m.paths(); ++p) touched[p] = m.values.row(p).abs().maxCoeff() >= m.T;
  const MaximalReport maxi = indicator_maximal_check(m, touched, 0.5, f);
  const double secs = seconds_since(t0);
  std::string d = "moments";
  for (const MomentCheck& r : alt.rows) d += fmt(" k=%g %.1f<=%.4g", r.k, r.empirical, r.bound);
  d += fmt("; Hoeffding %g/%g fail; maximal %.4f <= %.4f", hoeff.failures, hoeff.checks, maxi.excursion,
           maxi.bound);
  d += fmt("; %.1f s", secs);
  return {alt.pass && hoeff.pass && maxi.pass && secs < kConcSeconds, d};
}

Outcome sandwich() {
  FieldConfig fc;
  fc.seed = 12;
  fc.intensity = 0.02;
  fc.shape = ObstacleShape::cone(1.5);
  SandwichOptions o;
  int violations = 0;
  for (std::uint64_t i = 0; i < 50; ++i)
    if (!sandwich_trial(fc, i, o).ordered()) ++violations;
  return {violations == 0, fmt("50 seeds, %g violations", violations)};
}

Outcome box_separation(const WorkerPool& pool) {
  BoxOptions o;
  FieldConfig weak;
  weak.seed = 13;
  weak.f_uni = 1.0;
  weak.intensity = 0.005;
  weak.shape = ObstacleShape::cone(0.5);
  FieldConfig hard;
  hard.seed = 13;
  hard.f_uni = 0.05;
  hard.intensity = 0.2;
  hard.shape = ObstacleShape::plateau(1.0);
  const BoxResult a = box_criterion(200.0, 40.0, weak, 100, 600.0, o, pool);
  const BoxResult b = box_criterion(200.0, 40.0, hard, 100, 600.0, o, pool);
  return {a.p_hat >= kBoxHigh && b.p_hat <= kBoxLow,
          fmt("weak p_hat %.2f [%.3f, %.3f]; ", a.p_hat, a.ci.lo, a.ci.hi) +
              fmt("impenetrable p_hat %.2f [%.3f, %.3f], %g stagnated", b.p_hat, b.ci.lo, b.ci.hi, b.stagnated)};
}

Outcome determinism() {
  EnsembleConfig c;
  c.master_seed = 14;
  c.n_seeds = 8;
  c.field.intensity = 0.05;
  c.field.shape = ObstacleShape::cone(2.0);
  c.dists = {16.0, 24.0};
  c.dx = 0.5;
  const auto root = std::filesystem::temp_directory_path() / "curvelab_acceptance_det";
  std::filesystem::remove_all(root);
  std::string ref;
  int mismatches = 0;
  for (int w : {1, 4, 8}) {
    const auto dir = root / ("w" + std::to_string(w));
    run_ensemble(c, WorkerPool(w), dir);
    const std::string csv = io::read_text(dir / "arrival.csv");
    if (ref.empty()) ref = csv;
    else if (csv != ref) ++mismatches;
  }
  std::filesystem::remove_all(root);
  return {mismatches == 0 && !ref.empty(), fmt("workers 1, 4, 8: %g mismatching arrival.csv", mismatches)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int k = 1; k < argc; ++k) only.insert(std::atoi(argv[k]));
  const WorkerPool pool(8);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"radial ODE", radial_ode},
      {"pure curvature", pure_curvature},
      {"discrete comparison", comparison},
      {"maximum speed", max_speed_bound},
      {"semigroup and reparametrization", semigroup_reparam},
      {"restricted-field trapping", restricted_trapping},
      {"pinning barrier", pinning_barrier},
      {"v_hom calibration", [&] { return vhom_calibration(pool); }},
      {"forcing-shift monotonicity", [&] { return df_monotonicity(pool); }},
      {"fluctuation shape", [&] { return fluctuation_shape(pool); }},
      {"concentration", concentration},
      {"sandwich ordering", sandwich},
      {"box separation", [&] { return box_separation(pool); }},
      {"determinism", determinism},
  };

  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!only.empty() && !only.count(id)) continue;
    Outcome out;
    const auto t0 = Clock::now();
    try {
      out = criteria[k].second();
    } catch (const std::exception& e) {
      out = {false, std::string("error: ") + e.what()};
    }
    if (!out.pass) ++failed;
    std::printf("%s %2d %s: %s [%.0f s]\n", out.pass ? "PASS" : "FAIL", id, criteria[k].first,
                out.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
