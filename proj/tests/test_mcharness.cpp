#include <doctest.h>

#include "curvelab/io.hpp"
#include "curvelab/mcharness.hpp"

#include <cmath>
#include <filesystem>

using namespace curvelab;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("curvelab_mc_" + name);
  std::filesystem::remove_all(p);
  return p;
}

EnsembleConfig small(double intensity) {
  EnsembleConfig c;
  c.master_seed = 7;
  c.n_seeds = 6;
  c.field.intensity = intensity;
  c.field.shape = ObstacleShape::cone(2.0);
  c.dists = {12.0, 16.0};
  c.h_fixed = 2.0;
  c.dx = 0.5;
  return c;
}

ScaleRecords synthetic(double dist, double h, double sigma, int n, int censored = 0) {
  ScaleRecords s;
  s.dist = dist;
  s.h = h;
  for (int i = 0; i < n; ++i) {
    ArrivalRecord r;
    r.value = dist + sigma * (i % 2 ? 1.0 : -1.0);
    r.censored = i < censored;
    if (r.censored) r.value = 1e9;
    s.records.push_back(r);
  }
  return s;
}

}  // namespace

TEST_CASE("quantiles and Wilson interval") {
  const std::vector<double> v = {1, 2, 3, 4, 10};
  CHECK(quantile_sorted(v, 0.0) == 1.0);
  CHECK(quantile_sorted(v, 1.0) == 10.0);
  CHECK(quantile_sorted(v, 0.5) == 3.0);
  CHECK(quantile_sorted(v, 0.9) == doctest::Approx(7.6));
  CHECK(quantile_sorted(v, 0.05) == doctest::Approx(1.2));

  // Closed forms of the score interval.
  Wilson w = wilson_interval(5, 10);
  CHECK(w.lo == doctest::Approx(0.2365931).epsilon(1e-6));
  CHECK(w.hi == doctest::Approx(0.7634069).epsilon(1e-6));
  w = wilson_interval(10, 10);
  const double z2 = 1.959963984540054 * 1.959963984540054;
  CHECK(w.hi == doctest::Approx(1.0));
  CHECK(w.lo == doctest::Approx(10.0 / (10.0 + z2)));
  w = wilson_interval(0, 100);
  CHECK(w.lo == 0.0);
  CHECK(w.hi == doctest::Approx(z2 / (100.0 + z2)));
}

TEST_CASE("fluct_report on synthetic records") {
  std::vector<ScaleRecords> s;
  for (double d : {50.0, 100.0, 200.0, 400.0}) s.push_back(synthetic(d, std::sqrt(d), std::sqrt(d), 40));
  EnsembleStats st = fluct_report(s);
  REQUIRE(st.has_slope);
  CHECK(st.slope == doctest::Approx(0.5));
  CHECK(st.slope_lo < 0.5);
  CHECK(st.slope_hi > 0.5);
  // std / sqrt(h dist) ~ dist^{1/2 - 3/4}
  CHECK(st.normalized_slope == doctest::Approx(-0.25));
  CHECK(st.normalized_bounded);
  for (const ScaleStats& x : st.scales) {
    CHECK(x.std >= 0.0);
    CHECK(std::is_sorted(x.quantiles.begin(), x.quantiles.end()));
    CHECK(x.normalized_lo <= x.normalized);
    CHECK(x.normalized <= x.normalized_hi);
    CHECK(x.normalized_hi <= st.normalized_bound);
  }

  // Only three usable scales: no slope.
  s[1] = synthetic(100.0, 10.0, 10.0, 40, 15);
  st = fluct_report(s);
  CHECK(st.scales[1].omitted);
  CHECK(st.scales[1].censored_fraction == doctest::Approx(15.0 / 40.0));
  CHECK_FALSE(st.has_slope);

  // Growing normalized spread is detected.
  s.clear();
  for (double d : {50.0, 100.0, 200.0, 400.0}) s.push_back(synthetic(d, 1.0, d, 200));
  st = fluct_report(s);
  CHECK(st.slope == doctest::Approx(1.0));
  CHECK_FALSE(st.normalized_bounded);
}

TEST_CASE("single realization reproduces strip_sample") {
  EnsembleConfig c = small(0.05);
  c.n_seeds = 1;
  c.dists = {12.0};
  const EnsembleResult r = run_ensemble(c, WorkerPool(1));
  const ArrivalRecord a = strip_sample(c, 0, 0);
  REQUIRE(r.scales[0].records.size() == 1);
  CHECK(r.scales[0].records[0].value == a.value);
  CHECK(r.scales[0].records[0].cap == a.cap);
  CHECK(r.complete);
}

TEST_CASE("CSV is byte-identical across worker counts") {
  const EnsembleConfig c = small(0.05);
  const auto d1 = scratch("w1"), d3 = scratch("w3");
  run_ensemble(c, WorkerPool(1), d1);
  run_ensemble(c, WorkerPool(3), d3);
  const std::string a = io::read_text(d1 / "arrival.csv");
  CHECK(a == io::read_text(d3 / "arrival.csv"));
  CHECK(io::read_text(d1 / "summary.json") == io::read_text(d3 / "summary.json"));
  CHECK(std::count(a.begin(), a.end(), '\n') == 1 + 12);
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d3);
}

TEST_CASE("obstacle-free ensembles are deterministic") {
  EnsembleConfig c = small(0.0);
  c.n_seeds = 3;
  const EnsembleResult a = run_ensemble(c, WorkerPool(1));
  c.master_seed = 99;
  const EnsembleResult b = run_ensemble(c, WorkerPool(1));
  for (std::size_t s = 0; s < 2; ++s) {
    CHECK(a.stats.scales[s].std <= 2 * c.arrival.solver.record_dt);
    const double se = std::hypot(a.stats.scales[s].std, b.stats.scales[s].std) / std::sqrt(3.0);
    CHECK(std::abs(a.stats.scales[s].mean - b.stats.scales[s].mean) <= 3 * se + 1e-12);
    // Planar transport at unit speed to the target ball.
    CHECK(a.stats.scales[s].mean == doctest::Approx(c.dists[s] - 2.0).epsilon(0.1));
  }
}

TEST_CASE("failed realizations leave the run incomplete") {
  const EnsembleConfig c = small(0.05);
  const auto d = scratch("fail");
  // A directory where a record file should go makes that write fail.
  std::filesystem::create_directories(d / "records" / "s1_2.csv" / "x");
  const EnsembleResult r = run_ensemble(c, WorkerPool(2), d);
  CHECK_FALSE(r.complete);
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].rfind("1/2:", 0) == 0);
  CHECK(r.scales[1].records.size() == 5);
  const std::string csv = io::read_text(d / "arrival.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 11);
  CHECK(io::read_text(d / "summary.json").find("\"complete\": false") != std::string::npos);
  std::filesystem::remove_all(d);
}

TEST_CASE("translation leaves means within 3 SE") {
  EnsembleConfig c = small(0.03);
  c.n_seeds = 24;
  c.dists = {14.0};
  const EnsembleResult a = run_ensemble(c, WorkerPool(1));
  c.offset = Point(53.25, -17.5);
  const EnsembleResult b = run_ensemble(c, WorkerPool(1));
  const ScaleStats &x = a.stats.scales[0], &y = b.stats.scales[0];
  CHECK(std::abs(x.mean - y.mean) <=
        3 * std::hypot(x.std / std::sqrt(x.uncensored), y.std / std::sqrt(y.uncensored)) + 1e-9);
}

TEST_CASE("censored fraction falls as h grows") {
  EnsembleConfig c = small(0.25);
  c.field.shape = ObstacleShape::plateau(4.0);
  c.n_seeds = 12;
  c.dists = {10.0};
  double last = 2.0;
  for (double h : {1.0, 2.0, 4.0}) {
    c.h_fixed = h;
    const double frac = run_ensemble(c, WorkerPool(1)).stats.scales[0].censored_fraction;
    CHECK(frac <= last);
    last = frac;
  }
}

TEST_CASE("box criterion oracles") {
  BoxOptions o;
  FieldConfig f;
  f.f_uni = 1.0;
  // Wide enough that the trapped side walls barely slow the front: it
  // reaches y = r - dx after about (r - dx) / F_uni.
  BoxResult r = box_criterion(10.0, 16.0, f, 2, 40.0, o, WorkerPool(1));
  CHECK(r.p_hat == 1.0);
  for (const BoxOutcome& b : r.outcomes) CHECK(b.time == doctest::Approx(9.5).epsilon(0.1));
  // A narrow channel is slower but still crosses.
  CHECK(box_trial(10.0, 4.0, f, 0, 40.0, o).success);

  f.f_uni = 0.0;
  r = box_criterion(10.0, 4.0, f, 2, 40.0, o, WorkerPool(1));
  CHECK(r.p_hat == 0.0);
  // Curvature alone dissolves the 4 x 4 strip, so no seed survives.
  CHECK(r.empty_seeds == 2);
  CHECK(r.ci.lo == 0.0);
  CHECK(r.ci.hi < 1.0);
  // A wide strip keeps a seed but never advances.
  const BoxOutcome b = box_trial(10.0, 24.0, f, 0, 40.0, o);
  CHECK_FALSE(b.empty_seed);
  CHECK_FALSE(b.success);
}

TEST_CASE("box criterion is monotone in F_uni on coupled seeds") {
  BoxOptions o;
  FieldConfig f;
  f.seed = 3;
  f.intensity = 0.3;
  f.shape = ObstacleShape::plateau(2.0);
  std::vector<BoxOutcome> prev;
  for (double fu : {0.3, 0.7, 1.2}) {
    f.f_uni = fu;
    const BoxResult r = box_criterion(10.0, 4.0, f, 6, 40.0, o, WorkerPool(1));
    if (!prev.empty())
      for (std::size_t i = 0; i < prev.size(); ++i) CHECK((!prev[i].success || r.outcomes[i].success));
    prev = r.outcomes;
  }
}
