#include "curvelab/mcharness.hpp"

#include "curvelab/geom.hpp"
#include "curvelab/io.hpp"
#include "curvelab/levelset.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace curvelab {

namespace {

constexpr double kZ95 = 1.959963984540054;

struct Fit {
  double slope = 0.0, se = 0.0;
};

// Weighted least squares with known weights (inverse variances).
Fit weighted_slope(const std::vector<double>& x, const std::vector<double>& y,
                   const std::vector<double>& w) {
  const double sw = std::accumulate(w.begin(), w.end(), 0.0);
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += w[k] * x[k];
    my += w[k] * y[k];
  }
  mx /= sw;
  my /= sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += w[k] * (x[k] - mx) * (x[k] - mx);
    sxy += w[k] * (x[k] - mx) * (y[k] - my);
  }
  return {sxy / sxx, std::sqrt(1.0 / sxx)};
}

std::string record_name(std::size_t scale, std::size_t seed) {
  return "s" + std::to_string(scale) + "_" + std::to_string(seed) + ".csv";
}

}  // namespace

double EnsembleConfig::h_for(double dist) const {
  return h_fixed > 0.0 ? h_fixed : std::pow(dist, h_exponent);
}

void EnsembleConfig::validate() const {
  if (n_seeds < 1) throw ParameterError("ensemble: n_seeds must be >= 1");
  if (dists.empty()) throw ParameterError("ensemble: no scales");
  for (double d : dists) {
    if (!(d > 1.0)) throw ParameterError("ensemble: scales must exceed 1");
    const double step = dx > 0.0 ? dx : std::max(d / 512.0, 0.25);
    if (h_for(d) < 2.0 * step)
      throw ParameterError("ensemble: h = " + io::fmt(h_for(d)) + " is below 2 dx at dist " + io::fmt(d));
  }
  arrival.solver.validate();
}

ArrivalRecord strip_sample(const EnsembleConfig& c, std::size_t scale, std::uint64_t index) {
  const double dist = c.dists.at(scale);
  const double h = c.h_for(dist);
  const double dx = c.dx > 0.0 ? c.dx : std::max(dist / 512.0, 0.25);
  const double half = std::max(dist / 4.0, 4.0 * h);
  const int kx = static_cast<int>(std::ceil(half / dx));
  const int kb = static_cast<int>(std::ceil((2.0 * h + 2.0) / dx));
  const int kt = static_cast<int>(std::ceil((dist + h + 2.0) / dx));
  // The face y = 0 sits halfway between node rows.
  const Grid2D grid(2 * kx + 1, kb + kt + 1, dx, c.offset + Point(-kx * dx, -(kb + 0.5) * dx));
  const GridSet s = GridSet::from_predicate(grid, [&](const Point& p) { return p.y() <= c.offset.y(); });
  FieldConfig fc = c.field;
  fc.seed = c.master_seed;
  const SampledField f = sample(fc.realize(grid.extent(), index), grid);
  ArrivalRecord rec = truncated_arrival(f, s, c.offset + Point(0.0, dist), h, c.arrival);
  rec.seed = index;
  return rec;
}

double quantile_sorted(const std::vector<double>& v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double pos = q * (v.size() - 1);
  const std::size_t k = static_cast<std::size_t>(std::floor(pos));
  if (k + 1 >= v.size()) return v.back();
  return v[k] + (pos - k) * (v[k + 1] - v[k]);
}

Wilson wilson_interval(int successes, int n, double z) {
  if (n <= 0) return {};
  const double p = static_cast<double>(successes) / n, z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {successes == 0 ? 0.0 : std::max(0.0, centre - half),
          successes == n ? 1.0 : std::min(1.0, centre + half)};
}

EnsembleStats fluct_report(const std::vector<ScaleRecords>& scales, int min_uncensored) {
  EnsembleStats st;
  std::vector<double> lx, ls, ln, w;
  for (const ScaleRecords& sr : scales) {
    ScaleStats s;
    s.dist = sr.dist;
    s.h = sr.h;
    s.n = static_cast<int>(sr.records.size());
    std::vector<double> v;
    for (const ArrivalRecord& r : sr.records)
      if (!r.censored) v.push_back(r.value);
    s.uncensored = static_cast<int>(v.size());
    s.censored_fraction = s.n ? 1.0 - static_cast<double>(s.uncensored) / s.n : 0.0;
    std::sort(v.begin(), v.end());
    if (!v.empty()) {
      s.mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
      double ss = 0.0;
      for (double x : v) ss += (x - s.mean) * (x - s.mean);
      s.std = v.size() > 1 ? std::sqrt(ss / (v.size() - 1)) : 0.0;
      const double qs[5] = {0.05, 0.25, 0.5, 0.75, 0.95};
      for (int k = 0; k < 5; ++k) s.quantiles[k] = quantile_sorted(v, qs[k]);
    }
    s.omitted = s.uncensored < std::max(min_uncensored, 2);
    const double norm = std::sqrt(s.h * s.dist);
    // Normal approximation to the sampling error of a standard deviation.
    const double rel = s.uncensored > 1 ? kZ95 / std::sqrt(2.0 * (s.uncensored - 1)) : 1.0;
    s.normalized = s.std / norm;
    s.normalized_lo = std::max(0.0, s.normalized * (1.0 - rel));
    s.normalized_hi = s.normalized * (1.0 + rel);
    if (!s.omitted) {
      st.normalized_bound = std::max(st.normalized_bound, s.normalized_hi);
      if (s.std > 0.0) {
        lx.push_back(std::log(s.dist));
        ls.push_back(std::log(s.std));
        ln.push_back(std::log(s.normalized));
        w.push_back(2.0 * (s.uncensored - 1));
      }
    }
    st.scales.push_back(s);
  }
  if (lx.size() >= 4) {
    st.has_slope = true;
    const Fit a = weighted_slope(lx, ls, w), b = weighted_slope(lx, ln, w);
    st.slope = a.slope;
    st.slope_lo = a.slope - kZ95 * a.se;
    st.slope_hi = a.slope + kZ95 * a.se;
    st.normalized_slope = b.slope;
    st.normalized_slope_lo = b.slope - kZ95 * b.se;
    st.normalized_slope_hi = b.slope + kZ95 * b.se;
    st.normalized_bounded = st.normalized_slope_lo <= 0.0;
  }
  return st;
}

std::string EnsembleStats::to_json() const {
  nlohmann::json j{{"schema", 1}, {"has_slope", has_slope}};
  if (has_slope) {
    j["slope"] = {{"value", slope}, {"lo", slope_lo}, {"hi", slope_hi}};
    j["normalized_slope"] = {
        {"value", normalized_slope}, {"lo", normalized_slope_lo}, {"hi", normalized_slope_hi}};
    j["normalized_bounded"] = normalized_bounded;
  }
  j["normalized_bound"] = normalized_bound;
  j["scales"] = nlohmann::json::array();
  for (const ScaleStats& s : scales)
    j["scales"].push_back({{"dist", s.dist},
                           {"h", s.h},
                           {"n", s.n},
                           {"uncensored", s.uncensored},
                           {"censored_fraction", s.censored_fraction},
                           {"mean", s.mean},
                           {"std", s.std},
                           {"quantiles", s.quantiles},
                           {"normalized", {s.normalized, s.normalized_lo, s.normalized_hi}},
                           {"omitted", s.omitted}});
  return j.dump(2);
}

EnsembleResult run_ensemble(const EnsembleConfig& c, const WorkerPool& pool,
                            const std::filesystem::path& out_dir) {
  c.validate();
  const std::size_t ns = c.dists.size(), n = static_cast<std::size_t>(c.n_seeds);
  const bool persist = !out_dir.empty();
  if (persist) std::filesystem::create_directories(out_dir / "records");

  std::vector<ArrivalRecord> slot(ns * n);
  const auto errors = pool.try_run(ns * n, [&](std::size_t k) {
    slot[k] = strip_sample(c, k / n, k % n);
    if (persist)
      io::write_text(out_dir / "records" / record_name(k / n, k % n), arrival_csv_row(slot[k]) + "\n");
  });

  EnsembleResult res;
  std::string csv = arrival_csv_header() + "\n";
  for (std::size_t s = 0; s < ns; ++s) {
    ScaleRecords sr;
    sr.dist = c.dists[s];
    sr.h = c.h_for(c.dists[s]);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = s * n + i;
      if (errors[k]) {
        res.complete = false;
        std::string msg = "unknown error";
        try {
          std::rethrow_exception(errors[k]);
        } catch (const std::exception& e) {
          msg = e.what();
        } catch (...) {
        }
        res.failures.push_back(std::to_string(s) + "/" + std::to_string(i) + ": " + msg);
        continue;
      }
      sr.records.push_back(slot[k]);
      if (persist) csv += io::read_text(out_dir / "records" / record_name(s, i));
    }
    // Stats use the measured distance so `report` can rebuild them from the CSV.
    if (!sr.records.empty()) sr.dist = sr.records.front().dist;
    res.scales.push_back(std::move(sr));
  }
  if (persist) io::write_text(out_dir / "arrival.csv", csv);
  res.stats = fluct_report(res.scales);
  if (persist) {
    auto j = nlohmann::json::parse(res.stats.to_json());
    j["complete"] = res.complete;
    j["failures"] = res.failures;
    io::write_text(out_dir / "summary.json", j.dump(2) + "\n");
  }
  return res;
}

BoxOutcome box_trial(double r, double w, const FieldConfig& field, std::uint64_t index,
                     double t_max, const BoxOptions& o) {
  if (!(r > 1.0) || !(w > 0.0)) throw ParameterError("box: requires r > 1 and w > 0");
  if (!(t_max > 0.0)) throw ParameterError("box: t_max must be positive");
  const Rect q{{0.0, -w}, {w, r}};
  const Grid2D grid = Grid2D::covering(q.expanded(o.collar), o.dx);
  const SampledField f =
      sample(restrict(field.realize(grid.extent(), index), Restriction::rectangle(q)), grid);
  const GridSet strip = GridSet::from_predicate(grid, [&](const Point& p) {
    return p.x() >= 0.0 && p.x() <= w && p.y() >= -w && p.y() <= 0.0;
  });

  BoxOutcome out;
  out.index = index;
  const GridSet seed = stabilize(strip, f, o.stabilize_time, o.solver);
  if (seed.empty()) {
    out.empty_seed = true;
    return out;
  }

  const int j_top = std::max(0, static_cast<int>(std::ceil((r - o.dx - grid.origin.y()) / o.dx - 1e-9)));
  const double patience = 5.0 * o.h / o.v_min;
  Eigen::Index area = -1;
  double since = 0.0;
  LevelSetState st = init_from_set(seed, o.solver.band);
  evolve(st, f, t_max, o.solver, [&](const LevelSetState& s) {
    out.time = s.t;
    if (j_top < grid.ny && (s.u.rightCols(grid.ny - j_top) <= 0.0).any()) {
      out.success = true;
      return false;
    }
    const Eigen::Index a = (s.u <= 0.0).count();
    if (a != area) {
      area = a;
      since = s.t;
    } else if (s.t - since >= patience) {
      out.stagnated = true;
      return false;
    }
    return true;
  });
  return out;
}

BoxResult box_criterion(double r, double w, const FieldConfig& field, int n_seeds, double t_max,
                        const BoxOptions& o, const WorkerPool& pool) {
  if (n_seeds < 1) throw ParameterError("box: n_seeds must be >= 1");
  BoxResult res;
  res.r = r;
  res.w = w;
  res.n = n_seeds;
  res.outcomes.resize(n_seeds);
  pool.run(n_seeds, [&](std::size_t i) { res.outcomes[i] = box_trial(r, w, field, i, t_max, o); });
  for (const BoxOutcome& b : res.outcomes) {
    res.successes += b.success;
    res.empty_seeds += b.empty_seed;
    res.stagnated += b.stagnated;
  }
  res.p_hat = static_cast<double>(res.successes) / n_seeds;
  res.ci = wilson_interval(res.successes, n_seeds);
  return res;
}

std::string BoxResult::to_json() const {
  nlohmann::json j{{"schema", 1},         {"r", r},
                   {"w", w},              {"n", n},
                   {"successes", successes}, {"p_hat", p_hat},
                   {"wilson", {ci.lo, ci.hi}}, {"empty_seeds", empty_seeds},
                   {"stagnated", stagnated}};
  return j.dump(2);
}

}  // namespace curvelab
