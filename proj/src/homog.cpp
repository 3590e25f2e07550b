#include "curvelab/homog.hpp"

#include "curvelab/distance.hpp"
#include "curvelab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace curvelab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Square grid with a node at the origin.
Grid2D square_grid(double half, double dx) {
  const int k = static_cast<int>(std::ceil(half / dx));
  return Grid2D(2 * k + 1, 2 * k + 1, dx, Point(-k * dx, -k * dx));
}

GridSet disk(const Grid2D& g, const Point& c, double r) {
  return GridSet::from_predicate(g, [&](const Point& p) { return (p - c).norm() <= r; });
}

struct Moments {
  double mean = 0.0, std = 0.0;
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  if (v.empty()) return m;
  m.mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - m.mean) * (x - m.mean);
    m.std = std::sqrt(ss / (v.size() - 1));
  }
  return m;
}

std::vector<Target> circle_targets(double R, double h, double spacing) {
  const int n = std::max(4, static_cast<int>(std::ceil(2.0 * std::numbers::pi * R / spacing)));
  std::vector<Target> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double th = 2.0 * std::numbers::pi * k / n;
    out.push_back({Point(R * std::cos(th), R * std::sin(th)), h});
  }
  return out;
}

}  // namespace

HalfSpaceDisk halfspace_disk(const Point& e_in, double r, double h, double beta, double c_beta,
                             const Grid2D& grid) {
  if (!(r > 0.0) || !(h > 0.0)) throw ParameterError("halfspace_disk: r and h must be positive");
  if (!(e_in.norm() > 0.0)) throw ParameterError("halfspace_disk: e must be nonzero");
  HalfSpaceDisk d;
  d.e = e_in.normalized();
  d.r = r;
  d.h = h;
  d.beta = beta;
  d.c_beta = c_beta;
  const double len = d.half_length();
  if (!(len > 0.0)) throw ParameterError("halfspace_disk: c_beta r^beta - 2h must be positive");
  const Point m = -h * d.e;
  const Point t(-d.e.y(), d.e.x());
  const Point ends[2] = {m - len * t, m + len * t};
  const Rect ext = grid.extent().expanded(grid.dx);
  for (const Point& p : ends)
    if (!ext.contains(p + Point(h, h)) || !ext.contains(p - Point(h, h)))
      throw ParameterError("halfspace_disk: disk exceeds the grid");
  d.set = GridSet::from_predicate(grid, [&](const Point& p) {
    const double s = std::clamp((p - m).dot(t), -len, len);
    return (p - m - s * t).norm() <= h;
  });
  return d;
}

double forcing_shift_f(double r, double beta) {
  if (!(r > 0.0)) throw ParameterError("forcing_shift_f: r must be positive");
  return std::pow(r, 0.75 - 0.5 * beta);
}

double influence_horizon(double R, double r, double h, double df, double c) {
  const double d = R - 1.0 - h - r;
  if (!(d > 0.0)) throw ParameterError("influence_horizon: requires R > 1 + h + r");
  const double d23 = std::cbrt(d * d);
  return c * std::min({d, d23 * std::pow(h, 4.0 / 3.0), d23 * std::pow(df, 4.0 / 3.0)});
}

VhomWindow vhom_window(double r, double theta, const VhomOptions& o) {
  if (!(r > 1.0)) throw ParameterError("vhom: scales must exceed 1");
  VhomWindow w;
  w.h = std::pow(r, theta);
  const double dx = o.dx > 0.0 ? o.dx : std::max(r / 512.0, 0.25);
  if (w.h < 2.0 * dx) throw ParameterError("vhom: h(r) = r^theta is below 2 dx");
  const double half = std::max(r / 4.0, 4.0 * w.h);
  if (o.c_beta * std::pow(r, o.beta) - 2.0 * w.h < half)
    throw ParameterError("vhom: the half-space disk is narrower than the window");
  // y = 0 sits halfway between nodes so the rasterized face lies on it.
  const int kx = static_cast<int>(std::ceil(half / dx));
  const int kb = static_cast<int>(std::ceil((2.0 * w.h + 2.0) / dx));
  const int kt = static_cast<int>(std::ceil((r + w.h + 2.0) / dx));
  w.grid = Grid2D(2 * kx + 1, kb + kt + 1, dx, Point(-kx * dx, -(kb + 0.5) * dx));
  w.set = GridSet::from_predicate(w.grid, [&](const Point& p) { return p.y() <= 0.0 && p.y() >= -2.0 * w.h; });
  w.target = Point(0.0, r);
  return w;
}

ArrivalRecord vhom_sample(const FieldConfig& field, double r, double theta, double delta_f,
                          std::uint64_t index, const VhomOptions& o) {
  const VhomWindow w = vhom_window(r, theta, o);
  FieldConfig fc = field;
  fc.delta_f += delta_f + (o.shift_by_scale ? forcing_shift_f(r, o.beta) : 0.0);
  const SampledField f = sample(fc.realize(w.grid.extent(), index), w.grid);
  ArrivalRecord rec = truncated_arrival(f, w.set, w.target, w.h, o.arrival);
  rec.seed = index;
  return rec;
}

std::size_t VhomEstimate::index_of(double r) const {
  for (std::size_t k = 0; k < r_list.size(); ++k)
    if (std::abs(r_list[k] - r) <= 1e-9 * std::max(1.0, r)) return k;
  throw ParameterError("scale " + std::to_string(r) + " not in the estimate");
}

VhomEstimate estimate_vhom(const FieldConfig& field, const Point& e,
                           const std::vector<double>& r_list, double theta, int n_seeds,
                           double delta_f, const VhomOptions& o, const WorkerPool& pool) {
  if (r_list.empty() || !std::is_sorted(r_list.begin(), r_list.end()) ||
      std::adjacent_find(r_list.begin(), r_list.end()) != r_list.end())
    throw ParameterError("estimate_vhom: scales must be strictly increasing");
  if (n_seeds < 1) throw ParameterError("estimate_vhom: n_seeds must be >= 1");
  for (double r : r_list) vhom_window(r, theta, o);  // validate geometry up front

  VhomEstimate est;
  est.e = e.normalized();
  est.field = field;
  est.theta = theta;
  est.beta = o.beta;
  est.n_seeds = n_seeds;
  est.delta_f = delta_f;
  est.r_list = r_list;
  const std::size_t ns = r_list.size();
  est.records.assign(ns, std::vector<ArrivalRecord>(n_seeds));
  pool.run(ns * n_seeds, [&](std::size_t k) {
    const std::size_t s = k / n_seeds, i = k % n_seeds;
    est.records[s][i] = vhom_sample(field, r_list[s], theta, delta_f, i, o);
  });
  for (std::size_t s = 0; s < ns; ++s) {
    const double r = r_list[s];
    std::vector<double> v;
    int unc = 0;
    for (const ArrivalRecord& rec : est.records[s]) {
      v.push_back(rec.value);
      unc += !rec.censored;
    }
    const Moments m = moments(v);
    const double frac = static_cast<double>(unc) / n_seeds;
    est.h.push_back(std::pow(r, theta));
    est.shift.push_back(delta_f + (o.shift_by_scale ? forcing_shift_f(r, o.beta) : 0.0));
    est.means.push_back(m.mean);
    est.stds.push_back(m.std);
    est.ses.push_back(m.std / std::sqrt(static_cast<double>(n_seeds)));
    est.uncensored.push_back(frac);
    const bool flag = frac < 0.95;
    est.flagged.push_back(flag);
    est.v_hat.push_back(flag || !(m.mean > 0.0) ? kNaN : r / m.mean);
  }
  return est;
}

LinearityReport linearity_report(const VhomEstimate& base, const VhomEstimate& shifted,
                                 const VhomEstimate& other_beta, double r1, double r2) {
  if (!base.field.same_family(other_beta.field) || base.theta != other_beta.theta ||
      base.delta_f != other_beta.delta_f)
    throw ParameterError("linearity_report: estimates come from different configurations");
  if (base.beta == other_beta.beta)
    throw ParameterError("linearity_report: the second estimate needs a different beta");
  const bool has_shift = !shifted.r_list.empty();
  if (has_shift && (!base.field.same_family(shifted.field) || base.theta != shifted.theta ||
                    base.beta != shifted.beta))
    throw ParameterError("linearity_report: shifted estimate does not match the base");

  LinearityReport rep;
  rep.r1 = r1;
  rep.r2 = r2;
  const double m1 = base.means[base.index_of(r1)];
  const double m2 = base.means[base.index_of(r2)];
  const double m12 = base.means[base.index_of(r1 + r2)];
  const double h2 = std::pow(r2, base.theta);
  rep.sub_residual = m12 - m1 - m2;
  rep.sub_normalized = rep.sub_residual / (std::sqrt(h2 * r2) * std::log(r1));
  if (has_shift) {
    rep.super_residual =
        shifted.means[shifted.index_of(r1)] + shifted.means[shifted.index_of(r2)] - m12;
    rep.super_normalized = rep.super_residual / (std::sqrt(h2 * r2) * std::log(r2));
  } else {
    rep.super_residual = rep.super_normalized = kNaN;
  }
  const double top = base.r_list.back();
  const std::size_t a = base.index_of(top), b = other_beta.index_of(top);
  rep.beta_gap = std::abs(base.v_hat[a] - other_beta.v_hat[b]);
  // delta method: se(r / m) = r se(m) / m^2
  const double sa = top * base.ses[a] / (base.means[a] * base.means[a]);
  const double sb = top * other_beta.ses[b] / (other_beta.means[b] * other_beta.means[b]);
  rep.beta_gap_se = std::hypot(sa, sb);
  return rep;
}

double schedule_gamma(double theta, double eta) {
  if (!(theta >= 0.0 && theta < 1.0)) throw ParameterError("schedule: theta must be in [0, 1)");
  if (!(eta > 0.0 && eta <= 1.0)) throw ParameterError("schedule: eta must be in (0, 1]");
  return 2.0 / (1.0 - theta + 4.0 * ((1.0 - theta) / eta + 1.0));
}

RadiusSchedule radius_schedule(double R0, double R_target, double theta, double eta,
                               Direction direction) {
  if (!(theta > 0.0 && theta < 1.0)) throw ParameterError("radius_schedule: theta must be in (0, 1)");
  if (!(R0 > 0.0) || !(R_target > 0.0)) throw ParameterError("radius_schedule: radii must be positive");
  const bool grow = direction == Direction::Grow;
  if (grow ? R_target < R0 : R_target > R0)
    throw ParameterError("radius_schedule: target lies on the wrong side of R0");
  RadiusSchedule s;
  s.gamma = schedule_gamma(theta, eta);
  s.theta = theta;
  s.eta = eta;
  s.direction = direction;
  s.radii.push_back(R0);
  if (R_target == R0) return s;

  const double sign = grow ? 1.0 : -1.0;
  auto next = [&](double R, double c) { return R + sign * c * std::pow(R, s.gamma); };
  // radius after n steps with a common coefficient c; NaN once it collapses
  auto run = [&](std::size_t n, double c) {
    double R = R0;
    for (std::size_t k = 0; k < n && R > 0.0; ++k) R = next(R, c);
    return R > 0.0 ? R : kNaN;
  };
  auto past = [&](double R) { return std::isnan(R) || (grow ? R >= R_target : R <= R_target); };

  constexpr std::size_t kMaxSteps = 1000000;
  std::size_t n = 0;
  for (double R = R0; !past(R); R = next(R, 1.0)) {
    if (++n > kMaxSteps) throw ParameterError("radius_schedule: target unreachable in 1e6 steps");
  }
  double lo = 0.5, hi = 1.0;
  if (past(run(n, 0.5))) {
    // gap between n - 1 full steps and n half steps
    s.exact_rule = false;
    --n;
    lo = 1.0;
    hi = 2.0;
  }
  if (n == 0) throw ParameterError("radius_schedule: target unreachable");
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (past(run(n, mid)) ? hi : lo) = mid;
  }
  const double c = 0.5 * (lo + hi);
  double R = R0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    R = next(R, c);
    s.radii.push_back(R);
    s.c.push_back(c);
  }
  // last coefficient absorbs the bisection residue
  s.c.push_back(std::abs(R_target - R) / std::pow(R, s.gamma));
  s.radii.push_back(R_target);
  return s;
}

namespace {

double step_h(double r, double theta) { return std::pow(r, theta); }

double pick_dx(const RadiusSchedule& s, const BallHoleOptions& o) {
  if (o.dx > 0.0) return o.dx;
  double r_min = std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n < s.radii.size(); ++n) r_min = std::min(r_min, s.step(n));
  return std::max(r_min / 512.0, 0.25);
}

struct SeedRun {
  std::vector<double> t;
  std::vector<int> censored;
  double full = 0.0;
};

BallHoleReport finish(RadiusSchedule sched, std::vector<SeedRun> runs, const BallHoleOptions& o,
                      bool ball, std::size_t targets_hint) {
  BallHoleReport rep;
  rep.schedule = std::move(sched);
  const std::size_t N = rep.schedule.steps();
  for (std::size_t n = 1; n <= N; ++n) {
    StepStats st;
    st.R_from = rep.schedule.radii[n - 1];
    st.R_to = rep.schedule.radii[n];
    st.r = rep.schedule.step(n);
    st.h = step_h(st.r, rep.schedule.theta);
    st.targets = static_cast<int>(targets_hint);
    for (const SeedRun& sr : runs) {
      st.t.push_back(sr.t[n - 1]);
      st.censored += sr.censored[n - 1];
    }
    const Moments m = moments(st.t);
    st.mean = m.mean;
    st.std = m.std;
    st.tau = o.c_tau * std::sqrt(std::pow(st.r, 1.0 + rep.schedule.theta)) * std::log(st.R_to);
    st.bound = st.r / o.v_hom + (ball ? st.tau : -st.tau);
    st.flagged = st.censored > 0;
    rep.steps.push_back(std::move(st));
  }
  for (const SeedRun& sr : runs) {
    rep.sum_t.push_back(std::accumulate(sr.t.begin(), sr.t.end(), 0.0));
    rep.full_run.push_back(sr.full);
  }
  return rep;
}

}  // namespace

BallHoleReport ball_experiment(const FieldConfig& field, double R_eps, double theta, double eta,
                               int n_seeds, const BallHoleOptions& o, const WorkerPool& pool) {
  if (n_seeds < 1) throw ParameterError("ball_experiment: n_seeds must be >= 1");
  RadiusSchedule sched = radius_schedule(o.R_inner, R_eps, theta, eta, Direction::Grow);
  const std::size_t N = sched.steps();
  if (N == 0) throw ParameterError("ball_experiment: empty schedule");
  const double dx = pick_dx(sched, o);
  double h_max = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    const double h = step_h(sched.step(n), theta);
    if (h < 2.0 * dx) throw ParameterError("ball_experiment: h(r_n) is below 2 dx");
    h_max = std::max(h_max, h);
  }
  const Grid2D g = square_grid(R_eps + h_max + 3.0, dx);
  const ArrivalSettings& as = o.arrival;
  const double spacing_of = as.v_min / std::sqrt(2.0);

  std::vector<SeedRun> runs(n_seeds);
  pool.run(n_seeds, [&](std::size_t i) {
    const SampledField f = sample(field.realize(g.extent(), i), g);
    SeedRun& sr = runs[i];
    // the largest capped first hit over a circle of targets
    auto sweep = [&](double R_from, double R_to, double h, int& cens) {
      const auto targets = circle_targets(R_to, h, spacing_of * h);
      const double cap = cap_time(h, R_to - R_from, as.v_min, as.c_s);
      const HitTimes hit = first_hits(f, disk(g, Point::Zero(), R_from), targets, cap, as.solver);
      double worst = 0.0;
      cens = 0;
      for (std::size_t k = 0; k < targets.size(); ++k) {
        cens += !hit.reached[k];
        worst = std::max(worst, hit.reached[k] ? std::min(hit.time[k], cap) : cap);
      }
      return worst;
    };
    for (std::size_t n = 1; n <= N; ++n) {
      int cens = 0;
      sr.t.push_back(sweep(sched.radii[n - 1], sched.radii[n], step_h(sched.step(n), theta), cens));
      sr.censored.push_back(cens > 0);
    }
    int cens = 0;
    sr.full = sweep(sched.radii.front(), sched.radii.back(), step_h(sched.step(N), theta), cens);
  });
  const std::size_t m =
      circle_targets(R_eps, step_h(sched.step(N), theta), spacing_of * step_h(sched.step(N), theta)).size();
  return finish(std::move(sched), std::move(runs), o, true, m);
}

BallHoleReport hole_experiment(const FieldConfig& field, double R_eps, double theta, double eta,
                               int n_seeds, const BallHoleOptions& o, const WorkerPool& pool) {
  if (n_seeds < 1) throw ParameterError("hole_experiment: n_seeds must be >= 1");
  RadiusSchedule sched = radius_schedule(R_eps, o.R_inner, theta, eta, Direction::Shrink);
  const std::size_t N = sched.steps();
  if (N == 0) throw ParameterError("hole_experiment: empty schedule");
  const double dx = pick_dx(sched, o);
  for (std::size_t n = 1; n <= N; ++n)
    if (step_h(sched.step(n), theta) < 2.0 * dx)
      throw ParameterError("hole_experiment: h(r_n) is below 2 dx");
  const Grid2D g = square_grid(R_eps + 3.0, dx);
  const ArrivalSettings& as = o.arrival;
  const double spacing_of = as.v_min / std::sqrt(2.0);
  auto hole = [&](double R) {
    return GridSet::from_predicate(g, [&](const Point& p) { return p.norm() >= R; });
  };

  std::vector<SeedRun> runs(n_seeds);
  pool.run(n_seeds, [&](std::size_t i) {
    const SampledField f = sample(field.realize(g.extent(), i), g);
    SeedRun& sr = runs[i];
    for (std::size_t n = 1; n <= N; ++n) {
      const double h = step_h(sched.step(n), theta);
      const auto targets = circle_targets(sched.radii[n], h, spacing_of * h);
      const double cap = cap_time(h, sched.step(n), as.v_min, as.c_s);
      const HitTimes hit = first_hits(f, hole(sched.radii[n - 1]), targets, cap, as.solver);
      double first = cap;
      bool any = false;
      for (std::size_t k = 0; k < targets.size(); ++k)
        if (hit.reached[k]) {
          any = true;
          first = std::min(first, hit.time[k]);
        }
      sr.t.push_back(first);
      sr.censored.push_back(!any);
    }
    const double hc = step_h(sched.step(N), theta);
    sr.full = truncated_arrival(f, hole(sched.radii.front()), Point::Zero(), hc, as).value;
  });
  const double hN = step_h(sched.step(N), theta);
  const std::size_t m = circle_targets(sched.radii.back(), hN, spacing_of * hN).size();
  return finish(std::move(sched), std::move(runs), o, false, m);
}

SandwichResult sandwich_trial(const FieldConfig& field, std::uint64_t index,
                              const SandwichOptions& o) {
  if (!(o.hole_radius > o.h)) throw ParameterError("sandwich: hole radius must exceed h");
  const Grid2D g = square_grid(o.half, o.dx);
  const double outer = o.hole_radius + o.gap + 2.0 * o.ball_radius;
  if (outer + 1.0 > o.half) throw ParameterError("sandwich: ball does not fit the grid");
  std::mt19937_64 rng = make_stream(field.seed, index, StreamTag::Geometry);
  std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi), rad(1.0, 4.0), off(0.0, 1.0);
  const double th = ang(rng);
  const double dc = o.hole_radius + o.gap + o.ball_radius;
  const GridSet ball = disk(g, dc * Point(std::cos(th), std::sin(th)), o.ball_radius);
  GridSet set = ball;
  for (int k = 0; k < o.blobs; ++k) {
    const double rb = rad(rng), a = ang(rng);
    const double d = o.hole_radius + rb + off(rng) * (o.half - o.hole_radius - 2.0 * rb - 1.0);
    set = set | disk(g, d * Point(std::cos(a), std::sin(a)), rb);
  }
  const GridSet hole =
      GridSet::from_predicate(g, [&](const Point& p) { return p.norm() >= o.hole_radius; });
  const SampledField f = sample(field.realize(g.extent(), index), g);
  SandwichResult r;
  r.ball = truncated_arrival(f, ball, Point::Zero(), o.h, o.arrival).value;
  r.set = truncated_arrival(f, set, Point::Zero(), o.h, o.arrival).value;
  r.hole = truncated_arrival(f, hole, Point::Zero(), o.h, o.arrival).value;
  return r;
}

}  // namespace curvelab
