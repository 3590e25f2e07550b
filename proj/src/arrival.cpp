#include "curvelab/arrival.hpp"

#include "curvelab/distance.hpp"
#include "curvelab/io.hpp"

#include <algorithm>
#include <cmath>

namespace curvelab {

double cap_time(double h, double dist, double v_min, double c_s) {
  if (!(v_min > 0.0)) throw ParameterError("cap_time: v_min must be positive");
  if (!(h > 0.0)) throw ParameterError("cap_time: h must be positive");
  return dist / v_min + c_s * h;
}

double cap_time(double h, const Point& x0, const GridSet& s, double v_min, double c_s) {
  return cap_time(h, point_distance(s, x0), v_min, c_s);
}

double max_speed(double delta, double c1a, double c1f) {
  if (!(delta > 0.0)) throw ParameterError("max_speed: delta must be positive");
  return std::max(c1f, 6.0 * c1a) + c1a / delta;
}

double hom_arrival(double v_hom, const GridSet& s, const Point& x0) {
  if (!(v_hom > 0.0)) throw ParameterError("hom_arrival: v_hom must be positive");
  return point_distance(s, x0) / v_hom;
}

namespace {

void require_inside(const Grid2D& g, const Point& x) {
  if (!g.extent().contains(x)) throw DomainError("target centre lies outside the grid");
}

std::vector<Eigen::Index> target_nodes(const Grid2D& g, const Target& t) {
  std::vector<Eigen::Index> out;
  if (t.radius < 0.5 * g.dx) {
    const Eigen::Vector2i n = g.nearest(t.center);
    out.push_back(g.flat(n.x(), n.y()));
    return out;
  }
  const double r = t.radius * (1.0 + 1e-12);
  const Point q = (t.center - g.origin) / g.dx;
  const int k = static_cast<int>(std::ceil(r / g.dx));
  const int i0 = std::max(0, static_cast<int>(std::floor(q.x())) - k);
  const int i1 = std::min(g.nx - 1, static_cast<int>(std::ceil(q.x())) + k);
  const int j0 = std::max(0, static_cast<int>(std::floor(q.y())) - k);
  const int j1 = std::min(g.ny - 1, static_cast<int>(std::ceil(q.y())) + k);
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i)
      if ((g.node(i, j) - t.center).norm() <= r) out.push_back(g.flat(i, j));
  return out;
}

}  // namespace

HitTimes first_hits(const SampledField& field, const GridSet& s, const std::vector<Target>& targets,
                    double t_max, const SolverParams& params) {
  if (!(t_max > 0.0)) throw ParameterError("first_hits: t_max must be positive");
  const Grid2D& g = s.grid;
  std::vector<std::vector<Eigen::Index>> nodes;
  nodes.reserve(targets.size());
  for (const Target& t : targets) {
    require_inside(g, t.center);
    nodes.push_back(target_nodes(g, t));
  }
  HitTimes out;
  out.time.assign(targets.size(), t_max);
  out.reached.assign(targets.size(), 0);
  std::size_t left = targets.size();
  double t_prev = 0.0;
  LevelSetState st = init_from_set(s, params.band);
  evolve(st, field, t_max, params, [&](const LevelSetState& x) {
    const double mid = x.t == 0.0 ? 0.0 : 0.5 * (t_prev + x.t);
    for (std::size_t k = 0; k < targets.size(); ++k) {
      if (out.reached[k]) continue;
      for (Eigen::Index n : nodes[k])
        if (x.u(n) <= 0.0) {
          out.reached[k] = 1;
          out.time[k] = mid;
          --left;
          break;
        }
    }
    t_prev = x.t;
    out.stopped_at = x.t;
    return left > 0;
  });
  return out;
}

ArrivalRecord arrival_time(const SampledField& field, const GridSet& s, const Point& x0,
                           double t_max, const SolverParams& params) {
  if (!(t_max > 0.0)) throw ParameterError("arrival_time: t_max must be positive");
  ArrivalRecord r;
  r.target_center = x0;
  r.target_radius = 0.0;
  r.dist = point_distance(s, x0);
  r.cap = t_max;
  r.record_dt = params.record_dt;
  const HitTimes hit = first_hits(field, s, {{x0, 0.0}}, t_max, params);
  r.censored = !hit.reached[0];
  r.value = r.censored ? r.cap : hit.time[0];
  return r;
}

ArrivalRecord truncated_arrival(const SampledField& field, const GridSet& s, const Point& x0,
                                double h, double v_min, double c_s, const SolverParams& params) {
  if (!(h >= 2.0 * s.grid.dx * (1.0 - 1e-9)))
    throw ParameterError("truncated_arrival: h must be >= 2 dx");
  ArrivalRecord r;
  r.target_center = x0;
  r.target_radius = h;
  r.dist = point_distance(s, x0);
  r.cap = cap_time(h, r.dist, v_min, c_s);
  r.record_dt = params.record_dt;
  if (r.dist <= h) {
    r.value = 0.0;
    return r;
  }
  const HitTimes hit = first_hits(field, s, {{x0, h}}, r.cap, params);
  r.censored = !hit.reached[0];
  r.value = r.censored ? r.cap : std::min(hit.time[0], r.cap);
  return r;
}

std::string arrival_csv_header() { return "seed,dist,h,value,censored,cap"; }

std::string arrival_csv_row(const ArrivalRecord& r) {
  return io::fmt(r.seed) + ',' + io::fmt(r.dist) + ',' + io::fmt(r.target_radius) + ',' +
         io::fmt(r.value) + ',' + (r.censored ? "1" : "0") + ',' + io::fmt(r.cap);
}

}  // namespace curvelab
