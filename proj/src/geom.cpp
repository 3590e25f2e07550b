#include "curvelab/geom.hpp"

#include "curvelab/distance.hpp"

#include <cmath>
#include <limits>
#include <unordered_set>

namespace curvelab {

namespace {

// Thresholds absorb rounding in dx * sqrt(integer) distances.
constexpr double kSlack = 1e-9;

void require_h(const GridSet& s, double h, const char* what) {
  if (!(h >= s.grid.dx * (1.0 - kSlack)))
    throw ParameterError(std::string(what) + ": h must be >= dx");
}

}  // namespace

GridSet dilate(const GridSet& s, double r) {
  if (!(r >= 0.0)) throw ParameterError("dilate: r must be >= 0");
  if (r == 0.0 || s.empty()) return s;
  const ArrayXXd d = distance_to(s);
  return {s.grid, d <= r + kSlack * s.grid.dx};
}

GridSet erode(const GridSet& s, double r) {
  if (!(r >= 0.0)) throw ParameterError("erode: r must be >= 0");
  if (r == 0.0 || s.full()) return s;
  const ArrayXXd d = distance_to(complement(s));
  return {s.grid, s.mask && (d > r + kSlack * s.grid.dx)};
}

double hausdorff_excess(const GridSet& a, const GridSet& b) {
  if (a.empty()) return 0.0;
  if (b.empty()) return std::numeric_limits<double>::infinity();
  const ArrayXXd d = distance_to(b);
  return a.mask.select(d, 0.0).maxCoeff();
}

double hausdorff_distance(const GridSet& a, const GridSet& b) {
  return std::max(hausdorff_excess(a, b), hausdorff_excess(b, a));
}

bool is_h_fat(const GridSet& s, double h) {
  require_h(s, h, "is_h_fat");
  if (s.empty()) return true;
  // Node distances to the complement overshoot the continuum ones by up to
  // one cell; half a cell of leniency keeps a rasterized radius-h ball fat.
  const GridSet core = erode(s, h - 0.5 * s.grid.dx);
  const GridSet opened = dilate(core, h);
  return hausdorff_excess(s, opened) <= s.grid.dx * (1.0 + kSlack);
}

namespace {

// Complement components of s1 and whether each may be filled from s1 + B_h.
struct Holes {
  Components comp;
  std::vector<char> fillable;
};

Holes holes(const GridSet& s1, double h) {
  Holes out;
  out.comp = label_components(!s1.mask, Connectivity::Four);
  out.fillable.assign(out.comp.count, 1);
  for (int k = 0; k < out.comp.count; ++k)
    if (out.comp.touches_boundary[k]) out.fillable[k] = 0;
  if (out.comp.count == 0) return out;
  const GridSet reach = dilate(s1, h);
  for (Eigen::Index k = 0; k < s1.mask.size(); ++k) {
    const int c = out.comp.label(k);
    if (c >= 0 && !reach.mask(k)) out.fillable[c] = 0;
  }
  return out;
}

}  // namespace

bool h_envelops(const GridSet& s1, const GridSet& s2, double h) {
  require_h(s1, h, "h_envelops");
  if (s1.grid != s2.grid) throw ParameterError("h_envelops: grids differ");
  if (subset_of(s2, s1)) return true;
  const Holes hs = holes(s1, h);
  for (Eigen::Index k = 0; k < s2.mask.size(); ++k) {
    if (!s2.mask(k)) continue;
    const int c = hs.comp.label(k);
    if (c >= 0 && !hs.fillable[c]) return false;
  }
  return true;
}

GridSet fill_small_holes(const GridSet& s, double h) {
  require_h(s, h, "fill_small_holes");
  const Holes hs = holes(s, h);
  GridSet out = s;
  for (Eigen::Index k = 0; k < s.mask.size(); ++k) {
    const int c = hs.comp.label(k);
    if (c >= 0 && hs.fillable[c]) out.mask(k) = true;
  }
  return out;
}

GridSet coarsen(const GridSet& s, double h) {
  require_h(s, h, "coarsen");
  const Grid2D& g = s.grid;
  auto cell = [&](int i, int j) {
    const Point p = g.node(i, j);
    const auto a = static_cast<std::int64_t>(std::floor(p.x() / h));
    const auto b = static_cast<std::int64_t>(std::floor(p.y() / h));
    return (static_cast<std::uint64_t>(a) << 32) ^ static_cast<std::uint32_t>(b);
  };
  std::unordered_set<std::uint64_t> hit;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (s.mask(i, j)) hit.insert(cell(i, j));
  GridSet out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out.mask(i, j) = hit.count(cell(i, j)) > 0;
  return out;
}

StabilityReport is_stable(const GridSet& s, const SampledField& field, double horizon,
                          const SolverParams& params, double tol) {
  if (!(horizon > 0.0)) throw ParameterError("is_stable: horizon must be positive");
  StabilityReport rep;
  rep.horizon = horizon;
  rep.tolerance = tol >= 0.0 ? tol : 1.5 * s.grid.dx;
  if (s.empty()) {
    rep.is_stable = true;
    return rep;
  }
  LevelSetState st = init_from_set(s, params.band);
  evolve(st, field, horizon, params, [&](const LevelSetState& x) {
    rep.max_retreat = std::max(rep.max_retreat, hausdorff_excess(s, x.zero_set()));
    return std::isfinite(rep.max_retreat);
  });
  rep.is_stable = rep.max_retreat <= rep.tolerance;
  return rep;
}

GridSet stabilize(const GridSet& s, const SampledField& field, double horizon,
                  const SolverParams& params) {
  if (!(horizon > 0.0)) throw ParameterError("stabilize: horizon must be positive");
  GridSet acc = s;
  LevelSetState st = init_from_set(s, params.band);
  evolve(st, field, horizon, params, [&](const LevelSetState& x) {
    acc.mask = acc.mask && (x.u <= 0.0);
    return !acc.empty();
  });
  return acc;
}

SpeedCheck check_effective_speed(const GridSet& s, const SampledField& field, double v, double h,
                                 const GridSet& m, double horizon, SolverParams params) {
  if (!(v > 0.0)) throw ParameterError("check_effective_speed: v must be positive");
  if (!(h >= 2.0 * s.grid.dx * (1.0 - kSlack)))
    throw ParameterError("check_effective_speed: h must be >= 2 dx");
  SpeedCheck out;
  if (m.empty()) return out;
  const int lag = 4;
  params.record_dt = h / v / lag;
  std::vector<GridSet> window;  // snapshots t - lag * record_dt .. t
  LevelSetState st = init_from_set(s, params.band);
  evolve(st, field, horizon, params, [&](const LevelSetState& x) {
    window.push_back(x.zero_set());
    if (window.size() > static_cast<std::size_t>(lag + 1)) window.erase(window.begin());
    if (window.size() == static_cast<std::size_t>(lag + 1)) {
      // the final snapshot may sit at the horizon rather than a full lag away
      const double t0 = x.t - h / v;
      if (t0 >= -1e-9 && std::abs(x.t - std::round(x.t / params.record_dt) * params.record_dt) < 1e-9) {
        const GridSet target = dilate(window.front() & m, h);
        if (!h_envelops(window.back(), target, h)) {
          out.ok = false;
          out.first_failure = std::max(t0, 0.0);
          return false;
        }
      }
    }
    return true;
  });
  return out;
}

}  // namespace curvelab
