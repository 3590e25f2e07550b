#pragma once

#include "curvelab/field.hpp"
#include "curvelab/grid.hpp"
#include "curvelab/levelset.hpp"

#include <optional>

namespace curvelab {

/// Nodes within distance r of S.
GridSet dilate(const GridSet& s, double r);
/// Nodes of S farther than r from every node outside S.
GridSet erode(const GridSet& s, double r);

/// sup over nodes x of a of dist(x, b); 0 for empty a, +inf for empty b.
double hausdorff_excess(const GridSet& a, const GridSet& b);
double hausdorff_distance(const GridSet& a, const GridSet& b);

/// S is (up to one cell) the union of the radius-h balls it contains.
bool is_h_fat(const GridSet& s, double h);

/// S2 is h-enveloped by S1: each 4-connected component H of the complement
/// of S1 either misses S2 or lies within S1 + B_h. Components touching the
/// grid boundary are treated as unbounded and never fillable.
bool h_envelops(const GridSet& s1, const GridSet& s2, double h);

/// S together with every bounded complement component inside S + B_h.
GridSet fill_small_holes(const GridSet& s, double h);

/// Union of the h-cells [h k, h (k + 1)) x [h l, h (l + 1)) meeting S.
GridSet coarsen(const GridSet& s, double h);

struct StabilityReport {
  bool is_stable = false;
  /// Largest sup_{x in S} dist(x, R_t(S)) over the snapshots.
  double max_retreat = 0.0;
  double horizon = 0.0;
  double tolerance = 0.0;
};

/// No-retreat audit over [0, horizon] at the snapshots of params.record_dt.
/// tol < 0 means 1.5 dx.
StabilityReport is_stable(const GridSet& s, const SampledField& field, double horizon,
                          const SolverParams& params, double tol = -1.0);

/// Running intersection of the snapshots R_t(S), t <= horizon. May be empty.
GridSet stabilize(const GridSet& s, const SampledField& field, double horizon,
                  const SolverParams& params);

struct SpeedCheck {
  bool ok = true;
  std::optional<double> first_failure;
};

/// Checks (R_t(S) cap M) + B_h is h-enveloped by R_{t + h/v}(S) for the
/// snapshot times t with t + h/v <= horizon. Snapshots are taken every
/// h / (4v); params.record_dt is ignored.
SpeedCheck check_effective_speed(const GridSet& s, const SampledField& field, double v, double h,
                                 const GridSet& m, double horizon, SolverParams params);

}  // namespace curvelab
