#pragma once

#include "curvelab/field.hpp"
#include "curvelab/grid.hpp"

#include <functional>
#include <vector>

namespace curvelab {

struct SolverParams {
  /// Gradient regularization; a negative value means 1e-6 / dx.
  double eps_grad = -1.0;
  double cfl = 0.5;
  int reinit_every = 10;
  /// Narrow-band half-width in cells; 0 updates the full grid.
  int band = 0;
  double record_dt = 0.1;

  double eps_for(double dx) const { return eps_grad >= 0.0 ? eps_grad : 1e-6 / dx; }
  /// Throws ParameterError on inconsistent settings, including a band too
  /// thin for the front to stay inside it between reinitializations.
  void validate() const;
};

/// Level-set function on a grid; the evolved set is {u <= 0}.
struct LevelSetState {
  Grid2D grid;
  ArrayXXd u;
  double t = 0.0;
  int steps_since_reinit = 0;

  GridSet zero_set() const { return {grid, u <= 0.0}; }
};

/// Signed distance to the boundary of S (negative inside). With band > 0
/// values are clamped to +-(band + 1) dx.
LevelSetState init_from_set(const GridSet& s, int band = 0);

/// cfl * min(dx^2 / (4a + eps), dx / (max|F| + eps)).
double cfl_dt(const Grid2D& grid, double a_max, double f_max, double cfl);
inline double cfl_dt(const SampledField& f, double cfl) {
  return cfl_dt(f.grid, f.a_max, f.f_max, cfl);
}

/// Explicit monotone-upwind solver for
///   u_t - a |grad u| div(grad u / |grad u|) + F |grad u| = 0
/// with mirror (zero normal derivative) boundaries.
class LevelSetSolver {
 public:
  LevelSetSolver(const SampledField& field, SolverParams params);

  const SolverParams& params() const { return params_; }
  const SampledField& field() const { return field_; }
  double dt() const { return dt_; }

  /// One forward-Euler step of size dt. Throws NumericError naming the node
  /// if a non-finite value appears.
  void step(LevelSetState& s, double dt);
  /// Replaces u by the signed distance to its current zero level (fast
  /// sweeping seeded with sub-cell interface distances). The sign of every
  /// node is preserved.
  void reinit(LevelSetState& s);
  /// Steps until s.t == t_end, reinitializing every reinit_every steps.
  void advance(LevelSetState& s, double t_end);

 private:
  void refresh_band(const LevelSetState& s);

  const SampledField& field_;
  SolverParams params_;
  double dt_;
  double eps2_;
  ArrayXXd scratch_;
  ArrayXXd phi_;
  std::vector<int> active_i_, active_j_;
  std::vector<double> updated_;
  bool band_ready_ = false;
};

/// Value-semantics wrappers around LevelSetSolver.
LevelSetState step(const LevelSetState& s, const SampledField& field, double dt,
                   const SolverParams& params = {});
LevelSetState reinit(const LevelSetState& s, int band = 0);

struct Snapshot {
  double t;
  GridSet set;
};
using Trajectory = std::vector<Snapshot>;

/// Called with the state at t = 0, at every multiple of record_dt and at the
/// horizon. Returning false stops the evolution.
using Observer = std::function<bool(const LevelSetState&)>;

/// Evolves s in place up to horizon (or until the observer stops it).
void evolve(LevelSetState& s, const SampledField& field, double horizon,
            const SolverParams& params, const Observer& observe);

/// Snapshots of {u <= 0} every record_dt, ending with one at the horizon.
Trajectory evolve(const GridSet& s, const SampledField& field, double horizon,
                  const SolverParams& params);
Trajectory evolve(const GridSet& s, const CoefficientField& field, double horizon,
                  const SolverParams& params);

/// Final set only.
GridSet evolve_final(const GridSet& s, const SampledField& field, double horizon,
                     const SolverParams& params);

}  // namespace curvelab
