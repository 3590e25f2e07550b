#pragma once

#include "curvelab/field.hpp"
#include "curvelab/grid.hpp"
#include "curvelab/levelset.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace curvelab {

/// Cap constants and solver settings shared by the arrival experiments.
struct ArrivalSettings {
  double v_min = 0.5;
  double c_s = 2.0;
  SolverParams solver;

  ArrivalSettings() {
    solver.band = 12;
    solver.record_dt = 0.25;
  }
};

struct ArrivalRecord {
  /// Arrival time, or the cap when censored.
  double value = 0.0;
  bool censored = false;
  double cap = 0.0;
  Point target_center{0.0, 0.0};
  /// h; 0 for point arrivals.
  double target_radius = 0.0;
  /// dist(x0, S) measured to the nodes of S.
  double dist = 0.0;
  std::uint64_t seed = 0;
  double record_dt = 0.0;
};

/// v_min^{-1} dist + c_s h.
double cap_time(double h, double dist, double v_min, double c_s);
double cap_time(double h, const Point& x0, const GridSet& s, double v_min, double c_s);

/// max{C_1F, 6 C_1A} + C_1A / delta.
double max_speed(double delta, double c1a, double c1f);

/// dist(x0, S) / v_hom.
double hom_arrival(double v_hom, const GridSet& s, const Point& x0);

/// First time the node nearest x0 joins {u <= 0}, as the midpoint of the
/// bracketing snapshot interval; censored at t_max.
ArrivalRecord arrival_time(const SampledField& field, const GridSet& s, const Point& x0,
                           double t_max, const SolverParams& params);

/// First time {u <= 0} meets the closed ball B_h(x0), capped at
/// cap_time(h, x0, S, v_min, c_s).
ArrivalRecord truncated_arrival(const SampledField& field, const GridSet& s, const Point& x0,
                                double h, double v_min, double c_s, const SolverParams& params);
inline ArrivalRecord truncated_arrival(const SampledField& field, const GridSet& s, const Point& x0,
                                       double h, const ArrivalSettings& a) {
  return truncated_arrival(field, s, x0, h, a.v_min, a.c_s, a.solver);
}

struct Target {
  Point center;
  double radius = 0.0;
};

struct HitTimes {
  /// Midpoint first-hit time per target; t_max for targets never reached.
  std::vector<double> time;
  std::vector<char> reached;
  /// Time at which the evolution stopped.
  double stopped_at = 0.0;
};

/// One evolution of S recording the first time {u <= 0} meets each target
/// ball. Stops early once every target is reached. A target radius below
/// dx/2 selects the nearest node.
HitTimes first_hits(const SampledField& field, const GridSet& s, const std::vector<Target>& targets,
                    double t_max, const SolverParams& params);

/// CSV header `seed,dist,h,value,censored,cap` and matching rows.
std::string arrival_csv_header();
std::string arrival_csv_row(const ArrivalRecord& r);

}  // namespace curvelab
