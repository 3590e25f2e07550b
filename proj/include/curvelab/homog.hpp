#pragma once

#include "curvelab/arrival.hpp"
#include "curvelab/field.hpp"
#include "curvelab/grid.hpp"
#include "curvelab/pool.hpp"

#include <string>
#include <vector>

namespace curvelab {

/// Stadium of half-thickness h around the segment of half-length
/// c_beta r^beta - 2h in the line x.e = -h, centred at -h e. Its far face
/// lies on {x.e = 0}; the matching target is the ball B_h(r e).
struct HalfSpaceDisk {
  Point e;
  double r = 0.0;
  double h = 0.0;
  double beta = 0.0;
  double c_beta = 0.0;
  GridSet set;

  Point target() const { return r * e; }
  double half_length() const { return c_beta * std::pow(r, beta) - 2.0 * h; }
};

HalfSpaceDisk halfspace_disk(const Point& e, double r, double h, double beta, double c_beta,
                             const Grid2D& grid);

/// r^(3/4 - beta/2).
double forcing_shift_f(double r, double beta);

/// c * min{D, D^(2/3) h^(4/3), D^(2/3) dF^(4/3)} with D = R - 1 - h - r.
double influence_horizon(double R, double r, double h, double df, double c);

struct VhomOptions {
  double beta = 2.0;
  double c_beta = 4.0;
  ArrivalSettings arrival;
  /// Grid spacing; 0 selects max(r / 512, 1/4).
  double dx = 0.0;
  /// Adds forcing_shift_f(r, beta) to the forcing shift at each scale.
  bool shift_by_scale = false;
};

/// Computational window for one scale. The stadium is much wider than any
/// affordable grid, so only the part with |x.e_perp| <= max(r/4, 4h) is
/// simulated, with mirror boundaries standing in for the rest of the flat
/// face. Coordinates use e = (0, 1).
struct VhomWindow {
  Grid2D grid;
  GridSet set;
  Point target;
  double h = 0.0;
};
VhomWindow vhom_window(double r, double theta, const VhomOptions& o);

struct VhomEstimate {
  Point e{0.0, 1.0};
  FieldConfig field;
  double theta = 0.0;
  double beta = 0.0;
  int n_seeds = 0;
  double delta_f = 0.0;
  std::vector<double> r_list;
  std::vector<double> h;
  /// Forcing shift actually applied at each scale.
  std::vector<double> shift;
  std::vector<double> means;
  std::vector<double> stds;
  std::vector<double> ses;
  std::vector<double> uncensored;
  /// r / mean; NaN where the scale is flagged.
  std::vector<double> v_hat;
  std::vector<char> flagged;
  /// records[scale][seed]
  std::vector<std::vector<ArrivalRecord>> records;

  std::size_t index_of(double r) const;
};

/// Truncated arrival from the windowed half-space disk to B_{r^theta}(r e)
/// under realization `index` of the field shifted by delta_f.
ArrivalRecord vhom_sample(const FieldConfig& field, double r, double theta, double delta_f,
                          std::uint64_t index, const VhomOptions& o);

/// Ensemble of vhom_sample over seeds 0..n_seeds-1 at every scale. Scales
/// whose uncensored fraction is below 95% are flagged and get no v_hat.
VhomEstimate estimate_vhom(const FieldConfig& field, const Point& e,
                           const std::vector<double>& r_list, double theta, int n_seeds,
                           double delta_f, const VhomOptions& o, const WorkerPool& pool);

struct LinearityReport {
  double r1 = 0.0, r2 = 0.0;
  /// E[m(r1 + r2)] - E[m(r1)] - E[m(r2)], and over sqrt(h(r2) r2) log r1.
  double sub_residual = 0.0;
  double sub_normalized = 0.0;
  /// E_f[m(r1)] + E_f[m(r2)] - E[m(r1 + r2)] with the shifted forcing, and
  /// over sqrt(h(r2) r2) log r2. NaN without a shifted estimate.
  double super_residual = 0.0;
  double super_normalized = 0.0;
  /// |v_hat_beta1 - v_hat_beta2| at the largest common scale.
  double beta_gap = 0.0;
  double beta_gap_se = 0.0;
};

/// `base` must hold r1, r2 and r1 + r2; `shifted` (may be empty) r1 and r2
/// under shift_by_scale; `other_beta` the largest scale of base with a
/// different beta.
LinearityReport linearity_report(const VhomEstimate& base, const VhomEstimate& shifted,
                                 const VhomEstimate& other_beta, double r1, double r2);

enum class Direction { Grow, Shrink };

struct RadiusSchedule {
  std::vector<double> radii;
  /// c_1..c_N
  std::vector<double> c;
  double gamma = 0.0;
  double theta = 0.0;
  double eta = 0.0;
  Direction direction = Direction::Grow;
  /// False when the target sits in the narrow gap no N-step schedule with
  /// c in (1/2, 1] reaches; one coefficient then slightly exceeds 1.
  bool exact_rule = true;

  std::size_t steps() const { return c.size(); }
  /// r_n = |R_n - R_{n-1}|
  double step(std::size_t n) const { return std::abs(radii[n] - radii[n - 1]); }
};

/// 2 / (1 - theta + 4 ((1 - theta) / eta + 1)).
double schedule_gamma(double theta, double eta);

/// R_{n+1} = R_n +- c_{n+1} R_n^gamma, with a common c per schedule chosen
/// so the last radius equals R_target.
RadiusSchedule radius_schedule(double R0, double R_target, double theta, double eta,
                               Direction direction);

struct BallHoleOptions {
  /// Inner radius: start of the ball schedule, end of the hole schedule.
  double R_inner = 20.0;
  /// tau_n = c_tau sqrt(r_n^(1 + theta)) log R_n.
  double c_tau = 1.0;
  /// Reference homogenized speed for the bounds.
  double v_hom = 1.0;
  ArrivalSettings arrival;
  /// 0 selects max(r_min / 512, 1/4).
  double dx = 0.0;
};

struct StepStats {
  double R_from = 0.0, R_to = 0.0, r = 0.0, h = 0.0;
  double mean = 0.0, std = 0.0;
  /// v_hom^-1 r +- tau
  double bound = 0.0;
  double tau = 0.0;
  int targets = 0;
  int censored = 0;
  bool flagged = false;
  std::vector<double> t;  // per seed
};

struct BallHoleReport {
  RadiusSchedule schedule;
  std::vector<StepStats> steps;
  /// Per seed: sum of t_n and the single-run arrival it is compared with.
  std::vector<double> sum_t;
  std::vector<double> full_run;
};

/// Growing-ball steps: t_n is the largest truncated arrival, from the ball
/// of radius R_{n-1}, over targets of radius h(r_n) sampled on the circle of
/// radius R_n at arc spacing v_min h / sqrt(2). full_run is the same
/// largest arrival for the final circle from the initial ball.
BallHoleReport ball_experiment(const FieldConfig& field, double R_eps, double theta, double eta,
                               int n_seeds, const BallHoleOptions& o, const WorkerPool& pool);

/// Shrinking holes {|x| >= R_{n-1}}: t_n is the smallest truncated arrival
/// over the circle of radius R_n. full_run is the truncated arrival at the
/// centre (target radius h(r_N)) from the outermost hole.
BallHoleReport hole_experiment(const FieldConfig& field, double R_eps, double theta, double eta,
                               int n_seeds, const BallHoleOptions& o, const WorkerPool& pool);

struct SandwichOptions {
  double hole_radius = 12.0;
  double ball_radius = 6.0;
  /// Gap between the hole boundary and the ball.
  double gap = 4.0;
  double h = 1.0;
  double half = 36.0;
  double dx = 0.25;
  int blobs = 6;
  ArrivalSettings arrival;
};

struct SandwichResult {
  double ball = 0.0, set = 0.0, hole = 0.0;
  bool ordered() const { return ball >= set && set >= hole; }
};

/// Truncated arrivals at the origin from a ball B, a random set S with
/// B in S, and the hole H = {|x| >= hole_radius} containing S, all on
/// realization `index`.
SandwichResult sandwich_trial(const FieldConfig& field, std::uint64_t index,
                              const SandwichOptions& o);

}  // namespace curvelab
