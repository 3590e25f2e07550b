#pragma once

#include "curvelab/arrival.hpp"
#include "curvelab/field.hpp"
#include "curvelab/pool.hpp"

#include <array>
#include <filesystem>
#include <string>
#include <vector>

namespace curvelab {

/// Planar-front arrival ensemble: the half-plane {y <= 0} of a window
/// |x| <= max(dist/4, 4h) evolves towards the target ball B_h((0, dist)),
/// all translated by `offset`. Realization i of every scale uses field
/// stream (master_seed, i).
struct EnsembleConfig {
  std::uint64_t master_seed = 0;
  int n_seeds = 1;
  /// Its seed is replaced by master_seed.
  FieldConfig field;
  std::vector<double> dists;
  /// h = dist^h_exponent unless h_fixed > 0.
  double h_exponent = 0.5;
  double h_fixed = 0.0;
  Point offset{0.0, 0.0};
  /// 0 selects max(dist / 512, 1/4).
  double dx = 0.0;
  ArrivalSettings arrival;
  /// Recorded in manifests; the caller's pool decides the parallelism.
  int workers = 1;

  double h_for(double dist) const;
  void validate() const;
};

/// One realization at one scale.
ArrivalRecord strip_sample(const EnsembleConfig& c, std::size_t scale, std::uint64_t index);

struct ScaleRecords {
  /// Measured source-to-target distance of the records (nominal if none).
  double dist = 0.0;
  double h = 0.0;
  /// One slot per seed; missing slots (failed tasks) are absent.
  std::vector<ArrivalRecord> records;
};

struct ScaleStats {
  double dist = 0.0, h = 0.0;
  int n = 0;
  int uncensored = 0;
  double censored_fraction = 0.0;
  /// Over the uncensored values.
  double mean = 0.0, std = 0.0;
  /// 5, 25, 50, 75, 95 percent.
  std::array<double, 5> quantiles{};
  /// std / sqrt(h dist) with a 95% interval.
  double normalized = 0.0, normalized_lo = 0.0, normalized_hi = 0.0;
  /// Fewer than min_uncensored uncensored records.
  bool omitted = false;
};

struct EnsembleStats {
  std::vector<ScaleStats> scales;
  /// Weighted least-squares slope of log std against log dist, with a 95%
  /// interval; only with at least four usable scales.
  bool has_slope = false;
  double slope = 0.0, slope_lo = 0.0, slope_hi = 0.0;
  /// Same fit for the normalized std.
  double normalized_slope = 0.0, normalized_slope_lo = 0.0, normalized_slope_hi = 0.0;
  /// Largest upper interval end of the normalized std over usable scales.
  double normalized_bound = 0.0;
  /// No significant growth of the normalized std across scales.
  bool normalized_bounded = false;

  std::string to_json() const;
};

EnsembleStats fluct_report(const std::vector<ScaleRecords>& scales, int min_uncensored = 30);

struct EnsembleResult {
  std::vector<ScaleRecords> scales;
  EnsembleStats stats;
  bool complete = true;
  /// "scale/seed: message" for every failed task.
  std::vector<std::string> failures;
};

/// Runs every (scale, seed) task on the pool. With a non-empty out_dir, each
/// realization is written to records/ as it finishes, then merged in index
/// order into arrival.csv before summary.json is written. Failed tasks leave
/// the run marked incomplete.
EnsembleResult run_ensemble(const EnsembleConfig& c, const WorkerPool& pool,
                            const std::filesystem::path& out_dir = {});

/// Linear-interpolation quantile of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double q);

struct Wilson {
  double lo = 0.0, hi = 1.0;
};
/// 95% Wilson score interval.
Wilson wilson_interval(int successes, int n, double z = 1.959963984540054);

struct BoxOptions {
  double dx = 0.5;
  /// Grid margin around Q for the restriction collar.
  double collar = 2.0;
  /// Horizon of the stabilization of the bottom strip.
  double stabilize_time = 10.0;
  /// Pinned once the area is unchanged for 5 h / v_min.
  double h = 1.0;
  double v_min = 0.5;
  SolverParams solver;
  BoxOptions() {
    solver.band = 12;
    solver.record_dt = 0.25;
  }
};

struct BoxOutcome {
  std::uint64_t index = 0;
  bool success = false;
  bool empty_seed = false;
  bool stagnated = false;
  /// Time the run stopped.
  double time = 0.0;
};

struct BoxResult {
  double r = 0.0, w = 0.0;
  int n = 0;
  int successes = 0;
  int empty_seeds = 0;
  int stagnated = 0;
  double p_hat = 0.0;
  Wilson ci;
  std::vector<BoxOutcome> outcomes;
  std::string to_json() const;
};

/// Realization `index` restricted to Q = [0, w] x [-w, r]; the seed set is
/// the stabilized bottom strip [0, w] x [-w, 0]. Success iff the evolution
/// reaches y >= r - dx before t_max and before stagnation.
BoxOutcome box_trial(double r, double w, const FieldConfig& field, std::uint64_t index,
                     double t_max, const BoxOptions& o);

BoxResult box_criterion(double r, double w, const FieldConfig& field, int n_seeds, double t_max,
                        const BoxOptions& o, const WorkerPool& pool);

}  // namespace curvelab
