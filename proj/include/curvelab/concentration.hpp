#pragma once

#include "curvelab/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace curvelab {

/// 2 exp(-lambda^2 / (2 sum c^2)).
double azuma_classic_tail(double lambda, const std::vector<double>& c);

/// 2 T^2 / (T^2 + 2 - e).
double alt_constant(double T);

/// Bound on E[1_E M_N^{2k}]:
/// (2k)! N^k P[E] + C(T) (2k)! N^k T^{2k} P[E^c].
double alt_moment_bound(int k, int N, double T, double pE, double pEc);
/// Bound on E[M_N^{2k}]: the above plus (1 + C(T) (2k)! N^k) T^{2k} P[E^c].
double alt_moment_bound_full(int k, int N, double T, double pE, double pEc);

/// Default tail constant, checked against the reflected-walk reference
/// family by calibrate_alt_tail.
inline constexpr double kAltTailC = 1.0;

/// C exp(-lambda / (2 sqrt N)) up to the threshold
/// lambda* = (-log P[E^c] / (2 log T)) sqrt N, C P[E^c]^{1/(2 log T)} beyond.
double alt_tail(double lambda, int N, double T, double pEc, double C = kAltTailC);
double alt_tail_threshold(int N, double T, double pEc);

struct GenAzuma {
  double bound = 0.0;
  double lambda0 = 0.0;
  /// 0 < lambda <= lambda0
  bool valid = false;
};
/// 4 exp(-lambda^2 / (4 sum c^2)) for
/// lambda <= lambda0 = -log((N + 8 T N^2 / sqrt(sum c^2)) P[E^c]) sum c^2 / T.
GenAzuma gen_azuma_tail(double lambda, const std::vector<double>& c, double T, int N, double pEc);

/// exp(s mean + s^2 (b - a)^2 / 8)
double hoeffding_rhs(double s, double mean, double a, double b);

/// P paths of N + 1 values each (row p is path p) with an event mask.
struct MartingalePaths {
  Eigen::ArrayXXd values;  // P x (N + 1)
  std::vector<char> event;
  double T = 1.0;
  /// c_1..c_N
  std::vector<double> c;

  int paths() const { return static_cast<int>(values.rows()); }
  int steps() const { return static_cast<int>(values.cols()) - 1; }
  /// Throws DataError unless M_0 = 0, |M_n| <= T, and on E every
  /// |M_n - M_{n-1}| <= c_n.
  void validate() const;
};

/// +-1 walk reflected at +-T from fair bits of a counter-based stream keyed
/// by (seed, path index). E holds every path.
MartingalePaths reflected_walk(int paths, int N, int T, std::uint64_t seed);

/// Dyadic filtration: G_d is generated by the signs of the first d
/// increments; conditional expectations are averages over those blocks.
struct FiltrationSpec {
  int depth = 8;
  /// Blocks smaller than this are skipped.
  int min_block = 30;
  std::vector<double> s = {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
};

struct MomentCheck {
  int k = 0;
  double empirical = 0.0;
  double se = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct AltReport {
  int N = 0;
  double T = 0.0;
  double pE = 0.0, pEc = 0.0;
  double tail_C = kAltTailC;
  std::vector<MomentCheck> rows;
  bool pass = false;
  std::string to_json() const;
};

/// For k = 1..k_max: E[1_E M_N^{2k}] + 3 SE <= alt_moment_bound.
AltReport mc_verify_alt(const MartingalePaths& paths, int k_max);

struct HoeffdingReport {
  int blocks = 0;
  int checks = 0;
  int failures = 0;
  /// Smallest (bound + margin - lhs) over all checks.
  double worst_slack = 0.0;
  bool pass = false;
  std::string to_json() const;
};

/// For each step n and block of G_{min(n, depth)}: the block average of
/// exp(s X), X = M_{n+1} - M_n, stays below hoeffding_rhs(s, E[X|G], -c, c)
/// plus three standard errors. Increments beyond c throw ParameterError.
HoeffdingReport conditional_hoeffding_check(const MartingalePaths& paths, const FiltrationSpec& f);

struct MaximalReport {
  double delta = 0.0;
  double p_event = 0.0;
  /// Fraction of paths with E[1_E | G_n] >= delta for some n <= depth.
  double excursion = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  bool pass = false;
  std::string to_json() const;
};

MaximalReport indicator_maximal_check(const MartingalePaths& paths, const std::vector<char>& event,
                                      double delta, const FiltrationSpec& f);

struct TailCalibration {
  /// Smallest C with empirical P[|M_N| >= lambda] <= alt_tail(lambda, C)
  /// over the lambda grid.
  double C = 0.0;
  double pEc = 0.0;
};
/// Uses E = {max_n |M_n| < T} on the given paths.
TailCalibration calibrate_alt_tail(const MartingalePaths& paths);

/// Flat little-endian f64 array (path-major) plus `<path>.json` header.
void export_paths(const std::filesystem::path& path, const MartingalePaths& paths);

}  // namespace curvelab
