#include "curvelab/concentration.hpp"

#include "curvelab/io.hpp"
#include "curvelab/rng.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>

namespace curvelab {

namespace {

double sum_sq(const std::vector<double>& c) {
  if (c.empty()) throw ParameterError("increment bounds must be nonempty");
  double s = 0.0;
  for (double x : c) {
    if (!(x > 0.0)) throw ParameterError("increment bounds must be positive");
    s += x * x;
  }
  return s;
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

void check_probs(double pE, double pEc) {
  if (!(pE >= 0.0 && pEc >= 0.0 && pE + pEc <= 1.0 + 1e-12))
    throw ParameterError("event probabilities must be >= 0 with P[E] + P[E^c] <= 1");
}

// Sign code of the first increments, bit n for step n + 1.
std::vector<std::uint64_t> sign_codes(const MartingalePaths& m) {
  const int P = m.paths(), N = std::min(m.steps(), 63);
  std::vector<std::uint64_t> code(P, 0);
  for (int p = 0; p < P; ++p)
    for (int n = 0; n < N; ++n)
      if (m.values(p, n + 1) > m.values(p, n)) code[p] |= std::uint64_t{1} << n;
  return code;
}

std::uint64_t block_of(std::uint64_t code, int d) {
  return d == 0 ? 0 : code & ((std::uint64_t{1} << d) - 1);
}

}  // namespace

double azuma_classic_tail(double lambda, const std::vector<double>& c) {
  if (!(lambda > 0.0)) throw ParameterError("azuma: lambda must be positive");
  return 2.0 * std::exp(-lambda * lambda / (2.0 * sum_sq(c)));
}

double alt_constant(double T) {
  if (!(T >= 1.0)) throw ParameterError("alt: T must be >= 1");
  return 2.0 * T * T / (T * T + 2.0 - std::numbers::e);
}

double alt_moment_bound(int k, int N, double T, double pE, double pEc) {
  if (k < 0 || N < 0) throw ParameterError("alt_moment_bound: k and N must be >= 0");
  check_probs(pE, pEc);
  const double base = factorial(2 * k) * std::pow(static_cast<double>(N), k);
  return base * pE + alt_constant(T) * base * std::pow(T, 2 * k) * pEc;
}

double alt_moment_bound_full(int k, int N, double T, double pE, double pEc) {
  const double base = factorial(2 * k) * std::pow(static_cast<double>(N), k);
  return alt_moment_bound(k, N, T, pE, pEc) +
         (1.0 + alt_constant(T) * base) * std::pow(T, 2 * k) * pEc;
}

double alt_tail_threshold(int N, double T, double pEc) {
  if (!(T > 1.0)) throw ParameterError("alt_tail: T must exceed 1");
  if (N < 1) throw ParameterError("alt_tail: N must be >= 1");
  if (!(pEc > 0.0 && pEc < 1.0)) throw ParameterError("alt_tail: P[E^c] must lie in (0, 1)");
  return -std::log(pEc) / (2.0 * std::log(T)) * std::sqrt(static_cast<double>(N));
}

double alt_tail(double lambda, int N, double T, double pEc, double C) {
  const double star = alt_tail_threshold(N, T, pEc);
  if (lambda <= star) return C * std::exp(-lambda / (2.0 * std::sqrt(static_cast<double>(N))));
  return C * std::pow(pEc, 1.0 / (2.0 * std::log(T)));
}

GenAzuma gen_azuma_tail(double lambda, const std::vector<double>& c, double T, int N, double pEc) {
  if (!(T > 0.0) || N < 1) throw ParameterError("gen_azuma: T and N must be positive");
  if (!(pEc >= 0.0 && pEc <= 1.0)) throw ParameterError("gen_azuma: P[E^c] must lie in [0, 1]");
  const double s2 = sum_sq(c);
  GenAzuma g;
  g.bound = 4.0 * std::exp(-lambda * lambda / (4.0 * s2));
  const double n = static_cast<double>(N);
  g.lambda0 = pEc == 0.0 ? std::numeric_limits<double>::infinity()
                         : -std::log((n + 8.0 * T * n * n / std::sqrt(s2)) * pEc) * s2 / T;
  g.valid = lambda > 0.0 && lambda <= g.lambda0;
  return g;
}

double hoeffding_rhs(double s, double mean, double a, double b) {
  if (!(b >= a)) throw ParameterError("hoeffding: requires a <= b");
  return std::exp(s * mean + s * s * (b - a) * (b - a) / 8.0);
}

void MartingalePaths::validate() const {
  const int P = paths(), N = steps();
  if (N < 1) throw DataError("paths need at least one step");
  if (static_cast<int>(event.size()) != P) throw DataError("event mask length differs from path count");
  if (static_cast<int>(c.size()) != N) throw DataError("need one increment bound per step");
  for (int p = 0; p < P; ++p) {
    if (values(p, 0) != 0.0) throw DataError("path " + std::to_string(p) + " does not start at 0");
    for (int n = 0; n <= N; ++n)
      if (!(std::abs(values(p, n)) <= T)) throw DataError("path " + std::to_string(p) + " leaves [-T, T]");
    if (!event[p]) continue;
    for (int n = 1; n <= N; ++n)
      if (!(std::abs(values(p, n) - values(p, n - 1)) <= c[n - 1] * (1 + 1e-12)))
        throw DataError("path " + std::to_string(p) + " exceeds c_" + std::to_string(n) + " on E");
  }
}

MartingalePaths reflected_walk(int paths, int N, int T, std::uint64_t seed) {
  if (paths < 1 || N < 1 || T < 1) throw ParameterError("reflected_walk: sizes must be positive");
  MartingalePaths m;
  m.values.resize(paths, N + 1);
  m.event.assign(paths, 1);
  m.T = T;
  m.c.assign(N, 1.0);
  for (int p = 0; p < paths; ++p) {
    const std::uint64_t base = derive_seed(seed, static_cast<std::uint64_t>(p), StreamTag::Paths);
    std::uint64_t word = 0;
    int M = 0;
    m.values(p, 0) = 0.0;
    for (int n = 0; n < N; ++n) {
      if (n % 64 == 0) word = splitmix64(base + static_cast<std::uint64_t>(n / 64));
      const int step = (word >> (n % 64)) & 1 ? 1 : -1;
      M = M == T ? T - 1 : M == -T ? 1 - T : M + step;
      m.values(p, n + 1) = M;
    }
  }
  return m;
}

AltReport mc_verify_alt(const MartingalePaths& paths, int k_max) {
  paths.validate();
  if (k_max < 1) throw ParameterError("mc_verify_alt: k_max must be >= 1");
  const int P = paths.paths(), N = paths.steps();
  AltReport rep;
  rep.N = N;
  rep.T = paths.T;
  int in_e = 0;
  for (char e : paths.event) in_e += e != 0;
  rep.pE = static_cast<double>(in_e) / P;
  rep.pEc = 1.0 - rep.pE;
  rep.pass = true;
  for (int k = 1; k <= k_max; ++k) {
    double s = 0.0, ss = 0.0;
    for (int p = 0; p < P; ++p) {
      const double x = paths.event[p] ? std::pow(paths.values(p, N), 2 * k) : 0.0;
      s += x;
      ss += x * x;
    }
    MomentCheck row;
    row.k = k;
    row.empirical = s / P;
    const double var = P > 1 ? std::max(0.0, (ss - P * row.empirical * row.empirical) / (P - 1)) : 0.0;
    row.se = std::sqrt(var / P);
    row.bound = alt_moment_bound(k, N, paths.T, rep.pE, rep.pEc);
    row.pass = row.empirical + 3.0 * row.se <= row.bound;
    rep.pass = rep.pass && row.pass;
    rep.rows.push_back(row);
  }
  return rep;
}

HoeffdingReport conditional_hoeffding_check(const MartingalePaths& paths, const FiltrationSpec& f) {
  if (f.depth < 0 || f.depth > 24) throw ParameterError("filtration depth must lie in [0, 24]");
  const int P = paths.paths(), N = paths.steps();
  if (static_cast<int>(paths.c.size()) != N) throw ParameterError("need one increment bound per step");
  const auto code = sign_codes(paths);
  HoeffdingReport rep;
  rep.worst_slack = std::numeric_limits<double>::infinity();
  const int ns = static_cast<int>(f.s.size());
  for (int n = 0; n < N; ++n) {
    const double c = paths.c[n];
    const int d = std::min({n, f.depth, 63});
    const std::size_t nb = std::size_t{1} << d;
    std::vector<double> cnt(nb, 0.0), sx(nb, 0.0), sxx(nb, 0.0);
    std::vector<double> se(nb * ns, 0.0), see(nb * ns, 0.0);
    for (int p = 0; p < P; ++p) {
      const double x = paths.values(p, n + 1) - paths.values(p, n);
      if (std::abs(x) > c * (1 + 1e-12))
        throw ParameterError("increment exceeds its bound at step " + std::to_string(n + 1));
      const std::size_t b = block_of(code[p], d);
      cnt[b] += 1;
      sx[b] += x;
      sxx[b] += x * x;
      for (int k = 0; k < ns; ++k) {
        const double e = std::exp(f.s[k] * x);
        se[b * ns + k] += e;
        see[b * ns + k] += e * e;
      }
    }
    for (std::size_t b = 0; b < nb; ++b) {
      const double m = cnt[b];
      if (m < f.min_block || m < 2) continue;
      ++rep.blocks;
      const double mx = sx[b] / m;
      const double sdx = std::sqrt(std::max(0.0, (sxx[b] - m * mx * mx) / (m - 1)) / m);
      for (int k = 0; k < ns; ++k) {
        const double s = f.s[k];
        const double lhs = se[b * ns + k] / m;
        const double sdl = std::sqrt(std::max(0.0, (see[b * ns + k] - m * lhs * lhs) / (m - 1)) / m);
        const double rhs = hoeffding_rhs(s, mx, -c, c);
        const double slack = rhs + 3.0 * (sdl + std::abs(s) * rhs * sdx) - lhs;
        ++rep.checks;
        rep.failures += slack < 0.0;
        rep.worst_slack = std::min(rep.worst_slack, slack);
      }
    }
  }
  rep.pass = rep.failures == 0 && rep.checks > 0;
  return rep;
}

MaximalReport indicator_maximal_check(const MartingalePaths& paths, const std::vector<char>& event,
                                      double delta, const FiltrationSpec& f) {
  if (!(delta > 0.0 && delta <= 1.0)) throw ParameterError("indicator_maximal: delta must lie in (0, 1]");
  const int P = paths.paths();
  if (static_cast<int>(event.size()) != P) throw ParameterError("event mask length differs from path count");
  const int D = std::min({f.depth, paths.steps(), 24});
  const auto code = sign_codes(paths);
  std::vector<char> hit(P, 0);
  for (int d = 0; d <= D; ++d) {
    const std::size_t nb = std::size_t{1} << d;
    std::vector<double> cnt(nb, 0.0), in(nb, 0.0);
    for (int p = 0; p < P; ++p) {
      const std::size_t b = block_of(code[p], d);
      cnt[b] += 1;
      in[b] += event[p] != 0;
    }
    for (int p = 0; p < P; ++p) {
      const std::size_t b = block_of(code[p], d);
      if (in[b] >= delta * cnt[b] && in[b] > 0) hit[p] = 1;
    }
  }
  MaximalReport rep;
  rep.delta = delta;
  int ne = 0, nh = 0;
  for (int p = 0; p < P; ++p) {
    ne += event[p] != 0;
    nh += hit[p];
  }
  rep.p_event = static_cast<double>(ne) / P;
  rep.excursion = static_cast<double>(nh) / P;
  rep.bound = rep.p_event / delta;
  rep.margin = 3.0 * std::sqrt(rep.excursion * (1.0 - rep.excursion) / P);
  rep.pass = rep.excursion <= rep.bound + rep.margin;
  return rep;
}

TailCalibration calibrate_alt_tail(const MartingalePaths& paths) {
  const int P = paths.paths(), N = paths.steps();
  std::vector<double> end(P);
  int touched = 0;
  for (int p = 0; p < P; ++p) {
    end[p] = std::abs(paths.values(p, N));
    touched += paths.values.row(p).abs().maxCoeff() >= paths.T;
  }
  TailCalibration cal;
  cal.pEc = static_cast<double>(touched) / P;
  const double top = *std::max_element(end.begin(), end.end());
  for (double lam = 0.5; lam <= top; lam += 0.5) {
    int over = 0;
    for (double e : end) over += e >= lam;
    const double emp = static_cast<double>(over) / P;
    cal.C = std::max(cal.C, emp / alt_tail(lam, N, paths.T, cal.pEc, 1.0));
  }
  return cal;
}

std::string AltReport::to_json() const {
  nlohmann::json j{{"schema", 1}, {"check", "alt_moments"}, {"N", N},      {"T", T},
                   {"pE", pE},    {"pEc", pEc},           {"tail_C", tail_C}, {"pass", pass}};
  for (const MomentCheck& r : rows)
    j["rows"].push_back(
        {{"k", r.k}, {"empirical", r.empirical}, {"se", r.se}, {"bound", r.bound}, {"pass", r.pass}});
  return j.dump(2);
}

std::string HoeffdingReport::to_json() const {
  return nlohmann::json{{"schema", 1},          {"check", "conditional_hoeffding"},
                        {"blocks", blocks},     {"checks", checks},
                        {"failures", failures}, {"worst_slack", worst_slack},
                        {"pass", pass}}
      .dump(2);
}

std::string MaximalReport::to_json() const {
  return nlohmann::json{{"schema", 1},          {"check", "indicator_maximal"},
                        {"delta", delta},       {"p_event", p_event},
                        {"excursion", excursion}, {"bound", bound},
                        {"margin", margin},     {"pass", pass}}
      .dump(2);
}

void export_paths(const std::filesystem::path& path, const MartingalePaths& paths) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write " + path.string());
    // row-major by path
    for (int p = 0; p < paths.paths(); ++p)
      for (int n = 0; n <= paths.steps(); ++n) {
        const double v = paths.values(p, n);
        os.write(reinterpret_cast<const char*>(&v), sizeof v);
      }
  }
  const nlohmann::json head{{"schema", 1},
                            {"dtype", "f64-le"},
                            {"layout", "path-major"},
                            {"paths", paths.paths()},
                            {"values_per_path", paths.steps() + 1},
                            {"T", paths.T}};
  io::write_text(path.string() + ".json", head.dump(2) + "\n");
}

}  // namespace curvelab
