#include "curvelab/levelset.hpp"

#include "curvelab/distance.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace curvelab {

void SolverParams::validate() const {
  if (!(cfl > 0.0 && cfl <= 1.0)) throw ParameterError("cfl must lie in (0, 1]");
  if (reinit_every < 1) throw ParameterError("reinit_every must be >= 1");
  if (band < 0) throw ParameterError("band must be >= 0");
  if (!(record_dt > 0.0)) throw ParameterError("record_dt must be positive");
  if (band > 0) {
    // forcing moves the front <= cfl cells per step, clamped curvature <= cfl/2
    const int needed = static_cast<int>(std::ceil(1.5 * cfl * reinit_every)) + 3;
    if (band < needed)
      throw ParameterError("band of " + std::to_string(band) + " cells is too thin; need >= " +
                           std::to_string(needed));
  }
}

LevelSetState init_from_set(const GridSet& s, int band) {
  if (s.grid.size() == 0 || s.mask.size() != s.grid.size())
    throw ParameterError("init_from_set: empty grid");
  LevelSetState st;
  st.grid = s.grid;
  st.u = signed_distance(s);
  if (band > 0) {
    const double far = (band + 1) * s.grid.dx;
    st.u = st.u.max(-far).min(far);
  }
  return st;
}

double cfl_dt(const Grid2D& grid, double a_max, double f_max, double cfl) {
  constexpr double eps = 1e-12;
  const double dx = grid.dx;
  return cfl * std::min(dx * dx / (4.0 * a_max + eps), dx / (f_max + eps));
}

LevelSetSolver::LevelSetSolver(const SampledField& field, SolverParams params)
    : field_(field), params_(params) {
  params_.validate();
  dt_ = cfl_dt(field, params_.cfl);
  const double eps = params_.eps_for(field.grid.dx);
  eps2_ = eps * eps;
}

void LevelSetSolver::refresh_band(const LevelSetState& s) {
  active_i_.clear();
  active_j_.clear();
  const double lim = params_.band * s.grid.dx;
  for (int j = 0; j < s.grid.ny; ++j)
    for (int i = 0; i < s.grid.nx; ++i)
      if (std::abs(s.u(i, j)) < lim) {
        active_i_.push_back(i);
        active_j_.push_back(j);
      }
  band_ready_ = true;
}

namespace {

// max(x, 0) without a branch, so the row loop vectorizes; exact in IEEE.
inline double pos(double x) { return 0.5 * (x + std::abs(x)); }

struct Stencil {
  const double* u;
  const double* a;
  const double* f;
  int nx, ny;
  double dx, dt, eps2;

  // Branch-free update from the 3x3 neighbourhood; the same expression serves
  // the vectorized interior rows and the scalar boundary/band path.
  static double kernel(double c, double xm, double xp, double ym, double yp, double mm,
                       double mp, double pm, double pp, double ak, double fk, double inv,
                       double dt, double eps2) {
    const double ux = 0.5 * (xp - xm) * inv;
    const double uy = 0.5 * (yp - ym) * inv;
    const double inv2 = inv * inv;
    const double uxx = (xp - 2.0 * c + xm) * inv2;
    const double uyy = (yp - 2.0 * c + ym) * inv2;
    const double uxy = 0.25 * (pp - pm - mp + mm) * inv2;
    const double g2 = ux * ux + uy * uy;
    const double ge = g2 + eps2;
    const double cap = 2.0 * inv;
    double kappa = (uxx * uy * uy - 2.0 * ux * uy * uxy + uyy * ux * ux) / (ge * std::sqrt(ge));
    kappa = std::min(std::max(kappa, -cap), cap);

    const double dmx = (c - xm) * inv, dpx = (xp - c) * inv;
    const double dmy = (c - ym) * inv, dpy = (yp - c) * inv;
    // Godunov: outward stencil for F >= 0, inward for F < 0; only squares
    // enter, so the sign flip reduces both cases to one expression.
    const double sg = std::copysign(1.0, fk);
    const double a1 = pos(sg * dmx);
    const double a2 = pos(-sg * dpx);
    const double b1 = pos(sg * dmy);
    const double b2 = pos(-sg * dpy);
    const double g = std::sqrt(a1 * a1 + a2 * a2 + b1 * b1 + b2 * b2);
    return c + dt * (ak * kappa * std::sqrt(g2) - fk * g);
  }

  // New value at node (i, j); mirror boundaries.
  double update(int i, int j) const {
    const int im = i > 0 ? i - 1 : 1;
    const int ip = i < nx - 1 ? i + 1 : nx - 2;
    const int jm = j > 0 ? j - 1 : 1;
    const int jp = j < ny - 1 ? j + 1 : ny - 2;
    const std::ptrdiff_t rj = std::ptrdiff_t(nx) * j;
    const std::ptrdiff_t rm = std::ptrdiff_t(nx) * jm;
    const std::ptrdiff_t rp = std::ptrdiff_t(nx) * jp;
    return kernel(u[i + rj], u[im + rj], u[ip + rj], u[i + rm], u[i + rp], u[im + rm],
                  u[im + rp], u[ip + rm], u[ip + rp], a[i + rj], f[i + rj], 1.0 / dx, dt, eps2);
  }

  // Whole row j into out (row-major offset nx * j).
  void update_row(int j, double* out) const {
    const int jm = j > 0 ? j - 1 : 1;
    const int jp = j < ny - 1 ? j + 1 : ny - 2;
    const double* r0 = u + std::ptrdiff_t(nx) * j;
    const double* rm = u + std::ptrdiff_t(nx) * jm;
    const double* rp = u + std::ptrdiff_t(nx) * jp;
    const double* ar = a + std::ptrdiff_t(nx) * j;
    const double* fr = f + std::ptrdiff_t(nx) * j;
    double* o = out + std::ptrdiff_t(nx) * j;
    const double inv = 1.0 / dx;
    o[0] = update(0, j);
    for (int i = 1; i < nx - 1; ++i)
      o[i] = kernel(r0[i], r0[i - 1], r0[i + 1], rm[i], rp[i], rm[i - 1], rp[i - 1], rm[i + 1],
                    rp[i + 1], ar[i], fr[i], inv, dt, eps2);
    o[nx - 1] = update(nx - 1, j);
  }
};

[[noreturn]] void non_finite(int i, int j, double t) {
  std::ostringstream os;
  os << "level-set update produced a non-finite value at node (" << i << ", " << j
     << ") near t = " << t;
  throw NumericError(os.str());
}

}  // namespace

void LevelSetSolver::step(LevelSetState& s, double dt) {
  if (s.grid != field_.grid) throw ParameterError("state and field grids differ");
  const Stencil st{s.u.data(), field_.a.data(), field_.f.data(), s.grid.nx, s.grid.ny,
                   s.grid.dx, dt, eps2_};
  if (params_.band == 0) {
    scratch_.resize(s.grid.nx, s.grid.ny);
    for (int j = 0; j < s.grid.ny; ++j) st.update_row(j, scratch_.data());
    if (!scratch_.allFinite()) {
      for (int j = 0; j < s.grid.ny; ++j)
        for (int i = 0; i < s.grid.nx; ++i)
          if (!std::isfinite(scratch_(i, j))) non_finite(i, j, s.t);
    }
    s.u.swap(scratch_);
  } else {
    if (!band_ready_) refresh_band(s);
    const std::size_t n = active_i_.size();
    updated_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double v = st.update(active_i_[k], active_j_[k]);
      if (!std::isfinite(v)) non_finite(active_i_[k], active_j_[k], s.t);
      updated_[k] = v;
    }
    for (std::size_t k = 0; k < n; ++k) s.u(active_i_[k], active_j_[k]) = updated_[k];
  }
  s.t += dt;
  ++s.steps_since_reinit;
}

namespace {

void reinit_region(LevelSetState& s, ArrayXXd& phi, int i0, int i1, int j0, int j1, int band) {
  const int nx = s.grid.nx, ny = s.grid.ny;
  const double dx = s.grid.dx;
  const double inf = std::numeric_limits<double>::infinity();
  ArrayXXd& u = s.u;

  // Seeds are the nodes with a 4-neighbour of the other sign. Their distance
  // is |u| divided by the gradient norm halfway to the interface (central
  // differences, interpolated toward the neighbours across it); the linear
  // crossing distance bounds it and replaces it where the gradient degenerates.
  auto grad = [&](int a, int b) {
    const int am = a > 0 ? a - 1 : a, ap = a < nx - 1 ? a + 1 : a;
    const int bm = b > 0 ? b - 1 : b, bp = b < ny - 1 ? b + 1 : b;
    const double gx = (u(ap, b) - u(am, b)) / ((ap - am) * dx);
    const double gy = (u(a, bp) - u(a, bm)) / ((bp - bm) * dx);
    return std::sqrt(gx * gx + gy * gy);
  };
  // Work on a copy of the region padded by one ring of +inf, so the sweeps
  // need no bounds checks.
  const int w = i1 - i0 + 1, h = j1 - j0 + 1;
  const int pw = w + 2;
  phi.setConstant(pw, h + 2, inf);
  std::vector<char> fixed(std::size_t(pw) * (h + 2), 0);
  double* P = phi.data();
  auto at = [&](int i, int j) { return std::size_t(i - i0 + 1) + std::size_t(pw) * (j - j0 + 1); };

  bool any = false;
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      const double c = u(i, j);
      const bool in = c <= 0.0;
      const bool sx0 = i > 0 && (u(i - 1, j) <= 0.0) != in;
      const bool sx1 = i < nx - 1 && (u(i + 1, j) <= 0.0) != in;
      const bool sy0 = j > 0 && (u(i, j - 1) <= 0.0) != in;
      const bool sy1 = j < ny - 1 && (u(i, j + 1) <= 0.0) != in;
      if (!(sx0 || sx1 || sy0 || sy1)) continue;
      const int nb[4][2] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
      const bool hit[4] = {sx0, sx1, sy0, sy1};
      const double gc = grad(i, j);
      double lin = inf, g = 0.0;
      int n = 0;
      for (int k = 0; k < 4; ++k) {
        if (!hit[k]) continue;
        const double v = u(nb[k][0], nb[k][1]);
        const double th = std::abs(c) / (std::abs(c) + std::abs(v));
        lin = std::min(lin, th * dx);
        g += (1.0 - 0.5 * th) * gc + 0.5 * th * grad(nb[k][0], nb[k][1]);
        ++n;
      }
      g /= n;
      const double d = std::abs(c) / g;
      P[at(i, j)] = (g > 1e-3 && d <= lin) ? d : lin;
      fixed[at(i, j)] = 1;
      any = true;
    }
  }
  if (!any) return;

  const double h2 = 2.0 * dx * dx;
  auto sweep = [&](int si, int sj) {
    const int ib = si > 0 ? 1 : w, ie = si > 0 ? w + 1 : 0;
    const int jb = sj > 0 ? 1 : h, je = sj > 0 ? h + 1 : 0;
    for (int j = jb; j != je; j += sj) {
      double* row = P + std::ptrdiff_t(pw) * j;
      const double* below = row - pw;
      const double* above = row + pw;
      const char* fx = fixed.data() + std::ptrdiff_t(pw) * j;
      for (int i = ib; i != ie; i += si) {
        if (fx[i]) continue;
        const double ax = std::min(row[i - 1], row[i + 1]);
        const double ay = std::min(below[i], above[i]);
        const double lo = std::min(ax, ay), hi = std::max(ax, ay);
        if (lo == inf) continue;
        const double diff = hi - lo;
        const double t = diff >= dx ? lo + dx : 0.5 * (lo + hi + std::sqrt(h2 - diff * diff));
        if (t < row[i]) row[i] = t;
      }
    }
  };
  sweep(1, 1);
  sweep(-1, 1);
  sweep(-1, -1);
  sweep(1, -1);

  const double far = band > 0 ? (band + 1) * dx : inf;
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i) {
      const double d = std::min(P[at(i, j)], far);
      if (d == inf) continue;  // unreachable from the interface; keep the old value
      u(i, j) = u(i, j) <= 0.0 ? -d : d;
    }
}

}  // namespace

void LevelSetSolver::reinit(LevelSetState& s) {
  const int nx = s.grid.nx, ny = s.grid.ny;
  int i0 = 0, i1 = nx - 1, j0 = 0, j1 = ny - 1;
  if (params_.band > 0) {
    const double lim = params_.band * s.grid.dx;
    i0 = nx;
    i1 = -1;
    j0 = ny;
    j1 = -1;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        if (std::abs(s.u(i, j)) < lim) {
          i0 = std::min(i0, i);
          i1 = std::max(i1, i);
          j0 = std::min(j0, j);
          j1 = std::max(j1, j);
        }
    const int grow = params_.band + 2;
    if (i1 >= 0) {
      i0 = std::max(0, i0 - grow);
      j0 = std::max(0, j0 - grow);
      i1 = std::min(nx - 1, i1 + grow);
      j1 = std::min(ny - 1, j1 + grow);
    }
  }
  if (i1 >= i0) reinit_region(s, phi_, i0, i1, j0, j1, params_.band);
  if (params_.band > 0) {
    const double far = (params_.band + 1) * s.grid.dx;
    s.u = s.u.max(-far).min(far);
  }
  s.steps_since_reinit = 0;
  band_ready_ = false;
}

void LevelSetSolver::advance(LevelSetState& s, double t_end) {
  while (s.t < t_end) {
    double dt = std::min(dt_, t_end - s.t);
    // absorb a sliver instead of leaving it for a tiny extra step
    if (t_end - (s.t + dt) < 1e-9 * dt_) dt = t_end - s.t;
    step(s, dt);
    if (t_end - s.t < 1e-9 * dt_) s.t = t_end;
    if (s.steps_since_reinit >= params_.reinit_every) reinit(s);
  }
}

LevelSetState step(const LevelSetState& s, const SampledField& field, double dt,
                   const SolverParams& params) {
  LevelSetSolver solver(field, params);
  LevelSetState out = s;
  solver.step(out, dt);
  return out;
}

LevelSetState reinit(const LevelSetState& s, int band) {
  SolverParams p;
  p.band = band;
  p.reinit_every = 1;
  p.cfl = 0.5;
  SampledField dummy;
  dummy.grid = s.grid;
  LevelSetSolver solver(dummy, p);
  LevelSetState out = s;
  solver.reinit(out);
  return out;
}

void evolve(LevelSetState& s, const SampledField& field, double horizon,
            const SolverParams& params, const Observer& observe) {
  if (!(horizon >= 0.0)) throw ParameterError("evolve: horizon must be >= 0");
  LevelSetSolver solver(field, params);
  if (observe && !observe(s)) return;
  const double t0 = s.t;
  const double end = t0 + horizon;
  for (long k = 1; s.t < end; ++k) {
    const double target = std::min(t0 + k * params.record_dt, end);
    solver.advance(s, target);
    s.t = target;
    if (observe && !observe(s)) return;
  }
}

Trajectory evolve(const GridSet& s, const SampledField& field, double horizon,
                  const SolverParams& params) {
  Trajectory out;
  LevelSetState st = init_from_set(s, params.band);
  evolve(st, field, horizon, params, [&](const LevelSetState& x) {
    out.push_back({x.t, x.zero_set()});
    return true;
  });
  return out;
}

Trajectory evolve(const GridSet& s, const CoefficientField& field, double horizon,
                  const SolverParams& params) {
  const SampledField f = sample(field, s.grid);
  return evolve(s, f, horizon, params);
}

GridSet evolve_final(const GridSet& s, const SampledField& field, double horizon,
                     const SolverParams& params) {
  LevelSetState st = init_from_set(s, params.band);
  evolve(st, field, horizon, params, nullptr);
  return st.zero_set();
}

}  // namespace curvelab
