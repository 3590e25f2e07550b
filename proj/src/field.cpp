#include "curvelab/field.hpp"

#include "curvelab/distance.hpp"
#include "curvelab/rng.hpp"

#include <fstream>
#include <iterator>
#include <numbers>
#include <random>

namespace curvelab {

// ---------------------------------------------------------------- shapes

ObstacleShape ObstacleShape::cone(double peak) {
  if (!(peak >= 0.0)) throw ParameterError("cone: peak must be >= 0");
  return {Kind::Cone, peak, peak};
}

ObstacleShape ObstacleShape::plateau(double peak) {
  if (!(peak >= 0.0)) throw ParameterError("plateau: peak must be >= 0");
  return {Kind::Plateau, peak, 2.0 * peak};
}

ObstacleShape ObstacleShape::table(std::vector<double> samples) {
  if (samples.size() < 2) throw ParameterError("table profile needs at least two samples");
  if (samples.back() != 0.0) throw ParameterError("table profile must vanish at s = 1");
  double peak = 0.0;
  double lip = 0.0;
  const double n = static_cast<double>(samples.size() - 1);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (!(samples[k] >= 0.0)) throw ParameterError("table profile must be nonnegative");
    peak = std::max(peak, samples[k]);
    if (k > 0) lip = std::max(lip, std::abs(samples[k] - samples[k - 1]) * n);
  }
  return {Kind::Table, peak, lip, std::move(samples)};
}

ObstacleShape ObstacleShape::load_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open profile table: " + path);
  std::vector<double> v{std::istream_iterator<double>(in), std::istream_iterator<double>()};
  return table(std::move(v));
}

double ObstacleShape::operator()(double s) const {
  if (s >= 1.0) return 0.0;
  s = std::max(s, 0.0);
  switch (kind_) {
    case Kind::Cone:
      return peak_ * (1.0 - s);
    case Kind::Plateau:
      return s <= 0.5 ? peak_ : 2.0 * peak_ * (1.0 - s);
    case Kind::Table: {
      const double q = s * static_cast<double>(samples_.size() - 1);
      const auto k = static_cast<std::size_t>(q);
      const double w = q - static_cast<double>(k);
      return (1.0 - w) * samples_[k] + w * samples_[k + 1];
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------- points

PoissonPoints sample_poisson(const Rect& domain, double intensity, double pad,
                             std::uint64_t seed) {
  if (!(intensity >= 0.0)) throw ParameterError("sample_poisson: negative intensity");
  if (!(pad >= 1.0)) throw ParameterError("sample_poisson: pad must be >= 1");
  if (!(domain.width() >= 0.0 && domain.height() >= 0.0))
    throw ParameterError("sample_poisson: inverted domain");

  PoissonPoints p;
  p.intensity = intensity;
  p.domain = domain;
  p.pad = pad;
  p.seed = seed;
  const Rect box = p.padded();
  const double mean = intensity * box.area();
  if (mean <= 0.0) return p;

  std::mt19937_64 gen(derive_seed(seed, 0, StreamTag::Obstacles));
  std::poisson_distribution<long long> count(mean);
  std::uniform_real_distribution<double> ux(box.lo.x(), box.hi.x());
  std::uniform_real_distribution<double> uy(box.lo.y(), box.hi.y());
  const long long n = count(gen);
  p.points.reserve(static_cast<std::size_t>(n));
  for (long long k = 0; k < n; ++k) {
    const double x = ux(gen);
    const double y = uy(gen);
    p.points.emplace_back(x, y);
  }
  return p;
}

double eval_obstacle(const ObstacleShape& shape, const PoissonPoints& pts, const Point& x) {
  double v = 0.0;
  for (const Point& c : pts.points) v = std::max(v, shape((x - c).norm()));
  return v;
}

std::vector<Point> ring_points(const Point& c, double radius, double spacing) {
  if (!(radius > 0.0) || !(spacing > 0.0))
    throw ParameterError("ring_points: radius and spacing must be positive");
  const int n = std::max(3, static_cast<int>(std::ceil(2.0 * std::numbers::pi * radius / spacing)));
  std::vector<Point> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double th = 2.0 * std::numbers::pi * k / n;
    out.emplace_back(c.x() + radius * std::cos(th), c.y() + radius * std::sin(th));
  }
  return out;
}

ObstacleField::ObstacleField(ObstacleShape shape, PoissonPoints pts)
    : shape_(std::move(shape)), pts_(std::move(pts)) {
  Rect box = pts_.padded();
  for (const Point& c : pts_.points) {
    box.lo = box.lo.cwiseMin(c);
    box.hi = box.hi.cwiseMax(c);
  }
  base_ = box.lo;
  ncx_ = static_cast<int>(std::floor(box.width())) + 1;
  ncy_ = static_cast<int>(std::floor(box.height())) + 1;
  const int ncells = ncx_ * ncy_;
  std::vector<int> cell(pts_.points.size());
  start_.assign(ncells + 1, 0);
  for (std::size_t k = 0; k < pts_.points.size(); ++k) {
    const Point& c = pts_.points[k];
    const int a = std::clamp(cell_x(c.x()), 0, ncx_ - 1);
    const int b = std::clamp(cell_y(c.y()), 0, ncy_ - 1);
    cell[k] = a + ncx_ * b;
    ++start_[cell[k] + 1];
  }
  for (int c = 0; c < ncells; ++c) start_[c + 1] += start_[c];
  order_.resize(pts_.points.size());
  std::vector<int> fill(start_.begin(), start_.end() - 1);
  for (std::size_t k = 0; k < pts_.points.size(); ++k) order_[fill[cell[k]]++] = static_cast<int>(k);
}

double ObstacleField::operator()(const Point& x) const {
  double v = 0.0;
  for_each_near(x, [&](const Point& c) { v = std::max(v, shape_((x - c).norm())); });
  return v;
}

// ---------------------------------------------------------------- restriction

Restriction Restriction::rectangle(const Rect& q) {
  if (!(q.width() >= 0.0 && q.height() >= 0.0))
    throw ParameterError("restriction: empty rectangle");
  return Restriction(q);
}

Restriction Restriction::node_set(const GridSet& q) {
  if (q.empty()) throw ParameterError("restriction: empty region");
  return Restriction(NodeSet{q.grid, std::make_shared<const ArrayXXd>(distance_to(q))});
}

double Restriction::distance(const Point& x) const {
  if (const auto* r = std::get_if<Rect>(&shape_)) return r->distance(x);
  const auto& ns = std::get<NodeSet>(shape_);
  const Grid2D& g = ns.grid;
  const Point q = (x - g.origin) / g.dx;
  if (q.x() < -1e-9 || q.y() < -1e-9 || q.x() > g.nx - 1 + 1e-9 || q.y() > g.ny - 1 + 1e-9)
    throw DomainError("restriction distance queried outside its grid");
  const int i = std::clamp(static_cast<int>(std::floor(q.x())), 0, g.nx - 2);
  const int j = std::clamp(static_cast<int>(std::floor(q.y())), 0, g.ny - 2);
  const double s = q.x() - i;
  const double t = q.y() - j;
  const ArrayXXd& d = *ns.dist;
  return (1 - s) * (1 - t) * d(i, j) + s * (1 - t) * d(i + 1, j) + (1 - s) * t * d(i, j + 1) +
         s * t * d(i + 1, j + 1);
}

ArrayXXd Restriction::distance_on(const Grid2D& g) const {
  if (const auto* ns = std::get_if<NodeSet>(&shape_); ns && ns->grid == g) return *ns->dist;
  ArrayXXd d(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) d(i, j) = distance(g.node(i, j));
  return d;
}

// ---------------------------------------------------------------- field

CoefficientField CoefficientField::uniform(double a, double f_uni) {
  if (!(a >= 0.0)) throw ParameterError("curvature coefficient must be >= 0");
  CoefficientField f;
  f.a_ = a;
  f.f_uni_ = f_uni;
  f.c1a_ = a;
  f.c1f_ = std::abs(f_uni);
  return f;
}

CoefficientField CoefficientField::with_obstacles(double a, double f_uni, ObstacleShape shape,
                                                  PoissonPoints pts) {
  CoefficientField f = uniform(a, f_uni);
  f.c1f_ = std::max({std::abs(f_uni), std::abs(f_uni - shape.peak()), shape.lipschitz()});
  f.domain_ = pts.padded();
  f.obstacles_ = std::make_shared<const ObstacleField>(std::move(shape), std::move(pts));
  return f;
}

CoefficientField CoefficientField::with_bounds(double c1a, double c1f) const {
  CoefficientField f = *this;
  if (c1a < c1a_ || c1f < c1f_)
    throw ParameterError("field bounds must dominate the intrinsic bounds");
  f.c1a_ = c1a;
  f.c1f_ = c1f;
  return f;
}

CoefficientField CoefficientField::with_domain(const Rect& d) const {
  CoefficientField f = *this;
  f.domain_ = d;
  return f;
}

double CoefficientField::amplitude_factor(double d) {
  if (d <= 2.0 / 3.0) return 1.0;
  if (d >= 1.0) return 0.0;
  return 3.0 * (1.0 - d);
}

double CoefficientField::blend_forcing(double f, double d) const {
  const double trap = trap_forcing();
  if (d <= 0.0) return f;
  if (d >= 1.0 / 3.0) return -trap;
  return 3.0 * (1.0 / 3.0 - d) * f - 3.0 * d * trap;
}

double CoefficientField::eval_curvature(const Point& x) const {
  if (!restriction_) return a_;
  const double s = amplitude_factor(restriction_->distance(x));
  return a_ * s * s;
}

double CoefficientField::unrestricted_forcing(const Point& x) const {
  if (domain_ && !domain_->expanded(1e-9).contains(x))
    throw DomainError("forcing evaluated outside the field domain");
  const double obst = obstacles_ ? (*obstacles_)(x) : 0.0;
  return f_uni_ - obst + shift_;
}

double CoefficientField::eval_forcing(const Point& x) const {
  if (!restriction_) return unrestricted_forcing(x);
  const double d = restriction_->distance(x);
  if (d >= 1.0 / 3.0) return -trap_forcing();
  return blend_forcing(unrestricted_forcing(x), d);
}

CoefficientField restrict(const CoefficientField& field, Restriction q) {
  CoefficientField f = field;
  f.restriction_ = std::move(q);
  return f;
}

CoefficientField shift_forcing(const CoefficientField& field, double df) {
  CoefficientField f = field;
  f.shift_ += df;
  return f;
}

SampledField sample(const CoefficientField& field, const Grid2D& grid) {
  SampledField s;
  s.grid = grid;
  s.a = ArrayXXd::Constant(grid.nx, grid.ny, field.a());

  ArrayXXd obst = ArrayXXd::Zero(grid.nx, grid.ny);
  if (const auto& of = field.obstacles()) {
    const double dx = grid.dx;
    for (const Point& c : of->points().points) {
      const int i0 = std::max(0, static_cast<int>(std::ceil((c.x() - 1.0 - grid.origin.x()) / dx)));
      const int i1 = std::min(grid.nx - 1, static_cast<int>(std::floor((c.x() + 1.0 - grid.origin.x()) / dx)));
      const int j0 = std::max(0, static_cast<int>(std::ceil((c.y() - 1.0 - grid.origin.y()) / dx)));
      const int j1 = std::min(grid.ny - 1, static_cast<int>(std::floor((c.y() + 1.0 - grid.origin.y()) / dx)));
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i)
          obst(i, j) = std::max(obst(i, j), of->shape()((grid.node(i, j) - c).norm()));
    }
  }

  std::optional<ArrayXXd> dist;
  if (field.restriction()) dist = field.restriction()->distance_on(grid);
  const auto& dom = field.domain();
  const Rect inside = dom ? dom->expanded(1e-9) : Rect{};

  s.f.resize(grid.nx, grid.ny);
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const double d = dist ? (*dist)(i, j) : 0.0;
      if (dist && d >= 1.0 / 3.0) {
        s.f(i, j) = -field.trap_forcing();
        continue;
      }
      if (dom && !inside.contains(grid.node(i, j)))
        throw DomainError("sampling grid extends beyond the field domain");
      const double f = field.f_uni() - obst(i, j) + field.forcing_shift();
      s.f(i, j) = dist ? field.blend_forcing(f, d) : f;
    }
  }
  if (dist) {
    for (Eigen::Index k = 0; k < s.a.size(); ++k) {
      const double t = CoefficientField::amplitude_factor((*dist)(k));
      s.a(k) = field.a() * t * t;
    }
  }
  s.a_max = s.a.maxCoeff();
  s.f_max = s.f.abs().maxCoeff();
  return s;
}

CoefficientField FieldConfig::realize(const Rect& domain, std::uint64_t index) const {
  CoefficientField f = CoefficientField::uniform(a, f_uni);
  if (intensity > 0.0 || !extra_points.empty()) {
    PoissonPoints pts =
        sample_poisson(domain, intensity, 1.0, derive_seed(seed, index, StreamTag::Obstacles));
    pts.points.insert(pts.points.end(), extra_points.begin(), extra_points.end());
    f = CoefficientField::with_obstacles(a, f_uni, shape, std::move(pts));
  } else {
    f = f.with_domain(domain.expanded(1.0));
  }
  if (c1a > 0.0 || c1f > 0.0)
    f = f.with_bounds(std::max(c1a, f.c1a()), std::max(c1f, f.c1f()));
  return delta_f != 0.0 ? shift_forcing(f, delta_f) : f;
}

bool FieldConfig::same_family(const FieldConfig& o) const {
  return a == o.a && f_uni == o.f_uni && delta_f == o.delta_f && intensity == o.intensity &&
         shape.kind() == o.shape.kind() && shape.peak() == o.shape.peak() &&
         shape.samples() == o.shape.samples() && seed == o.seed && c1a == o.c1a && c1f == o.c1f &&
         extra_points.size() == o.extra_points.size();
}

}  // namespace curvelab
