#pragma once

#include "curvelab/grid.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace curvelab {

/// Radial obstacle profile phi on [0, 1], zero from s = 1 on.
class ObstacleShape {
 public:
  enum class Kind { Cone, Plateau, Table };

  /// phi(s) = peak * (1 - s).
  static ObstacleShape cone(double peak);
  /// peak on [0, 1/2], linear down to 0 at s = 1.
  static ObstacleShape plateau(double peak);
  /// Piecewise-linear through samples taken uniformly on [0, 1]; the last
  /// sample must be 0.
  static ObstacleShape table(std::vector<double> samples);
  /// Whitespace-separated samples from a text file.
  static ObstacleShape load_table(const std::string& path);

  double operator()(double s) const;

  Kind kind() const { return kind_; }
  double peak() const { return peak_; }
  double lipschitz() const { return lipschitz_; }
  const std::vector<double>& samples() const { return samples_; }

 private:
  ObstacleShape(Kind k, double peak, double lip, std::vector<double> samples = {})
      : kind_(k), peak_(peak), lipschitz_(lip), samples_(std::move(samples)) {}

  Kind kind_;
  double peak_;
  double lipschitz_;
  std::vector<double> samples_;
};

struct PoissonPoints {
  std::vector<Point> points;
  double intensity = 0.0;
  Rect domain;
  double pad = 1.0;
  std::uint64_t seed = 0;

  /// Region the points are drawn from: domain grown by pad.
  Rect padded() const { return domain.expanded(pad); }
};

/// Homogeneous Poisson process of the given intensity on domain + pad.
PoissonPoints sample_poisson(const Rect& domain, double intensity, double pad,
                             std::uint64_t seed);

/// Centres at most `spacing` apart on a circle. Appended to Poisson points
/// they form a deterministic pinning ring.
std::vector<Point> ring_points(const Point& c, double radius, double spacing);

/// Brute-force max_i phi(|x - X_i|); the reference the hashed lookup is
/// tested against.
double eval_obstacle(const ObstacleShape& shape, const PoissonPoints& pts, const Point& x);

/// Obstacle configuration with a unit-cell spatial hash for O(1) lookups.
class ObstacleField {
 public:
  ObstacleField(ObstacleShape shape, PoissonPoints pts);

  double operator()(const Point& x) const;

  const ObstacleShape& shape() const { return shape_; }
  const PoissonPoints& points() const { return pts_; }

  /// Calls f(point) for every obstacle centre in the unit cells around x.
  template <typename F>
  void for_each_near(const Point& x, F&& f) const {
    const int ci = cell_x(x.x());
    const int cj = cell_y(x.y());
    for (int b = std::max(cj - 1, 0); b <= std::min(cj + 1, ncy_ - 1); ++b)
      for (int a = std::max(ci - 1, 0); a <= std::min(ci + 1, ncx_ - 1); ++a) {
        const int c = a + ncx_ * b;
        for (int k = start_[c]; k < start_[c + 1]; ++k) f(pts_.points[order_[k]]);
      }
  }

 private:
  int cell_x(double x) const { return static_cast<int>(std::floor(x - base_.x())); }
  int cell_y(double y) const { return static_cast<int>(std::floor(y - base_.y())); }

  ObstacleShape shape_;
  PoissonPoints pts_;
  Point base_;
  int ncx_ = 0;
  int ncy_ = 0;
  std::vector<int> start_;
  std::vector<int> order_;
};

/// Region Q a field can be restricted to: an analytic rectangle or a node
/// set with its distance transform.
class Restriction {
 public:
  static Restriction rectangle(const Rect& q);
  static Restriction node_set(const GridSet& q);

  /// dist(x, Q); for node sets, exact at nodes and bilinear in between.
  double distance(const Point& x) const;
  /// dist(node, Q) on a grid; exact when the grid is the node set's own.
  ArrayXXd distance_on(const Grid2D& g) const;

  bool is_rectangle() const { return std::holds_alternative<Rect>(shape_); }
  const Rect& rect() const { return std::get<Rect>(shape_); }

 private:
  struct NodeSet {
    Grid2D grid;
    std::shared_ptr<const ArrayXXd> dist;
  };
  explicit Restriction(std::variant<Rect, NodeSet> s) : shape_(std::move(s)) {}
  std::variant<Rect, NodeSet> shape_;
};

/// Isotropic, spatially constant curvature coefficient a and forcing
/// F(x) = F_uni - F_obst(x) + dF, optionally restricted to a region Q.
class CoefficientField {
 public:
  /// Obstacle-free field. Bounds default to the smallest admissible values.
  static CoefficientField uniform(double a, double f_uni);
  static CoefficientField with_obstacles(double a, double f_uni, ObstacleShape shape,
                                         PoissonPoints pts);

  /// Overrides (C_1A, C_1F); they must dominate the intrinsic bounds.
  CoefficientField with_bounds(double c1a, double c1f) const;
  /// Fields without obstacles accept any x unless a domain is set.
  CoefficientField with_domain(const Rect& d) const;

  double a() const { return a_; }
  double f_uni() const { return f_uni_; }
  double c1a() const { return c1a_; }
  double c1f() const { return c1f_; }
  double forcing_shift() const { return shift_; }
  /// max{C_1F, 6 C_1A}: the magnitude of the trapping forcing outside Q.
  double trap_forcing() const { return std::max(c1f_, 6.0 * c1a_); }
  const std::optional<Restriction>& restriction() const { return restriction_; }
  const std::shared_ptr<const ObstacleField>& obstacles() const { return obstacles_; }
  const std::optional<Rect>& domain() const { return domain_; }

  /// Curvature coefficient at x (a times the squared amplitude taper).
  double eval_curvature(const Point& x) const;
  /// Forcing at x including shift and restriction blend. Throws DomainError
  /// when the unblended value is needed outside the field's domain.
  double eval_forcing(const Point& x) const;
  /// F_uni - F_obst(x) + dF, ignoring any restriction.
  double unrestricted_forcing(const Point& x) const;

  /// Taper applied to sqrt(a) at distance d from Q.
  static double amplitude_factor(double d);
  /// Restriction blend of the (shifted) forcing value f at distance d from Q.
  double blend_forcing(double f, double d) const;

  friend CoefficientField restrict(const CoefficientField& field, Restriction q);
  friend CoefficientField shift_forcing(const CoefficientField& field, double df);

 private:
  CoefficientField() = default;

  double a_ = 0.0;
  double f_uni_ = 0.0;
  double c1a_ = 0.0;
  double c1f_ = 0.0;
  double shift_ = 0.0;
  std::shared_ptr<const ObstacleField> obstacles_;
  std::optional<Restriction> restriction_;
  std::optional<Rect> domain_;
};

/// Copy of the field restricted to Q; the input is left untouched.
CoefficientField restrict(const CoefficientField& field, Restriction q);
/// Copy of the field with forcing raised by df (shifts accumulate).
CoefficientField shift_forcing(const CoefficientField& field, double df);

/// Parameters of a random field family; one realization per ensemble index.
struct FieldConfig {
  double a = 1.0;
  double f_uni = 1.0;
  double delta_f = 0.0;
  double intensity = 0.0;
  ObstacleShape shape = ObstacleShape::cone(1.0);
  std::uint64_t seed = 0;
  /// Obstacle centres added to every realization (pinning rings).
  std::vector<Point> extra_points;
  /// Bound overrides; values <= 0 keep the intrinsic bounds.
  double c1a = 0.0;
  double c1f = 0.0;

  /// Realization `index` on domain (obstacles drawn on domain + 1).
  CoefficientField realize(const Rect& domain, std::uint64_t index) const;
  bool same_family(const FieldConfig& o) const;
};

/// Coefficients evaluated at the nodes of a grid, the form the solver uses.
struct SampledField {
  Grid2D grid;
  ArrayXXd a;
  ArrayXXd f;
  double a_max = 0.0;
  double f_max = 0.0;  // max |F| over the nodes
};

SampledField sample(const CoefficientField& field, const Grid2D& grid);

}  // namespace curvelab
