#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "hoferlab/expr.hpp"
#include "hoferlab/quadrature.hpp"

namespace hoferlab {

enum class SurfaceKind { Plane, Torus, Sphere };

const char* to_string(SurfaceKind k);

/// Axis-aligned box in chart coordinates.
struct Box {
  double x0 = -2.0, x1 = 2.0, y0 = -2.0, y1 = 2.0;

  bool contains(double x, double y) const { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
};

/// Chart ids. Plane and torus use only Chart::Flat.
enum class Chart { Flat = 0, Cylinder = 1, NorthCap = 2, SouthCap = 3 };

/// A point in chart coordinates, with the embedded state cached.
struct SurfacePoint {
  Chart chart = Chart::Flat;
  double c1 = 0.0;
  double c2 = 0.0;
  Eigen::Vector3d ambient = Eigen::Vector3d::Zero();
};

/// Tangent vector: chart components plus the ambient representation.
struct TangentVector {
  SurfacePoint base;
  Eigen::Vector2d chart;
  Eigen::Vector3d ambient;
};

/// Two-dimensional symplectic model manifold.
///
/// The state of a point is always an Eigen::Vector3d: (x, y, 0) on the plane,
/// a lift (x, y, 0) in the universal cover for the torus (whose fundamental
/// domain is [0,1)^2), and a unit vector for the sphere.  Hamiltonians are
/// evaluated with bindings (x, y, z, t) of that state.
///
/// Sign convention: i_X w = dH.
class Surface {
 public:
  static Surface plane();
  static Surface torus(double area = 1.0);
  static Surface sphere(double area = 4.0 * M_PI);

  SurfaceKind kind() const { return kind_; }
  /// Total area, or +inf for the plane.
  double total_area() const;
  /// w = scale * (standard form): 1 on the plane, A on the torus, A/4pi on the sphere.
  double form_scale() const { return scale_; }

  expr::ParseOptions parse_options() const;
  /// Default region for searches and quadrature: [0,1]^2 for the torus,
  /// [-2,2]^2 for the plane, (theta, z) ranges for the sphere.
  Box default_box() const;

  expr::Bindings bind(const Eigen::Vector3d& p, double t) const { return {p.x(), p.y(), p.z(), t}; }

  /// X_H at the state p.
  Eigen::Vector3d vector_field(const expr::ScalarField& H, const Eigen::Vector3d& p,
                               double t) const;
  /// Same, from an already computed ambient gradient g of H.
  Eigen::Vector3d vector_field_from_gradient(const Eigen::Vector3d& g,
                                             const Eigen::Vector3d& p) const;

  /// Reprojects a state after an integrator step (sphere: normalise).
  Eigen::Vector3d project(const Eigen::Vector3d& p) const;
  /// Torus: reduce the lift to [0,1)^2. Otherwise identity.
  Eigen::Vector3d wrap(const Eigen::Vector3d& p) const;
  /// Difference q - p taking the shortest representative on the torus.
  Eigen::Vector3d difference(const Eigen::Vector3d& p, const Eigen::Vector3d& q) const;
  double distance(const Eigen::Vector3d& p, const Eigen::Vector3d& q) const {
    return difference(p, q).norm();
  }

  // Charts --------------------------------------------------------------
  SurfacePoint to_chart(const Eigen::Vector3d& p) const;
  SurfacePoint in_chart(Chart c, const Eigen::Vector3d& p) const;
  Eigen::Vector3d embed(Chart c, double c1, double c2) const;
  /// Columns d(embed)/dc1, d(embed)/dc2.
  Eigen::Matrix<double, 3, 2> chart_tangents(Chart c, double c1, double c2) const;
  /// w = density * dc1 ^ dc2.
  double density(Chart c, double c1, double c2) const;

  TangentVector hamiltonian_vector_field(const expr::ScalarField& H, const SurfacePoint& p,
                                         double t) const;
  /// w(u, v) for ambient tangent vectors at p.
  double omega(const Eigen::Vector3d& p, const Eigen::Vector3d& u, const Eigen::Vector3d& v) const;

  /// Jacobian of the chart-coordinate vector field at p (sphere by finite
  /// differences, flat charts from the symbolic Hessian).
  Eigen::Matrix2d linearization(const expr::ScalarField& H, const SurfacePoint& p, double t) const;

  // Integration ----------------------------------------------------------
  /// Integral of f over the surface (plane: over box) against w.
  quad::Result area_integral(const std::function<double(const Eigen::Vector3d&)>& f,
                             const Box& box, double abs_tol = 1e-9) const;
  quad::Result area_integral(const expr::ScalarField& f, const Box& box, double t = 0.0,
                             double abs_tol = 1e-9) const;

  /// Area of a region star-shaped about center (plane only), given as the
  /// set where inside(p) holds, within radius r_max.
  double star_region_area(const std::function<bool(const Eigen::Vector3d&)>& inside,
                          const Eigen::Vector2d& center, double r_max, int angles = 256) const;

  /// Continuous lift of a sampled torus path given in [0,1)^2.
  std::vector<Eigen::Vector2d> lift_to_cover(const std::vector<Eigen::Vector2d>& path,
                                             const Eigen::Vector2d& anchor) const;

  std::string describe() const;

 private:
  Surface(SurfaceKind k, double area, double scale) : kind_(k), area_(area), scale_(scale) {}
  SurfaceKind kind_;
  double area_;
  double scale_;
};

}  // namespace hoferlab
