#pragma once

#include <Eigen/Dense>
#include <array>
#include <memory>
#include <string>
#include <vector>

#include "hoferlab/expr.hpp"
#include "hoferlab/hofer.hpp"

namespace hoferlab {

/// The isotopy psi_t of the plane generated by a small function F through the
/// midpoint chart: X = x + t J grad F((x + X)/2), J grad F = (-F_y, F_x).
/// Every critical point of F is fixed for all t.
class WeinsteinIsotopy {
 public:
  WeinsteinIsotopy(expr::ScalarField F, Box box);
  static WeinsteinIsotopy parse(std::string_view text, Box box);

  const expr::ScalarField& generating() const { return F_; }
  const Box& box() const { return box_; }
  double F(const Eigen::Vector2d& x) const;
  Eigen::Vector2d grad(const Eigen::Vector2d& x) const;
  Eigen::Matrix2d hess(const Eigen::Vector2d& x) const;

  Eigen::Vector2d map(const Eigen::Vector2d& x, double t) const;
  Eigen::Vector2d inverse(const Eigen::Vector2d& y, double t) const { return map(y, -t); }
  Eigen::Matrix2d jacobian(const Eigen::Vector2d& x, double t) const;
  /// d/dt psi_t at psi_t^{-1}(y).
  Eigen::Vector2d velocity(const Eigen::Vector2d& y, double t) const;

  /// Solves m = x + s J grad F(m); throws NewtonDiverged.
  Eigen::Vector2d midpoint(const Eigen::Vector2d& x, double s) const;

 private:
  expr::ScalarField F_;
  Box box_;
};

/// Hamiltonian of the isotopy, H_t(q) = integral of dH_t along the segment
/// from a base point, where dH_t = (-V_2, V_1) for the velocity V. The
/// base is the fixed minimum, so inf H_t = 0.
class IsotopyHamiltonian final : public PathFunction {
 public:
  IsotopyHamiltonian(std::shared_ptr<const WeinsteinIsotopy> iso, Eigen::Vector2d base, int nodes = 16,
                     int panels = 4);
  double value(const Eigen::Vector3d& p, double t) const override;
  Eigen::Vector3d gradient(const Eigen::Vector3d& p, double t) const override;
  bool autonomous() const override { return false; }
  std::string text() const override;

 private:
  std::shared_ptr<const WeinsteinIsotopy> iso_;
  Eigen::Vector2d base_;
  int nodes_;
  int panels_;
};

/// max |Phi^*(-d lambda_can) - (-omega + omega)| for the linear chart
/// ((q, p), (Q, P)) -> (((q + Q)/2, (p + P)/2), (P - p, q - Q)).
double chart_symplectic_residual();

enum class ArcShape { Straight, BendLeft, BendRight };

/// Area swept by psi_t(gamma), 0 <= t <= 1, for an arc gamma between two
/// fixed points. Throws EndpointNotFixed unless both ends are critical.
double swept_area(const WeinsteinIsotopy& iso, const Eigen::Vector2d& q1, const Eigen::Vector2d& q2,
                  ArcShape shape, int nodes = 16, int cells = 4);

struct FlatnessOptions {
  int line_nodes = 16;
  int line_panels = 4;
  double fixed_tol = 1e-9;  // |grad F| at arc endpoints
  int chart_samples = 200;
};

struct FlatnessReport {
  std::string name;
  double osc_F = 0.0;
  double length = 0.0;
  double length_error = 0.0;  // |L(H) - osc F|
  Eigen::Vector2d argmin = Eigen::Vector2d::Zero();
  Eigen::Vector2d argmax = Eigen::Vector2d::Zero();
  double F_difference = 0.0;  // F(argmax) - F(argmin)
  std::array<double, 3> swept{};
  double swept_spread = 0.0;
  double swept_error = 0.0;      // |swept - F_difference|
  double time_curve_error = 0.0; // |int (H_t(q1) - H_t(q2)) dt - F_difference|
  bool fixed_extrema = false;
  double det_defect = 0.0;  // max |det D psi_t - 1|
  double chart_residual = 0.0;
  HamiltonianPath path;
};

FlatnessReport flatness_check(const std::string& name, const std::string& text, const Box& box,
                              const FlatnessOptions& opt = {});

}  // namespace hoferlab
