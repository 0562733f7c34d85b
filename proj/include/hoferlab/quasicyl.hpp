#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "hoferlab/hofer.hpp"

namespace hoferlab {

/// Window w(t) = S(t/eta) S((1-t)/eta) with S the quintic smoothstep; its
/// integral over [0, 1] is 1 - eta.
double thickening_window(double t, double eta);

/// One side of the thickened graph of H: under = {lambda <= s <= H_t},
/// over = {H_t <= s <= mu_H(t)}, with H normalised.
struct GraphRegion {
  HamiltonianPath H;
  double nu = 0.0;
  double eta = 0.1;
  double delta = 0.0;  // ramp height, (nu/2)/(1 - eta)
  bool over = false;

  double lambda(double t) const { return -delta * thickening_window(t, eta); }
  double mu(double t) const { return H.oscillation(t) + delta * thickening_window(t, eta); }
  double lower(const Eigen::Vector3d& x, double t) const;
  double upper(const Eigen::Vector3d& x, double t) const;
  /// Area added by the ramp, nu/2 up to quadrature.
  double thickening_area() const;
};

struct Thickening {
  GraphRegion under;
  GraphRegion over;
  /// area(U_H) = int (mu_H - lambda) dt
  double disc_area = 0.0;
};

Thickening thicken(const HamiltonianPath& H, double nu, double eta = 0.1);

enum class GlueOrientation { HK, KH };

struct GlueOptions {
  int steps = 200;  // fixed flow steps used by the gluing map
  bool check_endpoints = true;
  int endpoint_grid = 8;
  double endpoint_tol = 1e-6;
};

/// R_{H,K}(nu): the graph region of K glued to that of H along
/// f_t = phi_t o psi_t^{-1}.
class QuasiCylinder {
 public:
  QuasiCylinder(HamiltonianPath H, HamiltonianPath K, double nu, GlueOrientation o,
                const GlueOptions& opt);

  const HamiltonianPath& H() const { return H_; }
  const HamiltonianPath& K() const { return K_; }
  double nu() const { return nu_; }
  GlueOrientation orientation() const { return orient_; }
  /// True when both paths share the same function, so f_t is the identity.
  bool identical() const { return identical_; }
  double endpoint_mismatch() const { return endpoint_mismatch_; }

  /// f_t(x) = phi_t(psi_t^{-1}(x)) and its inverse.
  Eigen::Vector3d f(const Eigen::Vector3d& x, double t) const;
  Eigen::Vector3d f_inverse(const Eigen::Vector3d& y, double t) const;
  /// F_t(y) = H_t(y) - K_t(psi_t phi_t^{-1} y), normalised values.
  double F(const Eigen::Vector3d& y, double t) const;

  /// Phi(x, s, t) = (f_t(x), s - K_t(x) + H_t(f_t x), t) with raw values; the
  /// normalisation shifts s by a function of t only.
  Eigen::Vector4d map(const Eigen::Vector4d& q) const;
  Eigen::Vector4d map_inverse(const Eigen::Vector4d& q) const;

  /// Value of the fibre-disc area far from the supports:
  /// L(K) + nu + int (min K_t - min H_t) dt.
  double declared_area() const;
  /// Area of the disc over x: int (top - lambda) dt plus the area swept by
  /// the loop t -> f_t(x).
  double fiber_area(const Eigen::Vector3d& x) const;

 private:
  double shift_integral() const;

  HamiltonianPath H_, K_;
  double nu_;
  GlueOrientation orient_;
  GlueOptions opt_;
  bool identical_ = false;
  double endpoint_mismatch_ = 0.0;
  mutable double shift_ = 0.0;
  mutable bool shift_ready_ = false;
};

/// Glues in the HK orientation; throws EndpointMismatch unless the time-1
/// maps agree on a test grid.
QuasiCylinder glue(const HamiltonianPath& H, const HamiltonianPath& K, double nu,
                   const GlueOptions& opt = {});

struct SymplecticReport {
  double max_residual = 0.0;
  int samples = 0;
  Eigen::Vector4d worst = Eigen::Vector4d::Zero();
};

SymplecticReport verify_gluing_symplectic(const QuasiCylinder& Q, int samples = 1000,
                                          double fd_step = 1e-5);
/// Same check for an arbitrary map of (x1, x2, s, t) with form
/// scale dx1^dx2 + ds^dt.
SymplecticReport verify_symplectic_map(const std::function<Eigen::Vector4d(const Eigen::Vector4d&)>& map,
                                       const Box& box, double scale, int samples = 1000,
                                       double fd_step = 1e-5);

struct AreaReport {
  double area = 0.0;  // mean over fibres
  double declared = 0.0;
  double max_deviation = 0.0;
  std::vector<Eigen::Vector3d> points;
  std::vector<double> fiber_areas;
  double calabi_difference = 0.0;
};

/// Throws InconsistentArea when fibres disagree by more than 1e-4.
AreaReport area(const QuasiCylinder& Q, int fibers = 20);

struct CompareReport {
  double length_H = 0.0;
  double length_K = 0.0;
  double area_HK = 0.0;
  double area_KH = 0.0;
  double identity_error = 0.0;
  bool informational = false;
  /// Orientations whose area is below L(H).
  std::vector<std::string> shorter_sides;
  std::string note;
};

CompareReport compare(const HamiltonianPath& H, const HamiltonianPath& K, double nu, int fibers = 20,
                      const GlueOptions& opt = {});

}  // namespace hoferlab
