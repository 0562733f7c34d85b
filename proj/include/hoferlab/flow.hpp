#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "hoferlab/hofer.hpp"
#include "hoferlab/ode.hpp"

namespace hoferlab {

struct Trajectory {
  std::vector<double> t;
  std::vector<Eigen::Vector3d> y;
  double tol = 0.0;
  /// max |H(y) - H(y0)| along the samples; only meaningful for autonomous H.
  double max_drift = 0.0;
  bool autonomous = false;

  const Eigen::Vector3d& end() const { return y.back(); }
  /// Columns t, chart, c1, c2 (and ax, ay, az on the sphere).
  std::string to_csv(const Surface& s) const;
};

/// Adaptive DOPRI5 flow of X_{H_t} from x0 over [t0, t1] (t1 < t0 allowed).
/// On the torus the state stays in the universal cover.
Trajectory integrate_flow(const HamiltonianPath& H, const Eigen::Vector3d& x0, double t0, double t1,
                          double tol = 1e-10, bool record = true);

/// Endpoint only.
Eigen::Vector3d flow_point(const HamiltonianPath& H, const Eigen::Vector3d& x0, double t0,
                           double t1, double tol = 1e-11);

/// Fixed-step RK flow (n steps); smooth in x0, used for finite-difference maps.
Eigen::Vector3d flow_point_fixed(const HamiltonianPath& H, const Eigen::Vector3d& x0, double t0,
                                 double t1, int n);

struct FlowMapSample {
  Eigen::Vector3d start;
  Eigen::Vector3d end;
  double time = 0.0;
  /// Chart Jacobian d(end)/d(start) by central differences.
  Eigen::Matrix2d jacobian = Eigen::Matrix2d::Identity();
  /// det(J) * density(end) / density(start) - 1.
  double area_defect = 0.0;
};

std::vector<FlowMapSample> flow_map(const HamiltonianPath& H, double t,
                                    const std::vector<Eigen::Vector3d>& points, double tol = 1e-12,
                                    double fd_step = 1e-5);

/// Chart-coordinate linearisation A(t) of X_{H_t} at a point.
Eigen::Matrix2d linearize_field(const HamiltonianPath& H, const Eigen::Vector3d& p, double t);

struct LinearizedFlow {
  Eigen::Vector3d p;
  std::vector<double> t;
  std::vector<Eigen::Matrix2d> M;
  double max_det_defect = 0.0;
  std::function<Eigen::Matrix2d(double)> A;

  /// M(s) for any s in the span, integrated from the nearest stored sample.
  Eigen::Matrix2d at(double s) const;
};

/// Throws NotFixed if |X_{H_t}(p)| >= 1e-10 at a sampled time.
LinearizedFlow linearized_monodromy(const HamiltonianPath& H, const Eigen::Vector3d& p, double t0,
                                    double t1, int samples = 201);

}  // namespace hoferlab
