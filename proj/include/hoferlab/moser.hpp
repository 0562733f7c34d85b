#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <string>
#include <vector>

namespace hoferlab {

/// A 2-form on a box in R^4 with coordinates (x1, x2, u, v), stored on a
/// uniform grid that includes the faces. Components are ordered
/// (x1x2, x1u, x1v, x2u, x2v, uv).
class DiscreteTwoForm {
 public:
  static constexpr int kComponents = 6;
  using Components = std::array<double, kComponents>;

  DiscreteTwoForm() = default;
  DiscreteTwoForm(int n, Eigen::Vector4d lo, Eigen::Vector4d hi);

  /// Samples a closed-form 2-form at every grid point.
  static DiscreteTwoForm sample(int n, const Eigen::Vector4d& lo, const Eigen::Vector4d& hi,
                                const std::function<Components(const Eigen::Vector4d&)>& f);

  int n() const { return n_; }
  const Eigen::Vector4d& lo() const { return lo_; }
  const Eigen::Vector4d& hi() const { return hi_; }
  double spacing(int axis) const { return (hi_[axis] - lo_[axis]) / (n_ - 1); }
  std::size_t points() const { return std::size_t(n_) * n_ * n_ * n_; }
  std::size_t index(int i, int j, int k, int l) const {
    return ((std::size_t(i) * n_ + j) * n_ + k) * n_ + l;
  }
  Eigen::Vector4d point(std::size_t idx) const;
  Eigen::Vector4d point(int i, int j, int k, int l) const;

  double& at(std::size_t idx, int c) { return data_[idx * kComponents + c]; }
  double at(std::size_t idx, int c) const { return data_[idx * kComponents + c]; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  /// Multilinear interpolation (clamped to the box).
  Components interpolate(const Eigen::Vector4d& p) const;
  /// Antisymmetric matrix T with T(a, b) = tau(e_a, e_b).
  static Eigen::Matrix4d matrix(const Components& c);
  static double pfaffian(const Components& c);

  /// Largest component of the discrete exterior derivative at interior points.
  double closedness_residual() const;

  /// Binary dump: "HLGRID01", uint32 ndim, uint32 ncomp, uint64 dims[4],
  /// double lo[4], double hi[4], then doubles row-major (point, component).
  void write(const std::string& path) const;
  static DiscreteTwoForm read(const std::string& path);

 private:
  int n_ = 0;
  Eigen::Vector4d lo_ = Eigen::Vector4d::Zero();
  Eigen::Vector4d hi_ = Eigen::Vector4d::Ones();
  std::vector<double> data_;
};

struct MoserOptions {
  int time_steps = 20;
  double tolerance = 5e-2;  // ResidualTooLarge above this
  std::vector<double> positivity_times{0.0, 0.25, 0.5, 0.75, 1.0};
};

struct MoserResult {
  double residual = 0.0;          // max |h1^* tau_1 - tau_0| at interior points
  double rho_min = 0.0;           // disc restriction of tau_1
  double pfaffian_min = 0.0;      // over the positivity chain
  double fiber_restriction = 0.0; // max |tau_x1x2 - tau_x1x2(lo)|
  double closedness = 0.0;
  double boundary_displacement = 0.0;
  double max_displacement = 0.0;
  std::vector<Eigen::Vector4d> images;  // h1 at every grid point
};

/// Moves tau to the split form tau_0 = omega + du^dv by the Moser isotopy of
/// tau_t = tau_0 + t (tau - tau_0). Throws NondegeneracyFailed and
/// ResidualTooLarge.
MoserResult moser_split(const DiscreteTwoForm& tau, const MoserOptions& opt = {});

/// tau_0 + d(g du + k dv) sampled on [-1, 1]^4, with g and k of size
/// `amplitude` times a product of cos^4 lobes. With rho_dip > 0 the disc
/// component is lowered by rho_dip cos^4(pi u/2) cos^4(pi v/2); positivity
/// fails once rho_dip exceeds about 1.
DiscreteTwoForm moser_test_form(int n, double amplitude = 0.1, double rho_dip = 0.0);

}  // namespace hoferlab
