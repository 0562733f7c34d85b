#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hoferlab/hofer.hpp"
#include "hoferlab/orbits.hpp"

namespace hoferlab {

enum class CertificateKind { HZFunction, FiberedBall, TrapezoidMap, LocalBall };

const char* to_string(CertificateKind k);

struct Residual {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  /// Residuals with lower_bound set must be >= tolerance instead of <=.
  bool lower_bound = false;

  bool ok() const { return lower_bound ? value >= tolerance : value <= tolerance; }
};

/// A constructed embedding with its numeric evidence.
struct EmbeddingCertificate {
  CertificateKind kind = CertificateKind::HZFunction;
  double value = 0.0;
  double epsilon = 0.0;
  std::string side = "both";
  std::string path_fingerprint;
  std::vector<Residual> residuals;
  std::vector<std::string> maps;
  std::vector<std::string> provenance;
  /// Recomputes the residuals from the stored maps.
  std::function<std::vector<Residual>()> reverify;

  bool valid() const;
  const Residual* residual(const std::string& name) const;
  CapacityBound bound() const { return CapacityBound{value, to_string(kind), path_fingerprint}; }
};

// Hofer-Zehnder function --------------------------------------------------

struct ChzOptions {
  int grid = 10;    // base seeds per axis
  int levels = 10;  // fibre seeds per base point
  double horizon = 1.0;
};

/// Builds K = -H + m + rho on {0 <= rho <= H + nu/4} (rho = pi|z|^2/2),
/// smoothed to a constant outside, and checks its flow for short orbits on a
/// product seed grid. Plane and torus only.
EmbeddingCertificate chz_certificate(const HamiltonianPath& H, double nu, const ChzOptions& opt = {});

/// The smoothing profile S with S = 0 for s <= 0, S' = quintic ramp on
/// [0, sigma], S = s - sigma/2 beyond.
double chz_smoothing(double s, double sigma, int derivative = 0);

// Fibered ball in dimension 2 ---------------------------------------------

struct CgOptions {
  int grid = 50;
  int period_levels = 20;
  double fd_step = 1e-5;
  bool check_short_orbits = true;
  SeedGrid seeds{};
};

EmbeddingCertificate cg_dim2_certificate(const HamiltonianPath& H, double epsilon,
                                         const CgOptions& opt = {});

/// The base map of the construction: f(u, v) = phi_v(beta(u)) with
/// H(beta(u)) = top - u.
class LevelParametrization {
 public:
  /// Throws NoGradientPath.
  LevelParametrization(const HamiltonianPath& H, double top, double bottom,
                       const Eigen::Vector3d& from, const Eigen::Vector3d& to);

  Eigen::Vector3d beta(double u) const;
  Eigen::Vector3d f(double u, double v) const;
  double top() const { return top_; }
  double span() const { return top_ - bottom_; }

 private:
  Eigen::Vector3d descend(const Eigen::Vector3d& x, double du) const;

  HamiltonianPath H_;
  double top_;
  double bottom_;
  std::vector<Eigen::Vector3d> nodes_;
  double du_ = 0.0;
};

// Trapezoid profile maps --------------------------------------------------

enum class ProfileDirection { BallToTrapezoid, TrapezoidToBall };

struct ProfileMap {
  double a = 0.0;
  double epsilon = 0.0;
  ProfileDirection direction = ProfileDirection::BallToTrapezoid;
  std::function<Eigen::Vector2d(const Eigen::Vector2d&)> map;
  std::function<double(const Eigen::Vector2d&)> h_source;
  std::function<double(const Eigen::Vector2d&)> h_target;
  /// Whether a source point lies in the collar around the slit.
  std::function<bool(const Eigen::Vector2d&)> in_collar;
  double jacobian_defect = 0.0;         // off the collar
  double collar_jacobian_defect = 0.0;  // reported separately
  double domination_defect = 0.0;       // max h_source - h_target(map)
  double boundary_defect = 0.0;         // boundary circle vs the u = a face
  double image_area = 0.0;
  std::string provenance;
};

ProfileMap trapezoid_profile_map(double a, double epsilon, ProfileDirection dir, int grid = 200);

// Local ball ----------------------------------------------------------------

struct LocalBallOptions {
  std::vector<double> levels{0.0, 0.25, 0.5, 0.75, 1.0};
  int angles = 64;
  int times = 17;
  /// If set, the measured C^2 norm must stay below it.
  std::optional<double> c2_threshold;
};

EmbeddingCertificate local_ball_certificate(const HamiltonianPath& H, double epsilon,
                                            const LocalBallOptions& opt = {});

/// max over samples of |Hessian| entries of H_t on the support box.
double c2_norm(const HamiltonianPath& H, int grid = 24, int times = 9);

}  // namespace hoferlab
