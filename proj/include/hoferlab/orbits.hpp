#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hoferlab/flow.hpp"
#include "hoferlab/hofer.hpp"
#include "hoferlab/ode.hpp"

namespace hoferlab {

enum class OrbitClass { Constant, Periodic, Open };

const char* to_string(OrbitClass c);

struct OrbitWitness {
  Eigen::VectorXd seed;
  double period = 0.0;
  double residual = 0.0;
  OrbitClass classification = OrbitClass::Open;
};

/// Error carrying the orbit that made a construction refuse.
class OrbitError : public Error {
 public:
  OrbitError(ErrorKind k, const std::string& what, OrbitWitness w)
      : Error(k, what), witness_(std::move(w)) {}
  const OrbitWitness& witness() const { return witness_; }

 private:
  OrbitWitness witness_;
};

struct ReturnOptions {
  double horizon = 2.0;
  double tol = 1e-11;
  double return_tol = 1e-7;
  double time_tol = 1e-13;
};

namespace detail {

/// First return of an autonomous flow to a transversal section through x0.
/// diff(a, b) is the displacement b - a (wrapped on the torus).
template <int N>
std::optional<std::pair<double, double>> first_return(
    const std::function<ode::Vec<N>(const ode::Vec<N>&)>& field, const ode::Vec<N>& x0,
    const ReturnOptions& opt,
    const std::function<ode::Vec<N>(const ode::Vec<N>&, const ode::Vec<N>&)>& diff,
    const std::function<ode::Vec<N>(const ode::Vec<N>&)>& project = nullptr) {
  using V = ode::Vec<N>;
  const V X0 = field(x0);
  const double speed = X0.norm();
  V n = X0 / speed;
  // Rotate the normal if the flow is nearly tangent to the section.
  for (int attempt = 0; std::fabs(n.dot(X0)) < 1e-3 * speed; ++attempt) {
    if (attempt == 3) throw Error(ErrorKind::SectionDegenerate, "flow tangent to every section tried");
    V r = V::Zero();
    r[attempt % N] = 1.0;
    n = (n + 0.5 * r).normalized();
  }
  const ode::Dopri5<N> solver([&field](double, const V& y) { return field(y); });
  ode::Options<N> o;
  o.rtol = o.atol = opt.tol;
  if (project) o.project = project;
  bool armed = false;
  std::optional<std::pair<double, double>> found;
  auto side = [&](const V& y) { return n.dot(diff(x0, y)); };
  solver.integrate(0.0, opt.horizon, x0, o, [&](double tp, const V& yp, double t, const V& y) {
    const double sp = side(yp);
    const double s = side(y);
    if (s < 0.0) armed = true;
    if (!(armed && sp < 0.0 && s >= 0.0)) return true;
    double lo = 0.0, hi = t - tp;
    for (int i = 0; i < 200 && hi - lo > opt.time_tol; ++i) {
      const double mid = 0.5 * (lo + hi);
      V ym = solver.step(tp, yp, mid);
      if (project) ym = project(ym);
      (side(ym) < 0.0 ? lo : hi) = mid;
    }
    V ystar = solver.step(tp, yp, 0.5 * (lo + hi));
    if (project) ystar = project(ystar);
    const double residual = diff(x0, ystar).norm();
    if (residual < opt.return_tol) {
      found = std::make_pair(tp + 0.5 * (lo + hi), residual);
      return false;
    }
    return true;
  });
  return found;
}

}  // namespace detail

/// Classifies the orbit through x0 of an autonomous H.
OrbitWitness classify_orbit(const HamiltonianPath& H, const Eigen::Vector3d& x0,
                            const ReturnOptions& opt = {});

/// First return time to x0, or none if the orbit is constant or does not
/// return within the horizon.
std::optional<double> minimal_positive_period(const HamiltonianPath& H, const Eigen::Vector3d& x0,
                                              const ReturnOptions& opt = {});

struct SeedGrid {
  int grid = 40;
  int random = 200;
  /// Region covered; defaults to the path's support box.
  std::optional<Box> box;
};

std::vector<Eigen::Vector3d> seed_points(const HamiltonianPath& H, const SeedGrid& g);

struct ShortOrbitReport {
  std::optional<OrbitWitness> witness;
  int seeds = 0;
  int nonconstant_seeds = 0;
  std::string note;
};

ShortOrbitReport short_orbit_scan(const HamiltonianPath& H, double horizon = 1.0,
                                  const SeedGrid& g = {});
std::optional<OrbitWitness> has_short_orbit(const HamiltonianPath& H, double horizon = 1.0,
                                            const SeedGrid& g = {});

/// Smallest t in (0, horizon) where M(t) fixes a vector whose linear orbit
/// is non-constant.
std::optional<double> linearized_short_orbit(const LinearizedFlow& lf, double horizon = 1.0);

/// 2 pi r / |dH/dr| for a radial autonomous H on the plane, evaluated on the x axis.
double radial_period(const HamiltonianPath& H, double r);

struct RigidityReport {
  std::optional<double> linear_period;
  std::optional<OrbitWitness> witness;
  std::string verdict;  // "criterion silent", "witness found", "sampling gap"
};

RigidityReport rigidity_probe(const HamiltonianPath& H, const Eigen::Vector3d& p,
                              double horizon = 1.0, const SeedGrid& g = {});

}  // namespace hoferlab
