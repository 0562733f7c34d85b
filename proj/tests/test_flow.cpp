#include <cmath>

#include "hoferlab/catalog.hpp"
#include "hoferlab/flow.hpp"
#include "support.hpp"

using namespace hoferlab;
using Eigen::Vector3d;

TEST_CASE("harmonic oscillator matches the rotation formula") {
  const HamiltonianPath H = HamiltonianPath::parse(Surface::plane(), "0.5*(x^2 + y^2)");
  const Vector3d x0(0.8, -0.3, 0.0);
  for (double t : {0.3, 1.0, 2.7}) {
    const Vector3d y = flow_point(H, x0, 0.0, t);
    // X = (y, -x): clockwise rotation
    CHECK(y.x() == doctest::Approx(x0.x() * std::cos(t) + x0.y() * std::sin(t)).epsilon(1e-9));
    CHECK(y.y() == doctest::Approx(-x0.x() * std::sin(t) + x0.y() * std::cos(t)).epsilon(1e-9));
  }
}

TEST_CASE("autonomous flows conserve energy") {
  const HamiltonianPath H = catalog::quartic();
  const Trajectory tr = integrate_flow(H, Vector3d(0.4, 0.1, 0.0), 0.0, 1.0, 1e-11);
  CHECK(tr.autonomous);
  CHECK(tr.max_drift < 1e-9);
}

TEST_CASE("sphere height flow has period 1") {
  const HamiltonianPath H = catalog::sphere_height(4.0);
  const Vector3d p = Vector3d(0.6, 0.0, 0.8);
  CHECK((flow_point(H, p, 0.0, 1.0) - p).norm() < 1e-8);
  const Vector3d q = flow_point(H, p, 0.0, 0.25);
  CHECK(q.z() == doctest::Approx(0.8));
  CHECK(std::fabs(q.x()) < 1e-8);
}

TEST_CASE("flow maps preserve area") {
  const HamiltonianPath H = catalog::traveling_bump();
  std::vector<Vector3d> pts{{0.1, 0.2, 0.0}, {-0.4, 0.3, 0.0}, {0.5, -0.2, 0.0}};
  for (const FlowMapSample& m : flow_map(H, 1.0, pts)) CHECK(std::fabs(m.area_defect) < 1e-6);
}

TEST_CASE("fixed-step and adaptive flows agree") {
  const HamiltonianPath H = catalog::traveling_bump();
  const Vector3d x0(0.3, 0.1, 0.0);
  CHECK((flow_point_fixed(H, x0, 0.0, 1.0, 400) - flow_point(H, x0, 0.0, 1.0)).norm() < 1e-8);
}

TEST_CASE("trajectory CSV") {
  const HamiltonianPath H = catalog::sphere_height(4.0);
  const Trajectory tr = integrate_flow(H, Vector3d(0, 0.6, 0.8), 0.0, 0.5);
  const std::string csv = tr.to_csv(H.surface());
  CHECK(csv.rfind("t,", 0) == 0);
  CHECK(thrown_kind([&] { integrate_flow(H, Vector3d(0, 0.6, 0.8), 0.0, 0.5, -1.0); }) == ErrorKind::PreconditionFailed);
}
