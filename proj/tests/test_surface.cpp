#include <cmath>

#include "hoferlab/surface.hpp"
#include "support.hpp"

using namespace hoferlab;
using Eigen::Vector2d;
using Eigen::Vector3d;

TEST_CASE("areas") {
  CHECK(Surface::sphere(4.0).total_area() == doctest::Approx(4.0));
  CHECK(Surface::torus(2.5).total_area() == doctest::Approx(2.5));
  const Surface s = Surface::sphere(4.0);
  CHECK(s.area_integral([](const Vector3d&) { return 1.0; }, s.default_box()).value == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("omega(X_H, v) = dH(v) on the sphere") {
  const Surface s = Surface::sphere(4.0);
  const auto H = expr::ScalarField::parse("2*z + x*y");
  const Vector3d p = Vector3d(0.3, -0.5, 0.6).normalized();
  const Vector3d X = s.vector_field(H, p, 0.0);
  CHECK(std::fabs(X.dot(p)) < 1e-14);
  Vector3d v = Vector3d(0.2, 0.9, -0.4);
  v -= v.dot(p) * p;
  const Vector3d g(p.y(), p.x(), 2.0);  // ambient gradient
  CHECK(s.omega(p, X, v) == doctest::Approx(g.dot(v)).epsilon(1e-12));
}

TEST_CASE("omega(X_H, v) = dH(v) on the torus") {
  const Surface s = Surface::torus(3.0);
  const auto H = expr::ScalarField::parse("sin(x)*cos(2*y)");
  const Vector3d p(0.2, 0.7, 0.0);
  const Vector3d X = s.vector_field(H, p, 0.0);
  const Vector3d v(0.4, -1.1, 0.0);
  const double dH = std::cos(0.2) * std::cos(1.4) * v.x() - 2 * std::sin(0.2) * std::sin(1.4) * v.y();
  CHECK(s.omega(p, X, v) == doctest::Approx(dH).epsilon(1e-12));
}

TEST_CASE("torus wrap and lift") {
  const Surface s = Surface::torus();
  const Vector3d w = s.wrap(Vector3d(2.25, -0.5, 0.0));
  CHECK(w.x() == doctest::Approx(0.25));
  CHECK(w.y() == doctest::Approx(0.5));
  const std::vector<Vector2d> path{{0.9, 0.1}, {0.98, 0.05}, {0.04, 0.97}, {0.12, 0.9}};
  const Vector2d end = s.lift_to_cover(path, {0.9, 0.1}).back();
  CHECK(end.x() == doctest::Approx(1.12));
  CHECK(end.y() == doctest::Approx(-0.1));
  CHECK(thrown_kind([&] { s.lift_to_cover({{0.1, 0.1}, {0.6, 0.1}}, {0.1, 0.1}); }) == ErrorKind::AmbiguousLift);
  CHECK(thrown_kind([] { Surface::plane().lift_to_cover({}, {0, 0}); }) == ErrorKind::PreconditionFailed);
}

TEST_CASE("charts") {
  const Surface s = Surface::sphere();
  const Vector3d p = Vector3d(0.1, 0.2, 0.97).normalized();
  const SurfacePoint c = s.to_chart(p);
  CHECK((s.embed(c.chart, c.c1, c.c2) - p).norm() < 1e-12);
}
