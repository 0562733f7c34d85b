#include <cmath>

#include "hoferlab/catalog.hpp"
#include "hoferlab/flatness.hpp"
#include "support.hpp"

using namespace hoferlab;
using Eigen::Matrix2d;
using Eigen::Vector2d;
using Eigen::Vector3d;

namespace {

WeinsteinIsotopy dipole(double d) {
  const auto g = catalog::small_generating(d)[0];
  return WeinsteinIsotopy::parse(g.text, g.box);
}

}  // namespace

TEST_CASE("map, inverse and the midpoint relation") {
  const WeinsteinIsotopy iso = dipole(0.05);
  const Vector2d x(0.3, 0.1);
  const Vector2d y = iso.map(x, 0.7);
  CHECK((iso.inverse(y, 0.7) - x).norm() < 1e-13);
  // X = x + t J grad F((x + X)/2)
  const Vector2d g = iso.grad(0.5 * (x + y));
  CHECK((y - x - 0.7 * Vector2d(-g.y(), g.x())).norm() < 1e-13);
}

TEST_CASE("jacobian is symplectic and matches finite differences") {
  const WeinsteinIsotopy iso = dipole(0.05);
  const Vector2d x(0.45, -0.12);
  const Matrix2d D = iso.jacobian(x, 1.0);
  CHECK(D.determinant() == doctest::Approx(1.0).epsilon(1e-13));
  const double e = 1e-6;
  for (int k = 0; k < 2; ++k) {
    Vector2d h = Vector2d::Zero();
    h[k] = e;
    const Vector2d col = (iso.map(x + h, 1.0) - iso.map(x - h, 1.0)) / (2 * e);
    CHECK((col - D.col(k)).norm() < 1e-8);
  }
}

TEST_CASE("velocity matches the time derivative") {
  const WeinsteinIsotopy iso = dipole(0.05);
  const Vector2d x(0.35, 0.2);
  const double t = 0.6, e = 1e-5;
  const Vector2d fd = (iso.map(x, t + e) - iso.map(x, t - e)) / (2 * e);
  CHECK((iso.velocity(iso.map(x, t), t) - fd).norm() < 1e-9);
}

TEST_CASE("isotopy Hamiltonian against the closed form") {
  // H_t(y) = F(P) - F(m), m the midpoint of y at time t, P the base
  const double d = 1e-2;
  auto iso = std::make_shared<WeinsteinIsotopy>(dipole(d));
  const Vector2d P(0.5, 0.0);
  const IsotopyHamiltonian H(iso, P);
  for (double t : {0.25, 1.0}) {
    for (const Vector2d& y : {Vector2d(0.1, 0.2), Vector2d(-0.45, 0.05), Vector2d(0.6, -0.1)}) {
      const Vector2d m = iso->midpoint(y, -0.5 * t);
      const double err = H.value(Vector3d(y.x(), y.y(), 0), t) - (iso->F(P) - iso->F(m));
      CHECK(std::fabs(err) < 1e-7 * d);
    }
  }
}

TEST_CASE("chart symplecticity") { CHECK(chart_symplectic_residual() == 0.0); }

TEST_CASE("swept area needs fixed endpoints") {
  const WeinsteinIsotopy iso = dipole(1e-3);
  CHECK(thrown_kind([&] { swept_area(iso, Vector2d(0.3, 0.1), Vector2d(-0.5, 0.0), ArcShape::Straight); }) ==
        ErrorKind::EndpointNotFixed);
}

TEST_CASE("flatness identities") {
  const double d = 1e-3;
  const auto g = catalog::small_generating(d)[1];
  const FlatnessReport r = flatness_check(g.name, g.text, g.box);
  CHECK(r.length_error < 1e-4 * d);
  CHECK(r.swept_spread < 1e-7);
  CHECK(r.fixed_extrema);
  CHECK(r.osc_F == doctest::Approx(0.162336 * d).epsilon(1e-5));
}
