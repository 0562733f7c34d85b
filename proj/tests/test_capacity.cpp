#include <cmath>

#include "hoferlab/capacity.hpp"
#include "hoferlab/catalog.hpp"
#include "hoferlab/orbits.hpp"
#include "support.hpp"

using namespace hoferlab;

TEST_CASE("HZ-function certificate for the slow bump") {
  const EmbeddingCertificate c = chz_certificate(catalog::slow_bump(), 0.1);
  CHECK(c.valid());
  CHECK(c.value == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(c.residual("k_seeds")->value >= 1000);
}

TEST_CASE("HZ-function refuses a fast rotation") {
  try {
    chz_certificate(catalog::rotation(4 * M_PI), 0.1);
    FAIL("expected a refusal");
  } catch (const OrbitError& e) {
    CHECK(e.kind() == ErrorKind::ShortOrbitInK);
    CHECK(e.witness().period == doctest::Approx(0.5).epsilon(1e-4));
  }
  CHECK(thrown_kind([] { chz_certificate(catalog::sphere_height(4.0), 0.1); }) == ErrorKind::PreconditionFailed);
  CHECK(thrown_kind([] { chz_certificate(catalog::traveling_bump(), 0.1); }) == ErrorKind::PreconditionFailed);
}

TEST_CASE("smoothing profile") {
  const double sigma = 0.0125;
  CHECK(chz_smoothing(-0.1, sigma) == 0.0);
  CHECK(chz_smoothing(0.5, sigma) == doctest::Approx(0.5 - sigma / 2));
  const double e = 1e-7;
  for (double s : {0.2 * sigma, 0.5 * sigma, 0.9 * sigma}) {
    const double fd = (chz_smoothing(s + e, sigma) - chz_smoothing(s - e, sigma)) / (2 * e);
    CHECK(chz_smoothing(s, sigma, 1) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("fibered ball on the sphere") {
  const EmbeddingCertificate c = cg_dim2_certificate(catalog::sphere_height(4.0), 0.2);
  CHECK(c.valid());
  CHECK(c.value >= 3.8 - 1e-12);
  CHECK(c.side == "both");
}

TEST_CASE("fibered ball refuses a steep plateau") {
  try {
    cg_dim2_certificate(catalog::plateau_bump(1.0, 0.3), 0.05);
    FAIL("expected a refusal");
  } catch (const OrbitError& e) {
    CHECK((e.kind() == ErrorKind::ShortOrbit || e.kind() == ErrorKind::LevelTooShort));
    CHECK(e.witness().period < 1.0);
    CHECK(e.witness().period >= catalog::plateau_min_period(1.0, 0.3) - 1e-6);
  }
}

TEST_CASE("trapezoid profile maps") {
  for (ProfileDirection d : {ProfileDirection::BallToTrapezoid, ProfileDirection::TrapezoidToBall}) {
    const ProfileMap m = trapezoid_profile_map(2.0, 0.1, d, 120);
    CHECK(m.jacobian_defect < 1e-6);
    CHECK(m.domination_defect <= 1e-9);
  }
}

TEST_CASE("local ball near the identity") {
  const EmbeddingCertificate c = local_ball_certificate(catalog::small_bump(1e-3), 1e-5);
  CHECK(c.valid());
  CHECK(c.value == doctest::Approx(1e-3 - 1e-5).epsilon(1e-6));
}
