#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hoferlab/moser.hpp"
#include "support.hpp"

using namespace hoferlab;
using Eigen::Vector4d;

TEST_CASE("pfaffian squares to the determinant") {
  const DiscreteTwoForm::Components c{0.7, -0.2, 0.4, 1.1, 0.3, -0.9};
  const double pf = DiscreteTwoForm::pfaffian(c);
  CHECK(pf * pf == doctest::Approx(DiscreteTwoForm::matrix(c).determinant()).epsilon(1e-12));
  CHECK(pf == doctest::Approx(0.7 * -0.9 - (-0.2) * 0.3 + 0.4 * 1.1));
}

TEST_CASE("closedness") {
  const Vector4d lo = Vector4d::Constant(-1), hi = Vector4d::Constant(1);
  // d(x1 x2 du) is closed; x1 du^dv alone is not
  const auto closed = DiscreteTwoForm::sample(7, lo, hi, [](const Vector4d& p) {
    return DiscreteTwoForm::Components{0, p[1], 0, p[0], 0, 1};
  });
  CHECK(closed.closedness_residual() < 1e-12);
  const auto open = DiscreteTwoForm::sample(7, lo, hi, [](const Vector4d& p) {
    return DiscreteTwoForm::Components{1, 0, 0, 0, 0, 1 + p[0]};
  });
  CHECK(open.closedness_residual() > 0.5);
}

TEST_CASE("interpolation is exact for multilinear data") {
  const auto f = DiscreteTwoForm::sample(5, Vector4d::Zero(), Vector4d::Ones(), [](const Vector4d& p) {
    return DiscreteTwoForm::Components{p[0] * p[1], p[2], p[3] * p[0], 1, 0, 2};
  });
  const Vector4d q(0.13, 0.71, 0.4, 0.92);
  const auto c = f.interpolate(q);
  CHECK(c[0] == doctest::Approx(0.13 * 0.71));
  CHECK(c[2] == doctest::Approx(0.92 * 0.13));
}

TEST_CASE("split form is left alone") {
  const MoserResult r = moser_split(moser_test_form(6, 0.0));
  CHECK(r.residual < 1e-12);
  CHECK(r.max_displacement < 1e-12);
}

TEST_CASE("perturbed form is split") {
  const MoserResult r = moser_split(moser_test_form(8));
  CHECK(r.residual < 5e-2);
  CHECK(r.boundary_displacement < 1e-12);
  CHECK(r.rho_min > 0.5);
}

TEST_CASE("faults") {
  CHECK(thrown_kind([] { moser_split(moser_test_form(6, 0.1, 1.5)); }) == ErrorKind::NondegeneracyFailed);
  MoserOptions o;
  o.tolerance = 1e-6;
  CHECK(thrown_kind([&] { moser_split(moser_test_form(6), o); }) == ErrorKind::ResidualTooLarge);
  CHECK(thrown_kind([] { DiscreteTwoForm(2, Vector4d::Zero(), Vector4d::Ones()); }) == ErrorKind::PreconditionFailed);
}

TEST_CASE("grid file round trip") {
  const auto path = (std::filesystem::temp_directory_path() / "hoferlab_test_grid.bin").string();
  const DiscreteTwoForm f = moser_test_form(4);
  f.write(path);
  const DiscreteTwoForm g = DiscreteTwoForm::read(path);
  CHECK(g.n() == 4);
  CHECK(g.data() == f.data());
  { std::ofstream(path, std::ios::binary) << "NOTAGRID"; }
  CHECK(thrown_kind([&] { DiscreteTwoForm::read(path); }) == ErrorKind::IoError);
  std::filesystem::remove(path);
  CHECK(thrown_kind([&] { DiscreteTwoForm::read(path); }) == ErrorKind::IoError);
}
