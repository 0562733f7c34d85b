#pragma once

#include <string>
#include <vector>

#include "hoferlab/hofer.hpp"

namespace hoferlab::catalog {

/// Shortest round-trip decimal text for a double.
std::string num(double v);

/// (A/2) z on the sphere of area A; every orbit has period 1 and the
/// oscillation is A.
HamiltonianPath sphere_height(double A);

/// H = f(x) = sin(pi x)^2 on the unit torus.
HamiltonianPath torus_shear();
double shear_f(double x);
double shear_fprime(double x);

/// m * bump(r^2 - r0^2; w): plateau of radius r0, ramp of width w in r^2.
HamiltonianPath plateau_bump(double m, double w, double r0 = 0.8);
/// Smallest period of the plateau bump's ramp orbits, pi w / (1.875 m).
double plateau_min_period(double m, double w);
/// Ramp width below which short orbits appear.
double plateau_threshold(double m);

/// bump(r^2; 2), maximum 1, all orbits slower than period 1.
HamiltonianPath slow_bump();

/// (lambda/2)(x^2 + y^2) on a box; rotation with period 2 pi / lambda.
HamiltonianPath rotation(double lambda, double half_width = 1.0);

/// (2 pi r^2 + r^4) bump(r^2 - 1/4; 1/2): degenerate linear flow at the
/// origin with short nonlinear orbits nearby.
HamiltonianPath quartic();

/// delta * bump(r^2; 1).
HamiltonianPath small_bump(double delta);

/// exp(-2 r^2) bump(r^2 - 1; 1), autonomous.
HamiltonianPath peaked_bump();
/// The peaked bump translated along x by 0.3 t.
HamiltonianPath traveling_bump();
/// The peaked bump translated by s(t) = 0.5 (1 - bump(t - 1/2; 1/2)): at rest on
/// the first half of the interval, moving on the second.
HamiltonianPath rest_then_move();

struct HomotopicPair {
  std::string name;
  HamiltonianPath H;
  HamiltonianPath K;
};

/// Pairs with equal time-1 maps, homotopic by construction.
std::vector<HomotopicPair> homotopic_pairs();

/// b with int_0^1 |1 + b cos(2 pi t)| dt = 5/3.
double reparam_loop_b();

/// Small generating functions for the flatness checks; each scaled by delta.
struct GeneratingSpec {
  std::string name;
  std::string text;  // DSL, already scaled
  Box box;
};
std::vector<GeneratingSpec> small_generating(double delta);

}  // namespace hoferlab::catalog
