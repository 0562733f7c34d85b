#pragma once

#include <functional>
#include <vector>

namespace hoferlab::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  long evaluations = 0;
};

struct Rule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule (cached).
const Rule& gauss_legendre(int n);

/// Adaptive Gauss-Kronrod (7/15) on [a, b].
Result integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-10, double rel_tol = 1e-10, int max_depth = 30);

/// Adaptive tensor Gauss-Legendre (8x8) on a rectangle, refining a cell into
/// four children until the parent and child sums agree.
Result integrate_2d(const std::function<double(double, double)>& f, double x0, double x1, double y0,
                    double y1, double abs_tol = 1e-9, int max_depth = 9);

/// Fixed tensor Gauss-Legendre with n points per axis on each of k x k cells.
double tensor_gl(const std::function<double(double, double)>& f, double x0, double x1, double y0,
                 double y1, int n, int cells = 1);

/// Golden-section minimisation of a unimodal function on [a, b].
double golden_min(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

/// Root of f on [a, b] by bisection; requires a sign change.
double bisect(const std::function<double(double)>& f, double a, double b, double tol = 1e-14,
              int max_iter = 200);

}  // namespace hoferlab::quad
