#pragma once

// Dormand-Prince 5(4) integrator on fixed-size Eigen vectors.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "hoferlab/errors.hpp"

namespace hoferlab::ode {

template <int N>
using Vec = Eigen::Matrix<double, N, 1>;

template <int N>
struct Options {
  double rtol = 1e-10;
  double atol = 1e-10;
  double h0 = 0.0;
  double hmax = std::numeric_limits<double>::infinity();
  /// Applied to every accepted state (sphere reprojection).
  std::function<Vec<N>(const Vec<N>&)> project;
};

template <int N>
class Dopri5 {
 public:
  using State = Vec<N>;
  using Rhs = std::function<State(double, const State&)>;
  /// Called after every accepted step with the previous and the new state.
  /// Returning false stops the integration.
  using Observer = std::function<bool(double t_prev, const State& y_prev, double t, const State& y)>;

  explicit Dopri5(Rhs f) : f_(std::move(f)) {}

  /// One step of size h (may be negative); returns the 5th order solution and
  /// writes the embedded error estimate.
  State step(double t, const State& y, double h, State* err = nullptr) const {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    const State k1 = f_(t, y);
    const State k2 = f_(t + c2 * h, y + h * (a21 * k1));
    const State k3 = f_(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const State k4 = f_(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const State k5 = f_(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const State k6 = f_(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const State y1 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    if (err) {
      const State k7 = f_(t + h, y1);
      *err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    }
    return y1;
  }

  /// Adaptive integration from t0 to t1 (either direction).
  State integrate(double t0, double t1, const State& y0, const Options<N>& opt,
                  const Observer& observe = nullptr, long* steps_taken = nullptr) const {
    const double span = std::fabs(t1 - t0);
    State y = y0;
    if (span == 0.0) return y;
    const double dir = t1 > t0 ? 1.0 : -1.0;
    double h = opt.h0 > 0.0 ? opt.h0 : std::min(0.01 * span, opt.hmax);
    double t = t0;
    long steps = 0;
    while (dir * (t1 - t) > 0.0) {
      if (h < 1e-14 * span) {
        throw Error(ErrorKind::StepUnderflow,
                    "step size fell below 1e-14 of the span at t = " + std::to_string(t));
      }
      bool last = false;
      double hs = h;
      if (hs >= dir * (t1 - t)) {
        hs = dir * (t1 - t);
        last = true;
      }
      State err;
      State yn = step(t, y, dir * hs, &err);
      double en = 0.0;
      for (int i = 0; i < y.size(); ++i) {
        const double sc = opt.atol + opt.rtol * std::max(std::fabs(y[i]), std::fabs(yn[i]));
        en = std::max(en, std::fabs(err[i]) / sc);
      }
      if (!std::isfinite(en)) {
        h *= 0.25;
        continue;
      }
      if (en <= 1.0) {
        const double tn = last ? t1 : t + dir * hs;
        if (opt.project) yn = opt.project(yn);
        ++steps;
        const State yp = y;
        const double tp = t;
        t = tn;
        y = yn;
        if (observe && !observe(tp, yp, t, y)) break;
        const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        h = std::min(hs * fac, opt.hmax);
        if (last) break;
      } else {
        h = hs * std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9);
      }
    }
    if (steps_taken) *steps_taken = steps;
    return y;
  }

  /// Fixed-step integration with n equal steps; a smooth function of y0.
  State integrate_fixed(double t0, double t1, const State& y0, int n,
                        const std::function<State(const State&)>& project = nullptr) const {
    State y = y0;
    const double h = (t1 - t0) / n;
    for (int i = 0; i < n; ++i) {
      y = step(t0 + i * h, y, h);
      if (project) y = project(y);
    }
    return y;
  }

 private:
  Rhs f_;
};

}  // namespace hoferlab::ode
