#include "hoferlab/quasicyl.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hoferlab/errors.hpp"
#include "hoferlab/flow.hpp"
#include "hoferlab/quadrature.hpp"
#include "hoferlab/sampling.hpp"

namespace hoferlab {

using Eigen::Matrix4d;
using Eigen::Vector3d;
using Eigen::Vector4d;

namespace {

double smoothstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

/// Composite Gauss-Legendre over [a, b] split at the given breakpoints.
double composite(const std::function<double(double)>& f, const std::vector<double>& knots, int n) {
  const quad::Rule& r = quad::gauss_legendre(n);
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double a = knots[k], b = knots[k + 1];
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (std::size_t i = 0; i < r.nodes.size(); ++i) sum += h * r.weights[i] * f(c + h * r.nodes[i]);
  }
  return sum;
}

double min_value(const HamiltonianPath& H, double t) { return H.extrema(t).min.value; }

}  // namespace

double thickening_window(double t, double eta) { return smoothstep(t / eta) * smoothstep((1.0 - t) / eta); }

double GraphRegion::lower(const Vector3d& x, double t) const {
  return over ? H.raw(x, t) - min_value(H, t) : lambda(t);
}

double GraphRegion::upper(const Vector3d& x, double t) const {
  return over ? mu(t) : H.raw(x, t) - min_value(H, t);
}

double GraphRegion::thickening_area() const {
  const double e = eta;
  return delta * composite([e](double t) { return thickening_window(t, e); }, {0.0, e, 1.0 - e, 1.0}, 24);
}

Thickening thicken(const HamiltonianPath& H, double nu, double eta) {
  if (!(nu > 0.0)) throw Error(ErrorKind::PreconditionFailed, "nu must be positive");
  if (!(eta > 0.0 && eta <= 0.5)) throw Error(ErrorKind::PreconditionFailed, "eta must lie in (0, 1/2]");
  Thickening th;
  GraphRegion g;
  g.H = H;
  g.nu = nu;
  g.eta = eta;
  g.delta = 0.5 * nu / (1.0 - eta);
  th.under = g;
  g.over = true;
  th.over = g;
  th.disc_area = length(H) + th.under.thickening_area() + th.over.thickening_area();
  return th;
}

// ---------------------------------------------------------------------------

QuasiCylinder::QuasiCylinder(HamiltonianPath H, HamiltonianPath K, double nu, GlueOrientation o,
                             const GlueOptions& opt)
    : H_(std::move(H)), K_(std::move(K)), nu_(nu), orient_(o), opt_(opt) {
  if (o == GlueOrientation::KH) std::swap(H_, K_);
  if (H_.surface().kind() == SurfaceKind::Sphere || K_.surface().kind() != H_.surface().kind()) {
    throw Error(ErrorKind::PreconditionFailed, "gluing needs two paths on the same plane or torus");
  }
  if (!(nu > 0.0)) throw Error(ErrorKind::PreconditionFailed, "nu must be positive");
  identical_ = H_.function_ptr() == K_.function_ptr() || H_.text() == K_.text();
  if (identical_) return;
  const Box b = H_.support();
  const int n = opt_.endpoint_grid;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vector3d x(b.x0 + (b.x1 - b.x0) * (i + 0.5) / n, b.y0 + (b.y1 - b.y0) * (j + 0.5) / n, 0.0);
      const Vector3d a = flow_point(H_, x, H_.t0(), H_.t1(), 1e-11);
      const Vector3d c = flow_point(K_, x, K_.t0(), K_.t1(), 1e-11);
      endpoint_mismatch_ = std::max(endpoint_mismatch_, H_.surface().distance(a, c));
    }
  }
  if (opt_.check_endpoints && endpoint_mismatch_ >= opt_.endpoint_tol) {
    std::ostringstream os;
    os << "time-1 maps differ by " << endpoint_mismatch_;
    throw Error(ErrorKind::EndpointMismatch, os.str());
  }
}

Vector3d QuasiCylinder::f(const Vector3d& x, double t) const {
  if (identical_) return x;
  const Vector3d z = flow_point_fixed(K_, x, t, 0.0, opt_.steps);
  return flow_point_fixed(H_, z, 0.0, t, opt_.steps);
}

Vector3d QuasiCylinder::f_inverse(const Vector3d& y, double t) const {
  if (identical_) return y;
  const Vector3d z = flow_point_fixed(H_, y, t, 0.0, opt_.steps);
  return flow_point_fixed(K_, z, 0.0, t, opt_.steps);
}

double QuasiCylinder::F(const Vector3d& y, double t) const {
  return H_.raw(y, t) - min_value(H_, t) - (K_.raw(f_inverse(y, t), t) - min_value(K_, t));
}

Vector4d QuasiCylinder::map(const Vector4d& q) const {
  const Vector3d x(q[0], q[1], 0.0);
  const double t = q[3];
  const Vector3d y = f(x, t);
  return Vector4d(y.x(), y.y(), q[2] - K_.raw(x, t) + H_.raw(y, t), t);
}

Vector4d QuasiCylinder::map_inverse(const Vector4d& q) const {
  const Vector3d y(q[0], q[1], 0.0);
  const double t = q[3];
  const Vector3d x = f_inverse(y, t);
  return Vector4d(x.x(), x.y(), q[2] + K_.raw(x, t) - H_.raw(y, t), t);
}

double QuasiCylinder::shift_integral() const {
  if (!shift_ready_) {
    if (identical_) {
      shift_ = 0.0;
    } else {
      shift_ = quad::integrate([&](double t) { return min_value(K_, t) - min_value(H_, t); }, 0.0, 1.0,
                               1e-10, 1e-12, 20)
                   .value;
    }
    shift_ready_ = true;
  }
  return shift_;
}

double QuasiCylinder::declared_area() const { return length(K_) + nu_ + shift_integral(); }

double QuasiCylinder::fiber_area(const Vector3d& x) const {
  if (identical_) return declared_area();
  const double scale = H_.surface().form_scale();
  const bool torus = H_.surface().kind() == SurfaceKind::Torus;
  const double h = 1e-5;
  const double integral = composite(
      [&](double t) {
        const Vector3d y = f(x, t);
        const Vector3d yd = (f(x, t + h) - f(x, t - h)) / (2.0 * h);
        const double theta = torus ? scale * y.x() * yd.y() : 0.5 * scale * (y.x() * yd.y() - y.y() * yd.x());
        return H_.raw(y, t) - K_.raw(x, t) + theta;
      },
      {0.0, 0.25, 0.5, 0.75, 1.0}, 16);
  return declared_area() + integral;
}

QuasiCylinder glue(const HamiltonianPath& H, const HamiltonianPath& K, double nu, const GlueOptions& opt) {
  return QuasiCylinder(H, K, nu, GlueOrientation::HK, opt);
}

// ---------------------------------------------------------------------------

SymplecticReport verify_symplectic_map(const std::function<Vector4d(const Vector4d&)>& map, const Box& box,
                                       double scale, int samples, double fd_step) {
  Matrix4d O = Matrix4d::Zero();
  O(0, 1) = scale;
  O(1, 0) = -scale;
  O(2, 3) = 1.0;
  O(3, 2) = -1.0;
  SymplecticReport rep;
  rep.samples = samples;
  for (int k = 1; k <= samples; ++k) {
    const std::size_t i = std::size_t(k);
    const Vector4d q(box.x0 + (box.x1 - box.x0) * halton(i, 2), box.y0 + (box.y1 - box.y0) * halton(i, 3),
                     -1.0 + 2.0 * halton(i, 5), 0.02 + 0.96 * halton(i, 7));
    Matrix4d J;
    for (int c = 0; c < 4; ++c) {
      Vector4d e = Vector4d::Zero();
      e[c] = fd_step;
      J.col(c) = (map(q + e) - map(q - e)) / (2.0 * fd_step);
    }
    const double r = (J.transpose() * O * J - O).cwiseAbs().maxCoeff();
    if (r > rep.max_residual) {
      rep.max_residual = r;
      rep.worst = q;
    }
  }
  return rep;
}

SymplecticReport verify_gluing_symplectic(const QuasiCylinder& Q, int samples, double fd_step) {
  return verify_symplectic_map([&Q](const Vector4d& q) { return Q.map(q); }, Q.H().support(),
                               Q.H().surface().form_scale(), samples, fd_step);
}

AreaReport area(const QuasiCylinder& Q, int fibers) {
  AreaReport rep;
  rep.declared = Q.declared_area();
  Box b = Q.H().support();
  // a margin outside the support so that some fibres are far from it
  const double mx = 0.25 * (b.x1 - b.x0), my = 0.25 * (b.y1 - b.y0);
  if (Q.H().surface().kind() == SurfaceKind::Plane) b = Box{b.x0 - mx, b.x1 + mx, b.y0 - my, b.y1 + my};
  double sum = 0.0;
  for (int k = 1; k <= fibers; ++k) {
    const Vector3d x(b.x0 + (b.x1 - b.x0) * halton(std::size_t(k), 2),
                     b.y0 + (b.y1 - b.y0) * halton(std::size_t(k), 3), 0.0);
    const double a = Q.fiber_area(x);
    rep.points.push_back(x);
    rep.fiber_areas.push_back(a);
    sum += a;
  }
  rep.area = sum / fibers;
  const auto [lo, hi] = std::minmax_element(rep.fiber_areas.begin(), rep.fiber_areas.end());
  rep.max_deviation = *hi - *lo;
  if (!Q.identical()) {
    rep.calabi_difference = calabi(Q.H(), 1e-8).value - calabi(Q.K(), 1e-8).value;
  }
  if (rep.max_deviation > 1e-4) {
    std::ostringstream os;
    os << "fibre areas spread by " << rep.max_deviation << " (Calabi difference " << rep.calabi_difference
       << ")";
    throw Error(ErrorKind::InconsistentArea, os.str());
  }
  return rep;
}

CompareReport compare(const HamiltonianPath& H, const HamiltonianPath& K, double nu, int fibers,
                      const GlueOptions& opt) {
  CompareReport rep;
  rep.length_H = length(H);
  rep.length_K = length(K);
  const QuasiCylinder hk(H, K, nu, GlueOrientation::HK, opt);
  GlueOptions o2 = opt;
  o2.check_endpoints = false;  // same pair, already checked
  const QuasiCylinder kh(H, K, nu, GlueOrientation::KH, o2);
  rep.area_HK = area(hk, fibers).area;
  rep.area_KH = area(kh, fibers).area;
  rep.identity_error = std::fabs(rep.area_HK + rep.area_KH - (rep.length_H + rep.length_K + 2.0 * nu));
  rep.informational = !(rep.length_K + 2.0 * nu < rep.length_H);
  if (!rep.informational) {
    if (rep.area_HK < rep.length_H) rep.shorter_sides.push_back("R_HK");
    if (rep.area_KH < rep.length_H) rep.shorter_sides.push_back("R_KH");
  }
  std::ostringstream os;
  if (rep.informational) {
    os << "L(K) + 2 nu >= L(H): informational only";
  } else {
    os << rep.shorter_sides.size() << " side(s) with area below L(H) = " << rep.length_H;
  }
  rep.note = os.str();
  return rep;
}

}  // namespace hoferlab
