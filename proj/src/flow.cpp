#include "hoferlab/flow.hpp"

#include <cmath>
#include <sstream>

#include "hoferlab/errors.hpp"

namespace hoferlab {

using Eigen::Matrix2d;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Vec4 = ode::Vec<4>;

namespace {

ode::Dopri5<3> make_solver(const HamiltonianPath& H) {
  return ode::Dopri5<3>([&H](double t, const Vector3d& y) { return H.vector_field(y, t); });
}

ode::Options<3> make_options(const HamiltonianPath& H, double tol) {
  ode::Options<3> o;
  o.rtol = tol;
  o.atol = tol;
  if (H.surface().kind() == SurfaceKind::Sphere) {
    o.project = [](const Vector3d& y) { return y.normalized(); };
  }
  return o;
}

}  // namespace

std::string Trajectory::to_csv(const Surface& s) const {
  std::ostringstream os;
  os.precision(17);
  const bool sphere = s.kind() == SurfaceKind::Sphere;
  os << "t,chart,c1,c2" << (sphere ? ",ax,ay,az" : "") << "\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    const SurfacePoint p = s.to_chart(y[i]);
    os << t[i] << "," << int(p.chart) << "," << p.c1 << "," << p.c2;
    if (sphere) os << "," << y[i].x() << "," << y[i].y() << "," << y[i].z();
    os << "\n";
  }
  return os.str();
}

Trajectory integrate_flow(const HamiltonianPath& H, const Vector3d& x0, double t0, double t1,
                          double tol, bool record) {
  if (!(tol > 0.0)) throw Error(ErrorKind::PreconditionFailed, "tolerance must be positive");
  Trajectory tr;
  tr.tol = tol;
  tr.autonomous = H.autonomous();
  const Vector3d start = H.surface().project(x0);
  const double h0 = tr.autonomous ? H.raw(start, t0) : 0.0;
  tr.t.push_back(t0);
  tr.y.push_back(start);
  const auto solver = make_solver(H);
  const Vector3d end = solver.integrate(
      t0, t1, start, make_options(H, tol),
      [&](double, const Vector3d&, double t, const Vector3d& y) {
        if (tr.autonomous) tr.max_drift = std::max(tr.max_drift, std::fabs(H.raw(y, t) - h0));
        if (record) {
          tr.t.push_back(t);
          tr.y.push_back(y);
        }
        return true;
      });
  if (!record) {
    tr.t.push_back(t1);
    tr.y.push_back(end);
  }
  return tr;
}

Vector3d flow_point(const HamiltonianPath& H, const Vector3d& x0, double t0, double t1,
                    double tol) {
  return make_solver(H).integrate(t0, t1, H.surface().project(x0), make_options(H, tol));
}

Vector3d flow_point_fixed(const HamiltonianPath& H, const Vector3d& x0, double t0, double t1,
                          int n) {
  std::function<Vector3d(const Vector3d&)> proj;
  if (H.surface().kind() == SurfaceKind::Sphere) proj = [](const Vector3d& y) { return y.normalized(); };
  return make_solver(H).integrate_fixed(t0, t1, H.surface().project(x0), n, proj);
}

std::vector<FlowMapSample> flow_map(const HamiltonianPath& H, double t,
                                    const std::vector<Vector3d>& points, double tol,
                                    double fd_step) {
  const Surface& s = H.surface();
  std::vector<FlowMapSample> out;
  out.reserve(points.size());
  for (const Vector3d& x : points) {
    FlowMapSample m;
    m.start = s.project(x);
    m.time = t;
    m.end = flow_point(H, m.start, H.t0(), H.t0() + t, tol);
    const SurfacePoint cs = s.to_chart(m.start);
    const SurfacePoint ce = s.to_chart(m.end);
    for (int j = 0; j < 2; ++j) {
      double a1 = cs.c1, a2 = cs.c2, b1 = cs.c1, b2 = cs.c2;
      (j == 0 ? a1 : a2) += fd_step;
      (j == 0 ? b1 : b2) -= fd_step;
      const Vector3d ea = flow_point(H, s.embed(cs.chart, a1, a2), H.t0(), H.t0() + t, tol);
      const Vector3d eb = flow_point(H, s.embed(cs.chart, b1, b2), H.t0(), H.t0() + t, tol);
      Vector2d ca, cb;
      if (s.kind() == SurfaceKind::Sphere) {
        const SurfacePoint pa = s.in_chart(ce.chart, ea);
        const SurfacePoint pb = s.in_chart(ce.chart, eb);
        double d1 = pa.c1 - pb.c1;
        if (ce.chart == Chart::Cylinder) d1 -= 2.0 * M_PI * std::round(d1 / (2.0 * M_PI));
        m.jacobian.col(j) = Vector2d(d1, pa.c2 - pb.c2) / (2.0 * fd_step);
      } else {
        m.jacobian.col(j) = Vector2d(ea.x() - eb.x(), ea.y() - eb.y()) / (2.0 * fd_step);
      }
    }
    m.area_defect = m.jacobian.determinant() * s.density(ce.chart, ce.c1, ce.c2) /
                        s.density(cs.chart, cs.c1, cs.c2) -
                    1.0;
    out.push_back(m);
  }
  return out;
}

Matrix2d linearize_field(const HamiltonianPath& H, const Vector3d& p, double t) {
  const Surface& s = H.surface();
  if (s.kind() != SurfaceKind::Sphere) {
    const Eigen::Matrix3d h = H.function().hessian(p, t);
    Matrix2d A;
    A << h(1, 0), h(1, 1), -h(0, 0), -h(0, 1);
    return A / s.form_scale();
  }
  const SurfacePoint c = s.to_chart(p);
  auto field = [&](double c1, double c2) {
    const Vector3d a = s.embed(c.chart, c1, c2);
    const Vector3d g = H.gradient(a, t);
    const Eigen::Matrix<double, 3, 2> T = s.chart_tangents(c.chart, c1, c2);
    const double rho = s.density(c.chart, c1, c2);
    return Vector2d(g.dot(T.col(1)) / rho, -g.dot(T.col(0)) / rho);
  };
  const double h = 1e-5;
  Matrix2d A;
  A.col(0) = (field(c.c1 + h, c.c2) - field(c.c1 - h, c.c2)) / (2.0 * h);
  A.col(1) = (field(c.c1, c.c2 + h) - field(c.c1, c.c2 - h)) / (2.0 * h);
  return A;
}

namespace {

Vec4 pack(const Matrix2d& M) { return Vec4(M(0, 0), M(1, 0), M(0, 1), M(1, 1)); }

Matrix2d unpack(const Vec4& v) {
  Matrix2d M;
  M << v[0], v[2], v[1], v[3];
  return M;
}

ode::Dopri5<4> variational_solver(std::function<Matrix2d(double)> A) {
  return ode::Dopri5<4>([A](double t, const Vec4& y) { return pack(A(t) * unpack(y)); });
}

}  // namespace

Matrix2d LinearizedFlow::at(double s) const {
  if (t.empty()) return Matrix2d::Identity();
  std::size_t k = 0;
  while (k + 1 < t.size() && t[k + 1] <= s) ++k;
  if (s == t[k]) return M[k];
  ode::Options<4> o;
  o.rtol = o.atol = 1e-13;
  return unpack(variational_solver(A).integrate(t[k], s, pack(M[k]), o));
}

LinearizedFlow linearized_monodromy(const HamiltonianPath& H, const Vector3d& p, double t0,
                                    double t1, int samples) {
  const Vector3d q = H.surface().project(p);
  for (int i = 0; i <= 32; ++i) {
    const double t = t0 + (t1 - t0) * i / 32.0;
    const double speed = H.vector_field(q, t).norm();
    if (!(speed < 1e-10)) {
      std::ostringstream os;
      os << "|X_H| = " << speed << " at t = " << t;
      throw Error(ErrorKind::NotFixed, os.str());
    }
  }
  LinearizedFlow lf;
  lf.p = q;
  const HamiltonianPath Hc = H;
  lf.A = [Hc, q](double t) { return linearize_field(Hc, q, t); };
  const auto solver = variational_solver(lf.A);
  ode::Options<4> o;
  o.rtol = o.atol = 1e-13;
  Matrix2d M = Matrix2d::Identity();
  for (int i = 0; i < samples; ++i) {
    const double t = t0 + (t1 - t0) * i / (samples - 1);
    if (i > 0) M = unpack(solver.integrate(lf.t.back(), t, pack(M), o));
    lf.t.push_back(t);
    lf.M.push_back(M);
    lf.max_det_defect = std::max(lf.max_det_defect, std::fabs(M.determinant() - 1.0));
  }
  return lf;
}

}  // namespace hoferlab
