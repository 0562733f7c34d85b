#include "hoferlab/surface.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hoferlab/errors.hpp"

namespace hoferlab {

using Eigen::Vector2d;
using Eigen::Vector3d;

const char* to_string(SurfaceKind k) {
  switch (k) {
    case SurfaceKind::Plane: return "plane";
    case SurfaceKind::Torus: return "torus";
    case SurfaceKind::Sphere: return "sphere";
  }
  return "?";
}

Surface Surface::plane() { return Surface(SurfaceKind::Plane, std::numeric_limits<double>::infinity(), 1.0); }
Surface Surface::torus(double area) { return Surface(SurfaceKind::Torus, area, area); }
Surface Surface::sphere(double area) { return Surface(SurfaceKind::Sphere, area, area / (4.0 * M_PI)); }

double Surface::total_area() const { return area_; }

expr::ParseOptions Surface::parse_options() const {
  expr::ParseOptions o;
  using expr::Var;
  switch (kind_) {
    case SurfaceKind::Plane:
      o.admitted = expr::VarSet::of({Var::X, Var::Y, Var::T});
      o.domain.lo = {-2.0, -2.0, 0.0, 0.0};
      o.domain.hi = {2.0, 2.0, 0.0, 1.0};
      break;
    case SurfaceKind::Torus:
      o.admitted = expr::VarSet::of({Var::X, Var::Y, Var::T});
      o.domain.lo = {0.0, 0.0, 0.0, 0.0};
      o.domain.hi = {1.0, 1.0, 0.0, 1.0};
      break;
    case SurfaceKind::Sphere:
      o.admitted = expr::VarSet::all();
      o.domain.lo = {-1.0, -1.0, -1.0, 0.0};
      o.domain.hi = {1.0, 1.0, 1.0, 1.0};
      break;
  }
  return o;
}

Box Surface::default_box() const {
  switch (kind_) {
    case SurfaceKind::Plane: return Box{-2.0, 2.0, -2.0, 2.0};
    case SurfaceKind::Torus: return Box{0.0, 1.0, 0.0, 1.0};
    case SurfaceKind::Sphere: return Box{0.0, 2.0 * M_PI, -1.0, 1.0};
  }
  return Box{};
}

Vector3d Surface::vector_field_from_gradient(const Vector3d& g, const Vector3d& p) const {
  if (kind_ == SurfaceKind::Sphere) return g.cross(p) / scale_;
  return Vector3d(g.y() / scale_, -g.x() / scale_, 0.0);
}

Vector3d Surface::vector_field(const expr::ScalarField& H, const Vector3d& p, double t) const {
  const expr::Gradient g = H.gradient(bind(p, t));
  return vector_field_from_gradient(Vector3d(g.d[0], g.d[1], g.d[2]), p);
}

Vector3d Surface::project(const Vector3d& p) const {
  if (kind_ == SurfaceKind::Sphere) return p.normalized();
  return Vector3d(p.x(), p.y(), 0.0);
}

Vector3d Surface::wrap(const Vector3d& p) const {
  if (kind_ != SurfaceKind::Torus) return p;
  return Vector3d(p.x() - std::floor(p.x()), p.y() - std::floor(p.y()), 0.0);
}

Vector3d Surface::difference(const Vector3d& p, const Vector3d& q) const {
  Vector3d d = q - p;
  if (kind_ == SurfaceKind::Torus) {
    d.x() -= std::round(d.x());
    d.y() -= std::round(d.y());
  }
  return d;
}

// Charts ------------------------------------------------------------------

SurfacePoint Surface::in_chart(Chart c, const Vector3d& p) const {
  SurfacePoint sp;
  sp.chart = c;
  sp.ambient = p;
  switch (c) {
    case Chart::Flat:
      sp.c1 = p.x();
      sp.c2 = p.y();
      break;
    case Chart::Cylinder: {
      double th = std::atan2(p.y(), p.x());
      if (th < 0.0) th += 2.0 * M_PI;
      sp.c1 = th;
      sp.c2 = p.z();
      break;
    }
    case Chart::NorthCap:
    case Chart::SouthCap:
      sp.c1 = p.x();
      sp.c2 = p.y();
      break;
  }
  return sp;
}

SurfacePoint Surface::to_chart(const Vector3d& p) const {
  if (kind_ != SurfaceKind::Sphere) return in_chart(Chart::Flat, p);
  if (std::fabs(p.z()) < 0.9) return in_chart(Chart::Cylinder, p);
  return in_chart(p.z() > 0.0 ? Chart::NorthCap : Chart::SouthCap, p);
}

Vector3d Surface::embed(Chart c, double c1, double c2) const {
  switch (c) {
    case Chart::Flat: return Vector3d(c1, c2, 0.0);
    case Chart::Cylinder: {
      const double r = std::sqrt(std::max(0.0, 1.0 - c2 * c2));
      return Vector3d(r * std::cos(c1), r * std::sin(c1), c2);
    }
    case Chart::NorthCap:
    case Chart::SouthCap: {
      const double s = 1.0 - c1 * c1 - c2 * c2;
      if (s <= 0.0) throw Error(ErrorKind::DomainError, "point outside polar cap");
      const double z = std::sqrt(s);
      return Vector3d(c1, c2, c == Chart::NorthCap ? z : -z);
    }
  }
  return Vector3d::Zero();
}

Eigen::Matrix<double, 3, 2> Surface::chart_tangents(Chart c, double c1, double c2) const {
  Eigen::Matrix<double, 3, 2> m;
  switch (c) {
    case Chart::Flat:
      m << 1, 0, 0, 1, 0, 0;
      break;
    case Chart::Cylinder: {
      const double r = std::sqrt(std::max(0.0, 1.0 - c2 * c2));
      if (r == 0.0) throw Error(ErrorKind::DomainError, "cylinder chart at a pole");
      m << -r * std::sin(c1), -c2 * std::cos(c1) / r, r * std::cos(c1), -c2 * std::sin(c1) / r, 0.0, 1.0;
      break;
    }
    case Chart::NorthCap:
    case Chart::SouthCap: {
      const double z = embed(c, c1, c2).z();
      m << 1.0, 0.0, 0.0, 1.0, -c1 / z, -c2 / z;
      break;
    }
  }
  return m;
}

double Surface::density(Chart c, double c1, double c2) const {
  switch (c) {
    case Chart::Flat: return scale_;
    case Chart::Cylinder: return scale_;
    case Chart::NorthCap:
    case Chart::SouthCap: return scale_ / embed(c, c1, c2).z();
  }
  return scale_;
}

double Surface::omega(const Vector3d& p, const Vector3d& u, const Vector3d& v) const {
  if (kind_ == SurfaceKind::Sphere) return scale_ * p.dot(u.cross(v));
  return scale_ * (u.x() * v.y() - u.y() * v.x());
}

TangentVector Surface::hamiltonian_vector_field(const expr::ScalarField& H, const SurfacePoint& p,
                                                double t) const {
  const Vector3d a = kind_ == SurfaceKind::Sphere ? embed(p.chart, p.c1, p.c2) : Vector3d(p.c1, p.c2, 0.0);
  const expr::Gradient g = H.gradient(bind(a, t));
  const Vector3d grad(g.d[0], g.d[1], g.d[2]);
  const Eigen::Matrix<double, 3, 2> T = chart_tangents(p.chart, p.c1, p.c2);
  const double h1 = grad.dot(T.col(0));
  const double h2 = grad.dot(T.col(1));
  const double rho = density(p.chart, p.c1, p.c2);
  TangentVector v;
  v.base = p;
  v.base.ambient = a;
  v.chart = Vector2d(h2 / rho, -h1 / rho);
  v.ambient = T * v.chart;
  return v;
}

Eigen::Matrix2d Surface::linearization(const expr::ScalarField& H, const SurfacePoint& p,
                                       double t) const {
  Eigen::Matrix2d A;
  if (p.chart == Chart::Flat) {
    const expr::Hessian h = H.hessian(bind(Vector3d(p.c1, p.c2, 0.0), t));
    A << h.dd[1][0], h.dd[1][1], -h.dd[0][0], -h.dd[0][1];
    return A / scale_;
  }
  const double step = 1e-5;
  for (int j = 0; j < 2; ++j) {
    SurfacePoint a = p, b = p;
    (j == 0 ? a.c1 : a.c2) += step;
    (j == 0 ? b.c1 : b.c2) -= step;
    A.col(j) = (hamiltonian_vector_field(H, a, t).chart - hamiltonian_vector_field(H, b, t).chart) /
               (2.0 * step);
  }
  return A;
}

// Integration -------------------------------------------------------------

quad::Result Surface::area_integral(const std::function<double(const Vector3d&)>& f, const Box& box,
                                    double abs_tol) const {
  switch (kind_) {
    case SurfaceKind::Plane:
      return quad::integrate_2d([&](double x, double y) { return f(Vector3d(x, y, 0.0)); }, box.x0,
                                box.x1, box.y0, box.y1, abs_tol);
    case SurfaceKind::Torus: {
      quad::Result r = quad::integrate_2d([&](double x, double y) { return f(Vector3d(x, y, 0.0)); },
                                          0.0, 1.0, 0.0, 1.0, abs_tol / scale_);
      r.value *= scale_;
      r.error *= scale_;
      return r;
    }
    case SurfaceKind::Sphere: {
      quad::Result r = quad::integrate_2d(
          [&](double th, double z) { return f(embed(Chart::Cylinder, th, z)); }, 0.0, 2.0 * M_PI,
          -1.0, 1.0, abs_tol / scale_);
      r.value *= scale_;
      r.error *= scale_;
      return r;
    }
  }
  return {};
}

quad::Result Surface::area_integral(const expr::ScalarField& f, const Box& box, double t,
                                    double abs_tol) const {
  return area_integral([&](const Vector3d& p) { return f.value(bind(p, t)); }, box, abs_tol);
}

double Surface::star_region_area(const std::function<bool(const Vector3d&)>& inside,
                                 const Vector2d& center, double r_max, int angles) const {
  if (kind_ != SurfaceKind::Plane) {
    throw Error(ErrorKind::PreconditionFailed, "star_region_area is implemented on the plane");
  }
  const Vector3d c(center.x(), center.y(), 0.0);
  if (!inside(c)) return 0.0;
  double sum = 0.0;
  for (int k = 0; k < angles; ++k) {
    const double th = 2.0 * M_PI * k / angles;
    const Vector3d e(std::cos(th), std::sin(th), 0.0);
    double lo = 0.0, hi = r_max;
    if (inside(c + hi * e)) {
      lo = hi;
    } else {
      for (int i = 0; i < 200 && hi - lo > 1e-15 * r_max; ++i) {
        const double m = 0.5 * (lo + hi);
        (inside(c + m * e) ? lo : hi) = m;
      }
    }
    const double r = 0.5 * (lo + hi);
    sum += 0.5 * r * r;
  }
  return scale_ * sum * 2.0 * M_PI / angles;
}

std::vector<Vector2d> Surface::lift_to_cover(const std::vector<Vector2d>& path,
                                             const Vector2d& anchor) const {
  if (kind_ != SurfaceKind::Torus) {
    throw Error(ErrorKind::PreconditionFailed, "lift_to_cover requires the torus");
  }
  std::vector<Vector2d> out;
  out.reserve(path.size());
  Vector2d prev_raw = anchor;
  Vector2d prev_lift = anchor;
  for (std::size_t i = 0; i < path.size(); ++i) {
    Vector2d d = path[i] - prev_raw;
    for (int k = 0; k < 2; ++k) {
      d[k] -= std::round(d[k]);
      if (std::fabs(d[k]) > 0.5 - 1e-6) {
        throw Error(ErrorKind::AmbiguousLift,
                    "samples " + std::to_string(i) + " are half a period apart");
      }
    }
    prev_lift += d;
    prev_raw = path[i];
    out.push_back(prev_lift);
  }
  return out;
}

std::string Surface::describe() const {
  std::ostringstream os;
  os << to_string(kind_);
  if (kind_ != SurfaceKind::Plane) os << "(A=" << area_ << ")";
  return os.str();
}

}  // namespace hoferlab
