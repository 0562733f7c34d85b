#include <algorithm>
#include <cmath>
#include <sstream>

#include "hoferlab/capacity.hpp"
#include "hoferlab/errors.hpp"
#include "hoferlab/quadrature.hpp"

namespace hoferlab {

using Eigen::Vector2d;
using Eigen::Vector3d;

namespace {

constexpr int kDescentSteps = 2048;

/// a + b * H
class AffineFunction final : public PathFunction {
 public:
  AffineFunction(std::shared_ptr<const PathFunction> inner, double a, double b)
      : inner_(std::move(inner)), a_(a), b_(b) {}
  double value(const Vector3d& p, double t) const override { return a_ + b_ * inner_->value(p, t); }
  Vector3d gradient(const Vector3d& p, double t) const override { return b_ * inner_->gradient(p, t); }
  Eigen::Matrix3d hessian(const Vector3d& p, double t) const override { return b_ * inner_->hessian(p, t); }
  bool autonomous() const override { return inner_->autonomous(); }
  std::string text() const override {
    std::ostringstream os;
    os.precision(17);
    os << a_ << " + (" << b_ << ")*(" << inner_->text() << ")";
    return os.str();
  }

 private:
  std::shared_ptr<const PathFunction> inner_;
  double a_, b_;
};

/// Path from a to b: a straight segment in the flat case, a great circle on
/// the sphere.
Vector3d connect(const Surface& s, const Vector3d& a, const Vector3d& b, double t) {
  if (s.kind() != SurfaceKind::Sphere) return a + t * s.difference(a, b);
  const double c = std::clamp(a.dot(b), -1.0, 1.0);
  const double omega = std::acos(c);
  Vector3d w = b - c * a;
  if (w.norm() < 1e-9) {
    w = a.unitOrthogonal();
  } else {
    w.normalize();
  }
  return std::cos(omega * t) * a + std::sin(omega * t) * w;
}

}  // namespace

// ---------------------------------------------------------------------------
// Level parametrisation

LevelParametrization::LevelParametrization(const HamiltonianPath& H, double top, double bottom,
                                           const Vector3d& from, const Vector3d& to)
    : H_(H), top_(top), bottom_(bottom) {
  const Surface& s = H.surface();
  const double t = H.t0();
  auto g = [&](double a) { return H.raw(connect(s, from, to, a), t) - top; };
  if (!(g(0.0) > 0.0 && g(1.0) < 0.0)) {
    throw Error(ErrorKind::NoGradientPath, "level is not crossed between the extrema");
  }
  // first crossing along the path
  double lo = 0.0;
  const int scan = 256;
  for (int i = 1; i <= scan; ++i) {
    if (g(double(i) / scan) <= 0.0) {
      lo = quad::bisect(g, double(i - 1) / scan, double(i) / scan, 1e-15);
      break;
    }
  }
  Vector3d x = s.project(connect(s, from, to, lo));
  // polish onto the level with Newton steps along the gradient
  for (int k = 0; k < 8; ++k) {
    Vector3d gr = H.gradient(x, t);
    if (s.kind() == SurfaceKind::Sphere) gr -= gr.dot(x) * x;
    if (gr.squaredNorm() < 1e-24) break;
    x = s.project(x - (H.raw(x, t) - top) * gr / gr.squaredNorm());
  }
  du_ = (top_ - bottom_) / kDescentSteps;
  nodes_.reserve(kDescentSteps + 1);
  nodes_.push_back(x);
  for (int k = 0; k < kDescentSteps; ++k) nodes_.push_back(descend(nodes_.back(), du_));
}

Vector3d LevelParametrization::descend(const Vector3d& x, double du) const {
  const Surface& s = H_.surface();
  const bool sphere = s.kind() == SurfaceKind::Sphere;
  const double t = H_.t0();
  const ode::Dopri5<3> rk([&](double, const Vector3d& y) -> Vector3d {
    const Vector3d q = sphere ? Vector3d(y.normalized()) : y;
    Vector3d gr = H_.gradient(q, t);
    if (sphere) gr -= gr.dot(q) * q;
    const double n2 = gr.squaredNorm();
    if (!(n2 > 1e-24)) throw Error(ErrorKind::NoGradientPath, "gradient vanishes along the descent");
    return -gr / n2;
  });
  return s.project(rk.step(0.0, x, du));
}

Vector3d LevelParametrization::beta(double u) const {
  const double uc = std::clamp(u, 0.0, span());
  const std::size_t k = std::min(std::size_t(uc / du_), nodes_.size() - 1);
  const double rest = uc - double(k) * du_;
  if (rest == 0.0) return nodes_[k];
  return descend(nodes_[k], rest);
}

Vector3d LevelParametrization::f(double u, double v) const {
  const Vector3d b = beta(u);
  if (v == 0.0) return b;
  return flow_point(H_, b, H_.t0(), H_.t0() + v, 1e-13);
}

// ---------------------------------------------------------------------------
// Fibered ball

namespace {

std::vector<Residual> verify_side(const HamiltonianPath& H, const LevelParametrization& L,
                                  const CgOptions& opt, const std::string& prefix) {
  const Surface& s = H.surface();
  const double t = H.t0();
  const int n = opt.grid;
  const double h = opt.fd_step;
  const double span = L.span();
  double pull_u = 0.0, pull_v = 0.0, area = 0.0;
  std::vector<Vector3d> pts;
  pts.reserve(std::size_t(n) * n);
  for (int i = 0; i < n; ++i) {
    const double u = span * (i + 0.5) / n;
    const Vector3d bm = L.beta(u - h), b0 = L.beta(u), bp = L.beta(u + h);
    Vector3d ym = bm, y0 = b0, yp = bp;
    double v = 0.0;
    for (int j = 0; j < n; ++j) {
      const double vn = (j + 0.5) / n;
      ym = flow_point(H, ym, t + v, t + vn, 1e-13);
      y0 = flow_point(H, y0, t + v, t + vn, 1e-13);
      yp = flow_point(H, yp, t + v, t + vn, 1e-13);
      v = vn;
      const Vector3d vm = flow_point(H, y0, t + v, t + v - h, 1e-13);
      const Vector3d vp = flow_point(H, y0, t + v, t + v + h, 1e-13);
      pull_u = std::max(pull_u, std::fabs((H.raw(yp, t) - H.raw(ym, t)) / (2.0 * h) + 1.0));
      pull_v = std::max(pull_v, std::fabs((H.raw(vp, t) - H.raw(vm, t)) / (2.0 * h)));
      const Vector3d fu = s.difference(ym, yp) / (2.0 * h);
      const Vector3d fv = s.difference(vm, vp) / (2.0 * h);
      area = std::max(area, std::fabs(s.omega(y0, fu, fv) - 1.0));
      pts.push_back(y0);
    }
  }
  double sep = HUGE_VAL;
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b) sep = std::min(sep, s.distance(pts[a], pts[b]));

  double min_period = HUGE_VAL;
  ReturnOptions ro;
  ro.horizon = 2.0;
  for (int k = 0; k < opt.period_levels; ++k) {
    const double u = span * (k + 0.5) / opt.period_levels;
    const Vector3d x = L.beta(u);
    const auto per = minimal_positive_period(H, x, ro);
    const double value = per.value_or(ro.horizon);
    if (value < 1.0 - 1e-6) {
      OrbitWitness w;
      w.seed = x;
      w.period = value;
      w.classification = OrbitClass::Periodic;
      std::ostringstream os;
      os << "level H = " << L.top() - u << " has period " << value;
      throw OrbitError(ErrorKind::LevelTooShort, os.str(), w);
    }
    min_period = std::min(min_period, value);
  }
  return {Residual{prefix + "pullback_du", pull_u, 1e-6},
          Residual{prefix + "pullback_dv", pull_v, 1e-6},
          Residual{prefix + "area_defect", area, 1e-5},
          Residual{prefix + "injectivity_separation", sep, 1e-6, true},
          Residual{prefix + "min_level_period", min_period, 1.0 - 1e-6, true}};
}

std::vector<Residual> verify_fiber(double a) {
  // g(r, theta) = (pi r^2, theta / 2 pi) on the disc of capacity a
  const double R = std::sqrt(a / M_PI);
  auto g = [](double x, double y) {
    return Vector2d(M_PI * (x * x + y * y), std::atan2(y, x) / (2.0 * M_PI) + 0.5);
  };
  double jac = 0.0, contain = 0.0;
  const int n = 40;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double r = R * (i + 0.5) / n;
      const double th = 2.0 * M_PI * (j + 0.5) / n - M_PI;
      const double x = r * std::cos(th), y = r * std::sin(th);
      const double h = 1e-6 * R;
      const Vector2d gx = (g(x + h, y) - g(x - h, y)) / (2.0 * h);
      const Vector2d gy = (g(x, y + h) - g(x, y - h)) / (2.0 * h);
      if (std::fabs(y) > 4.0 * h || x > 0.0) jac = std::max(jac, std::fabs(gx.x() * gy.y() - gx.y() * gy.x() - 1.0));
      const Vector2d q = g(x, y);
      contain = std::max({contain, q.x() - a, -q.x(), q.y() - 1.0, -q.y()});
    }
  }
  return {Residual{"fiber_area_defect", jac, 1e-6}, Residual{"fiber_containment", contain, 1e-12}};
}

}  // namespace

EmbeddingCertificate cg_dim2_certificate(const HamiltonianPath& H, double epsilon, const CgOptions& opt) {
  if (!H.autonomous()) throw Error(ErrorKind::PreconditionFailed, "cg_dim2_certificate needs autonomous H");
  const Extrema& e = H.extrema(H.t0());
  const double m = e.max.value - e.min.value;
  if (!(m > 1e-12)) throw Error(ErrorKind::PreconditionFailed, "H has zero oscillation");
  if (!(epsilon > 1e-9 && epsilon < m)) throw Error(ErrorKind::PreconditionFailed, "need 0 < epsilon < max H");
  if (opt.check_short_orbits) {
    if (auto w = has_short_orbit(H, 1.0, opt.seeds)) {
      std::ostringstream os;
      os << "closed orbit of period " << w->period;
      throw OrbitError(ErrorKind::ShortOrbit, os.str(), *w);
    }
  }
  const Vector3d P = e.max.point, p = e.min.point;
  const double lo = e.min.value;

  auto under = std::make_shared<LevelParametrization>(H, lo + m - 0.5 * epsilon, lo + 0.5 * epsilon, P, p);
  const HamiltonianPath Hover =
      HamiltonianPath(H.surface(), std::make_shared<AffineFunction>(H.function_ptr(), e.max.value, -1.0),
                      H.support(), H.t0(), H.t1())
          .with_hints({P, p});
  auto over = std::make_shared<LevelParametrization>(Hover, m - 0.5 * epsilon, 0.5 * epsilon, p, P);

  auto verify = [H, Hover, under, over, opt, m, epsilon] {
    std::vector<Residual> r = verify_side(H, *under, opt, "under.");
    for (Residual& x : verify_side(Hover, *over, opt, "over.")) r.push_back(x);
    for (Residual& x : verify_fiber(m - epsilon)) r.push_back(x);
    return r;
  };

  EmbeddingCertificate c;
  c.kind = CertificateKind::FiberedBall;
  c.value = m - epsilon;
  c.epsilon = epsilon;
  c.side = "both";
  c.path_fingerprint = H.fingerprint();
  c.residuals = verify();
  std::ostringstream os;
  os.precision(17);
  os << "f(u,v) = phi_v(beta(u)), H(beta(u)) = " << lo + m - 0.5 * epsilon << " - u, u in [0, "
     << m - epsilon << "]";
  c.maps = {os.str(), "over side: same with H -> " + Hover.text(), "g(r,theta) = (pi r^2, theta/2pi)"};
  c.provenance = {"beta from the normalised descent dbeta/du = -grad H/|grad H|^2 (chart metric)",
                  "flat plateaus admitted: only the descent between the two levels must be regular"};
  c.reverify = verify;
  return c;
}

// ---------------------------------------------------------------------------
// Trapezoid profile maps

ProfileMap trapezoid_profile_map(double a, double epsilon, ProfileDirection dir, int grid) {
  if (!(a > 0.0 && epsilon > 0.0)) throw Error(ErrorKind::PreconditionFailed, "need a > 0 and epsilon > 0");
  ProfileMap pm;
  pm.a = a;
  pm.epsilon = epsilon;
  pm.direction = dir;
  const double R = std::sqrt(a / M_PI);
  const double collar = std::min(epsilon, 0.05) * R;
  const auto to_trap = [](const Vector2d& x) {
    return Vector2d(M_PI * x.squaredNorm(), std::atan2(x.y(), x.x()) / (2.0 * M_PI) + 0.5);
  };
  const auto to_ball = [](const Vector2d& q) {
    const double r = std::sqrt(std::max(0.0, q.x()) / M_PI);
    const double th = 2.0 * M_PI * (q.y() - 0.5);
    return Vector2d(r * std::cos(th), r * std::sin(th));
  };
  const bool forward = dir == ProfileDirection::BallToTrapezoid;
  pm.domination_defect = -HUGE_VAL;
  if (forward) {
    pm.map = to_trap;
    pm.h_source = [a](const Vector2d& x) { return a - M_PI * x.squaredNorm(); };
    pm.h_target = [a, epsilon](const Vector2d& q) { return a + epsilon - q.x(); };
    pm.in_collar = [collar](const Vector2d& x) { return x.x() < 0.0 && std::fabs(x.y()) < collar; };
    pm.provenance = "action-angle rearrangement (u, v) = (pi r^2, phi/2pi); slit on the negative x axis";
  } else {
    pm.map = to_ball;
    pm.h_source = [a](const Vector2d& q) { return a - q.x(); };
    pm.h_target = [a, epsilon](const Vector2d& x) { return a + epsilon - M_PI * x.squaredNorm(); };
    pm.in_collar = [collar, R](const Vector2d& q) {
      return q.y() < collar / R || q.y() > 1.0 - collar / R;
    };
    pm.provenance = "inverse of the rearrangement off the slit; no explicit construction in the source";
  }

  // Jacobian and domination on a grid over the source
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      Vector2d x;
      double h;
      if (forward) {
        x = Vector2d(-R + 2.0 * R * (i + 0.5) / grid, -R + 2.0 * R * (j + 0.5) / grid);
        if (M_PI * x.squaredNorm() >= a) continue;
        h = 1e-4 * x.norm();
        if (x.norm() < 1e-3 * R) continue;
      } else {
        x = Vector2d(a * (i + 0.5) / grid, (j + 0.5) / grid);
        h = 1e-4 * std::min(x.x(), a);
      }
      const Vector2d dx = (pm.map(x + Vector2d(h, 0.0)) - pm.map(x - Vector2d(h, 0.0))) / (2.0 * h);
      const Vector2d dy = (pm.map(x + Vector2d(0.0, h)) - pm.map(x - Vector2d(0.0, h))) / (2.0 * h);
      const double defect = std::fabs(dx.x() * dy.y() - dx.y() * dy.x() - 1.0);
      if (pm.in_collar(x)) {
        pm.collar_jacobian_defect = std::max(pm.collar_jacobian_defect, defect);
      } else {
        pm.jacobian_defect = std::max(pm.jacobian_defect, defect);
      }
      pm.domination_defect = std::max(pm.domination_defect, pm.h_source(x) - pm.h_target(pm.map(x)));
    }
  }
  const int nb = 4 * grid;
  for (int k = 0; k < nb; ++k) {
    const double th = 2.0 * M_PI * (k + 0.5) / nb - M_PI;
    if (forward) {
      const Vector2d q = to_trap(Vector2d(R * std::cos(th), R * std::sin(th)));
      pm.boundary_defect = std::max(pm.boundary_defect, std::fabs(q.x() - a));
    } else {
      const Vector2d x = to_ball(Vector2d(a, (k + 0.5) / nb));
      pm.boundary_defect = std::max(pm.boundary_defect, std::fabs(M_PI * x.squaredNorm() - a));
    }
  }
  // area of the image by quadrature of the Jacobian over the source
  const double h = 1e-6;
  if (forward) {
    pm.image_area = quad::tensor_gl(
        [&](double r, double th) {
          const Vector2d x(r * std::cos(th), r * std::sin(th));
          const double hh = h * std::max(r, 1e-3);
          const Vector2d dx = (pm.map(x + Vector2d(hh, 0.0)) - pm.map(x - Vector2d(hh, 0.0))) / (2.0 * hh);
          const Vector2d dy = (pm.map(x + Vector2d(0.0, hh)) - pm.map(x - Vector2d(0.0, hh))) / (2.0 * hh);
          return std::fabs(dx.x() * dy.y() - dx.y() * dy.x()) * r;
        },
        0.0, R, -M_PI / 2, 3.0 * M_PI / 2 - 1e-12, 32);
  } else {
    pm.image_area = quad::tensor_gl(
        [&](double u, double v) {
          const Vector2d q(u, v);
          const double hh = h * std::max(u, 1e-3);
          const Vector2d du = (pm.map(q + Vector2d(hh, 0.0)) - pm.map(q - Vector2d(hh, 0.0))) / (2.0 * hh);
          const Vector2d dv = (pm.map(q + Vector2d(0.0, hh)) - pm.map(q - Vector2d(0.0, hh))) / (2.0 * hh);
          return std::fabs(du.x() * dv.y() - du.y() * dv.x());
        },
        0.0, a, 0.0, 1.0, 32);
  }
  return pm;
}

}  // namespace hoferlab
