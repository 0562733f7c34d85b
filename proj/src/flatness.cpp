#include "hoferlab/flatness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hoferlab/errors.hpp"
#include "hoferlab/quadrature.hpp"
#include "hoferlab/sampling.hpp"

namespace hoferlab {

using Eigen::Matrix2d;
using Eigen::Vector2d;
using Eigen::Vector3d;

namespace {

Matrix2d J() {
  Matrix2d j;
  j << 0.0, -1.0, 1.0, 0.0;
  return j;
}

double omega(const Vector2d& a, const Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace

WeinsteinIsotopy::WeinsteinIsotopy(expr::ScalarField F, Box box) : F_(std::move(F)), box_(box) {
  if (F_.depends_on(expr::Var::Z) || F_.depends_on(expr::Var::T)) {
    throw Error(ErrorKind::PreconditionFailed, "generating function must depend on x and y only");
  }
}

WeinsteinIsotopy WeinsteinIsotopy::parse(std::string_view text, Box box) {
  return WeinsteinIsotopy(expr::ScalarField::parse(text), box);
}

double WeinsteinIsotopy::F(const Vector2d& x) const { return F_.value({x.x(), x.y(), 0.0, 0.0}); }

Vector2d WeinsteinIsotopy::grad(const Vector2d& x) const {
  const auto g = F_.gradient({x.x(), x.y(), 0.0, 0.0});
  return {g.d[0], g.d[1]};
}

Matrix2d WeinsteinIsotopy::hess(const Vector2d& x) const {
  const auto h = F_.hessian({x.x(), x.y(), 0.0, 0.0});
  Matrix2d m;
  m << h.dd[0][0], h.dd[0][1], h.dd[1][0], h.dd[1][1];
  return m;
}

Vector2d WeinsteinIsotopy::midpoint(const Vector2d& x, double s) const {
  Vector2d m = x;
  for (int it = 0; it < 50; ++it) {
    const Vector2d G = m - x - s * J() * grad(m);
    if (G.cwiseAbs().maxCoeff() < 1e-15 * (1.0 + x.norm())) return m;
    const Matrix2d D = Matrix2d::Identity() - s * J() * hess(m);
    const Vector2d step = D.partialPivLu().solve(G);
    m -= step;
    if (!m.allFinite()) break;
    if (step.cwiseAbs().maxCoeff() < 1e-16 * (1.0 + m.norm())) return m;
  }
  const Vector2d G = m - x - s * J() * grad(m);
  if (m.allFinite() && G.cwiseAbs().maxCoeff() < 1e-12) return m;
  std::ostringstream os;
  os << "midpoint equation at (" << x.x() << ", " << x.y() << "), s = " << s;
  throw Error(ErrorKind::NewtonDiverged, os.str());
}

Vector2d WeinsteinIsotopy::map(const Vector2d& x, double t) const { return 2.0 * midpoint(x, 0.5 * t) - x; }

Matrix2d WeinsteinIsotopy::jacobian(const Vector2d& x, double t) const {
  const Matrix2d A = 0.5 * t * J() * hess(midpoint(x, 0.5 * t));
  return (Matrix2d::Identity() - A).partialPivLu().solve(Matrix2d::Identity() + A);
}

Vector2d WeinsteinIsotopy::velocity(const Vector2d& y, double t) const {
  const Vector2d m = midpoint(y, -0.5 * t);
  const Matrix2d A = 0.5 * t * J() * hess(m);
  return (Matrix2d::Identity() - A).partialPivLu().solve(J() * grad(m));
}

// ---------------------------------------------------------------------------

IsotopyHamiltonian::IsotopyHamiltonian(std::shared_ptr<const WeinsteinIsotopy> iso, Vector2d base, int nodes,
                                       int panels)
    : iso_(std::move(iso)), base_(base), nodes_(nodes), panels_(panels) {}

Vector3d IsotopyHamiltonian::gradient(const Vector3d& p, double t) const {
  const Vector2d v = iso_->velocity(p.head<2>(), t);
  return {-v.y(), v.x(), 0.0};
}

double IsotopyHamiltonian::value(const Vector3d& p, double t) const {
  const Vector2d d = p.head<2>() - base_;
  if (d.squaredNorm() == 0.0) return 0.0;
  const quad::Rule& r = quad::gauss_legendre(nodes_);
  const double w = 1.0 / panels_;
  double sum = 0.0;
  for (int k = 0; k < panels_; ++k) {
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      const double s = w * (k + 0.5 * (1.0 + r.nodes[i]));
      const Vector2d q = base_ + s * d;
      const Vector3d g = gradient(Vector3d(q.x(), q.y(), 0.0), t);
      sum += 0.5 * w * r.weights[i] * (g.x() * d.x() + g.y() * d.y());
    }
  }
  return sum;
}

std::string IsotopyHamiltonian::text() const { return "isotopy[" + iso_->generating().text() + "]"; }

// ---------------------------------------------------------------------------

double chart_symplectic_residual() {
  // coordinates (q, p, Q, P) -> (b1, b2, xi1, xi2)
  Eigen::Matrix4d D;
  D << 0.5, 0.0, 0.5, 0.0,
       0.0, 0.5, 0.0, 0.5,
       0.0, -1.0, 0.0, 1.0,
       1.0, 0.0, -1.0, 0.0;
  Eigen::Matrix4d can = Eigen::Matrix4d::Zero();  // -d lambda_can = db1^dxi1 + db2^dxi2
  can(0, 2) = can(1, 3) = 1.0;
  can(2, 0) = can(3, 1) = -1.0;
  Eigen::Matrix4d target = Eigen::Matrix4d::Zero();  // -dq^dp + dQ^dP
  target(0, 1) = -1.0;
  target(1, 0) = 1.0;
  target(2, 3) = 1.0;
  target(3, 2) = -1.0;
  return (D.transpose() * can * D - target).cwiseAbs().maxCoeff();
}

double swept_area(const WeinsteinIsotopy& iso, const Vector2d& q1, const Vector2d& q2, ArcShape shape,
                  int nodes, int cells) {
  for (const Vector2d& q : {q1, q2}) {
    const double g = iso.grad(q).norm();
    if (g > 1e-9) {
      std::ostringstream os;
      os << "arc endpoint (" << q.x() << ", " << q.y() << ") is not critical, |grad F| = " << g;
      throw Error(ErrorKind::EndpointNotFixed, os.str());
    }
  }
  const Vector2d d = q2 - q1;
  const Vector2d perp(-d.y(), d.x());
  const double bend = shape == ArcShape::Straight ? 0.0 : (shape == ArcShape::BendLeft ? 0.3 : -0.3);
  const Vector2d c = 0.5 * (q1 + q2) + bend * perp;
  auto f = [&](double s, double t) {
    const Vector2d x = (1 - s) * (1 - s) * q1 + 2 * s * (1 - s) * c + s * s * q2;
    const Vector2d dx = 2 * (1 - s) * (c - q1) + 2 * s * (q2 - c);
    const Vector2d m = iso.midpoint(x, 0.5 * t);
    const Matrix2d A = 0.5 * t * J() * iso.hess(m);
    const auto lu = (Matrix2d::Identity() - A).partialPivLu();
    const Vector2d ds = lu.solve((Matrix2d::Identity() + A) * dx);
    const Vector2d dt = lu.solve(J() * iso.grad(m));
    return omega(ds, dt);
  };
  return quad::tensor_gl(f, 0.0, 1.0, 0.0, 1.0, nodes, cells);
}

// ---------------------------------------------------------------------------

namespace {

Vector2d polish_critical(const WeinsteinIsotopy& iso, Vector2d q) {
  for (int it = 0; it < 20; ++it) {
    const Vector2d g = iso.grad(q);
    if (g.norm() < 1e-14) break;
    const Matrix2d H = iso.hess(q);
    if (std::fabs(H.determinant()) < 1e-300) break;
    const Vector2d step = H.partialPivLu().solve(g);
    if (!step.allFinite()) break;
    q -= step;
  }
  return q;
}

}  // namespace

FlatnessReport flatness_check(const std::string& name, const std::string& text, const Box& box,
                              const FlatnessOptions& opt) {
  FlatnessReport rep;
  rep.name = name;
  auto iso = std::make_shared<WeinsteinIsotopy>(WeinsteinIsotopy::parse(text, box));
  const HamiltonianPath Fpath = HamiltonianPath::parse(Surface::plane(), text, box);
  const Extrema& e = Fpath.extrema(0.0);
  rep.osc_F = e.max.value - e.min.value;
  rep.argmin = polish_critical(*iso, e.min.point.head<2>());
  rep.argmax = polish_critical(*iso, e.max.point.head<2>());
  for (const Vector2d& q : {rep.argmin, rep.argmax}) {
    if (iso->grad(q).norm() > opt.fixed_tol) {
      std::ostringstream os;
      os << "extremum of F at (" << q.x() << ", " << q.y() << ") is not critical";
      throw Error(ErrorKind::EndpointNotFixed, os.str());
    }
  }
  rep.F_difference = iso->F(rep.argmax) - iso->F(rep.argmin);

  SearchOptions so;
  so.grid = 12;
  so.grid_starts = 8;
  so.random_starts = 8;
  so.check_stability = false;
  const Vector3d qmin(rep.argmin.x(), rep.argmin.y(), 0.0), qmax(rep.argmax.x(), rep.argmax.y(), 0.0);
  rep.path = HamiltonianPath(Surface::plane(), std::make_shared<IsotopyHamiltonian>(iso, rep.argmax, opt.line_nodes, opt.line_panels),
                             box)
                 .with_search(so)
                 .with_hints({qmin, qmax})
                 .set_label("flatness:" + name);
  rep.length = length(rep.path);
  rep.length_error = std::fabs(rep.length - rep.osc_F);
  rep.fixed_extrema = fixed_extrema(rep.path, 0.0, 1.0).has_value();

  const ArcShape shapes[3] = {ArcShape::Straight, ArcShape::BendLeft, ArcShape::BendRight};
  for (int i = 0; i < 3; ++i) rep.swept[std::size_t(i)] = swept_area(*iso, rep.argmin, rep.argmax, shapes[i]);
  const auto [lo, hi] = std::minmax_element(rep.swept.begin(), rep.swept.end());
  rep.swept_spread = *hi - *lo;
  for (double a : rep.swept) rep.swept_error = std::max(rep.swept_error, std::fabs(a - rep.F_difference));

  const quad::Rule& r = quad::gauss_legendre(24);
  double tc = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    const double t = 0.5 * (1.0 + r.nodes[i]);
    tc += 0.5 * r.weights[i] * (rep.path.raw(qmin, t) - rep.path.raw(qmax, t));
  }
  rep.time_curve_error = std::fabs(tc - rep.F_difference);

  for (int k = 1; k <= opt.chart_samples; ++k) {
    const Vector2d x(box.x0 + (box.x1 - box.x0) * halton(std::size_t(k), 2),
                     box.y0 + (box.y1 - box.y0) * halton(std::size_t(k), 3));
    for (double t : {0.5, 1.0}) {
      rep.det_defect = std::max(rep.det_defect, std::fabs(iso->jacobian(x, t).determinant() - 1.0));
    }
  }
  rep.chart_residual = chart_symplectic_residual();
  return rep;
}

}  // namespace hoferlab
