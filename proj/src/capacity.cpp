#include "hoferlab/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hoferlab/errors.hpp"
#include "hoferlab/quadrature.hpp"

namespace hoferlab {

using Eigen::Vector2d;
using Eigen::Vector3d;
using Vec4 = ode::Vec<4>;

const char* to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::HZFunction: return "HZ-function";
    case CertificateKind::FiberedBall: return "fibered-ball";
    case CertificateKind::TrapezoidMap: return "trapezoid-map";
    case CertificateKind::LocalBall: return "local-ball";
  }
  return "?";
}

bool EmbeddingCertificate::valid() const {
  for (const Residual& r : residuals)
    if (!r.ok()) return false;
  return value >= 0.0;
}

const Residual* EmbeddingCertificate::residual(const std::string& name) const {
  for (const Residual& r : residuals)
    if (r.name == name) return &r;
  return nullptr;
}

double chz_smoothing(double s, double sigma, int derivative) {
  if (s <= 0.0) return 0.0;
  if (s >= sigma) return derivative == 0 ? s - 0.5 * sigma : derivative == 1 ? 1.0 : 0.0;
  const double u = s / sigma;
  switch (derivative) {
    case 0: return sigma * u * u * u * u * (2.5 - 3.0 * u + u * u);
    case 1: return u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
    default: return 30.0 * u * u * (1.0 - u) * (1.0 - u) / sigma;
  }
}

// ---------------------------------------------------------------------------
// Hofer-Zehnder function

namespace {

struct ChzModel {
  HamiltonianPath H;
  double min = 0.0;
  double m = 0.0;
  double nu = 0.0;
  double sigma = 0.0;
  double top = 0.0;  // constant value outside the region

  double w(const Vec4& y) const {
    const Vector3d x(y[0], y[1], 0.0);
    return H.raw(x, H.t0()) - min + 0.25 * nu - 0.5 * M_PI * (y[2] * y[2] + y[3] * y[3]);
  }
  double K(const Vec4& y) const { return top - chz_smoothing(w(y), sigma); }
  Vec4 field(const Vec4& y) const {
    const Vector3d x(y[0], y[1], 0.0);
    const double sp = chz_smoothing(w(y), sigma, 1);
    Vec4 out = Vec4::Zero();
    if (sp == 0.0) return out;
    const Vector3d Xm = H.surface().vector_field_from_gradient(-sp * H.gradient(x, H.t0()), x);
    out[0] = Xm.x();
    out[1] = Xm.y();
    // dK/dz = sp * pi * z; X_z = (dK/dz2, -dK/dz1)
    out[2] = sp * M_PI * y[3];
    out[3] = -sp * M_PI * y[2];
    return out;
  }
};

std::vector<Residual> chz_verify(const ChzModel& km, const ChzOptions& opt, int* seeds_out) {
  const Box b = km.H.support();
  const bool torus = km.H.surface().kind() == SurfaceKind::Torus;
  double boundary = 0.0;
  int seeds = 0;
  std::optional<OrbitWitness> witness;
  ReturnOptions ro;
  ro.horizon = opt.horizon;
  const std::function<Vec4(const Vec4&)> field = [&](const Vec4& y) { return km.field(y); };
  const std::function<Vec4(const Vec4&, const Vec4&)> diff = [&](const Vec4& a, const Vec4& c) {
    Vec4 d = c - a;
    if (torus) {
      d[0] -= std::round(d[0]);
      d[1] -= std::round(d[1]);
    }
    return d;
  };
  for (int i = 0; i < opt.grid && !witness; ++i) {
    for (int j = 0; j < opt.grid && !witness; ++j) {
      const double x = b.x0 + (b.x1 - b.x0) * (i + 0.5) / opt.grid;
      const double y = b.y0 + (b.y1 - b.y0) * (j + 0.5) / opt.grid;
      const double hx = km.H.raw(Vector3d(x, y, 0.0), km.H.t0()) - km.min;
      for (double extra : {0.0, 0.5}) {
        const double rho = hx + 0.25 * km.nu + extra;
        const Vec4 q(x, y, std::sqrt(2.0 * rho / M_PI), 0.0);
        boundary = std::max(boundary, std::fabs(km.K(q) - km.top));
      }
      for (int k = 0; k < opt.levels; ++k) {
        const double rho = (hx + 0.25 * km.nu) * k / opt.levels;
        const Vec4 q(x, y, std::sqrt(2.0 * rho / M_PI), 0.0);
        ++seeds;
        if (field(q).norm() < 1e-10) continue;
        const auto ret = detail::first_return<4>(field, q, ro, diff);
        if (ret && ret->first < opt.horizon) {
          OrbitWitness w;
          w.seed = q;
          w.period = ret->first;
          w.residual = ret->second;
          w.classification = OrbitClass::Periodic;
          witness = w;
          break;
        }
      }
    }
  }
  if (witness) {
    std::ostringstream os;
    os << "K has a closed orbit of period " << witness->period << " through ("
       << witness->seed.transpose() << ")";
    throw OrbitError(ErrorKind::ShortOrbitInK, os.str(), *witness);
  }
  if (seeds_out) *seeds_out = seeds;
  return {Residual{"boundary_constancy", boundary, 1e-9},
          Residual{"k_short_orbit_witnesses", 0.0, 0.0}};
}

}  // namespace

EmbeddingCertificate chz_certificate(const HamiltonianPath& H, double nu, const ChzOptions& opt) {
  if (!H.autonomous()) throw Error(ErrorKind::PreconditionFailed, "chz_certificate needs autonomous H");
  if (H.surface().kind() == SurfaceKind::Sphere) {
    throw Error(ErrorKind::PreconditionFailed, "chz_certificate is implemented on the plane and torus");
  }
  if (!(nu > 0.0)) throw Error(ErrorKind::PreconditionFailed, "nu must be positive");
  const Extrema& e = H.extrema(H.t0());
  auto km = std::make_shared<ChzModel>();
  km->H = H;
  km->min = e.min.value;
  km->m = e.max.value - e.min.value;
  km->nu = nu;
  km->sigma = nu / 8.0;
  km->top = km->m + 0.25 * nu - 0.5 * km->sigma;

  EmbeddingCertificate c;
  c.kind = CertificateKind::HZFunction;
  c.path_fingerprint = H.fingerprint();
  c.epsilon = 0.0;
  std::ostringstream ks;
  ks.precision(17);
  ks << "K(x,z) = " << km->top << " - S(H(x) - " << km->min << " + " << 0.25 * nu
     << " - pi*(z1^2+z2^2)/2), S quintic-ramp smoothing with sigma = " << km->sigma;
  c.maps = {"H(x) = " + H.text(), ks.str()};
  c.provenance = {"action coordinate rho = pi|z|^2/2 (disc rotation period 2)",
                  "K is a function of H - rho, so its orbits are reparametrised orbits of -H + m + rho"};
  if (km->m <= 1e-14) {
    c.value = 0.0;
    c.provenance.push_back("degenerate: H is constant");
    c.reverify = [] { return std::vector<Residual>{}; };
    return c;
  }
  int seeds = 0;
  c.residuals = chz_verify(*km, opt, &seeds);
  c.residuals.push_back(Residual{"k_seeds", double(seeds), double(opt.grid * opt.grid * opt.levels), true});
  c.value = km->m;
  c.reverify = [km, opt] { return chz_verify(*km, opt, nullptr); };
  return c;
}

// ---------------------------------------------------------------------------
// Local ball

double c2_norm(const HamiltonianPath& H, int grid, int times) {
  const Box b = H.support();
  double m = 0.0;
  const int nt = H.autonomous() ? 1 : times;
  for (int k = 0; k < nt; ++k) {
    const double t = nt == 1 ? H.t0() : H.t0() + (H.t1() - H.t0()) * k / (nt - 1);
    for (int i = 0; i < grid; ++i) {
      for (int j = 0; j < grid; ++j) {
        const Vector3d p(b.x0 + (b.x1 - b.x0) * (i + 0.5) / grid, b.y0 + (b.y1 - b.y0) * (j + 0.5) / grid, 0.0);
        m = std::max(m, H.function().hessian(p, t).topLeftCorner<2, 2>().cwiseAbs().maxCoeff());
      }
    }
  }
  return m;
}

namespace {

/// Piecewise-linear interpolant of mu(t) with an exactly invertible
/// cumulative integral.
struct MuProfile {
  std::vector<double> t, mu, cum;

  double value(double s) const {
    const std::size_t k = segment(s);
    const double h = t[k + 1] - t[k];
    return mu[k] + (mu[k + 1] - mu[k]) * (s - t[k]) / h;
  }
  double total() const { return cum.back(); }
  std::size_t segment(double s) const {
    std::size_t k = std::size_t(std::upper_bound(t.begin(), t.end(), s) - t.begin());
    k = k == 0 ? 0 : k - 1;
    return std::min(k, t.size() - 2);
  }
  /// tau with int_{t0}^{tau} mu = theta * total.
  double inverse(double theta) const {
    const double target = theta * total();
    std::size_t k = std::size_t(std::upper_bound(cum.begin(), cum.end(), target) - cum.begin());
    k = k == 0 ? 0 : std::min(k - 1, t.size() - 2);
    const double h = t[k + 1] - t[k];
    const double a = 0.5 * (mu[k + 1] - mu[k]) / h;
    const double b = mu[k];
    const double r = target - cum[k];
    double x;
    if (std::fabs(a) < 1e-300) {
      x = r / b;
    } else {
      x = (-b + std::sqrt(std::max(0.0, b * b + 4.0 * a * r))) / (2.0 * a);
    }
    return t[k] + std::clamp(x, 0.0, h);
  }
};

}  // namespace

EmbeddingCertificate local_ball_certificate(const HamiltonianPath& H, double epsilon,
                                            const LocalBallOptions& opt) {
  if (H.surface().kind() == SurfaceKind::Sphere) {
    throw Error(ErrorKind::PreconditionFailed, "local_ball_certificate uses a flat chart");
  }
  const int nt = H.autonomous() ? 1 : opt.times;
  auto tk = [&](int k) { return nt == 1 ? H.t0() : H.t0() + (H.t1() - H.t0()) * k / (nt - 1); };
  for (int k = 0; k < nt; ++k) {
    if (!(H.oscillation(tk(k)) > 1e-12)) throw Error(ErrorKind::NotRegular, "H_t has zero oscillation");
  }
  const auto fe = fixed_extrema(H, H.t0(), H.t1());
  if (!fe) throw Error(ErrorKind::PreconditionFailed, "H has no fixed extrema");
  const double c2 = c2_norm(H);
  if (opt.c2_threshold && c2 > *opt.c2_threshold) {
    std::ostringstream os;
    os << "C2 norm " << c2 << " exceeds the certified threshold " << *opt.c2_threshold;
    throw Error(ErrorKind::PreconditionFailed, os.str());
  }
  const double L = length(H);
  if (!(epsilon > 0.0 && epsilon < L)) throw Error(ErrorKind::PreconditionFailed, "need 0 < epsilon < length");

  const Vector3d P = fe->P;
  const double scale = H.surface().form_scale();
  auto mu = [&](double t) { return H.oscillation(t); };
  auto Hn = [&](const Vector3d& x, double t) { return H.raw(x, t) - H.extrema(t).min.value; };

  double containment = -HUGE_VAL;
  for (double c : opt.levels) {
    const double r = std::sqrt(std::max(0.0, (1.0 - c) * (L - epsilon) / (M_PI * scale)));
    for (int k = 0; k < nt; ++k) {
      const double t = tk(k);
      const double target = c * mu(t);
      for (int a = 0; a < opt.angles; ++a) {
        const double th = 2.0 * M_PI * a / opt.angles;
        const Vector3d x = P + Vector3d(r * std::cos(th), r * std::sin(th), 0.0);
        const double defect = target - Hn(x, t);
        containment = std::max(containment, defect);
        if (defect > 1e-12 * (1.0 + mu(t))) {
          std::ostringstream os;
          os << "level c = " << c << ": H_t(" << x.x() << ", " << x.y() << ") at t = " << t
             << " is below c*mu(t) by " << defect;
          throw Error(ErrorKind::ContainmentFailed, os.str());
        }
      }
    }
  }

  auto prof = std::make_shared<MuProfile>();
  const int np = H.autonomous() ? 2 : 65;
  for (int k = 0; k < np; ++k) {
    const double t = H.t0() + (H.t1() - H.t0()) * k / (np - 1);
    prof->t.push_back(t);
    prof->mu.push_back(mu(t));
  }
  prof->cum.push_back(0.0);
  for (int k = 0; k + 1 < np; ++k)
    prof->cum.push_back(prof->cum.back() + 0.5 * (prof->mu[k] + prof->mu[std::size_t(k) + 1]) * (prof->t[std::size_t(k) + 1] - prof->t[std::size_t(k)]));
  const double A = L - epsilon;
  auto psi = [prof](double a, double th) {
    const double t = prof->inverse(th);
    return Vector2d(a * prof->value(t) / prof->total(), t);
  };

  auto verify_psi = [psi, prof, A, mu]() {
    double jac = 0.0, contain = -HUGE_VAL;
    const int g = 24;
    const double h = 1e-6;
    for (int i = 0; i < g; ++i) {
      for (int j = 0; j < g; ++j) {
        const double a = A * (i + 0.5) / g;
        const double th = (j + 0.5) / g;
        const Vector2d da = (psi(a + h * A, th) - psi(a - h * A, th)) / (2.0 * h * A);
        const Vector2d dt = (psi(a, th + h) - psi(a, th - h)) / (2.0 * h);
        jac = std::max(jac, std::fabs(da.x() * dt.y() - da.y() * dt.x() - 1.0));
        if (i == g - 1) {
          const Vector2d s = psi(A, th);
          contain = std::max(contain, s.x() - mu(s.y()));
        }
      }
    }
    return std::vector<Residual>{Residual{"psi_jacobian_defect", jac, 1e-6},
                                 Residual{"psi_containment", contain, 1e-12}};
  };

  EmbeddingCertificate cert;
  cert.kind = CertificateKind::LocalBall;
  cert.value = L - epsilon;
  cert.epsilon = epsilon;
  cert.path_fingerprint = H.fingerprint();
  cert.residuals = verify_psi();
  cert.residuals.push_back(Residual{"containment_margin", containment, 1e-12});
  cert.residuals.push_back(Residual{"c2_norm", c2, opt.c2_threshold.value_or(HUGE_VAL)});
  std::ostringstream fs;
  fs.precision(17);
  fs << "f(x) = (" << P.x() << ", " << P.y() << ") + x";
  cert.maps = {fs.str(), "psi(a, theta) = (a*mu(tau)/M, tau), int_0^tau mu = theta*M"};
  cert.provenance = {"fixed maximum used as the ball centre", "nested-level containment checked at c in {0, .25, .5, .75, 1}"};
  cert.reverify = verify_psi;
  return cert;
}

}  // namespace hoferlab
