#include "hoferlab/moser.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hoferlab/errors.hpp"
#include "hoferlab/catalog.hpp"
#include "hoferlab/expr.hpp"

namespace hoferlab {

using Eigen::Matrix4d;
using Eigen::Vector4d;

namespace {

constexpr char kMagic[8] = {'H', 'L', 'G', 'R', 'I', 'D', '0', '1'};

/// Multilinear interpolation of m interleaved components on an n^4 grid.
template <int M>
std::array<double, M> interp(const std::vector<double>& data, int n, const Vector4d& lo, const Vector4d& hi,
                             const Vector4d& p) {
  int base[4];
  double frac[4];
  for (int a = 0; a < 4; ++a) {
    const double h = (hi[a] - lo[a]) / (n - 1);
    double s = std::clamp((p[a] - lo[a]) / h, 0.0, double(n - 1));
    int i = std::min(int(s), n - 2);
    base[a] = i;
    frac[a] = s - i;
  }
  std::array<double, M> out{};
  for (int corner = 0; corner < 16; ++corner) {
    double w = 1.0;
    std::size_t idx = 0;
    for (int a = 0; a < 4; ++a) {
      const int bit = (corner >> (3 - a)) & 1;
      w *= bit ? frac[a] : 1.0 - frac[a];
      idx = idx * n + std::size_t(base[a] + bit);
    }
    if (w == 0.0) continue;
    for (int c = 0; c < M; ++c) out[c] += w * data[idx * M + c];
  }
  return out;
}

double smoothstep(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  return u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
}

double smoothstep_d(double u) {
  if (u <= 0.0 || u >= 1.0) return 0.0;
  return 30.0 * u * u * (1.0 - u) * (1.0 - u);
}

// component index of (a, b), a < b
constexpr int kPair[4][4] = {{-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};

}  // namespace

DiscreteTwoForm::DiscreteTwoForm(int n, Vector4d lo, Vector4d hi) : n_(n), lo_(lo), hi_(hi) {
  if (n < 3) throw Error(ErrorKind::PreconditionFailed, "grid needs at least 3 points per axis");
  data_.assign(points() * kComponents, 0.0);
}

DiscreteTwoForm DiscreteTwoForm::sample(int n, const Vector4d& lo, const Vector4d& hi,
                                        const std::function<Components(const Vector4d&)>& f) {
  DiscreteTwoForm g(n, lo, hi);
  for (std::size_t i = 0; i < g.points(); ++i) {
    const Components c = f(g.point(i));
    std::copy(c.begin(), c.end(), g.data_.begin() + i * kComponents);
  }
  return g;
}

Vector4d DiscreteTwoForm::point(int i, int j, int k, int l) const {
  const int ix[4] = {i, j, k, l};
  Vector4d p;
  for (int a = 0; a < 4; ++a) p[a] = lo_[a] + spacing(a) * ix[a];
  return p;
}

Vector4d DiscreteTwoForm::point(std::size_t idx) const {
  const int l = int(idx % n_);
  idx /= n_;
  const int k = int(idx % n_);
  idx /= n_;
  const int j = int(idx % n_);
  return point(int(idx / n_), j, k, l);
}

DiscreteTwoForm::Components DiscreteTwoForm::interpolate(const Vector4d& p) const {
  return interp<kComponents>(data_, n_, lo_, hi_, p);
}

Matrix4d DiscreteTwoForm::matrix(const Components& c) {
  Matrix4d T = Matrix4d::Zero();
  for (int a = 0; a < 4; ++a) {
    for (int b = a + 1; b < 4; ++b) {
      T(a, b) = c[kPair[a][b]];
      T(b, a) = -c[kPair[a][b]];
    }
  }
  return T;
}

double DiscreteTwoForm::pfaffian(const Components& c) { return c[0] * c[5] - c[1] * c[4] + c[2] * c[3]; }

double DiscreteTwoForm::closedness_residual() const {
  // (d tau)_{abc} = d_a tau_bc - d_b tau_ac + d_c tau_ab
  static constexpr int kTriples[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  const std::size_t stride[4] = {std::size_t(n_) * n_ * n_, std::size_t(n_) * n_, std::size_t(n_), 1};
  double worst = 0.0;
  for (int i = 1; i < n_ - 1; ++i) {
    for (int j = 1; j < n_ - 1; ++j) {
      for (int k = 1; k < n_ - 1; ++k) {
        for (int l = 1; l < n_ - 1; ++l) {
          const std::size_t idx = index(i, j, k, l);
          auto d = [&](int axis, int comp) {
            return (at(idx + stride[axis], comp) - at(idx - stride[axis], comp)) / (2.0 * spacing(axis));
          };
          for (const auto& t : kTriples) {
            const double v = d(t[0], kPair[t[1]][t[2]]) - d(t[1], kPair[t[0]][t[2]]) + d(t[2], kPair[t[0]][t[1]]);
            worst = std::max(worst, std::fabs(v));
          }
        }
      }
    }
  }
  return worst;
}

void DiscreteTwoForm::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path + " for writing");
  const std::uint32_t ndim = 4, ncomp = kComponents;
  out.write(kMagic, sizeof kMagic);
  out.write(reinterpret_cast<const char*>(&ndim), sizeof ndim);
  out.write(reinterpret_cast<const char*>(&ncomp), sizeof ncomp);
  for (int a = 0; a < 4; ++a) {
    const std::uint64_t d = std::uint64_t(n_);
    out.write(reinterpret_cast<const char*>(&d), sizeof d);
  }
  out.write(reinterpret_cast<const char*>(lo_.data()), 4 * sizeof(double));
  out.write(reinterpret_cast<const char*>(hi_.data()), 4 * sizeof(double));
  out.write(reinterpret_cast<const char*>(data_.data()), std::streamsize(data_.size() * sizeof(double)));
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
}

DiscreteTwoForm DiscreteTwoForm::read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  char magic[8];
  std::uint32_t ndim = 0, ncomp = 0;
  std::uint64_t dims[4] = {};
  in.read(magic, sizeof magic);
  in.read(reinterpret_cast<char*>(&ndim), sizeof ndim);
  in.read(reinterpret_cast<char*>(&ncomp), sizeof ncomp);
  if (!in || std::memcmp(magic, kMagic, sizeof magic) != 0 || ndim != 4 || ncomp != kComponents) {
    throw Error(ErrorKind::IoError, path + " is not a 4-d two-form grid");
  }
  in.read(reinterpret_cast<char*>(dims), sizeof dims);
  if (dims[0] < 3 || dims[0] > 1024 || dims[1] != dims[0] || dims[2] != dims[0] || dims[3] != dims[0]) {
    throw Error(ErrorKind::IoError, path + ": unsupported grid dimensions");
  }
  Vector4d lo, hi;
  in.read(reinterpret_cast<char*>(lo.data()), 4 * sizeof(double));
  in.read(reinterpret_cast<char*>(hi.data()), 4 * sizeof(double));
  DiscreteTwoForm g(int(dims[0]), lo, hi);
  in.read(reinterpret_cast<char*>(g.data_.data()), std::streamsize(g.data_.size() * sizeof(double)));
  if (!in) throw Error(ErrorKind::IoError, path + " is truncated");
  return g;
}

// ---------------------------------------------------------------------------

MoserResult moser_split(const DiscreteTwoForm& tau, const MoserOptions& opt) {
  using C = DiscreteTwoForm::Components;
  const int n = tau.n();
  const std::size_t N = tau.points();
  const Vector4d lo = tau.lo(), hi = tau.hi();
  MoserResult res;
  res.closedness = tau.closedness_residual();

  auto split = [](const C& c) { return C{c[0], 0.0, 0.0, 0.0, 0.0, 1.0}; };

  res.rho_min = HUGE_VAL;
  res.pfaffian_min = HUGE_VAL;
  const double omega0 = tau.at(0, 0);
  for (std::size_t i = 0; i < N; ++i) {
    C c;
    for (int k = 0; k < 6; ++k) c[k] = tau.at(i, k);
    res.rho_min = std::min(res.rho_min, c[5]);
    res.fiber_restriction = std::max(res.fiber_restriction, std::fabs(c[0] - omega0));
    const C c0 = split(c);
    for (double t : opt.positivity_times) {
      C ct;
      for (int k = 0; k < 6; ++k) ct[k] = c0[k] + t * (c[k] - c0[k]);
      res.pfaffian_min = std::min(res.pfaffian_min, DiscreteTwoForm::pfaffian(ct));
    }
  }
  if (!(res.rho_min > 0.0)) {
    std::ostringstream os;
    os << "disc restriction not positive (min " << res.rho_min << ")";
    throw Error(ErrorKind::NondegeneracyFailed, os.str());
  }
  if (!(res.pfaffian_min > 0.0)) {
    std::ostringstream os;
    os << "interpolated form degenerates (min Pfaffian " << res.pfaffian_min << ")";
    throw Error(ErrorKind::NondegeneracyFailed, os.str());
  }

  // Primitive of delta = tau - tau_0 by integration along u (axis 2), then the
  // correction by d(chi(u) phi(x, v)) that makes it vanish near u = hi.
  const std::size_t su = std::size_t(n), sv = 1;
  const double hu = tau.spacing(2), hv = tau.spacing(3);
  std::vector<double> eta(N * 4, 0.0);  // (x1, x2, u, v)
  auto delta_u = [&](std::size_t idx, int b) {
    switch (b) {
      case 0: return -tau.at(idx, 1);
      case 1: return -tau.at(idx, 3);
      default: return tau.at(idx, 5) - 1.0;
    }
  };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) {
        for (int k = 1; k < n; ++k) {
          const std::size_t idx = tau.index(i, j, k, l), prev = idx - su;
          for (int b : {0, 1, 3}) {
            const int bd = b == 3 ? 2 : b;
            eta[idx * 4 + b] = eta[prev * 4 + b] + 0.5 * hu * (delta_u(prev, bd) + delta_u(idx, bd));
          }
        }
      }
    }
  }
  std::vector<double> phi(std::size_t(n) * n * n, 0.0);  // (i, j, l)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int l = 1; l < n; ++l) {
        const std::size_t top = tau.index(i, j, n - 1, l);
        const std::size_t f = (std::size_t(i) * n + j) * n + l;
        phi[f] = phi[f - 1] + 0.5 * hv * (eta[(top - sv) * 4 + 3] + eta[top * 4 + 3]);
      }
    }
  }
  const double ua = lo[2] + 0.2 * (hi[2] - lo[2]), ub = hi[2] - 0.2 * (hi[2] - lo[2]);
  std::vector<double> etaf(N * 4, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double u = lo[2] + hu * k;
        const double chi = smoothstep((u - ua) / (ub - ua));
        const double dchi = smoothstep_d((u - ua) / (ub - ua)) / (ub - ua);
        for (int l = 0; l < n; ++l) {
          const std::size_t idx = tau.index(i, j, k, l), top = tau.index(i, j, n - 1, l);
          for (int b : {0, 1, 3}) etaf[idx * 4 + b] = eta[idx * 4 + b] - chi * eta[top * 4 + b];
          etaf[idx * 4 + 2] = -dchi * phi[(std::size_t(i) * n + j) * n + l];
        }
      }
    }
  }

  // Moser field Y_t = T_t^{-1} eta, integrated with RK4.
  auto field = [&](const Vector4d& p, double t) -> Vector4d {
    const C c = tau.interpolate(p);
    const auto e = interp<4>(etaf, n, lo, hi, p);
    const C c0 = split(c);
    C ct;
    for (int k = 0; k < 6; ++k) ct[k] = c0[k] + t * (c[k] - c0[k]);
    const Vector4d rhs(e[0], e[1], e[2], e[3]);
    if (rhs.cwiseAbs().maxCoeff() == 0.0) return Vector4d::Zero();
    return DiscreteTwoForm::matrix(ct).partialPivLu().solve(rhs);
  };
  res.images.resize(N);
  const int steps = opt.time_steps;
  const double dt = 1.0 / steps;
  for (std::size_t idx = 0; idx < N; ++idx) {
    Vector4d y = tau.point(idx);
    for (int s = 0; s < steps; ++s) {
      const double t = s * dt;
      const Vector4d k1 = field(y, t);
      const Vector4d k2 = field(y + 0.5 * dt * k1, t + 0.5 * dt);
      const Vector4d k3 = field(y + 0.5 * dt * k2, t + 0.5 * dt);
      const Vector4d k4 = field(y + dt * k3, t + dt);
      y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    res.images[idx] = y;
    const Vector4d p = tau.point(idx);
    const double disp = (y - p).cwiseAbs().maxCoeff();
    res.max_displacement = std::max(res.max_displacement, disp);
    bool face = false;
    for (int a = 0; a < 4; ++a) face = face || p[a] == lo[a] || std::fabs(p[a] - hi[a]) < 1e-12;
    if (face) res.boundary_displacement = std::max(res.boundary_displacement, disp);
  }

  // residual of h1^* tau_1 = tau_0 at interior grid points
  const std::size_t stride[4] = {std::size_t(n) * n * n, std::size_t(n) * n, std::size_t(n), 1};
  for (int i = 1; i < n - 1; ++i) {
    for (int j = 1; j < n - 1; ++j) {
      for (int k = 1; k < n - 1; ++k) {
        for (int l = 1; l < n - 1; ++l) {
          const std::size_t idx = tau.index(i, j, k, l);
          Matrix4d D;
          for (int a = 0; a < 4; ++a) {
            D.col(a) = (res.images[idx + stride[a]] - res.images[idx - stride[a]]) / (2.0 * tau.spacing(a));
          }
          C c0;
          for (int q = 0; q < 6; ++q) c0[q] = tau.at(idx, q);
          const Matrix4d T1 = DiscreteTwoForm::matrix(tau.interpolate(res.images[idx]));
          const Matrix4d T0 = DiscreteTwoForm::matrix(split(c0));
          res.residual = std::max(res.residual, (D.transpose() * T1 * D - T0).cwiseAbs().maxCoeff());
        }
      }
    }
  }
  if (res.residual > opt.tolerance) {
    std::ostringstream os;
    os << "pullback residual " << res.residual << " exceeds " << opt.tolerance;
    throw Error(ErrorKind::ResidualTooLarge, os.str());
  }
  return res;
}

DiscreteTwoForm moser_test_form(int n, double amplitude, double rho_dip) {
  const std::string a = catalog::num(amplitude);
  const std::string c = "cos(" + catalog::num(0.5 * M_PI) + "*";
  const std::string uv = c + "z)^4*" + c + "t)^4";
  const std::string base = c + "x)^4*" + c + "y)^4*" + uv;
  const auto g = expr::ScalarField::parse(a + "*(x + z)*" + base);
  const auto k = expr::ScalarField::parse(a + "*(y - t + 0.5)*" + base);
  const auto dip = expr::ScalarField::parse(catalog::num(rho_dip) + "*" + uv);
  return DiscreteTwoForm::sample(n, Vector4d::Constant(-1.0), Vector4d::Constant(1.0), [&](const Vector4d& p) {
    const expr::Bindings b{p[0], p[1], p[2], p[3]};
    const auto dg = g.gradient(b), dk = k.gradient(b);
    return DiscreteTwoForm::Components{1.0, dg.d[0], dk.d[0], dg.d[1], dk.d[1],
                                       1.0 + dk.d[2] - dg.d[3] - dip.value(b)};
  });
}

}  // namespace hoferlab
