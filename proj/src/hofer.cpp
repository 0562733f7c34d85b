#include "hoferlab/hofer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hoferlab/errors.hpp"
#include "hoferlab/sampling.hpp"

namespace hoferlab {

using Eigen::Matrix2d;
using Eigen::Matrix3d;
using Eigen::Vector2d;
using Eigen::Vector3d;

Matrix3d PathFunction::hessian(const Vector3d& p, double t) const {
  const double h = 1e-6;
  Matrix3d m;
  for (int j = 0; j < 3; ++j) {
    Vector3d a = p, b = p;
    a[j] += h;
    b[j] -= h;
    m.col(j) = (gradient(a, t) - gradient(b, t)) / (2.0 * h);
  }
  return 0.5 * (m + m.transpose());
}

double ExprFunction::value(const Vector3d& p, double t) const {
  return f_.value({p.x(), p.y(), p.z(), t});
}

Vector3d ExprFunction::gradient(const Vector3d& p, double t) const {
  const expr::Gradient g = f_.gradient({p.x(), p.y(), p.z(), t});
  return Vector3d(g.d[0], g.d[1], g.d[2]);
}

Matrix3d ExprFunction::hessian(const Vector3d& p, double t) const {
  const expr::Hessian h = f_.hessian({p.x(), p.y(), p.z(), t});
  Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = h.dd[std::size_t(i)][std::size_t(j)];
  return m;
}

// ---------------------------------------------------------------------------
// HamiltonianPath

HamiltonianPath::HamiltonianPath()
    : HamiltonianPath(Surface::plane(), std::make_shared<ExprFunction>(expr::ScalarField()),
                      Surface::plane().default_box()) {}

HamiltonianPath::HamiltonianPath(Surface s, std::shared_ptr<const PathFunction> fn, Box support,
                                 double t0, double t1)
    : surface_(std::move(s)),
      fn_(std::move(fn)),
      support_(support),
      t0_(t0),
      t1_(t1),
      cache_(std::make_shared<Cache>()) {}

HamiltonianPath HamiltonianPath::parse(const Surface& s, std::string_view text, Box support,
                                       double t0, double t1) {
  expr::ParseOptions o = s.parse_options();
  o.domain.lo[3] = t0;
  o.domain.hi[3] = t1;
  if (s.kind() == SurfaceKind::Plane) {
    o.domain.lo[0] = support.x0;
    o.domain.hi[0] = support.x1;
    o.domain.lo[1] = support.y0;
    o.domain.hi[1] = support.y1;
  }
  auto fn = std::make_shared<ExprFunction>(expr::ScalarField::parse(text, o));
  return HamiltonianPath(s, std::move(fn), support, t0, t1);
}

HamiltonianPath HamiltonianPath::normalize() const {
  HamiltonianPath h = *this;
  h.normalized_ = true;
  return h;
}

HamiltonianPath HamiltonianPath::with_search(SearchOptions o) const {
  HamiltonianPath h = *this;
  h.search_ = o;
  h.cache_ = std::make_shared<Cache>();
  return h;
}

HamiltonianPath HamiltonianPath::with_hints(std::vector<Vector3d> hints) const {
  HamiltonianPath h = *this;
  h.hints_ = std::move(hints);
  h.cache_ = std::make_shared<Cache>();
  return h;
}

double HamiltonianPath::value(const Vector3d& p, double t) const {
  const double v = fn_->value(p, t);
  return normalized_ ? v - extrema(t).min.value : v;
}

const Extrema& HamiltonianPath::extrema(double t) const {
  const double key = autonomous() ? t0_ : t;
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->by_time.find(key);
    if (it != cache_->by_time.end()) return it->second;
  }
  Extrema e = search_extrema(surface_, *fn_, key, support_, search_, hints_);
  std::lock_guard<std::mutex> lock(cache_->mu);
  return cache_->by_time.emplace(key, std::move(e)).first->second;
}

std::string HamiltonianPath::fingerprint() const {
  std::ostringstream os;
  os.precision(17);
  os << surface_.describe() << "|" << fn_->text() << "|" << t0_ << "|" << t1_;
  return os.str();
}

// ---------------------------------------------------------------------------
// Extremum search

namespace {

struct Optimum {
  double value;  // of sign * f
  Vector3d point;
};

Vector3d tangent_basis_vector(const Vector3d& p) {
  const Vector3d a = std::fabs(p.x()) < 0.9 ? Vector3d::UnitX() : Vector3d::UnitY();
  return (a - a.dot(p) * p).normalized();
}

class Ascent {
 public:
  Ascent(const Surface& s, const PathFunction& f, double t, double sign, double cell)
      : s_(s), f_(f), t_(t), sign_(sign), cell_(cell) {}

  Optimum run(Vector3d p) const {
    const bool sphere = s_.kind() == SurfaceKind::Sphere;
    if (sphere) p.normalize();
    double v = sign_ * f_.value(p, t_);
    for (int it = 0; it < 200; ++it) {
      const Vector3d g3 = sign_ * f_.gradient(p, t_);
      Eigen::Matrix<double, 3, 2> B;
      if (sphere) {
        const Vector3d e1 = tangent_basis_vector(p);
        B.col(0) = e1;
        B.col(1) = p.cross(e1);
      } else {
        B << 1, 0, 0, 1, 0, 0;
      }
      const Vector2d g = B.transpose() * g3;
      const double gn = g.norm();
      if (gn == 0.0 || gn < 1e-14 * (1.0 + std::fabs(v))) break;
      Matrix3d H3 = sign_ * f_.hessian(p, t_);
      if (sphere) H3 -= p.dot(g3) * Matrix3d::Identity();
      const Matrix2d Hm = B.transpose() * H3 * B;
      Vector2d d;
      const double det = Hm.determinant();
      if (Hm(0, 0) < 0.0 && det > 0.0) {
        d = -Hm.inverse() * g;
        if (d.norm() > 4.0 * cell_) d *= 4.0 * cell_ / d.norm();
      } else {
        d = g * (cell_ / gn);
      }
      double alpha = 1.0;
      bool accepted = false;
      bool stalled = false;
      const double slope = g.dot(d);
      for (int k = 0; k < 60; ++k) {
        Vector3d q = p + B * (alpha * d);
        if (sphere) q.normalize();
        const double vq = sign_ * f_.value(q, t_);
        if (vq >= v + 1e-4 * alpha * slope) {
          stalled = vq - v <= 1e-15 * (1.0 + std::fabs(v)) && (q - p).norm() < 1e-12;
          p = q;
          v = vq;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted || stalled) break;
    }
    return Optimum{v, s_.wrap(p)};
  }

 private:
  const Surface& s_;
  const PathFunction& f_;
  double t_;
  double sign_;
  double cell_;
};

std::vector<Vector3d> grid_points(const Surface& s, const Box& box, int n, double offset) {
  std::vector<Vector3d> pts;
  pts.reserve(std::size_t(n * n));
  const Box b = s.kind() == SurfaceKind::Sphere ? s.default_box() : box;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double u = b.x0 + (b.x1 - b.x0) * (i + offset) / n;
      const double v = b.y0 + (b.y1 - b.y0) * (j + offset) / n;
      pts.push_back(s.kind() == SurfaceKind::Sphere ? s.embed(Chart::Cylinder, u, v)
                                                    : Vector3d(u, v, 0.0));
    }
  }
  return pts;
}

std::vector<Vector3d> halton_points(const Surface& s, const Box& box, int n, std::size_t offset) {
  std::vector<Vector3d> pts;
  const Box b = s.kind() == SurfaceKind::Sphere ? s.default_box() : box;
  for (int k = 0; k < n; ++k) {
    const double u = b.x0 + (b.x1 - b.x0) * halton(offset + std::size_t(k) + 1, 2);
    const double v = b.y0 + (b.y1 - b.y0) * halton(offset + std::size_t(k) + 1, 3);
    pts.push_back(s.kind() == SurfaceKind::Sphere ? s.embed(Chart::Cylinder, u, v)
                                                  : Vector3d(u, v, 0.0));
  }
  return pts;
}

struct RoundResult {
  Optimum best;
  std::vector<Optimum> all;
};

RoundResult search_round(const Surface& s, const PathFunction& f, double t, const Box& box,
                         const SearchOptions& opt, const std::vector<Vector3d>& hints, double sign,
                         double grid_offset, std::size_t halton_offset) {
  const std::vector<Vector3d> grid = grid_points(s, box, opt.grid, grid_offset);
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = sign * f.value(grid[i], t);
  std::vector<std::size_t> idx(grid.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return vals[a] > vals[b]; });

  std::vector<Vector3d> starts;
  for (int k = 0; k < opt.grid_starts && std::size_t(k) < idx.size(); ++k) starts.push_back(grid[idx[std::size_t(k)]]);
  for (const Vector3d& p : halton_points(s, box, opt.random_starts, halton_offset)) starts.push_back(p);
  for (const Vector3d& p : hints) starts.push_back(p);
  if (s.kind() != SurfaceKind::Sphere) {
    starts.emplace_back(box.x0, box.y0, 0.0);
    starts.emplace_back(box.x1, box.y1, 0.0);
  }

  const double cell = s.kind() == SurfaceKind::Sphere
                          ? 2.0 / opt.grid
                          : std::max(box.x1 - box.x0, box.y1 - box.y0) / opt.grid;
  const Ascent ascent(s, f, t, sign, cell);
  RoundResult r;
  r.best.value = -HUGE_VAL;
  for (const Vector3d& p : starts) {
    const Optimum o = ascent.run(p);
    r.all.push_back(o);
    if (o.value > r.best.value) r.best = o;
  }
  return r;
}

void fill_candidates(const RoundResult& r, double scale, std::vector<Vector3d>& out,
                     const Surface& s) {
  const double tol = 1e-9 * (1.0 + scale);
  for (const Optimum& o : r.all) {
    if (o.value < r.best.value - tol) continue;
    bool dup = false;
    for (const Vector3d& q : out) {
      if (s.distance(q, o.point) < 1e-6) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(o.point);
  }
}

}  // namespace

Extrema search_extrema(const Surface& s, const PathFunction& f, double t, const Box& box,
                       const SearchOptions& opt, const std::vector<Vector3d>& hints) {
  Extrema e;
  for (int side = 0; side < 2; ++side) {
    const double sign = side == 0 ? 1.0 : -1.0;
    RoundResult r = search_round(s, f, t, box, opt, hints, sign, 0.5, 0);
    if (opt.check_stability) {
      RoundResult r2 = search_round(s, f, t, box, opt, hints, sign, 0.0, 1000);
      if (std::fabs(r2.best.value - r.best.value) > opt.stability_tol) {
        std::ostringstream os;
        os << (side == 0 ? "max" : "min") << " estimates " << sign * r.best.value << " and "
           << sign * r2.best.value << " disagree at t = " << t;
        throw Error(ErrorKind::ExtremumSearchUnstable, os.str());
      }
      if (r2.best.value > r.best.value) std::swap(r.best, r2.best);
      r.all.insert(r.all.end(), r2.all.begin(), r2.all.end());
    }
    Extremum best{sign * r.best.value, r.best.point};
    const double scale = std::fabs(best.value);
    if (side == 0) {
      e.max = best;
      fill_candidates(r, scale, e.max_candidates, s);
    } else {
      e.min = best;
      fill_candidates(r, scale, e.min_candidates, s);
    }
  }
  return e;
}

// ---------------------------------------------------------------------------
// Length

quad::Result length_with_error(const HamiltonianPath& H, double abs_tol) {
  if (H.autonomous()) {
    quad::Result r;
    r.value = H.oscillation(H.t0()) * (H.t1() - H.t0());
    return r;
  }
  return quad::integrate([&](double t) { return H.oscillation(t); }, H.t0(), H.t1(), abs_tol,
                         1e-11, 20);
}

double length(const HamiltonianPath& H) { return length_with_error(H).value; }

double sup_norm(const HamiltonianPath& H, int samples) {
  double m = 0.0;
  const int n = H.autonomous() ? 1 : samples;
  for (int i = 0; i < n; ++i) {
    const double t = n == 1 ? H.t0() : H.t0() + (H.t1() - H.t0()) * i / (n - 1);
    m = std::max(m, H.oscillation(t));
  }
  return m;
}

PathSummary summarize(const HamiltonianPath& H, int samples, int windows) {
  PathSummary s;
  const quad::Result L = length_with_error(H);
  s.length = L.value;
  s.length_error = L.error;
  for (int i = 0; i < samples; ++i) {
    const double t = H.t0() + (H.t1() - H.t0()) * i / std::max(1, samples - 1);
    const Extrema& e = H.extrema(t);
    s.t.push_back(t);
    s.max.push_back(e.max.value);
    s.min.push_back(e.min.value);
    s.argmax.push_back(e.max.point);
    s.argmin.push_back(e.min.point);
  }
  s.windows = windows;
  try {
    s.quasi_autonomous = geodesic_check(H, windows).satisfies_criterion;
  } catch (const Error&) {
    s.quasi_autonomous = false;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Fixed extrema

std::optional<FixedExtrema> fixed_extrema(const HamiltonianPath& H, double a, double b,
                                          int samples) {
  std::vector<double> ts;
  for (int i = 0; i < samples; ++i) ts.push_back(samples == 1 ? a : a + (b - a) * i / (samples - 1));
  double scale = 0.0;
  for (double t : ts) scale = std::max(scale, H.oscillation(t));
  const double tol = 1e-7 * scale;

  std::vector<Vector3d> maxc, minc;
  for (double t : ts) {
    const Extrema& e = H.extrema(t);
    maxc.push_back(e.max.point);
    minc.push_back(e.min.point);
    maxc.insert(maxc.end(), e.max_candidates.begin(), e.max_candidates.end());
    minc.insert(minc.end(), e.min_candidates.begin(), e.min_candidates.end());
  }
  if (H.surface().kind() != SurfaceKind::Sphere) {
    const Box& bx = H.support();
    for (const Vector3d& c : {Vector3d(bx.x0, bx.y0, 0), Vector3d(bx.x1, bx.y0, 0),
                              Vector3d(bx.x0, bx.y1, 0), Vector3d(bx.x1, bx.y1, 0)}) {
      maxc.push_back(c);
      minc.push_back(c);
    }
  }
  auto find = [&](const std::vector<Vector3d>& cands, bool is_max) -> std::optional<Vector3d> {
    for (const Vector3d& c : cands) {
      bool ok = true;
      for (double t : ts) {
        const Extrema& e = H.extrema(t);
        const double v = H.raw(c, t);
        const double gap = is_max ? e.max.value - v : v - e.min.value;
        if (gap > tol) {
          ok = false;
          break;
        }
      }
      if (ok) return c;
    }
    return std::nullopt;
  };
  const auto P = find(maxc, true);
  if (!P) return std::nullopt;
  const auto p = find(minc, false);
  if (!p) return std::nullopt;
  return FixedExtrema{*P, *p};
}

GeodesicReport geodesic_check(const HamiltonianPath& H, int windows) {
  if (windows < 1) throw Error(ErrorKind::PreconditionFailed, "window count must be positive");
  const int n = 4 * windows + 1;
  for (int i = 0; i < n; ++i) {
    const double t = H.t0() + (H.t1() - H.t0()) * i / (n - 1);
    if (!(H.oscillation(t) > 1e-12)) {
      std::ostringstream os;
      os << "H_t has zero oscillation at t = " << t;
      throw Error(ErrorKind::NotRegular, os.str());
    }
  }
  GeodesicReport r;
  r.satisfies_criterion = true;
  const double w = (H.t1() - H.t0()) / windows;
  for (int k = 0; k < windows; ++k) {
    WindowVerdict v;
    v.a = H.t0() + k * w;
    v.b = k + 1 == windows ? H.t1() : H.t0() + (k + 1) * w;
    v.extrema = fixed_extrema(H, v.a, v.b);
    v.quasi_autonomous = v.extrema.has_value();
    r.satisfies_criterion = r.satisfies_criterion && v.quasi_autonomous;
    r.windows.push_back(v);
  }
  r.note =
      "fixed maximum and minimum on every window; this condition is necessary and sufficient "
      "for a regular path to be a geodesic";
  return r;
}

// ---------------------------------------------------------------------------
// Calabi and brackets

quad::Result calabi(const HamiltonianPath& H, double abs_tol) {
  const Surface& s = H.surface();
  auto slice = [&](double t) {
    return s.area_integral([&](const Vector3d& p) { return H.raw(p, t); }, H.support(), abs_tol * 0.1);
  };
  if (H.autonomous()) {
    quad::Result r = slice(H.t0());
    r.value *= H.t1() - H.t0();
    r.error *= H.t1() - H.t0();
    return r;
  }
  bool ok = true;
  quad::Result r = quad::integrate(
      [&](double t) {
        const quad::Result q = slice(t);
        ok = ok && q.converged;
        return q.value;
      },
      H.t0(), H.t1(), abs_tol, 1e-12, 20);
  r.converged = r.converged && ok;
  return r;
}

NormBracket norm_bracket(const HamiltonianPath& path, const std::optional<CapacityBound>& cert,
                         double rel_tol) {
  NormBracket b;
  b.upper = length(path);
  b.notes.push_back("upper bound: length of the supplied path");
  if (cert) {
    if (cert->path_fingerprint != path.fingerprint()) {
      throw Error(ErrorKind::MismatchedEndpoint,
                  "certificate was issued for '" + cert->path_fingerprint + "'");
    }
    b.lower = cert->value;
    b.notes.push_back("lower bound: " + cert->kind + " certificate");
    if (b.lower > b.upper + 1e-9 * (1.0 + b.upper)) {
      b.notes.push_back("certificate exceeds the path length; bound inconsistent");
    }
  } else {
    b.notes.push_back("lower bound: none (0)");
  }
  b.equality = b.upper - b.lower <= rel_tol * b.upper;
  return b;
}

}  // namespace hoferlab
