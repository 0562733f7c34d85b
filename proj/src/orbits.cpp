#include "hoferlab/orbits.hpp"

#include <algorithm>
#include <sstream>

#include "hoferlab/errors.hpp"
#include "hoferlab/quadrature.hpp"
#include "hoferlab/sampling.hpp"

namespace hoferlab {

using Eigen::Matrix2d;
using Eigen::Vector2d;
using Eigen::Vector3d;

const char* to_string(OrbitClass c) {
  switch (c) {
    case OrbitClass::Constant: return "constant";
    case OrbitClass::Periodic: return "periodic";
    case OrbitClass::Open: return "open";
  }
  return "?";
}

OrbitWitness classify_orbit(const HamiltonianPath& H, const Vector3d& x0, const ReturnOptions& opt) {
  if (!H.autonomous()) {
    throw Error(ErrorKind::PreconditionFailed, "orbit classification needs an autonomous H");
  }
  const Surface& s = H.surface();
  const Vector3d start = s.project(x0);
  OrbitWitness w;
  w.seed = start;
  const double t = H.t0();
  if (H.vector_field(start, t).norm() < 1e-10) {
    w.classification = OrbitClass::Constant;
    return w;
  }
  std::function<Vector3d(const Vector3d&)> proj;
  if (s.kind() == SurfaceKind::Sphere) proj = [](const Vector3d& y) { return y.normalized(); };
  const auto ret = detail::first_return<3>(
      [&](const Vector3d& y) { return H.vector_field(y, t); }, start, opt,
      [&](const Vector3d& a, const Vector3d& b) { return s.difference(a, b); }, proj);
  if (ret) {
    w.classification = OrbitClass::Periodic;
    w.period = ret->first;
    w.residual = ret->second;
  }
  return w;
}

std::optional<double> minimal_positive_period(const HamiltonianPath& H, const Vector3d& x0,
                                              const ReturnOptions& opt) {
  const OrbitWitness w = classify_orbit(H, x0, opt);
  if (w.classification != OrbitClass::Periodic) return std::nullopt;
  return w.period;
}

std::vector<Vector3d> seed_points(const HamiltonianPath& H, const SeedGrid& g) {
  const Surface& s = H.surface();
  const bool sphere = s.kind() == SurfaceKind::Sphere;
  const Box b = sphere ? s.default_box() : g.box.value_or(H.support());
  std::vector<Vector2d> raw;
  for (int i = 0; i < g.grid; ++i)
    for (int j = 0; j < g.grid; ++j)
      raw.emplace_back(b.x0 + (b.x1 - b.x0) * (i + 0.5) / g.grid,
                       b.y0 + (b.y1 - b.y0) * (j + 0.5) / g.grid);
  for (int k = 1; k <= g.random; ++k)
    raw.emplace_back(b.x0 + (b.x1 - b.x0) * halton(std::size_t(k), 2),
                     b.y0 + (b.y1 - b.y0) * halton(std::size_t(k), 3));
  std::stable_sort(raw.begin(), raw.end(), [](const Vector2d& a, const Vector2d& c) {
    return a.x() < c.x() || (a.x() == c.x() && a.y() < c.y());
  });
  std::vector<Vector3d> out;
  out.reserve(raw.size());
  for (const Vector2d& r : raw) {
    out.push_back(sphere ? s.embed(Chart::Cylinder, r.x(), r.y()) : Vector3d(r.x(), r.y(), 0.0));
  }
  return out;
}

ShortOrbitReport short_orbit_scan(const HamiltonianPath& H, double horizon, const SeedGrid& g) {
  ShortOrbitReport rep;
  ReturnOptions opt;
  opt.horizon = horizon;
  for (const Vector3d& seed : seed_points(H, g)) {
    ++rep.seeds;
    const OrbitWitness w = classify_orbit(H, seed, opt);
    if (w.classification == OrbitClass::Constant) continue;
    ++rep.nonconstant_seeds;
    if (w.classification == OrbitClass::Periodic && w.period < horizon * (1.0 - 1e-6)) {
      rep.witness = w;
      break;
    }
  }
  std::ostringstream os;
  if (rep.witness) {
    os << "witness with period " << rep.witness->period;
  } else {
    os << "no closed orbit of period < " << horizon << " among " << rep.seeds
       << " seeds (sampled claim)";
  }
  rep.note = os.str();
  return rep;
}

std::optional<OrbitWitness> has_short_orbit(const HamiltonianPath& H, double horizon,
                                            const SeedGrid& g) {
  return short_orbit_scan(H, horizon, g).witness;
}

std::optional<double> linearized_short_orbit(const LinearizedFlow& lf, double horizon) {
  if (lf.t.size() < 2) return std::nullopt;
  const double t0 = lf.t.front();
  const double t1 = std::min(lf.t.back(), t0 + horizon);
  auto g = [&](double t) { return 2.0 - lf.at(t).trace(); };
  auto nonconstant_fixed = [&](double t) {
    const Matrix2d D = lf.at(t) - Matrix2d::Identity();
    Eigen::JacobiSVD<Matrix2d> svd(D, Eigen::ComputeFullV);
    if (svd.singularValues()[1] > 1e-6) return false;
    const Vector2d v = svd.matrixV().col(1);
    double dev = 0.0;
    for (int k = 1; k <= 32; ++k) dev = std::max(dev, (lf.at(t0 + (t - t0) * k / 32.0) * v - v).norm());
    return dev > 1e-8;
  };
  const int n = 400;
  const double dt = (t1 - t0) / n;
  double prev = g(t0 + dt);
  double prev2 = prev;
  for (int i = 2; i <= n; ++i) {
    const double t = t0 + i * dt;
    const double cur = g(t);
    std::optional<double> cand;
    if ((prev < 0.0) != (cur < 0.0)) {
      cand = quad::bisect(g, t - dt, t, 1e-13);
    } else if (i >= 3 && std::fabs(prev) <= std::fabs(prev2) && std::fabs(prev) <= std::fabs(cur) &&
               std::fabs(prev) < 1e-2) {
      cand = quad::golden_min([&](double s) { return std::fabs(g(s)); }, t - 2.0 * dt, t, 1e-12);
    }
    if (cand && *cand < t0 + horizon && std::fabs(g(*cand)) < 1e-9 && nonconstant_fixed(*cand)) {
      return *cand - t0;
    }
    prev2 = prev;
    prev = cur;
  }
  return std::nullopt;
}

double radial_period(const HamiltonianPath& H, double r) {
  const Vector3d g = H.gradient(Vector3d(r, 0.0, 0.0), H.t0());
  return 2.0 * M_PI * r * H.surface().form_scale() / std::fabs(g.x());
}

RigidityReport rigidity_probe(const HamiltonianPath& H, const Vector3d& p, double horizon,
                              const SeedGrid& g) {
  const double osc = H.oscillation(H.t0());
  if (!(osc > 1e-12)) throw Error(ErrorKind::NotRegular, "H has zero oscillation");
  for (int i = 0; i <= 8; ++i) {
    const double t = H.t0() + (H.t1() - H.t0()) * i / 8.0;
    const Extrema& e = H.extrema(t);
    const double v = H.raw(p, t);
    const double tol = 1e-7 * std::max(osc, 1e-300);
    if (std::fabs(v - e.max.value) > tol && std::fabs(v - e.min.value) > tol) {
      throw Error(ErrorKind::PreconditionFailed, "probe point is not a fixed extremum");
    }
  }
  RigidityReport rep;
  const LinearizedFlow lf = linearized_monodromy(H, p, H.t0(), H.t0() + horizon);
  rep.linear_period = linearized_short_orbit(lf, horizon);
  if (!rep.linear_period) {
    rep.verdict = "criterion silent";
    return rep;
  }
  rep.witness = has_short_orbit(H, horizon, g);
  rep.verdict = rep.witness ? "witness found" : "sampling gap";
  return rep;
}

}  // namespace hoferlab
