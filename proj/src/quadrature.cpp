#include "hoferlab/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "hoferlab/errors.hpp"

namespace hoferlab::quad {

const Rule& gauss_legendre(int n) {
  static std::map<int, Rule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Rule r;
  r.nodes.resize(std::size_t(n));
  r.weights.resize(std::size_t(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    r.nodes[std::size_t(i)] = -x;
    r.weights[std::size_t(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(r)).first->second;
}

namespace {

constexpr double kXgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                            0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                            0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                            0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double k = fc * kWgk[7];
  double g = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    k += kWgk[j] * s;
    if (j % 2 == 1) g += kWg[j / 2] * s;
  }
  return Segment{a, b, k * h, std::fabs((k - g) * h)};
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 double rel_tol, int max_depth) {
  Result res;
  if (a == b) return res;
  // Recursive bisection keeps the evaluation order deterministic.
  double total = 0.0;
  double err = 0.0;
  bool ok = true;
  long evals = 0;
  auto rec = [&](auto&& self, const Segment& s, double tol, int depth) -> void {
    const double m = 0.5 * (s.a + s.b);
    const Segment l = gk15(f, s.a, m);
    const Segment r = gk15(f, m, s.b);
    evals += 30;
    const double refined = l.value + r.value;
    const double diff = std::fabs(refined - s.value);
    if (diff <= tol || depth >= max_depth) {
      if (depth >= max_depth && diff > tol) ok = false;
      total += refined;
      err += diff / 15.0 + l.error * 1e-3 + r.error * 1e-3;
      return;
    }
    self(self, l, 0.5 * tol, depth + 1);
    self(self, r, 0.5 * tol, depth + 1);
  };
  const Segment root = gk15(f, a, b);
  evals += 15;
  const double tol = std::max(abs_tol, rel_tol * std::fabs(root.value));
  if (root.error < 1e-3 * tol && root.error == 0.0) {
    res.value = root.value;
    res.error = root.error;
    res.evaluations = evals;
    return res;
  }
  rec(rec, root, tol, 0);
  res.value = total;
  res.error = err;
  res.converged = ok;
  res.evaluations = evals;
  return res;
}

namespace {

double cell_rule(const std::function<double(double, double)>& f, double x0, double x1, double y0,
                 double y1, const Rule& r) {
  const double cx = 0.5 * (x0 + x1), hx = 0.5 * (x1 - x0);
  const double cy = 0.5 * (y0 + y1), hy = 0.5 * (y1 - y0);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < r.nodes.size(); ++j) {
      row += r.weights[j] * f(cx + hx * r.nodes[i], cy + hy * r.nodes[j]);
    }
    s += r.weights[i] * row;
  }
  return s * hx * hy;
}

}  // namespace

Result integrate_2d(const std::function<double(double, double)>& f, double x0, double x1,
                    double y0, double y1, double abs_tol, int max_depth) {
  const Rule& r = gauss_legendre(8);
  Result res;
  auto rec = [&](auto&& self, double a0, double a1, double b0, double b1, double parent,
                 double tol, int depth) -> void {
    const double am = 0.5 * (a0 + a1), bm = 0.5 * (b0 + b1);
    const double c[4] = {cell_rule(f, a0, am, b0, bm, r), cell_rule(f, am, a1, b0, bm, r),
                         cell_rule(f, a0, am, bm, b1, r), cell_rule(f, am, a1, bm, b1, r)};
    res.evaluations += 256;
    const double sum = c[0] + c[1] + c[2] + c[3];
    const double diff = std::fabs(sum - parent);
    if (diff <= tol || depth >= max_depth) {
      if (diff > tol) res.converged = false;
      res.value += sum;
      res.error += diff;
      return;
    }
    self(self, a0, am, b0, bm, c[0], 0.25 * tol, depth + 1);
    self(self, am, a1, b0, bm, c[1], 0.25 * tol, depth + 1);
    self(self, a0, am, bm, b1, c[2], 0.25 * tol, depth + 1);
    self(self, am, a1, bm, b1, c[3], 0.25 * tol, depth + 1);
  };
  const double root = cell_rule(f, x0, x1, y0, y1, r);
  res.evaluations += 64;
  rec(rec, x0, x1, y0, y1, root, abs_tol, 0);
  return res;
}

double tensor_gl(const std::function<double(double, double)>& f, double x0, double x1, double y0,
                 double y1, int n, int cells) {
  const Rule& r = gauss_legendre(n);
  const double dx = (x1 - x0) / cells, dy = (y1 - y0) / cells;
  double s = 0.0;
  for (int i = 0; i < cells; ++i) {
    for (int j = 0; j < cells; ++j) {
      s += cell_rule(f, x0 + i * dx, x0 + (i + 1) * dx, y0 + j * dy, y0 + (j + 1) * dy, r);
    }
  }
  return s;
}

double golden_min(const std::function<double(double)>& f, double a, double b, double tol) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

double bisect(const std::function<double(double)>& f, double a, double b, double tol,
              int max_iter) {
  double fa = f(a);
  const double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw Error(ErrorKind::NonConvergence, "bisection bracket has no sign change");
  }
  for (int i = 0; i < max_iter && b - a > tol; ++i) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace hoferlab::quad
