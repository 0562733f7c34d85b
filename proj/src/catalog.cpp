#include "hoferlab/catalog.hpp"

#include <charconv>
#include <cmath>

#include "hoferlab/quadrature.hpp"

namespace hoferlab::catalog {

std::string num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, std::fabs(v));
  std::string s(buf, r.ptr);
  return v < 0.0 ? "(-" + s + ")" : s;
}

namespace {

const std::string kTwoPi = num(2.0 * M_PI);

std::string peaked(const std::string& x) {
  const std::string r2 = "((" + x + ")^2 + y^2)";
  return "exp(neg(2*" + r2 + "))*bump(" + r2 + " - 1; 1)";
}

}  // namespace

HamiltonianPath sphere_height(double A) {
  return HamiltonianPath::parse(Surface::sphere(A), num(0.5 * A) + "*z").set_label("sphere-height");
}

HamiltonianPath torus_shear() {
  return HamiltonianPath::parse(Surface::torus(1.0), "sin(" + num(M_PI) + "*x)^2").set_label("torus-shear");
}

double shear_f(double x) { return std::pow(std::sin(M_PI * x), 2); }
double shear_fprime(double x) { return M_PI * std::sin(2.0 * M_PI * x); }

HamiltonianPath plateau_bump(double m, double w, double r0) {
  const double R = std::sqrt(r0 * r0 + w) + 0.3;
  return HamiltonianPath::parse(Surface::plane(),
                                num(m) + "*bump(x^2 + y^2 - " + num(r0 * r0) + "; " + num(w) + ")",
                                Box{-R, R, -R, R})
      .set_label("plateau-bump");
}

double plateau_min_period(double m, double w) { return M_PI * w / (1.875 * m); }
double plateau_threshold(double m) { return 1.875 * m / M_PI; }

HamiltonianPath slow_bump() {
  return HamiltonianPath::parse(Surface::plane(), "bump(x^2 + y^2; 2)", Box{-1.6, 1.6, -1.6, 1.6})
      .set_label("slow-bump");
}

HamiltonianPath rotation(double lambda, double half_width) {
  const double h = half_width;
  return HamiltonianPath::parse(Surface::plane(), num(0.5 * lambda) + "*(x^2 + y^2)", Box{-h, h, -h, h})
      .set_label("rotation");
}

HamiltonianPath quartic() {
  return HamiltonianPath::parse(Surface::plane(),
                                "(" + kTwoPi + "*(x^2 + y^2) + (x^2 + y^2)^2)*bump(x^2 + y^2 - 0.25; 0.5)",
                                Box{-1.2, 1.2, -1.2, 1.2})
      .set_label("quartic");
}

HamiltonianPath small_bump(double delta) {
  return HamiltonianPath::parse(Surface::plane(), num(delta) + "*bump(x^2 + y^2; 1)", Box{-1.5, 1.5, -1.5, 1.5})
      .set_label("small-bump");
}

HamiltonianPath peaked_bump() {
  return HamiltonianPath::parse(Surface::plane(), peaked("x"), Box{-1.8, 1.8, -1.8, 1.8}).set_label("peaked-bump");
}

HamiltonianPath traveling_bump() {
  return HamiltonianPath::parse(Surface::plane(), peaked("x - 0.3*t"), Box{-1.8, 2.1, -1.8, 1.8})
      .set_label("traveling-bump");
}

HamiltonianPath rest_then_move() {
  return HamiltonianPath::parse(Surface::plane(), peaked("x - 0.5*(1 - bump(t - 0.5; 0.5))"),
                                Box{-1.8, 2.3, -1.8, 1.8})
      .set_label("rest-then-move");
}

double reparam_loop_b() {
  // int_0^1 |1 + b cos 2 pi t| dt = (2 u0 - pi + 2 b sin u0) / pi, u0 = acos(-1/b)
  auto tv = [](double b) {
    const double u0 = std::acos(-1.0 / b);
    return (2.0 * u0 - M_PI + 2.0 * b * std::sin(u0)) / M_PI;
  };
  return quad::bisect([&](double b) { return tv(b) - 5.0 / 3.0; }, 1.0 + 1e-12, 10.0, 1e-15);
}

std::vector<HomotopicPair> homotopic_pairs() {
  const Surface P = Surface::plane();
  std::vector<HomotopicPair> out;
  {
    const std::string G = "0.6*bump(x^2 + y^2; 1)";
    const Box box{-1.3, 1.3, -1.3, 1.3};
    const std::string a = "(1 + " + num(reparam_loop_b()) + "*cos(" + kTwoPi + "*t))";
    out.push_back({"reparam-loop", HamiltonianPath::parse(P, a + "*" + G, box), HamiltonianPath::parse(P, G, box)});
  }
  {
    const std::string G = "bump((x - 0.2)^2 + 2*y^2; 1.2)";
    const Box box{-1.2, 1.6, -1.1, 1.1};
    out.push_back({"time-reparam", HamiltonianPath::parse(P, G, box),
                   HamiltonianPath::parse(P, "(1 - 0.3*cos(" + kTwoPi + "*t))*" + G, box)});
  }
  {
    const std::string G = "0.8*bump(x^2 + y^2; 1)";
    const std::string L = "bump(x^2 + y^2; 0.5)";
    const Box box{-1.3, 1.3, -1.3, 1.3};
    out.push_back({"commuting-loop",
                   HamiltonianPath::parse(P, G + " + 0.1*sin(" + kTwoPi + "*t)*" + L, box),
                   HamiltonianPath::parse(P, G, box)});
  }
  for (auto& p : out) {
    p.H.set_label(p.name + ":H");
    p.K.set_label(p.name + ":K");
  }
  return out;
}

std::vector<GeneratingSpec> small_generating(double delta) {
  const std::string d = num(delta);
  const std::string q1 = "(((x - 0.5)^2 + y^2)/0.16)";
  const std::string q2 = "(((x + 0.5)^2 + y^2)/0.16)";
  return {
      {"dipole", d + "*((1 - " + q1 + ")*bump(" + q1 + "; 1)^3 - (1 - " + q2 + ")*bump(" + q2 + "; 1)^3)",
       Box{-1.2, 1.2, -0.8, 0.8}},
      {"quadratic", d + "*(x^2 + y^2)*bump(x^2 + y^2; 1)^4", Box{-1.2, 1.2, -1.2, 1.2}},
  };
}

}  // namespace hoferlab::catalog
