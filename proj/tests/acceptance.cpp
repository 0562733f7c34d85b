#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hoferlab/catalog.hpp"
#include "hoferlab/experiments.hpp"
#include "hoferlab/orbits.hpp"

using namespace hoferlab;
using Eigen::Vector3d;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void line(int n, bool ok, const std::string& what) {
  std::cout << (ok ? "PASS" : "FAIL") << "  [" << n << "] " << what << std::endl;
  failures += ok ? 0 : 1;
}

// all checks whose name starts with prefix pass, and there is at least one
bool group(const ExperimentReport& r, const std::string& prefix, double* worst = nullptr) {
  bool any = false, ok = true;
  double w = 0.0;
  for (const Check& c : r.checks) {
    if (c.name.rfind(prefix, 0) != 0) continue;
    any = true;
    ok = ok && c.pass;
    w = std::max(w, c.relation == "abs" ? std::fabs(c.value - c.target) : c.value);
  }
  if (worst) *worst = w;
  return any && ok && r.error.empty();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

std::string slurp(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <path to hoferlab>\n";
    return 2;
  }
  const std::string cli = argv[1];

  {
    const auto t0 = Clock::now();
    const ExperimentReport r = run_experiment("sphere-loop");
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    double per = 0, len = 0;
    const bool ok = group(r, "max |period - 1|", &per) && group(r, "length", &len) &&
                    group(r, "cg_dim2 certificate") && group(r, "certificate residuals") && secs < 120.0;
    // oracle: one revolution of the equator closes at t = 1 and the loop length is A
    const double L = r.to_json()["checks"][1]["value"].get<double>();
    line(1, ok && std::fabs(L - 4.0) < 1e-9,
         "sphere loop: 50 periods within " + fmt(per) + " of 1, length " + fmt(L) + ", fibered ball >= 3.8, " +
             fmt(secs) + " s");
  }
  {
    const ExperimentReport r = run_experiment("hz-lower-bound");
    double wp = 0;
    const bool ok = group(r, "c_HZ certificate value") && group(r, "K seeds") && group(r, "rotation lambda") &&
                    group(r, "refusal witness period", &wp);
    line(2, ok, "HZ-function: value equals the length, 1000 seeds clean, 4 pi rotation refused (witness off by " +
                    fmt(wp) + " from 2 pi / 4 pi)");
  }
  const ExperimentReport glue = run_experiment("glue-compare");
  {
    double w = 0;
    const bool ok = group(glue, "gluing symplecticity, reparam", &w) && group(glue, "gluing symplecticity, time") &&
                    group(glue, "gluing symplecticity, commuting") && group(glue, "gluing symplecticity, K = H");
    line(3, ok, "gluing map symplectic at 1000 samples per pair (worst " + fmt(w) + "), identical pair below 1e-10");
  }
  {
    double w = 0;
    const bool ok = group(glue, "area identity", &w) && group(glue, "side flag");
    line(4, ok, "area identity for 3 pairs x 3 nu (worst " + fmt(w) + "), side flags consistent");
  }
  {
    double w = 0;
    const bool ok = group(glue, "fiber area spread", &w) && group(glue, "fault: inconsistent area");
    line(5, ok, "fibre areas agree across 20 fibres (worst " + fmt(w) + "), injected fault raises InconsistentArea");
  }
  const ExperimentReport plateau = run_experiment("plateau-bump");
  {
    double j = 0, d = 0;
    const bool ok = group(plateau, "trapezoid jacobian", &j) && group(plateau, "trapezoid domination", &d);
    line(6, ok, "trapezoid maps: jacobian defect " + fmt(j) + " on 200x200, domination " + fmt(d));
  }
  {
    const bool ok = group(plateau, "cg_dim2 certificate / ||H||") && group(plateau, "min sampled level period") &&
                    group(plateau, "certificate residuals");
    line(7, ok, "plateau bump: fibered ball >= 0.95 ||H|| on both sides, level periods >= 1");
  }
  {
    const ExperimentReport r = run_experiment("torus-shear");
    double lift = 0, area = 0;
    const bool ok = group(r, "lift defect", &lift) && group(r, "disjoined area", &area) &&
                    group(r, "region disjoined");
    line(8, ok, "torus shear: lift defect " + fmt(lift) + " on 30x30 for t = 1, 2, 4; disjoined area within " +
                    fmt(area) + " of T");
  }
  {
    const ExperimentReport r = run_experiment("flatness");
    double le = 0, sp = 0;
    const bool ok = group(r, "|L - osc F|", &le) && group(r, "swept area spread", &sp) && group(r, "fixed extrema");
    line(9, ok, "flatness: |L - osc F| <= " + fmt(le) + ", swept spread " + fmt(sp) + ", extrema fixed");
  }
  {
    const ExperimentReport r = run_experiment("linear-rigidity");
    // independent oracle: 2 pi r / |H'(r)| with H' by central differences
    bool oracle_ok = false;
    const RigidityReport q = rigidity_probe(catalog::quartic(), Vector3d::Zero());
    if (q.witness) {
      const HamiltonianPath Q = catalog::quartic();
      const double rad = q.witness->seed.head(2).norm(), e = 1e-6;
      const double dH = (Q.raw(Vector3d(rad + e, 0, 0), 0) - Q.raw(Vector3d(rad - e, 0, 0), 0)) / (2 * e);
      oracle_ok = std::fabs(q.witness->period - 2 * M_PI * rad / std::fabs(dH)) < 1e-3;
    }
    const bool ok = group(r, "quartic: witness found") && group(r, "witness period vs radial oracle") &&
                    group(r, "control: criterion silent") && oracle_ok;
    line(10, ok, "linear rigidity: quartic witness matches the radial period, pi rotation reports criterion silent");
  }
  {
    const ExperimentReport r = run_experiment("moser");
    double r12 = 0, r16 = 0;
    const bool ok = group(r, "residual at 12^4", &r12) && group(r, "residual at 16^4", &r16) &&
                    group(r, "residual decreases");
    line(11, ok && r16 < r12, "Moser splitting: residual " + fmt(r12) + " at 12^4, " + fmt(r16) + " at 16^4");
  }
  {
    const auto t0 = Clock::now();
    const std::string dir = (std::filesystem::temp_directory_path() / "hoferlab_acceptance").string();
    std::filesystem::create_directories(dir);
    const std::string a = dir + "/check1.json", b = dir + "/check2.json";
    const int ra = std::system(("\"" + cli + "\" check --out \"" + a + "\" 2>/dev/null").c_str());
    const int rb = std::system(("\"" + cli + "\" check --out \"" + b + "\" 2>/dev/null").c_str());
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const std::string ja = slurp(a), jb = slurp(b);
    const bool ok = ra == 0 && rb == 0 && !ja.empty() && ja == jb && secs < 1800.0;
    line(12, ok, "hoferlab check passes twice with byte-identical JSON (" + std::to_string(ja.size()) + " bytes, " +
                     fmt(secs) + " s)");
    std::filesystem::remove_all(dir);
  }
  std::cout << (12 - failures) << "/12 criteria pass" << std::endl;
  return failures == 0 ? 0 : 1;
}
