#include "hoferlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "hoferlab/capacity.hpp"
#include "hoferlab/catalog.hpp"
#include "hoferlab/errors.hpp"
#include "hoferlab/flatness.hpp"
#include "hoferlab/flow.hpp"
#include "hoferlab/hofer.hpp"
#include "hoferlab/moser.hpp"
#include "hoferlab/orbits.hpp"
#include "hoferlab/quadrature.hpp"
#include "hoferlab/quasicyl.hpp"
#include "hoferlab/sampling.hpp"

namespace hoferlab {

using Eigen::Vector2d;
using Eigen::Vector3d;
using json = nlohmann::ordered_json;

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Reports

json Tolerances::to_json() const {
  return json{{"sphere_period", sphere_period},
              {"sphere_length", sphere_length},
              {"sphere_capacity_fraction", sphere_capacity_fraction},
              {"chz_witness_period", chz_witness_period},
              {"glue_symplectic", glue_symplectic},
              {"glue_symplectic_identical", glue_symplectic_identical},
              {"compare_identity", compare_identity},
              {"fiber_spread", fiber_spread},
              {"trapezoid_jacobian", trapezoid_jacobian},
              {"trapezoid_domination", trapezoid_domination},
              {"plateau_capacity_fraction", plateau_capacity_fraction},
              {"shear_lift", shear_lift},
              {"shear_area_relative", shear_area_relative},
              {"flatness_length_relative", flatness_length_relative},
              {"flatness_swept_spread", flatness_swept_spread},
              {"rigidity_period", rigidity_period},
              {"moser_residual", moser_residual}};
}

bool ExperimentReport::pass() const {
  if (!error.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

Check& ExperimentReport::add(Check c) {
  if (c.relation == "abs") {
    c.pass = std::fabs(c.value - c.target) <= c.tolerance;
  } else if (c.relation == "le") {
    c.pass = c.value <= c.tolerance;
  } else if (c.relation == "ge") {
    c.pass = c.value >= c.target;
  } else {
    c.pass = c.value == 1.0;
  }
  checks.push_back(std::move(c));
  return checks.back();
}

Check& ExperimentReport::add_abs(const std::string& name, double value, double target, double tol,
                                 const std::string& prov) {
  return add(Check{name, value, target, tol, "abs", prov, false});
}

Check& ExperimentReport::add_le(const std::string& name, double value, double tol, const std::string& prov) {
  return add(Check{name, value, 0.0, tol, "le", prov, false});
}

Check& ExperimentReport::add_ge(const std::string& name, double value, double target, const std::string& prov) {
  return add(Check{name, value, target, 0.0, "ge", prov, false});
}

Check& ExperimentReport::add_true(const std::string& name, bool ok, const std::string& prov) {
  return add(Check{name, ok ? 1.0 : 0.0, 1.0, 0.0, "true", prov, false});
}

void ExperimentReport::cite(const std::string& statement, const std::string& support) {
  conclusions.push_back({statement, support});
}

json ExperimentReport::to_json() const {
  json j;
  j["id"] = id;
  j["version"] = HOFERLAB_VERSION;
  j["pass"] = pass();
  if (!error.empty()) j["error"] = error;
  j["inputs"] = inputs;
  j["tolerances"] = tolerances;
  json cs = json::array();
  for (const Check& c : checks) {
    json e{{"name", c.name}, {"value", c.value}, {"relation", c.relation}};
    if (c.relation == "abs" || c.relation == "ge") e["target"] = c.target;
    if (c.relation == "abs" || c.relation == "le") e["tolerance"] = c.tolerance;
    e["provenance"] = c.provenance;
    e["pass"] = c.pass;
    cs.push_back(e);
  }
  j["checks"] = cs;
  json cc = json::array();
  for (const Conclusion& c : conclusions) {
    cc.push_back({{"statement", c.statement}, {"status", "cited conclusion, supported by certificate " + c.support}});
  }
  j["conclusions"] = cc;
  j["details"] = details;
  return j;
}

namespace {

json residuals_json(const EmbeddingCertificate& c) {
  json r = json::array();
  for (const Residual& x : c.residuals) {
    r.push_back({{"name", x.name}, {"value", x.value}, {"tolerance", x.tolerance}, {"lower_bound", x.lower_bound},
                 {"ok", x.ok()}});
  }
  return json{{"kind", to_string(c.kind)}, {"value", c.value}, {"epsilon", c.epsilon}, {"side", c.side},
              {"valid", c.valid()}, {"residuals", r}};
}

std::string length_profile_csv(const HamiltonianPath& H) {
  const PathSummary s = summarize(H, 65, 16);
  std::ostringstream os;
  os.precision(17);
  os << "t,max,min\n";
  for (std::size_t i = 0; i < s.t.size(); ++i) os << s.t[i] << "," << s.max[i] << "," << s.min[i] << "\n";
  return os.str();
}

double primary(const ExperimentOptions& o, double dflt) { return o.tol ? *o.tol : dflt; }
int resolution(const ExperimentOptions& o, int dflt) { return o.grid > 0 ? o.grid : dflt; }

// ---------------------------------------------------------------------------
// Catalog experiments

ExperimentReport sphere_loop(const ExperimentOptions& o) {
  const Tolerances& T = o.tolerances;
  ExperimentReport r;
  const double A = 4.0, eps = 0.05 * A;
  const int seeds = resolution(o, 50);
  r.inputs = {{"surface", "sphere"}, {"area", A}, {"hamiltonian", "(A/2) z"}, {"seeds", seeds}, {"epsilon", eps}};
  const HamiltonianPath H = catalog::sphere_height(A);
  double worst = 0.0;
  json periods = json::array();
  std::ostringstream traces;
  traces.precision(17);
  traces << "seed,t,x,y,z\n";
  ReturnOptions ro;
  ro.horizon = 2.0;
  for (int k = 1; k <= seeds; ++k) {
    const double z = -0.9 + 1.8 * halton(std::size_t(k), 2);
    const double th = 2.0 * M_PI * halton(std::size_t(k), 3);
    const double rr = std::sqrt(1.0 - z * z);
    const Vector3d p(rr * std::cos(th), rr * std::sin(th), z);
    const auto per = minimal_positive_period(H, p, ro);
    const double v = per ? *per : HUGE_VAL;
    worst = std::max(worst, std::fabs(v - 1.0));
    periods.push_back(per ? json(v) : json(nullptr));
    if (k <= 5) {
      const Trajectory tr = integrate_flow(H, p, 0.0, 1.0, 1e-10);
      for (std::size_t i = 0; i < tr.t.size(); ++i) {
        traces << k << "," << tr.t[i] << "," << tr.y[i].x() << "," << tr.y[i].y() << "," << tr.y[i].z() << "\n";
      }
    }
  }
  r.add_le("max |period - 1|", worst, primary(o, T.sphere_period), "derived: every orbit of the height flow closes at period 1");
  const double L = length(H);
  r.add_abs("length", L, A, T.sphere_length, "derived: oscillation of (A/2) z is A");
  const EmbeddingCertificate c = cg_dim2_certificate(H, eps);
  r.add_ge("cg_dim2 certificate (both sides)", c.value, A - eps, "derived: fibered-ball construction, residuals checked");
  r.add_true("certificate residuals", c.valid(), "derived");
  r.details = {{"periods", periods}, {"certificate", residuals_json(c)}};
  r.cite("L(loop) >= A for the loop of rotations of the sphere", "fibered-ball value " + catalog::num(c.value));
  r.cite("r_1(S^2) = A", "fibered-ball value " + catalog::num(c.value) + " and loop length " + catalog::num(L));
  r.plots["orbits"] = traces.str();
  r.plots["length_profile"] = length_profile_csv(H);
  return r;
}

ExperimentReport torus_shear(const ExperimentOptions& o) {
  const Tolerances& T = o.tolerances;
  ExperimentReport r;
  const int n = resolution(o, 30);
  r.inputs = {{"surface", "torus"}, {"area", 1.0}, {"hamiltonian", "sin(pi x)^2"}, {"grid", n},
              {"times", {1, 2, 4}}};
  const HamiltonianPath H = catalog::torus_shear();
  const Surface& s = H.surface();
  const double scale = s.form_scale();
  double lift_defect = 0.0;
  const int per_unit = 20;  // max shear speed pi keeps samples well under half a period apart
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Vector3d x0((i + 0.5) / n, (j + 0.5) / n, 0.0);
      std::vector<Vector2d> samples;
      Vector3d y = x0;
      for (int k = 1; k <= 4 * per_unit; ++k) {
        y = s.wrap(flow_point(H, y, double(k - 1) / per_unit, double(k) / per_unit, 1e-13));
        samples.push_back(y.head<2>());
      }
      const std::vector<Vector2d> lifted = s.lift_to_cover(samples, x0.head<2>());
      for (int t : {1, 2, 4}) {
        const Vector2d expect(x0.x(), x0.y() - t * catalog::shear_fprime(x0.x()) / scale);
        lift_defect = std::max(lift_defect, (lifted[std::size_t(t * per_unit - 1)] - expect).cwiseAbs().maxCoeff());
      }
    }
  }
  r.add_le("lift defect", lift_defect, primary(o, T.shear_lift), "cited: lift is (x, y + t f'(x)) up to the sign convention");
  json areas = json::array();
  for (double t : {1.0, 2.0, 4.0}) {
    auto shift = [&](double x) { return flow_point(H, Vector3d(x, 0.0, 0.0), 0.0, t, 1e-12).y(); };
    const double a = quad::integrate([&](double x) { return std::fabs(shift(x)); }, 0.0, 0.5, 1e-10, 1e-10, 20).value;
    // U = {0 < x < 1/2, y between 0 and shift(x)}; count image points that land back in U
    int overlaps = 0;
    const int m = 24;
    for (int i = 0; i < m; ++i) {
      const double x = 0.5 * (i + 0.5) / m;
      const double d = shift(x);
      for (int j = 0; j < m; ++j) {
        const double y = d * (j + 0.5) / m;
        const Vector3d q = flow_point(H, Vector3d(x, y, 0.0), 0.0, t, 1e-12);
        const double dq = shift(q.x());
        const bool inside = q.x() > 0.0 && q.x() < 0.5 && q.y() * dq > 0.0 && std::fabs(q.y()) < std::fabs(dq);
        overlaps += inside ? 1 : 0;
      }
    }
    const std::string tag = "T=" + catalog::num(t);
    r.add_abs("disjoined area / T, " + tag, a / t, 1.0, T.shear_area_relative,
              "cited: region of area almost T is disjoined");
    r.add_true("region disjoined, " + tag, overlaps == 0, "derived: sampled image misses the region");
    const HamiltonianPath Ht = HamiltonianPath::parse(s, H.text(), H.support(), 0.0, t);
    const double L = length(Ht);
    r.add_abs("length / (t TotVar), " + tag, L / t, 1.0, 1e-9, "cited: L = t TotVar(H)");
    areas.push_back({{"T", t}, {"area", a}, {"length", L}, {"overlaps", overlaps}});
  }
  r.details = {{"lift_defect", lift_defect}, {"disjoined", areas}};
  r.cite("L(phi_t) = t TotVar(H) for all t >= 0", "disjoined-area measurement with the energy-capacity inequality");
  r.cite("the Hofer norm on Ham(T^2) is unbounded", "disjoined-area measurement for T in {1, 2, 4}");
  std::ostringstream os;
  os.precision(17);
  os << "x,shift_T1\n";
  for (int i = 0; i <= 64; ++i) {
    const double x = i / 64.0;
    os << x << "," << flow_point(H, Vector3d(x, 0.0, 0.0), 0.0, 1.0, 1e-12).y() << "\n";
  }
  r.plots["shear_profile"] = os.str();
  return r;
}

void trapezoid_checks(ExperimentReport& r, const Tolerances& T, int grid) {
  json maps = json::array();
  for (ProfileDirection d : {ProfileDirection::BallToTrapezoid, ProfileDirection::TrapezoidToBall}) {
    const ProfileMap pm = trapezoid_profile_map(2.0, 0.1, d, grid);
    const std::string tag = d == ProfileDirection::BallToTrapezoid ? "ball->trapezoid" : "trapezoid->ball";
    r.add_le("trapezoid jacobian defect, " + tag, pm.jacobian_defect, T.trapezoid_jacobian,
             "derived: determinant of the profile map off the slit collar");
    r.add_le("trapezoid domination defect, " + tag, pm.domination_defect, T.trapezoid_domination,
             "derived: h_source <= h_target after the map");
    maps.push_back({{"direction", tag}, {"jacobian_defect", pm.jacobian_defect},
                    {"collar_jacobian_defect", pm.collar_jacobian_defect}, {"domination_defect", pm.domination_defect},
                    {"boundary_defect", pm.boundary_defect}, {"image_area", pm.image_area}});
  }
  r.details["trapezoid"] = maps;
}

ExperimentReport plateau_bump(const ExperimentOptions& o) {
  const Tolerances& T = o.tolerances;
  ExperimentReport r;
  const double m = 1.0, w = 1.0, r0 = 0.8, steep = 0.3, eps = 0.02;
  r.inputs = {{"surface", "plane"}, {"max", m}, {"ramp_width", w}, {"plateau_radius", r0}, {"steep_ramp_width", steep},
              {"epsilon", eps}};
  const HamiltonianPath H = catalog::plateau_bump(m, w, r0);
  const double plateau_area = M_PI * r0 * r0;
  r.add_ge("plateau area over max H", plateau_area / m, 1.0, "cited: area of the top level exceeds max H");
  const EmbeddingCertificate c = cg_dim2_certificate(H, eps);
  const double norm = length(H);
  r.add_ge("cg_dim2 certificate / ||H||", c.value / norm, primary(o, T.plateau_capacity_fraction),
           "derived: fibered-ball construction on both sides");
  r.add_true("certificate residuals", c.valid(), "derived");
  const Residual* lp = c.residual("under.min_level_period");
  const Residual* lq = c.residual("over.min_level_period");
  const double minp = std::min(lp ? lp->value : 0.0, lq ? lq->value : 0.0);
  r.add_ge("min sampled level period", minp, 1.0 - 1e-6, "derived: every sampled level closes no sooner than 1");
  r.add_ge("radial oracle min period", catalog::plateau_min_period(m, w), 1.0, "derived: radial period integral");

  const HamiltonianPath S = catalog::plateau_bump(m, steep, r0);
  const auto wit = has_short_orbit(S, 1.0);
  r.add_true("steep ramp exhibits a short orbit", wit.has_value(), "cited: steep edges create short orbits");
  const double oracle = catalog::plateau_min_period(m, steep);
  if (wit) {
    r.add_ge("witness period >= radial oracle minimum", wit->period, oracle - 1e-6, "derived: radial period integral");
  }
  r.details = {{"certificate", residuals_json(c)},
               {"norm", norm},
               {"threshold_ramp_width", catalog::plateau_threshold(m)},
               {"steep_oracle_min_period", oracle},
               {"steep_witness", wit ? json{{"seed", std::vector<double>(wit->seed.data(), wit->seed.data() + wit->seed.size())},
                                             {"period", wit->period}}
                                     : json(nullptr)}};
  trapezoid_checks(r, T, resolution(o, 200));
  r.cite("c_G(H) = ||H|| for the plateau bump", "fibered-ball value " + catalog::num(c.value));
  r.plots["length_profile"] = length_profile_csv(H);
  return r;
}

ExperimentReport geodesic_gallery(const ExperimentOptions& o) {
  ExperimentReport r;
  const int windows = resolution(o, 8);
  r.inputs = {{"surface", "plane"}, {"windows", windows}};
  struct Entry {
    HamiltonianPath H;
    bool expected;
  };
  const std::vector<Entry> entries{{catalog::peaked_bump(), true},
                                   {catalog::traveling_bump(), false},
                                   {catalog::rest_then_move(), false}};
  json det = json::array();
  for (const Entry& e : entries) {
    const GeodesicReport g = geodesic_check(e.H, windows);
    r.add_true("criterion verdict, " + e.H.label(), g.satisfies_criterion == e.expected,
               "cited: fixed maximum and minimum at each moment");
    json ws = json::array();
    for (const WindowVerdict& v : g.windows) ws.push_back({{"a", v.a}, {"b", v.b}, {"quasi_autonomous", v.quasi_autonomous}});
    det.push_back({{"path", e.H.label()}, {"satisfies", g.satisfies_criterion}, {"expected", e.expected}, {"windows", ws}});
    if (e.H.label() == "rest-then-move") {
      const bool first_half = std::all_of(g.windows.begin(), g.windows.end(), [](const WindowVerdict& v) {
        return v.b > 0.5 + 1e-12 || v.quasi_autonomous;
      });
      r.add_true("rest-then-move quasi-autonomous on the resting half", first_half, "derived: the bump is at rest");
    }
  }
  r.details = {{"paths", det}};
  return r;
}

ExperimentReport glue_compare(const ExperimentOptions& o) {
  const Tolerances& T = o.tolerances;
  ExperimentReport r;
  const int samples = resolution(o, 1000);
  const std::vector<double> nus{0.02, 0.05, 0.1};
  r.inputs = {{"surface", "plane"}, {"symplectic_samples", samples}, {"nu", nus}, {"fibers", 20}};
  json det = json::array();
  for (const auto& p : catalog::homotopic_pairs()) {
    json e{{"pair", p.name}};
    const QuasiCylinder Q = glue(p.H, p.K, 0.05);
    const SymplecticReport sr = verify_gluing_symplectic(Q, samples);
    r.add_le("gluing symplecticity, " + p.name, sr.max_residual, primary(o, T.glue_symplectic), "derived: finite-difference pullback");
    const AreaReport ar = area(Q, 20);
    r.add_le("fiber area spread, " + p.name, ar.max_deviation, T.fiber_spread, "cited: fibre area independent of the fibre");
    e["symplectic_residual"] = sr.max_residual;
    e["endpoint_mismatch"] = Q.endpoint_mismatch();
    e["fiber_spread"] = ar.max_deviation;
    e["calabi_difference"] = ar.calabi_difference;
    json cmp = json::array();
    for (double nu : nus) {
      const CompareReport c = compare(p.H, p.K, nu, 20);
      const std::string tag = p.name + ", nu=" + catalog::num(nu);
      r.add_le("area identity, " + tag, c.identity_error, T.compare_identity, "cited: areas of the two sides sum to L(H) + L(K) + 2 nu");
      const bool expected_informational = !(c.length_K + 2.0 * nu < c.length_H);
      const bool flag_ok = c.informational == expected_informational && (c.informational || !c.shorter_sides.empty());
      r.add_true("side flag, " + tag, flag_ok, "cited: at least one side is shorter when L(K) + 2 nu < L(H)");
      cmp.push_back({{"nu", nu}, {"length_H", c.length_H}, {"length_K", c.length_K}, {"area_HK", c.area_HK},
                     {"area_KH", c.area_KH}, {"identity_error", c.identity_error}, {"informational", c.informational},
                     {"shorter_sides", c.shorter_sides}, {"note", c.note}});
    }
    e["compare"] = cmp;
    det.push_back(e);
  }
  {
    const HamiltonianPath H = catalog::homotopic_pairs()[2].K;
    const QuasiCylinder Q = glue(H, H, 0.05);
    const SymplecticReport sr = verify_gluing_symplectic(Q, samples);
    r.add_le("gluing symplecticity, K = H", sr.max_residual, T.glue_symplectic_identical, "derived: map is the identity up to s shifts");
    const AreaReport ar = area(Q, 20);
    r.add_abs("split cylinder area", ar.area, length(H) + 0.05, 1e-7, "derived: L(H) + nu");
  }
  {
    const HamiltonianPath K = catalog::homotopic_pairs()[2].K;
    const HamiltonianPath K2 = HamiltonianPath::parse(Surface::plane(), "0.9*bump(x^2 + y^2; 1)", K.support());
    bool mismatch = false, inconsistent = false;
    try {
      glue(K, K2, 0.05);
    } catch (const Error& e) {
      mismatch = e.kind() == ErrorKind::EndpointMismatch;
    }
    GlueOptions go;
    go.check_endpoints = false;
    try {
      area(glue(K, K2, 0.05, go), 20);
    } catch (const Error& e) {
      inconsistent = e.kind() == ErrorKind::InconsistentArea;
    }
    r.add_true("fault: endpoint mismatch detected", mismatch, "derived: time-1 maps differ");
    r.add_true("fault: inconsistent area detected", inconsistent, "derived: fibre areas disagree");
  }
  r.details = {{"pairs", det}};
  r.cite("at least one of the quasi-cylinders R_HK, R_KH has area below L(H) when L(K) + 2 nu < L(H)",
         "area identity and side flags");
  return r;
}

ExperimentReport flatness(const ExperimentOptions& o) {
  const Tolerances& T = o.tolerances;
  ExperimentReport r;
  const std::vector<double> deltas{1e-3, 1e-2};
  r.inputs = {{"surface", "plane"}, {"delta", deltas}};
  json det = json::array();
  for (double d : deltas) {
    for (const auto& g : catalog::small_generating(d)) {
      const FlatnessReport f = flatness_check(g.name, g.text, g.box);
      const std::string tag = g.name + ", delta=" + catalog::num(d);
      r.add_le("|L - osc F|, " + tag, f.length_error, primary(o, T.flatness_length_relative) * d,
               "cited: L equals sup F - inf F");
      r.add_le("swept area spread, " + tag, f.swept_spread, T.flatness_swept_spread, "cited: swept area independent of the arc");
      r.add_le("|swept area - (F(q2) - F(q1))|, " + tag, f.swept_error, 1e-6, "cited: swept area equals F difference");
      r.add_le("time-curve identity, " + tag, f.time_curve_error, 1e-4 * d, "derived: integral of H_t(q1) - H_t(q2)");
      r.add_true("fixed extrema, " + tag, f.fixed_extrema, "cited: extrema of F are fixed extrema of H_t");
      r.add_le("det D psi - 1, " + tag, f.det_defect, 1e-8, "derived");
      det.push_back({{"name", g.name}, {"delta", d}, {"osc_F", f.osc_F}, {"length", f.length},
                     {"swept", f.swept}, {"F_difference", f.F_difference}, {"argmin", {f.argmin.x(), f.argmin.y()}},
                     {"argmax", {f.argmax.x(), f.argmax.y()}}, {"time_curve_error", f.time_curve_error}});
      if (d == deltas.back()) r.plots["length_profile_" + g.name] = length_profile_csv(f.path);
    }
  }
  r.add_le("chart symplecticity", chart_symplectic_residual(), 1e-12, "derived: exact linear algebra");
  r.details = {{"cases", det}};
  r.cite("||psi|| = sup F - inf F near the identity", "flatness identities for the small-F corpus");
  return r;
}

ExperimentReport linear_rigidity(const ExperimentOptions& o) {
  const Tolerances& T = o.tolerances;
  ExperimentReport r;
  r.inputs = {{"surface", "plane"}, {"hamiltonian", "quartic"}, {"control", "rotation, lambda = pi"}};
  const HamiltonianPath Q = catalog::quartic();
  const RigidityReport rq = rigidity_probe(Q, Vector3d::Zero());
  r.add_true("quartic: witness found", rq.verdict == "witness found", "cited: linearised closed orbit forces a nonlinear one");
  json wq = nullptr;
  if (rq.witness) {
    const double rad = rq.witness->seed.head(2).norm();
    const double oracle = radial_period(Q, rad);
    r.add_abs("witness period vs radial oracle", rq.witness->period, oracle, primary(o, T.rigidity_period),
              "derived: 2 pi r / |H'(r)|");
    wq = {{"radius", rad}, {"period", rq.witness->period}, {"oracle", oracle}};
  }
  const RigidityReport rc = rigidity_probe(catalog::rotation(M_PI), Vector3d::Zero());
  r.add_true("control: criterion silent", rc.verdict == "criterion silent", "derived: linear period 2 exceeds 1");
  r.details = {{"quartic", {{"verdict", rq.verdict}, {"linear_period", rq.linear_period ? json(*rq.linear_period) : json(nullptr)}, {"witness", wq}}},
               {"control", {{"verdict", rc.verdict}}}};
  return r;
}

ExperimentReport hz_lower_bound(const ExperimentOptions& o) {
  const Tolerances& T = o.tolerances;
  ExperimentReport r;
  const double nu = 0.1;
  r.inputs = {{"surface", "plane"}, {"hamiltonian", "slow bump"}, {"nu", nu}, {"seeds", 1000}};
  const HamiltonianPath H = catalog::slow_bump();
  const EmbeddingCertificate c = chz_certificate(H, nu);
  const double norm = length(H);
  r.add_abs("c_HZ certificate value", c.value, norm, 1e-9, "cited: c_HZ(H) >= L(H), attained here");
  r.add_true("certificate residuals", c.valid(), "derived");
  const Residual* seeds = c.residual("k_seeds");
  r.add_ge("K seeds without short orbit", seeds ? seeds->value : 0.0, 1000.0, "derived");
  double wp = 0.0;
  bool refused = false;
  try {
    chz_certificate(catalog::rotation(4.0 * M_PI), nu);
  } catch (const OrbitError& e) {
    refused = e.kind() == ErrorKind::ShortOrbitInK;
    wp = e.witness().period;
  }
  r.add_true("rotation lambda = 4 pi refused", refused, "derived: its orbits have period 1/2");
  r.add_abs("refusal witness period", wp, 0.5, primary(o, T.chz_witness_period), "derived: 2 pi / lambda");
  r.details = {{"certificate", residuals_json(c)}, {"norm", norm}};
  r.cite("c_HZ(H) >= L(H) for the slow bump", "HZ-function value " + catalog::num(c.value));
  return r;
}

ExperimentReport moser(const ExperimentOptions& o) {
  const Tolerances& T = o.tolerances;
  ExperimentReport r;
  std::vector<int> grids{8, 12, 16};
  if (o.grid > 0) grids = {o.grid};
  r.inputs = {{"form", "split + d(g du + k dv)"}, {"amplitude", 0.1}, {"grids", grids}};
  json runs = json::array();
  double prev = HUGE_VAL;
  bool decreasing = true;
  MoserOptions mo;
  mo.tolerance = HUGE_VAL;
  for (int n : grids) {
    const MoserResult m = moser_split(moser_test_form(n), mo);
    if (n >= 12) {
      r.add_le("residual at " + std::to_string(n) + "^4", m.residual, primary(o, T.moser_residual),
               "derived: grid-refinement oracle");
    }
    decreasing = decreasing && m.residual < prev * 1.1;
    prev = m.residual;
    runs.push_back({{"grid", n}, {"residual", m.residual}, {"rho_min", m.rho_min}, {"pfaffian_min", m.pfaffian_min},
                    {"closedness", m.closedness}, {"max_displacement", m.max_displacement},
                    {"boundary_displacement", m.boundary_displacement}});
  }
  if (grids.size() > 1) r.add_true("residual decreases under refinement", decreasing, "derived");
  {
    const MoserResult id = moser_split(moser_test_form(8, 0.0));
    r.add_le("split form maps by the identity", id.residual, 1e-10, "derived");
  }
  bool degenerate = false;
  try {
    moser_split(moser_test_form(8, 0.1, 1.5));
  } catch (const Error& e) {
    degenerate = e.kind() == ErrorKind::NondegeneracyFailed;
  }
  r.add_true("fault: disc restriction crossing zero detected", degenerate, "derived");
  r.details = {{"runs", runs}};
  return r;
}

struct Entry {
  const char* name;
  const char* description;
  ExperimentReport (*run)(const ExperimentOptions&);
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> r{
      {"sphere-loop", "height flow on the sphere: periods, length and both-sided capacity", sphere_loop},
      {"torus-shear", "shear flow on the torus: lift formula, disjoined regions, length growth", torus_shear},
      {"plateau-bump", "plateau bump: capacity on both sides, short orbits past the slope threshold, trapezoid maps",
       plateau_bump},
      {"geodesic-gallery", "fixed-extremum criterion on autonomous and moving bumps", geodesic_gallery},
      {"glue-compare", "quasi-cylinders of homotopic pairs: symplecticity, fibre areas, area identity", glue_compare},
      {"flatness", "generating-function isotopies: length, swept areas, fixed extrema", flatness},
      {"linear-rigidity", "linearised closed orbits and nonlinear witnesses", linear_rigidity},
      {"hz-lower-bound", "Hofer-Zehnder function for the slow bump", hz_lower_bound},
      {"moser", "Moser splitting of a perturbed product form on a 4-d grid", moser},
  };
  return r;
}

}  // namespace

std::vector<std::string> experiment_names() {
  std::vector<std::string> out;
  for (const Entry& e : registry()) out.emplace_back(e.name);
  return out;
}

std::string experiment_description(const std::string& name) {
  for (const Entry& e : registry()) {
    if (name == e.name) return e.description;
  }
  throw Error(ErrorKind::UnknownExperiment, name);
}

ExperimentReport run_experiment(const std::string& name, const ExperimentOptions& opt) {
  const auto it = std::find_if(registry().begin(), registry().end(), [&](const Entry& e) { return name == e.name; });
  if (it == registry().end()) throw Error(ErrorKind::UnknownExperiment, "no experiment named '" + name + "'");
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport r;
  try {
    r = it->run(opt);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.id = name;
  r.tolerances = opt.tolerances.to_json();
  if (opt.tol) r.tolerances["primary_override"] = *opt.tol;
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// ---------------------------------------------------------------------------
// Scenarios

namespace {

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorKind::SchemaError, what); }

Surface surface_from(const nlohmann::json& j) {
  if (j.is_null()) return Surface::plane();
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) schema("surface needs a string 'kind'");
  const std::string k = j["kind"];
  const double A = j.value("area", k == "sphere" ? 4.0 * M_PI : 1.0);
  if (k == "plane") return Surface::plane();
  if (k == "torus") return Surface::torus(A);
  if (k == "sphere") return Surface::sphere(A);
  schema("unknown surface kind '" + k + "'");
}

struct Def {
  std::string text;
  Box box;
  double t0 = 0.0, t1 = 1.0;
};

Def def_from(const Surface& s, const std::string& name, const nlohmann::json& j) {
  Def d;
  d.box = s.default_box();
  if (j.is_string()) {
    d.text = j.get<std::string>();
  } else if (j.is_object() && j.contains("text") && j["text"].is_string()) {
    d.text = j["text"];
    if (j.contains("box")) {
      const auto& b = j["box"];
      if (!b.is_array() || b.size() != 4) schema("defs." + name + ".box must be [x0, x1, y0, y1]");
      d.box = Box{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
    }
    d.t0 = j.value("t0", 0.0);
    d.t1 = j.value("t1", 1.0);
  } else {
    schema("defs." + name + " must be a DSL string or an object with 'text'");
  }
  return d;
}

double num_param(const nlohmann::json& step, const char* key, double dflt) {
  if (!step.contains(key)) return dflt;
  if (!step[key].is_number()) schema(std::string("step parameter '") + key + "' must be a number");
  return step[key].get<double>();
}

}  // namespace

std::vector<ExperimentReport> run_scenario(const nlohmann::json& sc) {
  if (!sc.is_object()) schema("scenario must be a JSON object");
  for (auto it = sc.begin(); it != sc.end(); ++it) {
    if (it.key() != "surface" && it.key() != "defs" && it.key() != "steps" && it.key() != "tolerances") {
      schema("unknown top-level key '" + it.key() + "'");
    }
  }
  const Surface s = surface_from(sc.contains("surface") ? sc["surface"] : nlohmann::json());
  std::map<std::string, Def> defs;
  if (sc.contains("defs")) {
    if (!sc["defs"].is_object()) schema("'defs' must be an object");
    for (auto it = sc["defs"].begin(); it != sc["defs"].end(); ++it) defs[it.key()] = def_from(s, it.key(), it.value());
  }
  Tolerances tol;
  json tol_echo = tol.to_json();
  if (sc.contains("tolerances")) {
    if (!sc["tolerances"].is_object()) schema("'tolerances' must be an object");
    for (auto it = sc["tolerances"].begin(); it != sc["tolerances"].end(); ++it) {
      if (!it.value().is_number()) schema("tolerance '" + it.key() + "' must be a number");
      tol_echo[it.key()] = it.value().get<double>();
    }
  }
  std::vector<ExperimentReport> out;
  if (!sc.contains("steps")) return out;
  if (!sc["steps"].is_array()) schema("'steps' must be an array");
  // validate every step before running any
  for (std::size_t i = 0; i < sc["steps"].size(); ++i) {
    const auto& st = sc["steps"][i];
    if (!st.is_object() || !st.contains("op") || !st["op"].is_string()) schema("step " + std::to_string(i) + " needs a string 'op'");
    for (const char* key : {"path", "other"}) {
      if (st.contains(key)) {
        if (!st[key].is_string() || !defs.count(st[key].get<std::string>())) {
          schema("step " + std::to_string(i) + ": '" + key + "' does not name a definition");
        }
      }
    }
    static const std::vector<std::string> ops{"length", "calabi", "oscillation", "geodesic_check", "short_orbits",
                                              "cg_dim2", "chz", "local_ball", "compare", "flatness", "moser",
                                              "experiment"};
    const std::string op = st["op"];
    if (std::find(ops.begin(), ops.end(), op) == ops.end()) schema("step " + std::to_string(i) + ": unknown op '" + op + "'");
    const bool needs_path = op != "moser" && op != "experiment";
    if (needs_path && !st.contains("path")) schema("step " + std::to_string(i) + ": op '" + op + "' needs 'path'");
    if (op == "compare" && !st.contains("other")) schema("step " + std::to_string(i) + ": compare needs 'other'");
    if (op == "experiment" && !(st.contains("name") && st["name"].is_string())) {
      schema("step " + std::to_string(i) + ": experiment needs 'name'");
    }
  }
  for (std::size_t i = 0; i < sc["steps"].size(); ++i) {
    const auto& st = sc["steps"][i];
    const std::string op = st["op"];
    if (op == "experiment") {
      ExperimentOptions eo;
      eo.grid = int(num_param(st, "grid", 0));
      if (st.contains("tol")) eo.tol = num_param(st, "tol", 0.0);
      ExperimentReport r;
      try {
        r = run_experiment(st["name"].get<std::string>(), eo);
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      r.id = "step-" + std::to_string(i) + ":experiment:" + st["name"].get<std::string>();
      out.push_back(std::move(r));
      continue;
    }
    ExperimentReport r;
    r.id = "step-" + std::to_string(i) + ":" + op;
    r.inputs = json::parse(st.dump());
    r.tolerances = tol_echo;
    try {
      auto path = [&](const char* key) {
        const Def& d = defs.at(st[key].get<std::string>());
        return HamiltonianPath::parse(s, d.text, d.box, d.t0, d.t1).set_label(st[key].get<std::string>());
      };
      double value = 0.0;
      if (op == "length") {
        value = length(path("path"));
      } else if (op == "calabi") {
        value = calabi(path("path")).value;
      } else if (op == "oscillation") {
        value = sup_norm(path("path"));
      } else if (op == "geodesic_check") {
        const GeodesicReport g = geodesic_check(path("path"), int(num_param(st, "windows", 16)));
        value = g.satisfies_criterion ? 1.0 : 0.0;
        r.details["note"] = g.note;
      } else if (op == "short_orbits") {
        const auto w = has_short_orbit(path("path"), num_param(st, "horizon", 1.0));
        value = w ? w->period : 0.0;
        r.details["short_orbit"] = w.has_value();
      } else if (op == "cg_dim2" || op == "chz" || op == "local_ball") {
        const HamiltonianPath H = path("path");
        const EmbeddingCertificate c = op == "cg_dim2"    ? cg_dim2_certificate(H, num_param(st, "epsilon", 0.05))
                                       : op == "chz"      ? chz_certificate(H, num_param(st, "nu", 0.1))
                                                          : local_ball_certificate(H, num_param(st, "epsilon", 1e-5));
        value = c.value;
        r.details["certificate"] = residuals_json(c);
        r.add_true("certificate residuals", c.valid(), "derived");
      } else if (op == "compare") {
        const CompareReport c = compare(path("path"), path("other"), num_param(st, "nu", 0.05));
        value = c.identity_error;
        r.details = {{"length_H", c.length_H}, {"length_K", c.length_K}, {"area_HK", c.area_HK},
                     {"area_KH", c.area_KH}, {"informational", c.informational}, {"shorter_sides", c.shorter_sides}};
      } else if (op == "flatness") {
        const Def& d = defs.at(st["path"].get<std::string>());
        const FlatnessReport f = flatness_check(st["path"].get<std::string>(), d.text, d.box);
        value = f.length_error;
        r.details = {{"osc_F", f.osc_F}, {"length", f.length}, {"swept", f.swept}, {"fixed_extrema", f.fixed_extrema}};
      } else if (op == "moser") {
        const MoserResult m = moser_split(moser_test_form(int(num_param(st, "grid", 12)), num_param(st, "amplitude", 0.1)));
        value = m.residual;
      }
      r.details["value"] = value;
      if (st.contains("expect")) {
        r.add_abs(op, value, num_param(st, "expect", 0.0), num_param(st, "tol", 1e-9), "scenario");
      }
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ExperimentReport> run_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaError, path + ": " + e.what());
  }
  return run_scenario(j);
}

// ---------------------------------------------------------------------------
// Emission

EmitFormat parse_format(const std::string& s) {
  if (s == "json") return EmitFormat::Json;
  if (s == "csv") return EmitFormat::Csv;
  if (s == "plotdata") return EmitFormat::Plotdata;
  throw Error(ErrorKind::SchemaError, "unknown format '" + s + "'");
}

std::string reports_json(const std::vector<ExperimentReport>& reports) {
  json arr = json::array();
  for (const ExperimentReport& r : reports) arr.push_back(r.to_json());
  return arr.dump(2) + "\n";
}

namespace {

std::string safe_name(const std::string& id) {
  std::string s = id;
  for (char& c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) c = '_';
  }
  return s;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + p.string());
  out << text;
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + p.string());
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

}  // namespace

std::vector<std::string> emit(const std::vector<ExperimentReport>& reports, EmitFormat format, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorKind::IoError, "cannot create directory " + dir);
  std::vector<std::string> files;
  const fs::path root(dir);
  if (format == EmitFormat::Json) {
    for (const ExperimentReport& r : reports) {
      const fs::path p = root / (safe_name(r.id) + ".json");
      write_file(p, r.to_json().dump(2) + "\n");
      files.push_back(p.filename().string());
    }
  } else if (format == EmitFormat::Csv) {
    std::ostringstream os;
    os.precision(17);
    os << "report,check,value,relation,target,tolerance,provenance,pass\n";
    for (const ExperimentReport& r : reports) {
      for (const Check& c : r.checks) {
        os << csv_field(r.id) << "," << csv_field(c.name) << "," << c.value << "," << c.relation << "," << c.target
           << "," << c.tolerance << "," << csv_field(c.provenance) << "," << (c.pass ? "true" : "false") << "\n";
      }
    }
    write_file(root / "summary.csv", os.str());
    files.push_back("summary.csv");
  } else {
    for (const ExperimentReport& r : reports) {
      if (r.plots.empty()) continue;
      const fs::path sub = root / safe_name(r.id);
      fs::create_directories(sub, ec);
      if (ec) throw Error(ErrorKind::IoError, "cannot create directory " + sub.string());
      for (const auto& [name, text] : r.plots) {
        write_file(sub / (safe_name(name) + ".csv"), text);
        files.push_back((fs::path(safe_name(r.id)) / (safe_name(name) + ".csv")).string());
      }
    }
  }
  json manifest{{"format", format == EmitFormat::Json ? "json" : format == EmitFormat::Csv ? "csv" : "plotdata"},
                {"files", files}};
  write_file(root / "manifest.json", manifest.dump(2) + "\n");
  return files;
}

// ---------------------------------------------------------------------------
// Invariant suite

namespace {

void module_invariants(ExperimentReport& r) {
  // exprcore: canonical printing is a fixed point of parse
  bool roundtrip = true;
  for (const char* src : {"bump(x^2 + y^2 - 1; 0.5)", "sin(x)*cos(y) + exp(neg(t))*z", "(x - 0.3*t)^3/(1 + y^2)"}) {
    const std::string a = expr::print(expr::parse(src));
    roundtrip = roundtrip && expr::print(expr::parse(a)) == a;
  }
  r.add_true("exprcore/print-parse fixed point", roundtrip, "derived");
  {
    const auto f = expr::ScalarField::parse("sin(x)*exp(y) + x^3*y");
    const expr::Bindings b{0.3, -0.2, 0.0, 0.0};
    const auto g = f.gradient(b);
    const double h = 1e-6;
    const double fd = (f.value({0.3 + h, -0.2, 0.0, 0.0}) - f.value({0.3 - h, -0.2, 0.0, 0.0})) / (2 * h);
    r.add_le("exprcore/derivative vs finite difference", std::fabs(g.d[0] - fd), 1e-8, "derived");
  }
  // surfaces
  {
    const Surface s = Surface::sphere(4.0);
    r.add_abs("surfaces/sphere total area", s.total_area(), 4.0, 1e-12, "derived");
    const Surface t = Surface::torus(1.0);
    std::vector<Vector2d> path{{0.9, 0.5}, {0.95, 0.5}, {0.02, 0.5}, {0.1, 0.5}};
    const Vector2d end = t.lift_to_cover(path, {0.9, 0.5}).back();
    r.add_abs("surfaces/lift across x = 1", end.x(), 1.1, 1e-12, "derived: covering definition");
  }
  // flow: area preservation of the shear flow map
  {
    const HamiltonianPath H = catalog::torus_shear();
    std::vector<Vector3d> pts;
    for (int k = 1; k <= 20; ++k) pts.emplace_back(halton(std::size_t(k), 2), halton(std::size_t(k), 3), 0.0);
    double worst = 0.0;
    for (const FlowMapSample& m : flow_map(H, 1.0, pts)) worst = std::max(worst, std::fabs(m.area_defect));
    r.add_le("flow/area preservation", worst, 1e-6, "derived");
  }
  // hofer: Calabi of an autonomous bump against its radial integral
  {
    const HamiltonianPath B = catalog::small_bump(1.0);
    const double oracle =
        quad::integrate([](double s) { return M_PI * expr::bump_value(s, 1.0, 0); }, 0.0, 1.0, 1e-13, 1e-13, 30).value;
    r.add_abs("hofer/calabi vs radial integral", calabi(B, 1e-10).value, oracle, 1e-8, "derived");
  }
  // capacity: local ball near the identity
  {
    const EmbeddingCertificate c = local_ball_certificate(catalog::small_bump(1e-3), 1e-5);
    r.add_true("capacity/local ball residuals", c.valid(), "derived");
  }
  // moser: grid dump round trip
  {
    const DiscreteTwoForm f = moser_test_form(5);
    const std::string p = (fs::temp_directory_path() / "hoferlab_check_grid.bin").string();
    f.write(p);
    const DiscreteTwoForm g = DiscreteTwoForm::read(p);
    fs::remove(p);
    r.add_true("moser/grid dump round trip", g.data() == f.data(), "derived");
  }
}

}  // namespace

ExperimentReport invariant_suite() {
  ExperimentReport r;
  r.id = "check";
  const Tolerances tol;
  r.tolerances = tol.to_json();
  json summary = json::array();
  for (const std::string& name : experiment_names()) {
    const ExperimentReport e = run_experiment(name);
    for (Check c : e.checks) {
      c.name = name + "/" + c.name;
      r.checks.push_back(c);
    }
    if (!e.error.empty()) {
      r.add_true(name + "/completed", false, "error: " + e.error);
    }
    summary.push_back({{"experiment", name}, {"pass", e.pass()}, {"checks", e.checks.size()}});
  }
  module_invariants(r);
  r.details = {{"experiments", summary}};
  return r;
}

}  // namespace hoferlab
