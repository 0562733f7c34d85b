#include <filesystem>
#include <fstream>
#include <sstream>

#include "hoferlab/experiments.hpp"
#include "support.hpp"

using namespace hoferlab;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hoferlab_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("empty scenario gives no reports") {
  CHECK(run_scenario(json::object()).empty());
  CHECK(run_scenario(json{{"steps", json::array()}}).empty());
}

TEST_CASE("length of the zero Hamiltonian") {
  const auto r = run_scenario(json::parse(R"J({"defs": {"H": "0"}, "steps": [{"op": "length", "path": "H"}]})J"));
  REQUIRE(r.size() == 1);
  CHECK(r[0].details["value"] == 0.0);
  CHECK(r[0].pass());
}

TEST_CASE("scenario values and tolerance echo") {
  const auto r = run_scenario(json::parse(R"J({
    "surface": {"kind": "sphere", "area": 4},
    "defs": {"H": "2*z"},
    "steps": [{"op": "length", "path": "H", "expect": 4, "tol": 1e-9}],
    "tolerances": {"sphere_length": 1e-8}})J"));
  REQUIRE(r.size() == 1);
  CHECK(r[0].pass());
  CHECK(r[0].tolerances["sphere_length"] == 1e-8);
  CHECK(r[0].tolerances.contains("moser_residual"));
}

TEST_CASE("schema errors") {
  CHECK(thrown_kind([] { run_scenario(json::parse(R"J({"steps": [{"op": "length", "path": "G"}]})J")); }) ==
        ErrorKind::SchemaError);
  CHECK(thrown_kind([] {
          run_scenario(json::parse(R"J({"defs": {"H": "x"}, "steps": [{"op": "frobnicate", "path": "H"}]})J"));
        }) == ErrorKind::SchemaError);
  CHECK(thrown_kind([] { run_scenario(json::parse(R"J({"surface": {"kind": "klein"}})J")); }) == ErrorKind::SchemaError);
  CHECK(thrown_kind([] { run_scenario(json::parse(R"J({"stepz": []})J")); }) == ErrorKind::SchemaError);
  CHECK(thrown_kind([] { run_scenario(json::array()); }) == ErrorKind::SchemaError);
  CHECK(thrown_kind([] { run_scenario_file("/nonexistent/scenario.json"); }) == ErrorKind::IoError);
}

TEST_CASE("failing steps are recorded and the run continues") {
  const auto r = run_scenario(json::parse(R"J({
    "defs": {"Z": "0", "H": "bump(x^2 + y^2; 1)"},
    "steps": [{"op": "geodesic_check", "path": "Z"}, {"op": "length", "path": "H", "expect": 1}]})J"));
  REQUIRE(r.size() == 2);
  CHECK_FALSE(r[0].pass());
  CHECK(r[0].error.find("NotRegular") != std::string::npos);
  CHECK(r[1].pass());
}

TEST_CASE("unknown experiment") {
  CHECK(thrown_kind([] { run_experiment("no-such-thing"); }) == ErrorKind::UnknownExperiment);
  CHECK(experiment_names().size() == 9);
}

TEST_CASE("experiment reports are deterministic") {
  const auto a = reports_json({run_experiment("linear-rigidity")});
  const auto b = reports_json({run_experiment("linear-rigidity")});
  CHECK(a == b);
  const json j = json::parse(a);
  CHECK(j[0]["pass"] == true);
  CHECK(j[0].contains("tolerances"));
  CHECK_FALSE(j[0].contains("runtime_seconds"));
}

TEST_CASE("cited conclusions") {
  const json j = run_experiment("hz-lower-bound").to_json();
  REQUIRE(j["conclusions"].size() >= 1);
  CHECK(j["conclusions"][0]["status"].get<std::string>().rfind("cited conclusion, supported by certificate", 0) == 0);
}

TEST_CASE("emit formats") {
  const std::vector<ExperimentReport> reports{run_experiment("geodesic-gallery"), run_experiment("torus-shear")};
  const fs::path dir = scratch("emit");
  const auto jf = emit(reports, EmitFormat::Json, (dir / "json").string());
  CHECK(jf.size() == 2);
  CHECK(json::parse(slurp(dir / "json" / "torus-shear.json"))["id"] == "torus-shear");
  CHECK(json::parse(slurp(dir / "json" / "manifest.json"))["files"].size() == 2);
  emit(reports, EmitFormat::Csv, (dir / "csv").string());
  CHECK(slurp(dir / "csv" / "summary.csv").rfind("report,check,", 0) == 0);
  const auto pf = emit(reports, EmitFormat::Plotdata, (dir / "plot").string());
  REQUIRE(!pf.empty());
  CHECK(fs::exists(dir / "plot" / "torus-shear" / "shear_profile.csv"));
  fs::remove_all(dir);
}

TEST_CASE("emit of an empty set writes an empty manifest") {
  const fs::path dir = scratch("empty");
  CHECK(emit({}, EmitFormat::Json, dir.string()).empty());
  CHECK(json::parse(slurp(dir / "manifest.json"))["files"].empty());
  fs::remove_all(dir);
}

TEST_CASE("emit to an invalid path") {
  const fs::path file = scratch("blocker");
  std::ofstream(file) << "x";
  CHECK(thrown_kind([&] { emit({}, EmitFormat::Json, (file / "sub").string()); }) == ErrorKind::IoError);
  fs::remove(file);
  CHECK(thrown_kind([] { parse_format("xml"); }) == ErrorKind::SchemaError);
}
