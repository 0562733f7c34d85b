#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace hoferlab {

/// Default acceptance tolerances, echoed by every report.
struct Tolerances {
  double sphere_period = 1e-3;
  double sphere_length = 1e-9;
  double sphere_capacity_fraction = 0.95;  // certificate >= A - eps with eps = 0.05 A
  double chz_witness_period = 1e-4;
  double glue_symplectic = 1e-5;
  double glue_symplectic_identical = 1e-10;
  double compare_identity = 1e-5;
  double fiber_spread = 1e-5;
  double trapezoid_jacobian = 1e-6;
  double trapezoid_domination = 1e-9;
  double plateau_capacity_fraction = 0.95;
  double shear_lift = 1e-6;
  double shear_area_relative = 0.02;
  double flatness_length_relative = 1e-4;  // times delta
  double flatness_swept_spread = 1e-7;
  double rigidity_period = 1e-3;
  double moser_residual = 5e-2;

  nlohmann::ordered_json to_json() const;
};

/// One numeric claim with its target and provenance.
struct Check {
  std::string name;
  double value = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  /// "abs" (|value - target| <= tol), "le" (value <= tol), "ge" (value >= target),
  /// "true" (value == 1).
  std::string relation = "abs";
  std::string provenance = "derived";
  bool pass = false;
};

struct Conclusion {
  std::string statement;
  std::string support;  // certificate or check the statement rests on
};

struct ExperimentReport {
  std::string id;
  nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
  nlohmann::ordered_json tolerances = nlohmann::ordered_json::object();
  nlohmann::ordered_json details = nlohmann::ordered_json::object();
  std::vector<Check> checks;
  std::vector<Conclusion> conclusions;
  /// Curve name -> CSV text; written by emit(plotdata) only.
  std::map<std::string, std::string> plots;
  std::string error;
  double runtime_seconds = 0.0;  // not serialised, so reports stay byte-identical

  bool pass() const;
  Check& add(Check c);
  Check& add_abs(const std::string& name, double value, double target, double tol, const std::string& prov);
  Check& add_le(const std::string& name, double value, double tol, const std::string& prov);
  Check& add_ge(const std::string& name, double value, double target, const std::string& prov);
  Check& add_true(const std::string& name, bool ok, const std::string& prov);
  void cite(const std::string& statement, const std::string& support);

  nlohmann::ordered_json to_json() const;
};

struct ExperimentOptions {
  /// Resolution override (seeds, grid size); 0 keeps the default.
  int grid = 0;
  /// Overrides the experiment's primary tolerance.
  std::optional<double> tol;
  Tolerances tolerances{};
};

/// Names in catalog order.
std::vector<std::string> experiment_names();
std::string experiment_description(const std::string& name);

/// Throws UnknownExperiment.
ExperimentReport run_experiment(const std::string& name, const ExperimentOptions& opt = {});

/// Executes a scenario document; failing steps are recorded and the rest run.
/// Throws SchemaError for malformed documents.
std::vector<ExperimentReport> run_scenario(const nlohmann::json& scenario);
std::vector<ExperimentReport> run_scenario_file(const std::string& path);

enum class EmitFormat { Json, Csv, Plotdata };
EmitFormat parse_format(const std::string& s);

/// Writes the reports under dir and returns the written paths; throws IoError.
std::vector<std::string> emit(const std::vector<ExperimentReport>& reports, EmitFormat format,
                              const std::string& dir);

/// Canonical JSON text of a report set.
std::string reports_json(const std::vector<ExperimentReport>& reports);

/// The invariant suite: every catalog experiment plus module invariants.
ExperimentReport invariant_suite();

}  // namespace hoferlab
