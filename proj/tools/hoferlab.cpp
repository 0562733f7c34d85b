#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "hoferlab/errors.hpp"
#include "hoferlab/experiments.hpp"

using namespace hoferlab;

namespace {

// 0 all checks pass, 1 some check failed, 2 usage or input error
int finish(const std::vector<ExperimentReport>& reports, const std::string& out, const std::string& format) {
  if (out.empty()) {
    std::cout << reports_json(reports);
  } else {
    const auto files = emit(reports, parse_format(format), out);
    std::cerr << "wrote " << files.size() << " file(s) under " << out << "\n";
  }
  for (const ExperimentReport& r : reports) {
    if (!r.pass()) return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for the Hofer geometry of surface Hamiltonians"};
  app.set_version_flag("--version", std::string(HOFERLAB_VERSION));
  app.require_subcommand(1);

  std::string out, format = "json";

  auto* run = app.add_subcommand("run", "execute a scenario file");
  std::string scenario;
  run->add_option("scenario", scenario, "scenario JSON")->required();
  run->add_option("--out", out, "write reports under this directory instead of stdout");
  run->add_option("--format", format, "json, csv or plotdata")->check(CLI::IsMember({"json", "csv", "plotdata"}));

  auto* exp = app.add_subcommand("experiment", "run one catalog experiment");
  std::string name;
  ExperimentOptions eo;
  double tol = 0.0;
  exp->add_option("name", name, "experiment name (see `list`)")->required();
  exp->add_option("--out", out, "write reports under this directory instead of stdout");
  exp->add_option("--format", format, "json, csv or plotdata")->check(CLI::IsMember({"json", "csv", "plotdata"}));
  exp->add_option("--grid", eo.grid, "resolution override")->check(CLI::PositiveNumber);
  auto* tol_opt = exp->add_option("--tol", tol, "primary tolerance override")->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list", "list catalog experiments");

  auto* check = app.add_subcommand("check", "run the invariant suite");
  check->add_option("--out", out, "write the report to this file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      for (const std::string& n : experiment_names()) std::cout << n << "\t" << experiment_description(n) << "\n";
      return 0;
    }
    if (*run) return finish(run_scenario_file(scenario), out, format);
    if (*exp) {
      if (*tol_opt) eo.tol = tol;
      return finish({run_experiment(name, eo)}, out, format);
    }
    if (*check) {
      const ExperimentReport r = invariant_suite();
      const std::string text = r.to_json().dump(2) + "\n";
      if (out.empty()) {
        std::cout << text;
      } else {
        std::ofstream f(out, std::ios::binary);
        if (!(f << text)) throw Error(ErrorKind::IoError, "cannot write " + out);
      }
      std::size_t failed = 0;
      for (const Check& c : r.checks) {
        if (!c.pass) {
          ++failed;
          std::cerr << "FAIL " << c.name << " = " << c.value << "\n";
        }
      }
      std::cerr << r.checks.size() - failed << "/" << r.checks.size() << " checks pass\n";
      return r.pass() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "hoferlab: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
