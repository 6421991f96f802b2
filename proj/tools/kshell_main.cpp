#include <CLI11.hpp>
#include <iostream>

#include "kshell/bench.hpp"

using namespace kshell;

namespace {

struct CommonOpts {
  std::string model_path;
  std::string preset_name;
  std::string constitutive;
  std::string variant;
  int increments = 0;
  double tol = 0.0;
  int threads = 1;
  double thickness = 0.0;
  int elements = 0;
  std::string out_dir = ".";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("model", o.model_path, "model JSON file");
  cmd->add_option("--preset", o.preset_name, "named benchmark preset");
  cmd->add_option("--constitutive", o.constitutive, "Da | D0 | D1 | D2");
  cmd->add_option("--variant", o.variant, "linearized | cylindrical | modified_riks");
  cmd->add_option("--increments", o.increments, "maximum increments");
  cmd->add_option("--tol", o.tol, "relative force tolerance");
  cmd->add_option("--threads", o.threads, "element-parallel assembly threads");
  cmd->add_option("--thickness", o.thickness, "override shell thickness (presets)");
  cmd->add_option("--elements", o.elements, "override elements per direction (presets)");
  cmd->add_option("--out", o.out_dir, "output directory");
}

ModelFile load(const CommonOpts& o) {
  ModelFile mf;
  if (!o.preset_name.empty()) {
    std::map<std::string, double> overrides;
    if (o.thickness > 0.0) overrides["thickness"] = o.thickness;
    if (o.elements > 0) overrides["elements"] = o.elements;
    mf = preset(o.preset_name, overrides);
  } else if (!o.model_path.empty()) {
    mf = ModelFile::from_file(o.model_path);
  } else {
    throw SchemaError("either a model file or --preset is required");
  }
  if (!o.constitutive.empty()) mf.model.model_tag = constitutive_model_from_string(o.constitutive);
  if (!o.variant.empty())
    mf.solver.continuation.variant = arc_length_variant_from_string(o.variant);
  if (o.increments > 0) mf.solver.continuation.max_increments = o.increments;
  if (o.tol > 0.0) mf.solver.continuation.force_tolerance = o.tol;
  mf.model.threads = o.threads;
  if (mf.outputs.path_csv.empty()) mf.outputs.path_csv = mf.name + "_path.csv";
  if (mf.outputs.report_json.empty()) mf.outputs.report_json = mf.name + "_report.json";
  return mf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"isogeometric Kirchhoff-Love shell solver"};
  app.require_subcommand(1);

  CommonOpts run_opts, cmp_opts;
  CLI::App* cmd_run = app.add_subcommand("run", "run one analysis");
  add_common(cmd_run, run_opts);
  CLI::App* cmd_cmp = app.add_subcommand("compare", "run all four constitutive models");
  add_common(cmd_cmp, cmp_opts);
  CLI::App* cmd_list = app.add_subcommand("presets", "list preset names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_list->parsed()) {
      for (const auto& n : preset_names()) std::cout << n << "\n";
      return 0;
    }
    if (cmd_run->parsed()) {
      ModelFile mf = load(run_opts);
      BenchRunner runner(std::move(mf));
      int exit_code = 0;
      RunArtifacts artifacts;
      try {
        artifacts = runner.run(&std::cout);
        if (!artifacts.reached_target) exit_code = 3;
      } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        exit_code = 3;
      }
      runner.write_outputs(artifacts, run_opts.out_dir);
      for (size_t m = 0; m < runner.model_file().model.monitors.size(); ++m) {
        if (!artifacts.monitor_values.empty())
          std::cout << runner.model_file().model.monitors[m].name << " = "
                    << artifacts.monitor_values.back()[m] << "\n";
      }
      return exit_code;
    }
    if (cmd_cmp->parsed()) {
      ModelFile mf = load(cmp_opts);
      const ComparisonResult result = compare_models(mf, &std::cout);
      write_comparison_csv(result, cmp_opts.out_dir + "/" + mf.name + "_compare.csv");
      std::cout << "time ratio Da/D0 = " << result.time_of("Da") / result.time_of("D0") << "\n";
      return 0;
    }
  } catch (const SchemaError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
