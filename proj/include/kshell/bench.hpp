#pragma once

#include <iosfwd>
#include <optional>

#include "kshell/model_file.hpp"
#include "kshell/postprocess.hpp"

namespace kshell {

/// Everything one analysis produces, kept in memory for output writing and
/// for the acceptance suite.
struct RunArtifacts {
  std::vector<IncrementRecord> records;
  std::vector<std::vector<double>> monitor_values;  // per record, per monitor
  std::vector<PathPoint> path;                      // converged states
  bool reached_target = false;
  std::string termination;
  double wall_seconds = 0.0;

  double final_monitor(int index = 0) const {
    return monitor_values.empty() ? 0.0 : monitor_values.back().at(static_cast<size_t>(index));
  }

  /// First-crossing linear interpolation of a monitor along the path.
  std::optional<double> monitor_at_lambda(double lambda, int index = 0) const;
};

class BenchRunner {
 public:
  explicit BenchRunner(ModelFile mf);

  const ModelFile& model_file() const { return mf_; }
  const Assembler& assembler() const { return assembler_; }

  RunArtifacts run(std::ostream* log = nullptr);

  /// Write path CSV / field dump / histories / report as requested by the
  /// model file, into out_dir.
  void write_outputs(const RunArtifacts& artifacts, const std::string& out_dir) const;

 private:
  ModelFile mf_;
  Assembler assembler_;
};

struct ComparisonResult {
  std::vector<std::string> tags;
  std::vector<RunArtifacts> runs;
  std::vector<double> wall_seconds;

  double time_of(const std::string& tag) const;
  const RunArtifacts& run_of(const std::string& tag) const;
};

/// Run the same model under all four constitutive models with identical
/// solver settings.
ComparisonResult compare_models(const ModelFile& mf, std::ostream* log = nullptr);

void write_comparison_csv(const ComparisonResult& result, const std::string& path);

}  // namespace kshell
