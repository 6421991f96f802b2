#pragma once

#include <map>
#include <string>

#include "kshell/assembly.hpp"
#include "kshell/continuation.hpp"

namespace kshell {

enum class SolverKind { linear, newton, arc_length };

struct SolverConfig {
  SolverKind kind = SolverKind::arc_length;
  ContinuationSettings continuation;
  int newton_steps = 10;
};

struct HistoryRequest {
  std::string point;  // named point
  std::string file;
  double fiber = 0.5;          // fraction of h measured from the midsurface
  std::string mode = "exact";  // exact | linear | both
};

struct OutputConfig {
  std::string path_csv;
  std::string report_json;
  std::string field_dump;
  int field_grid = 5;
  double field_threshold = 0.25;
  std::vector<HistoryRequest> histories;
};

/// A fully resolved analysis definition: assemblable model, solver settings,
/// output requests, and named parametric points.
struct ModelFile {
  std::string name;
  Model model;
  SolverConfig solver;
  OutputConfig outputs;
  std::map<std::string, Vec2> points;
  double expected_initial_curviness = -1.0;  // preset self-check, < 0 disables

  /// Strict parse: unknown keys are rejected with the offending key named.
  static ModelFile from_json_text(const std::string& text);
  static ModelFile from_file(const std::string& path);
};

/// Fully specified benchmark models.
/// Names: pinched_cylinder_linear, shallow_shell, semi_cylinder,
/// pullout_cylinder, pinched_cylinder_nl.
ModelFile preset(const std::string& name, const std::map<std::string, double>& overrides = {});

std::vector<std::string> preset_names();

}  // namespace kshell
