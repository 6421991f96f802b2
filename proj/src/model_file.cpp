#include "kshell/model_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace kshell {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed,
                  const std::set<std::string>& required = {}) {
  if (!obj.is_object()) throw SchemaError(where + " must be a JSON object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw SchemaError("unknown key '" + key + "' in " + where);
  for (const auto& key : required)
    if (!obj.contains(key)) throw SchemaError("missing key '" + key + "' in " + where);
}

Vec2 parse_vec2(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw SchemaError(where + " must be [u, v]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Vec3 parse_vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw SchemaError(where + " must be [x, y, z]");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

int parse_dir(const json& j, const std::string& where) {
  const std::string s = j.get<std::string>();
  if (s == "x") return 0;
  if (s == "y") return 1;
  if (s == "z") return 2;
  throw SchemaError(where + ": direction must be one of x, y, z");
}

// control points of an edge row: row 0 is on the edge, row 1 adjacent
std::vector<std::pair<int, int>> edge_row(const NurbsSurface& s, const std::string& edge, int row) {
  std::vector<std::pair<int, int>> cps;
  if (edge == "u0" || edge == "u1") {
    const int i = (edge == "u0") ? row : s.nu - 1 - row;
    for (int j = 0; j < s.nv; ++j) cps.emplace_back(i, j);
  } else if (edge == "v0" || edge == "v1") {
    const int j = (edge == "v0") ? row : s.nv - 1 - row;
    for (int i = 0; i < s.nu; ++i) cps.emplace_back(i, j);
  } else {
    throw SchemaError("edge must be one of u0, u1, v0, v1");
  }
  return cps;
}

void apply_edge_constraint(Model& model, const std::string& edge, const std::string& type,
                           const json& entry) {
  const NurbsSurface& s = model.surface;
  if (type == "fix" || type == "clamp") {
    std::vector<int> dirs = {0, 1, 2};
    if (entry.contains("components")) {
      dirs.clear();
      for (const auto& c : entry["components"]) dirs.push_back(parse_dir(c, "constraint"));
    }
    const int rows = (type == "clamp") ? 2 : 1;
    for (int r = 0; r < rows; ++r)
      for (auto [i, j] : edge_row(s, edge, r))
        for (int d : dirs) model.fixed.push_back({s.cp(i, j), d});
  } else if (type == "diaphragm") {
    // rigid in its own plane: both in-plane translations fixed on the edge row
    std::vector<int> dirs;
    for (const auto& c : entry.at("plane_dirs")) dirs.push_back(parse_dir(c, "diaphragm"));
    for (auto [i, j] : edge_row(s, edge, 0))
      for (int d : dirs) model.fixed.push_back({s.cp(i, j), d});
  } else if (type == "symmetry") {
    const int normal = parse_dir(entry.at("normal"), "symmetry");
    const auto row0 = edge_row(s, edge, 0);
    const auto row1 = edge_row(s, edge, 1);
    for (auto [i, j] : row0) model.fixed.push_back({s.cp(i, j), normal});
    for (size_t k = 0; k < row1.size(); ++k) {
      for (int d = 0; d < 3; ++d)
        if (d != normal)
          model.couplings.push_back({s.cp(row1[k].first, row1[k].second), d,
                                     s.cp(row0[k].first, row0[k].second), d});
    }
  } else {
    throw SchemaError("unknown constraint type '" + type + "'");
  }
}

NurbsSurface from_json_object_decl(const json& j);

}  // namespace

// defined in nurbs.cpp
NurbsSurface from_json_object(const nlohmann::json& j);

ModelFile ModelFile::from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  require_keys(doc, "model file",
               {"name", "geometry", "thickness", "material", "refinement", "constraints", "loads",
                "constitutive", "solver", "monitors", "outputs", "points", "threads",
                "expected_initial_curviness"},
               {"geometry", "thickness", "material"});

  ModelFile mf;
  mf.name = doc.value("name", "model");

  // geometry: inline surface or geometry of a preset
  if (doc["geometry"].is_string()) {
    const std::string ref = doc["geometry"].get<std::string>();
    const std::string prefix = "preset:";
    if (ref.rfind(prefix, 0) != 0)
      throw SchemaError("geometry string must be 'preset:<name>'");
    const ModelFile base = preset(ref.substr(prefix.size()));
    mf.model.surface = base.model.surface;
    mf.points = base.points;
  } else {
    mf.model.surface = from_json_object(doc["geometry"]);
  }

  mf.model.thickness = doc["thickness"].get<double>();
  if (!(mf.model.thickness > 0.0)) throw SchemaError("thickness must be positive");

  require_keys(doc["material"], "material", {"E", "nu"}, {"E", "nu"});
  mf.model.material =
      MaterialParams::isotropic(doc["material"]["E"].get<double>(), doc["material"]["nu"].get<double>());

  if (doc.contains("refinement")) {
    const json& r = doc["refinement"];
    require_keys(r, "refinement", {"elements_u", "elements_v", "degree", "continuity", "gauss"});
    RefineSpec spec;
    spec.elements_u = r.value("elements_u", 1);
    spec.elements_v = r.value("elements_v", 1);
    const int degree = r.value("degree", 0);
    spec.degree_u = degree;
    spec.degree_v = degree;
    spec.continuity = r.value("continuity", -1);
    mf.model.surface = refine(mf.model.surface, spec);
    const std::string gauss = r.value("gauss", "full");
    if (gauss == "paper") {
      mf.model.gauss_u = mf.model.surface.knots_u.degree;
      mf.model.gauss_v = mf.model.surface.knots_v.degree;
    } else if (gauss != "full") {
      throw SchemaError("refinement.gauss must be 'paper' or 'full'");
    }
  }

  if (doc.contains("points"))
    for (const auto& [name, val] : doc["points"].items())
      mf.points[name] = parse_vec2(val, "points." + name);

  if (doc.contains("constraints")) {
    for (const auto& entry : doc["constraints"]) {
      require_keys(entry, "constraint",
                   {"edge", "cp", "type", "components", "normal", "plane_dirs"}, {"type"});
      const std::string type = entry["type"].get<std::string>();
      if (entry.contains("edge")) {
        apply_edge_constraint(mf.model, entry["edge"].get<std::string>(), type, entry);
      } else if (entry.contains("cp")) {
        if (type != "fix") throw SchemaError("control-point constraints support only type 'fix'");
        const auto ij = entry["cp"];
        if (!ij.is_array() || ij.size() != 2) throw SchemaError("cp must be [i, j]");
        std::vector<int> dirs = {0, 1, 2};
        if (entry.contains("components")) {
          dirs.clear();
          for (const auto& c : entry["components"]) dirs.push_back(parse_dir(c, "constraint"));
        }
        for (int d : dirs)
          mf.model.fixed.push_back({mf.model.surface.cp(ij[0].get<int>(), ij[1].get<int>()), d});
      } else {
        throw SchemaError("constraint needs 'edge' or 'cp'");
      }
    }
  }

  const auto resolve_at = [&](const json& entry, const std::string& where) -> Vec2 {
    if (entry.contains("point")) {
      const std::string p = entry["point"].get<std::string>();
      const auto it = mf.points.find(p);
      if (it == mf.points.end()) throw SchemaError(where + ": unknown named point '" + p + "'");
      return it->second;
    }
    return parse_vec2(entry.at("at"), where + ".at");
  };

  if (doc.contains("loads")) {
    for (const auto& entry : doc["loads"]) {
      require_keys(entry, "load", {"type", "at", "point", "force", "p"}, {"type"});
      const std::string type = entry["type"].get<std::string>();
      if (type == "point") {
        mf.model.point_loads.push_back(
            {resolve_at(entry, "load"), parse_vec3(entry.at("force"), "load.force")});
      } else if (type == "traction") {
        mf.model.tractions.push_back({parse_vec3(entry.at("p"), "load.p")});
      } else {
        throw SchemaError("unknown load type '" + type + "'");
      }
    }
  }

  if (doc.contains("constitutive"))
    mf.model.model_tag = constitutive_model_from_string(doc["constitutive"].get<std::string>());

  if (doc.contains("threads")) mf.model.threads = doc["threads"].get<int>();

  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    require_keys(s, "solver",
                 {"type", "variant", "initial_lpf_step", "initial_arc_length",
                  "desired_iterations", "max_increments", "max_iterations", "force_tolerance",
                  "displacement_tolerance", "lambda_target", "newton_steps",
                  "max_arc_length_factor"});
    const std::string type = s.value("type", "arc_length");
    if (type == "linear")
      mf.solver.kind = SolverKind::linear;
    else if (type == "newton")
      mf.solver.kind = SolverKind::newton;
    else if (type == "arc_length")
      mf.solver.kind = SolverKind::arc_length;
    else
      throw SchemaError("solver.type must be linear, newton, or arc_length");
    ContinuationSettings& cs = mf.solver.continuation;
    if (s.contains("variant")) cs.variant = arc_length_variant_from_string(s["variant"]);
    cs.initial_lpf_step = s.value("initial_lpf_step", cs.initial_lpf_step);
    cs.initial_arc_length = s.value("initial_arc_length", cs.initial_arc_length);
    cs.desired_iterations = s.value("desired_iterations", cs.desired_iterations);
    cs.max_increments = s.value("max_increments", cs.max_increments);
    cs.max_iterations = s.value("max_iterations", cs.max_iterations);
    cs.force_tolerance = s.value("force_tolerance", cs.force_tolerance);
    cs.displacement_tolerance = s.value("displacement_tolerance", cs.displacement_tolerance);
    cs.lambda_target = s.value("lambda_target", cs.lambda_target);
    cs.max_arc_length_factor = s.value("max_arc_length_factor", cs.max_arc_length_factor);
    mf.solver.newton_steps = s.value("newton_steps", mf.solver.newton_steps);
  }

  if (doc.contains("monitors")) {
    for (const auto& entry : doc["monitors"]) {
      require_keys(entry, "monitor", {"name", "at", "point", "direction"}, {"name", "direction"});
      mf.model.monitors.push_back({entry["name"].get<std::string>(), resolve_at(entry, "monitor"),
                                   parse_vec3(entry["direction"], "monitor.direction")});
    }
  }

  if (doc.contains("outputs")) {
    const json& o = doc["outputs"];
    require_keys(o, "outputs",
                 {"path_csv", "report", "field_dump", "field_grid", "field_threshold",
                  "histories"});
    mf.outputs.path_csv = o.value("path_csv", "");
    mf.outputs.report_json = o.value("report", "");
    mf.outputs.field_dump = o.value("field_dump", "");
    mf.outputs.field_grid = o.value("field_grid", 5);
    mf.outputs.field_threshold = o.value("field_threshold", 0.25);
    if (o.contains("histories")) {
      for (const auto& entry : o["histories"]) {
        require_keys(entry, "history", {"point", "file", "fiber", "mode"}, {"point", "file"});
        HistoryRequest hr;
        hr.point = entry["point"].get<std::string>();
        hr.file = entry["file"].get<std::string>();
        hr.fiber = entry.value("fiber", 0.5);
        hr.mode = entry.value("mode", "exact");
        mf.outputs.histories.push_back(hr);
      }
    }
  }

  if (doc.contains("expected_initial_curviness"))
    mf.expected_initial_curviness = doc["expected_initial_curviness"].get<double>();

  return mf;
}

ModelFile ModelFile::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

}  // namespace kshell
