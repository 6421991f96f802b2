#include "kshell/bench.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

namespace kshell {

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

std::optional<double> RunArtifacts::monitor_at_lambda(double lambda, int index) const {
  double prev_l = 0.0, prev_m = 0.0;
  for (size_t i = 0; i < records.size(); ++i) {
    const double l = records[i].lambda;
    const double m = monitor_values[i].at(static_cast<size_t>(index));
    if ((prev_l <= lambda && lambda <= l) || (l <= lambda && lambda <= prev_l)) {
      const double t = (l == prev_l) ? 1.0 : (lambda - prev_l) / (l - prev_l);
      return prev_m + t * (m - prev_m);
    }
    prev_l = l;
    prev_m = m;
  }
  return std::nullopt;
}

BenchRunner::BenchRunner(ModelFile mf) : mf_(std::move(mf)), assembler_(mf_.model) {}

RunArtifacts BenchRunner::run(std::ostream* log) {
  RunArtifacts out;
  const double t0 = now_seconds();

  const auto record_monitors = [&](const Configuration& c) {
    std::vector<double> vals;
    for (const auto& mon : mf_.model.monitors) vals.push_back(assembler_.monitor_value(c, mon));
    out.monitor_values.push_back(std::move(vals));
  };

  if (mf_.solver.kind == SolverKind::linear) {
    const Configuration c0 = assembler_.initial_configuration();
    const auto sol = linear_solve(assembler_.tangent(c0), assembler_.external_forces());
    Configuration c = c0;
    c.q = assembler_.dofs().expand(sol.x);
    IncrementRecord rec;
    rec.increment = 1;
    rec.lambda = 1.0;
    rec.iterations = 1;
    rec.inertia = sol.inertia;
    rec.seconds = now_seconds() - t0;
    out.records.push_back(rec);
    record_monitors(c);
    out.path.push_back({1.0, c.q});
    out.reached_target = true;
    out.termination = "linear solve";
  } else if (mf_.solver.kind == SolverKind::newton) {
    ShellSystem system(assembler_);
    const double target = mf_.solver.continuation.lambda_target;
    double lambda = 0.0;
    for (int step = 1; step <= mf_.solver.newton_steps; ++step) {
      const double next = target * step / mf_.solver.newton_steps;
      const NewtonResult nr =
          newton_raphson(system, lambda, next,
                         {mf_.solver.continuation.max_iterations,
                          mf_.solver.continuation.force_tolerance,
                          mf_.solver.continuation.displacement_tolerance});
      if (!nr.converged) {
        system.restore_checkpoint();
        out.termination = "newton divergence at step " + std::to_string(step);
        break;
      }
      system.save_checkpoint();
      lambda = next;
      IncrementRecord rec;
      rec.increment = step;
      rec.lambda = lambda;
      rec.iterations = nr.iterations;
      rec.inertia = nr.inertia;
      rec.seconds = now_seconds() - t0;
      out.records.push_back(rec);
      record_monitors(system.configuration());
      out.path.push_back({lambda, system.configuration().q});
    }
    out.reached_target = (lambda >= target * (1.0 - 1e-12));
    if (out.termination.empty()) out.termination = "newton completed";
  } else {
    ShellSystem system(assembler_);
    const ContinuationResult cr =
        trace_path(system, mf_.solver.continuation,
                   [&](const IncrementRecord& rec, ContinuationSystem& sys) {
                     auto& shell = dynamic_cast<ShellSystem&>(sys);
                     out.records.push_back(rec);
                     record_monitors(shell.configuration());
                     out.path.push_back({rec.lambda, shell.configuration().q});
                     if (log)
                       (*log) << "  inc " << rec.increment << "  lpf " << rec.lambda << "  its "
                              << rec.iterations << "  inertia " << rec.inertia << "\n";
                   });
    out.reached_target = cr.reached_target;
    out.termination = cr.termination;
  }
  out.wall_seconds = now_seconds() - t0;
  if (log) (*log) << mf_.name << ": " << out.termination << " (" << out.wall_seconds << " s)\n";
  return out;
}

void BenchRunner::write_outputs(const RunArtifacts& artifacts, const std::string& out_dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const OutputConfig& o = mf_.outputs;

  if (!o.path_csv.empty()) {
    std::ofstream csv(fs::path(out_dir) / o.path_csv);
    csv << "increment,lpf";
    for (const auto& mon : mf_.model.monitors) csv << "," << mon.name;
    csv << ",iterations,arc_length,inertia,seconds\n";
    for (size_t i = 0; i < artifacts.records.size(); ++i) {
      const auto& r = artifacts.records[i];
      csv << r.increment << "," << fmt17(r.lambda);
      for (double v : artifacts.monitor_values[i]) csv << "," << fmt17(v);
      csv << "," << r.iterations << "," << fmt17(r.arc_length) << "," << r.inertia << ","
          << fmt17(r.seconds) << "\n";
    }
  }

  if (!o.field_dump.empty() && !artifacts.path.empty()) {
    Configuration c = assembler_.initial_configuration();
    c.q = artifacts.path.back().q_raw;
    const auto samples = curviness_field(assembler_, c, artifacts.path.back().lambda, o.field_grid,
                                         o.field_threshold);
    std::ofstream nd(fs::path(out_dir) / o.field_dump);
    for (const auto& s : samples) {
      nlohmann::json j;
      j["xi"] = s.xi;
      j["eta"] = s.eta;
      j["x"] = s.x(0);
      j["y"] = s.x(1);
      j["z"] = s.x(2);
      j["lpf"] = s.lpf;
      for (const auto& [k, v] : s.values) j[k] = v;
      nd << j.dump() << "\n";
    }
  }

  for (const auto& hr : o.histories) {
    const auto it = mf_.points.find(hr.point);
    if (it == mf_.points.end()) throw SchemaError("history requests unknown point '" + hr.point + "'");
    const double zeta = hr.fiber * mf_.model.thickness;
    std::ofstream csv(fs::path(out_dir) / hr.file);
    csv << "lpf,eps11,eps22,eps12,k11,k22,k12,k11_diff,k22_diff";
    const bool exact = (hr.mode == "exact" || hr.mode == "both");
    const bool linear = (hr.mode == "linear" || hr.mode == "both");
    if (exact)
      csv << ",eps_out11_exact,eps_out22_exact,eps_out11_phys_exact,eps_out22_phys_exact,"
             "sig_out11_exact,sig_out22_exact";
    if (linear)
      csv << ",eps_out11_linear,eps_out22_linear,eps_out11_phys_linear,eps_out22_phys_linear,"
             "sig_out11_linear,sig_out22_linear";
    csv << "\n";
    const StrainHistory sh = accumulated_reference_strain(assembler_, artifacts.path, it->second);
    const FiberHistory fe =
        exact ? outer_fiber_state(assembler_, artifacts.path, it->second, zeta,
                                  DistributionMode::exact)
              : FiberHistory{};
    const FiberHistory fl =
        linear ? outer_fiber_state(assembler_, artifacts.path, it->second, zeta,
                                   DistributionMode::linear)
               : FiberHistory{};
    for (size_t i = 0; i < sh.lambda.size(); ++i) {
      csv << fmt17(sh.lambda[i]) << "," << fmt17(sh.membrane[i](0, 0)) << ","
          << fmt17(sh.membrane[i](1, 1)) << "," << fmt17(sh.membrane[i](0, 1)) << ","
          << fmt17(sh.kappa_accum[i](0, 0)) << "," << fmt17(sh.kappa_accum[i](1, 1)) << ","
          << fmt17(sh.kappa_accum[i](0, 1)) << "," << fmt17(sh.kappa_diff[i](0, 0)) << ","
          << fmt17(sh.kappa_diff[i](1, 1));
      if (exact)
        csv << "," << fmt17(fe.strain_cov[i](0, 0)) << "," << fmt17(fe.strain_cov[i](1, 1)) << ","
            << fmt17(fe.strain_phys[i](0, 0)) << "," << fmt17(fe.strain_phys[i](1, 1)) << ","
            << fmt17(fe.stress_phys[i](0, 0)) << "," << fmt17(fe.stress_phys[i](1, 1));
      if (linear)
        csv << "," << fmt17(fl.strain_cov[i](0, 0)) << "," << fmt17(fl.strain_cov[i](1, 1)) << ","
            << fmt17(fl.strain_phys[i](0, 0)) << "," << fmt17(fl.strain_phys[i](1, 1)) << ","
            << fmt17(fl.stress_phys[i](0, 0)) << "," << fmt17(fl.stress_phys[i](1, 1));
      csv << "\n";
    }
  }

  if (!o.report_json.empty()) {
    nlohmann::json rep;
    rep["name"] = mf_.name;
    rep["constitutive"] = to_string(mf_.model.model_tag);
    rep["termination"] = artifacts.termination;
    rep["reached_target"] = artifacts.reached_target;
    rep["wall_seconds"] = artifacts.wall_seconds;
    rep["increments"] = artifacts.records.size();
    int total_it = 0;
    for (const auto& r : artifacts.records) total_it += r.iterations;
    rep["total_iterations"] = total_it;
    rep["environment"] = {{"compiler", __VERSION__},
                          {"threads", mf_.model.threads},
                          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                        std::to_string(EIGEN_MAJOR_VERSION)}};
    auto& recs = rep["records"] = nlohmann::json::array();
    for (size_t i = 0; i < artifacts.records.size(); ++i) {
      const auto& r = artifacts.records[i];
      nlohmann::json jr = {{"increment", r.increment}, {"lpf", r.lambda},
                           {"iterations", r.iterations}, {"arc_length", r.arc_length},
                           {"inertia", r.inertia},       {"seconds", r.seconds}};
      for (size_t m = 0; m < mf_.model.monitors.size(); ++m)
        jr[mf_.model.monitors[m].name] = artifacts.monitor_values[i][m];
      recs.push_back(jr);
    }
    std::ofstream rj(std::filesystem::path(out_dir) / o.report_json);
    rj << rep.dump(2) << "\n";
  }
}

double ComparisonResult::time_of(const std::string& tag) const {
  for (size_t i = 0; i < tags.size(); ++i)
    if (tags[i] == tag) return wall_seconds[i];
  throw Error("no run for tag " + tag);
}

const RunArtifacts& ComparisonResult::run_of(const std::string& tag) const {
  for (size_t i = 0; i < tags.size(); ++i)
    if (tags[i] == tag) return runs[i];
  throw Error("no run for tag " + tag);
}

ComparisonResult compare_models(const ModelFile& mf, std::ostream* log) {
  ComparisonResult out;
  for (const std::string tag : {"Da", "D0", "D1", "D2"}) {
    ModelFile variant = mf;
    variant.model.model_tag = constitutive_model_from_string(tag);
    BenchRunner runner(std::move(variant));
    out.tags.push_back(tag);
    try {
      out.runs.push_back(runner.run(log));
      out.wall_seconds.push_back(out.runs.back().wall_seconds);
    } catch (const Error& e) {
      if (log) (*log) << tag << " failed: " << e.what() << "\n";
      out.runs.push_back({});
      out.wall_seconds.push_back(0.0);
    }
  }
  return out;
}

void write_comparison_csv(const ComparisonResult& result, const std::string& path) {
  std::ofstream csv(path);
  csv << "lpf";
  for (const auto& tag : result.tags) csv << ",m_" << tag;
  for (size_t i = 1; i < result.tags.size(); ++i) csv << ",reldiff_" << result.tags[i];
  for (size_t i = 0; i < result.tags.size(); ++i) csv << ",seconds_" << result.tags[i];
  csv << ",time_ratio_Da_D0\n";
  const RunArtifacts& da = result.runs.front();
  const double ratio = result.wall_seconds[0] / std::max(result.wall_seconds[1], 1e-12);
  for (size_t i = 0; i < da.records.size(); ++i) {
    const double lpf = da.records[i].lambda;
    csv << fmt17(lpf);
    const double ref = da.monitor_values[i].empty() ? 0.0 : da.monitor_values[i][0];
    std::vector<double> vals{ref};
    for (size_t m = 1; m < result.runs.size(); ++m) {
      const auto v = result.runs[m].monitor_at_lambda(lpf);
      vals.push_back(v.value_or(std::numeric_limits<double>::quiet_NaN()));
    }
    for (double v : vals) csv << "," << fmt17(v);
    for (size_t m = 1; m < vals.size(); ++m)
      csv << "," << fmt17(std::abs(vals[m] - ref) / std::max(std::abs(ref), 1e-300));
    for (double s : result.wall_seconds) csv << "," << fmt17(s);
    csv << "," << fmt17(ratio) << "\n";
  }
}

}  // namespace kshell
