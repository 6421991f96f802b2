#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "kshell/assembly.hpp"

namespace kshell {

/// State interface the path-following solvers drive. Implementations carry
/// their own internal state (stored resultants for the shell); increments are
/// applied in free-DOF numbering.
class ContinuationSystem {
 public:
  virtual ~ContinuationSystem() = default;
  virtual int size() const = 0;
  virtual VecX reference_load() = 0;
  virtual SpMat tangent() = 0;
  virtual VecX internal_forces() = 0;
  virtual void apply_increment(const VecX& dq) = 0;
  virtual void save_checkpoint() = 0;     // mark the current state as converged
  virtual void restore_checkpoint() = 0;  // roll back to the last converged state
};

/// Shell adapter: wraps an Assembler and a Configuration.
class ShellSystem : public ContinuationSystem {
 public:
  explicit ShellSystem(const Assembler& assembler)
      : assembler_(assembler),
        config_(assembler.initial_configuration()),
        checkpoint_(config_) {}

  int size() const override { return assembler_.dofs().n_free; }
  VecX reference_load() override { return assembler_.external_forces(); }
  SpMat tangent() override { return assembler_.tangent(config_); }
  VecX internal_forces() override { return assembler_.internal_forces(config_); }
  void apply_increment(const VecX& dq) override { assembler_.update_state(config_, dq); }
  void save_checkpoint() override { checkpoint_ = config_; }
  void restore_checkpoint() override { config_ = checkpoint_; }

  const Configuration& configuration() const { return config_; }
  Configuration& configuration() { return config_; }
  const Assembler& assembler() const { return assembler_; }

 private:
  const Assembler& assembler_;
  Configuration config_;
  Configuration checkpoint_;
};

enum class ArcLengthVariant { linearized, cylindrical, modified_riks };

ArcLengthVariant arc_length_variant_from_string(const std::string& tag);

struct ContinuationSettings {
  double initial_lpf_step = 0.05;  // calibrates the first arc length
  double initial_arc_length = 0.0;  // used directly when > 0
  int desired_iterations = 5;
  int max_increments = 200;
  int max_iterations = 25;
  double force_tolerance = 1e-6;
  double displacement_tolerance = 1e-8;
  ArcLengthVariant variant = ArcLengthVariant::linearized;
  double lambda_target = 1.0;
  double min_arc_length_factor = 1e-6;  // relative to the initial arc length
  double max_arc_length_factor = 10.0;
  int max_cuts = 8;
  bool stop_at_target = true;
};

struct IncrementRecord {
  int increment = 0;
  double lambda = 0.0;
  int iterations = 0;
  double arc_length = 0.0;
  int inertia = 0;
  double seconds = 0.0;
};

struct ContinuationResult {
  std::vector<IncrementRecord> records;
  bool reached_target = false;
  std::string termination;
};

using IncrementCallback = std::function<void(const IncrementRecord&, ContinuationSystem&)>;

/// Arc-length path tracing (predictor + orthogonality corrector + adaptive
/// step). Displacements entering the constraint are scaled by the largest
/// component of the initial linear solution.
ContinuationResult trace_path(ContinuationSystem& system, const ContinuationSettings& settings,
                              const IncrementCallback& on_increment = {});

struct NewtonSettings {
  int max_iterations = 25;
  double force_tolerance = 1e-6;
  double displacement_tolerance = 1e-8;
};

struct NewtonResult {
  int iterations = 0;
  int inertia = 0;
  bool converged = false;
};

/// Load-controlled Newton-Raphson to a target load factor, starting from the
/// system's current (converged) state at lambda_from.
NewtonResult newton_raphson(ContinuationSystem& system, double lambda_from, double lambda_target,
                            const NewtonSettings& settings);

/// Arc-length step size update from the iteration count of the last increment.
double adapt_arc_length(double dl_prev, int iterations_used, int desired_iterations, double dl_min,
                        double dl_max);

}  // namespace kshell
