#pragma once

#include <map>
#include <string>
#include <vector>

#include "kshell/assembly.hpp"

namespace kshell {

struct FieldSample {
  double xi = 0.0;
  double eta = 0.0;
  Vec3 x = Vec3::Zero();
  double lpf = 0.0;
  std::map<std::string, double> values;
};

/// Curviness Kh of the deformed midsurface on a per-element grid. The raw
/// value is always kept; a clamped copy (display threshold) is stored under
/// "Kh_clamped".
std::vector<FieldSample> curviness_field(const Assembler& assembler, const Configuration& c,
                                         double lpf, int grid_per_element = 5,
                                         double threshold = 0.25);

double max_field_value(const std::vector<FieldSample>& samples, const std::string& key);

/// One converged equilibrium point of a traced path.
struct PathPoint {
  double lambda = 0.0;
  VecX q_raw;
};

/// Reference strain history at a material point: total membrane strain from
/// the metric difference (path independent) and the accumulated
/// curvature-change increments (path sum), plus the curvature-tensor
/// difference as a cross-check.
struct StrainHistory {
  std::vector<double> lambda;
  std::vector<Mat2> membrane;      // eps_ab = (g*_ab - g_ab) / 2
  std::vector<Mat2> kappa_accum;   // sum of per-increment curvature rates
  std::vector<Mat2> kappa_diff;    // b*_ab - b_ab
};

StrainHistory accumulated_reference_strain(const Assembler& assembler,
                                           const std::vector<PathPoint>& path, const Vec2& at);

/// Equidistant strain and stress history at a through-thickness fiber,
/// accumulated per increment under the exact or linearized distribution.
struct FiberHistory {
  std::vector<double> lambda;
  std::vector<Mat2> strain_cov;
  std::vector<Mat2> strain_phys;
  std::vector<Mat2> stress_phys;
};

FiberHistory outer_fiber_state(const Assembler& assembler, const std::vector<PathPoint>& path,
                               const Vec2& at, double zeta, DistributionMode mode);

/// Arithmetic mean of coincident samples (shared element boundaries).
std::vector<FieldSample> nodal_average(const std::vector<FieldSample>& samples,
                                       double tol = 1e-9);

}  // namespace kshell
