#pragma once

// Test-only oracles, kept independent of the production evaluation paths.

#include <functional>
#include <random>

#include "kshell/constitutive.hpp"
#include "kshell/kinematics.hpp"
#include "kshell/metric.hpp"

namespace kshell::test {

/// Brute-force numerical integration of the constitutive block integrals:
/// builds the reciprocal shift tensor by matrix inversion, the equidistant
/// material tensor from the transformed inverse metric, and the distribution
/// tensors from their non-simplified symmetric definitions.
Mat6 oracle_constitutive_blocks(const MidsurfaceMetric& m, const MaterialParams& mat, double h,
                                int n_points);

/// I_k by the same route as the production quadrature but with a independent
/// trapezoid-refinement integrator (Romberg), for cross-checking.
ThicknessIntegrals oracle_thickness_integrals_romberg(double T, double b_det, double h);

/// Full 3D strain rate at an equidistant surface, evaluated from the velocity
/// gradients (first form of the kinematics, no A/B compaction).
Mat2 oracle_equidistant_strain_3d(const Eigen::Matrix<double, 3, 2>& x_der1,
                                  const Eigen::Matrix<double, 3, 3>& x_der2,
                                  const Eigen::Matrix<double, 3, 2>& v_der1,
                                  const Eigen::Matrix<double, 3, 3>& v_der2, double zeta);

/// Pre-compacted symmetric form of the exact distribution (two-term bracket).
Mat2 oracle_equidistant_strain_sym(const Mat2& d, const Mat2& kdot, const Mat2& b_mix,
                                   double zeta);

/// Central finite difference of a scalar function.
double central_diff(const std::function<double(double)>& f, double step);

struct RandomMetric {
  MidsurfaceMetric metric;
  Eigen::Matrix<double, 3, 2> der1;
  Eigen::Matrix<double, 3, 3> der2;
};

/// Well-scaled random surface point data; retries until nondegenerate.
RandomMetric random_metric(std::mt19937& rng);

/// Largest thickness <= kh_target / |T| keeping the shifter above 0.2
/// across the whole thickness.
double safe_thickness(const MidsurfaceMetric& m, double kh_target);

}  // namespace kshell::test
