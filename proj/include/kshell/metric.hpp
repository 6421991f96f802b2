#pragma once

#include "kshell/common.hpp"

namespace kshell {

/// First and second fundamental forms of the midsurface at one point.
/// Curvature sign convention: b_ab = x_,ab . g3 with g3 = (g1 x g2)/|g1 x g2|.
struct MidsurfaceMetric {
  Vec3 g1, g2, g3;          // base vectors, g3 unit normal
  Vec3 g1_rec, g2_rec;      // reciprocal tangents g^1, g^2
  Mat2 g_cov;               // covariant metric g_ab
  Mat2 g_inv;               // reciprocal metric g^ab
  double g_det = 0.0;       // det g_ab
  double sqrt_g = 0.0;
  double gamma[2][2][2] = {};  // Christoffel symbols of the 2nd kind Gamma^n_ab
  Mat2 b_cov;               // covariant curvature tensor b_ab
  Mat2 b_mix;               // mixed curvature tensor b^m_a = g^{mn} b_na
  double trace_b = 0.0;     // T = b^n_n
  double det_b = 0.0;       // det b^m_a
};

/// Shift tensor state at one through-thickness station.
struct ShiftState {
  double zeta = 0.0;
  double g0 = 0.0;   // shifter, det of the shift tensor
  Mat2 C_bar;        // shift tensor: equidistant tangents = C_bar g
  Mat2 C_rec;        // analytic reciprocal shift tensor
};

/// Full midsurface metric from first/second surface derivatives.
/// der2 columns ordered x_,11 x_,22 x_,12.
MidsurfaceMetric compute_metric(const Eigen::Matrix<double, 3, 2>& der1,
                                const Eigen::Matrix<double, 3, 3>& der2);

/// Shift tensor, its analytic reciprocal, and the shifter at offset zeta.
/// Throws SelfPenetrationError when g0 <= 0.
ShiftState shift_state(const MidsurfaceMetric& m, double zeta);

/// Curviness Kh = |trace b| * h, the local slenderness measure.
double curviness(const MidsurfaceMetric& m, double h);

/// Thickness-integration Jacobian g0(zeta) relating dv = g0 da dzeta.
double equidistant_area_weight(const MidsurfaceMetric& m, double zeta);

/// Covariant metric of the equidistant surface at zeta.
Mat2 equidistant_metric_cov(const MidsurfaceMetric& m, double zeta);

/// Reciprocal metric of the equidistant surface via the reciprocal shift tensor.
Mat2 equidistant_metric_inv(const MidsurfaceMetric& m, double zeta);

}  // namespace kshell
