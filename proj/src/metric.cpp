#include "kshell/metric.hpp"

#include <cmath>

namespace kshell {

MidsurfaceMetric compute_metric(const Eigen::Matrix<double, 3, 2>& der1,
                                const Eigen::Matrix<double, 3, 3>& der2) {
  MidsurfaceMetric m;
  m.g1 = der1.col(0);
  m.g2 = der1.col(1);
  const Vec3 n = m.g1.cross(m.g2);
  const double nn = n.norm();
  const double scale = std::max(m.g1.norm(), m.g2.norm());
  if (nn < 1e-14 * scale * scale)
    throw DegenerateSurfaceError("degenerate parametrization: |g1 x g2| = " + std::to_string(nn));
  m.g3 = n / nn;

  m.g_cov(0, 0) = m.g1.dot(m.g1);
  m.g_cov(0, 1) = m.g_cov(1, 0) = m.g1.dot(m.g2);
  m.g_cov(1, 1) = m.g2.dot(m.g2);
  m.g_det = m.g_cov(0, 0) * m.g_cov(1, 1) - m.g_cov(0, 1) * m.g_cov(0, 1);
  m.sqrt_g = std::sqrt(m.g_det);
  m.g_inv(0, 0) = m.g_cov(1, 1) / m.g_det;
  m.g_inv(1, 1) = m.g_cov(0, 0) / m.g_det;
  m.g_inv(0, 1) = m.g_inv(1, 0) = -m.g_cov(0, 1) / m.g_det;

  m.g1_rec = m.g_inv(0, 0) * m.g1 + m.g_inv(0, 1) * m.g2;
  m.g2_rec = m.g_inv(1, 0) * m.g1 + m.g_inv(1, 1) * m.g2;

  // der2 columns: 11, 22, 12
  const Vec3 x11 = der2.col(0), x22 = der2.col(1), x12 = der2.col(2);
  const Vec3 xab[2][2] = {{x11, x12}, {x12, x22}};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      m.gamma[0][a][b] = xab[a][b].dot(m.g1_rec);
      m.gamma[1][a][b] = xab[a][b].dot(m.g2_rec);
      m.b_cov(a, b) = xab[a][b].dot(m.g3);
    }
  m.b_mix = m.g_inv * m.b_cov;
  m.trace_b = m.b_mix.trace();
  m.det_b = m.b_mix.determinant();
  return m;
}

ShiftState shift_state(const MidsurfaceMetric& m, double zeta) {
  ShiftState s;
  s.zeta = zeta;
  s.C_bar = Mat2::Identity() - zeta * m.b_mix;
  s.g0 = 1.0 - zeta * m.trace_b + zeta * zeta * m.det_b;
  if (s.g0 <= 0.0) throw SelfPenetrationError(std::abs(m.trace_b) * 2.0 * std::abs(zeta), zeta, s.g0);
  // C^a_n = (1/g0) [(1 - zeta T) delta + zeta b]
  s.C_rec = ((1.0 - zeta * m.trace_b) * Mat2::Identity() + zeta * m.b_mix) / s.g0;
  return s;
}

double curviness(const MidsurfaceMetric& m, double h) { return std::abs(m.trace_b) * h; }

double equidistant_area_weight(const MidsurfaceMetric& m, double zeta) {
  const double g0 = 1.0 - zeta * m.trace_b + zeta * zeta * m.det_b;
  if (g0 <= 0.0) throw SelfPenetrationError(std::abs(m.trace_b) * 2.0 * std::abs(zeta), zeta, g0);
  return g0;
}

Mat2 equidistant_metric_cov(const MidsurfaceMetric& m, double zeta) {
  const Mat2 C = Mat2::Identity() - zeta * m.b_mix;
  return C.transpose() * m.g_cov * C;
}

Mat2 equidistant_metric_inv(const MidsurfaceMetric& m, double zeta) {
  const ShiftState s = shift_state(m, zeta);
  return s.C_rec * m.g_inv * s.C_rec.transpose();
}

}  // namespace kshell
