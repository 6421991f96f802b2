#include "kshell/kinematics.hpp"

#include <cmath>

namespace kshell {

StrainOperator build_strain_operator(const MidsurfaceMetric& m, const BasisEval& basis) {
  StrainOperator op;
  op.support = basis.support;
  op.H.setZero();
  const Vec3 g[3] = {m.g1, m.g2, m.g3};
  for (int mm = 0; mm < 3; ++mm) {
    Eigen::Matrix<double, 6, 5> Hm;
    Hm.setZero();
    const double x1 = g[0](mm), x2 = g[1](mm), x3 = g[2](mm);
    Hm(0, 0) = x1;
    Hm(1, 1) = x2;
    Hm(2, 0) = x2;
    Hm(2, 1) = x1;
    Hm(3, 0) = -m.gamma[0][0][0] * x3;
    Hm(3, 1) = -m.gamma[1][0][0] * x3;
    Hm(3, 2) = x3;
    Hm(4, 0) = -m.gamma[0][1][1] * x3;
    Hm(4, 1) = -m.gamma[1][1][1] * x3;
    Hm(4, 3) = x3;
    Hm(5, 0) = -2.0 * m.gamma[0][0][1] * x3;
    Hm(5, 1) = -2.0 * m.gamma[1][0][1] * x3;
    Hm(5, 4) = 2.0 * x3;
    op.H.block<6, 5>(0, 5 * mm) = Hm;
  }
  op.cp_derivs.resize(basis.support.size());
  for (size_t a = 0; a < basis.support.size(); ++a) {
    Eigen::Matrix<double, 5, 1> d;
    d << basis.der1[a](0), basis.der1[a](1), basis.der2[a](0), basis.der2[a](1), basis.der2[a](2);
    op.cp_derivs[a] = d;
  }
  return op;
}

Mat2 curvature_change_rate(const MidsurfaceMetric& m, const BasisEval& basis,
                           const std::vector<Vec3>& v_local) {
  // velocity gradients at the point
  Vec3 v_d1[2] = {Vec3::Zero(), Vec3::Zero()};
  Vec3 v_d2[3] = {Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  for (size_t a = 0; a < basis.support.size(); ++a) {
    v_d1[0] += basis.der1[a](0) * v_local[a];
    v_d1[1] += basis.der1[a](1) * v_local[a];
    for (int k = 0; k < 3; ++k) v_d2[k] += basis.der2[a](k) * v_local[a];
  }
  const Vec3 vab[2][2] = {{v_d2[0], v_d2[2]}, {v_d2[2], v_d2[1]}};
  Mat2 k;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      k(a, b) = m.g3.dot(vab[a][b] - m.gamma[0][a][b] * v_d1[0] - m.gamma[1][a][b] * v_d1[1]);
  return k;
}

DistributionTensors distribution_tensors(const MidsurfaceMetric& m, double zeta) {
  DistributionTensors t;
  const Mat2& b = m.b_mix;
  const Mat2 C = Mat2::Identity() - zeta * b;
  for (int al = 0; al < 2; ++al)
    for (int be = 0; be < 2; ++be)
      for (int mu = 0; mu < 2; ++mu)
        for (int nu = 0; nu < 2; ++nu) {
          const double dA = ((mu == al) ? 1.0 : 0.0) * ((nu == be) ? 1.0 : 0.0) -
                            zeta * zeta * b(mu, al) * b(nu, be);
          t.A(mu, nu, al, be) = dA;
          t.Bt(mu, nu, al, be) = 0.5 * (((nu == al) ? 1.0 : 0.0) * C(mu, be) +
                                        ((mu == be) ? 1.0 : 0.0) * C(nu, al));
        }
  return t;
}

Mat2 equidistant_strain(const Vec6& e_ref, const MidsurfaceMetric& m, double zeta,
                        DistributionMode mode) {
  const Mat2 d = strain_from_voigt(e_ref.head<3>());
  const Mat2 k = strain_from_voigt(e_ref.tail<3>());
  if (mode == DistributionMode::linear) return d - zeta * k;
  const DistributionTensors t = distribution_tensors(m, zeta);
  Mat2 out = Mat2::Zero();
  // d_ab = A^{mn}_{ab} d_mn - zeta Bt^{mn}_{ab} k_mn
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int mu = 0; mu < 2; ++mu)
        for (int nu = 0; nu < 2; ++nu)
          out(a, b) += t.A(mu, nu, a, b) * d(mu, nu) - zeta * t.Bt(mu, nu, a, b) * k(mu, nu);
  return out;
}

Mat2 physical_strain(const Mat2& d_cov, const MidsurfaceMetric& m, double zeta) {
  const Mat2 g = equidistant_metric_cov(m, zeta);
  Mat2 out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) out(a, b) = d_cov(a, b) / std::sqrt(g(a, a) * g(b, b));
  return out;
}

}  // namespace kshell
