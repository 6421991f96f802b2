#pragma once

#include <vector>

#include "kshell/metric.hpp"
#include "kshell/nurbs.hpp"

namespace kshell {

/// Discrete operator mapping control-point velocities to the reference
/// strain-rate vector e = [d11, d22, 2 d12, k11, k22, 2 k12].
///
/// e = H w,  w = B qdot,  B_L = H B.  Per Cartesian direction m the block
/// H_m (6x5) acts on w_m = [v_,1 v_,2 v_,11 v_,22 v_,12] of that component;
/// per control point the B block reduces to the derivative 5-vector.
struct StrainOperator {
  Eigen::Matrix<double, 6, 15> H;
  std::vector<Eigen::Matrix<double, 5, 1>> cp_derivs;  // [R_,1 R_,2 R_,11 R_,22 R_,12]
  std::vector<int> support;

  int support_count() const { return static_cast<int>(support.size()); }

  /// 6x3 block of B_L for local control point a.
  Eigen::Matrix<double, 6, 3> bl_block(int a) const {
    Eigen::Matrix<double, 6, 3> L;
    const auto& d = cp_derivs[static_cast<size_t>(a)];
    for (int m = 0; m < 3; ++m) L.col(m) = H.block<6, 5>(0, 5 * m) * d;
    return L;
  }

  /// e = B_L qdot for a velocity vector ordered like the global DOFs of the
  /// supporting control points (3 per point, in support order).
  Vec6 apply(const VecX& qdot_local) const {
    Vec6 e = Vec6::Zero();
    for (int a = 0; a < support_count(); ++a)
      e += bl_block(a) * qdot_local.segment<3>(3 * a);
    return e;
  }
};

/// H and B assembled from the (deformed) metric and basis derivatives.
StrainOperator build_strain_operator(const MidsurfaceMetric& m, const BasisEval& basis);

/// Curvature-change rate k_ab = x_,3 . (v_,ab - Gamma^mu_ab v_,mu) for the
/// velocity field defined by local control-point velocities.
Mat2 curvature_change_rate(const MidsurfaceMetric& m, const BasisEval& basis,
                           const std::vector<Vec3>& v_local);

/// Exact equidistant strain-rate distribution tensors (Appendix-level form):
/// A^{mn}_{ab} = d^m_a d^n_b - zeta^2 b^m_a b^n_b,
/// Bt^{mn}_{ab} = 1/2 (d^n_a Cbar^m_b + d^m_b Cbar^n_a).
struct DistributionTensors {
  Ten4 A;
  Ten4 Bt;
};

DistributionTensors distribution_tensors(const MidsurfaceMetric& m, double zeta);

enum class DistributionMode { exact, linear };

/// Equidistant strain at offset zeta from the reference strain-rate vector:
/// exact: d_ab = A d - zeta Bt k;  linear: d - zeta k.
Mat2 equidistant_strain(const Vec6& e_ref, const MidsurfaceMetric& m, double zeta,
                        DistributionMode mode);

/// Physical (orthonormal-frame) components d_(ab) = d_ab / sqrt(g_aa g_bb),
/// using the equidistant metric at zeta.
Mat2 physical_strain(const Mat2& d_cov, const MidsurfaceMetric& m, double zeta);

}  // namespace kshell
