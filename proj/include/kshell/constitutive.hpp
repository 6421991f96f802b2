#pragma once

#include <string>

#include "kshell/metric.hpp"

namespace kshell {

struct MaterialParams {
  double E = 0.0;
  double nu = 0.0;
  double mu = 0.0;      // shear modulus
  double lambda = 0.0;  // 3D Lame lambda

  static MaterialParams isotropic(double E, double nu) {
    if (!(E > 0.0)) throw DomainError("Young's modulus must be positive");
    if (!(nu > -1.0 && nu < 0.5)) throw DomainError("Poisson ratio outside (-1, 0.5)");
    MaterialParams m;
    m.E = E;
    m.nu = nu;
    m.mu = E / (2.0 * (1.0 + nu));
    m.lambda = E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    return m;
  }
};

/// I_k = integral of zeta^k / (1 - zeta T + zeta^2 b) over [-h/2, h/2].
struct ThicknessIntegrals {
  double I[5] = {0, 0, 0, 0, 0};
  double T = 0.0;
  double b_det = 0.0;
  double h = 0.0;
};

struct ThicknessIntegralOptions {
  double kh_switch = 0.05;   // below this curviness the quadrature path is used
  int fallback_points = 16;
};

/// Closed-form evaluation (with the small-curviness quadrature switch).
ThicknessIntegrals thickness_integrals_closed(double T, double b_det, double h,
                                              const ThicknessIntegralOptions& opts = {});

/// Gauss-Legendre evaluation of the same integrals.
ThicknessIntegrals thickness_integrals_quadrature(double T, double b_det, double h, int n_points);

/// Plane-stress material tensor on the midsurface metric,
/// D^{abcd} = mu (g^ac g^bd + g^ad g^bc) + 2 mu nu/(1-nu) g^ab g^cd.
Ten4 plane_stress_material_tensor(const Mat2& g_inv, const MaterialParams& mat);
Ten4 plane_stress_material_tensor(const MidsurfaceMetric& m, const MaterialParams& mat);

enum class ConstitutiveModel { Da, D0, D1, D2 };

ConstitutiveModel constitutive_model_from_string(const std::string& tag);
std::string to_string(ConstitutiveModel model);

/// Symmetric 6x6 relation between section-force rates and reference strain
/// rates, partitioned into membrane / coupling / bending 3x3 blocks.
struct ConstitutiveTensor {
  Mat6 D = Mat6::Zero();
  ConstitutiveModel model = ConstitutiveModel::Da;

  Mat3 membrane() const { return D.block<3, 3>(0, 0); }
  Mat3 coupling() const { return D.block<3, 3>(0, 3); }
  Mat3 bending() const { return D.block<3, 3>(3, 3); }
};

/// Full analytic constitutive tensor: exact through-thickness integration of
/// the equidistant material law with the reciprocal shift tensor.
ConstitutiveTensor constitutive_Da(const MidsurfaceMetric& m, const MaterialParams& mat, double h,
                                   const ThicknessIntegralOptions& opts = {});

/// Reduced models: D0 decoupled plate-like; D1 adds the first-order shifter
/// coupling; D2 adds the curvature correction of the coupling block.
ConstitutiveTensor constitutive_reduced(const MidsurfaceMetric& m, const MaterialParams& mat,
                                        double h, ConstitutiveModel model);

ConstitutiveTensor constitutive(const MidsurfaceMetric& m, const MaterialParams& mat, double h,
                                ConstitutiveModel model, const ThicknessIntegralOptions& opts = {});

/// fdot = D e.
Vec6 section_force_rate(const ConstitutiveTensor& D, const Vec6& e);

struct EquidistantStress {
  Mat2 contravariant;  // sigma^{ab} in the convected basis at zeta
  Mat2 physical;       // orthonormal-frame components
};

/// Stress at offset zeta from the equidistant strain via the equidistant
/// material tensor (built from the reciprocal-shift metric).
EquidistantStress equidistant_stress(const MidsurfaceMetric& m, const MaterialParams& mat,
                                     double zeta, const Mat2& d_equidistant);

}  // namespace kshell
