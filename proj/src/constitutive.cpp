#include "kshell/constitutive.hpp"

#include <cmath>
#include <complex>

#include "kshell/gauss.hpp"

namespace kshell {

namespace {

using Cplx = std::complex<double>;

// integral of x^m over [-1, 1]
double p_hat(int m) { return (m % 2 == 0) ? 2.0 / (m + 1) : 0.0; }

void check_positive_shifter(double T, double b, double h) {
  const double c = 0.5 * h;
  const auto g0 = [&](double z) { return 1.0 - z * T + z * z * b; };
  double gmin = std::min(g0(c), g0(-c));
  double zmin = (g0(c) < g0(-c)) ? c : -c;
  if (b > 0.0) {
    const double zv = T / (2.0 * b);
    if (zv > -c && zv < c && g0(zv) < gmin) {
      gmin = g0(zv);
      zmin = zv;
    }
  }
  if (gmin <= 0.0) throw SelfPenetrationError(std::abs(T) * h, zmin, gmin);
}

// L(z) = integral over [-1,1] of dx/(x - z), principal branch.
Cplx log_kernel(Cplx z) { return std::log((z - 1.0) / (z + 1.0)); }

// W_k(z) = z^k L(z) + poly_k(z); the polynomial part cancels the divergent
// tail so W_k ~ z^{k-1-2 j0}. Evaluated by the convergent series for large z.
Cplx w_scaled_series(int k, Cplx z) {
  Cplx sum = 0.0;
  Cplx zpow = std::pow(z, k);  // z^{k - (2j+1)} running power, start j such that exponent < 0
  int j0 = 0;
  while (2 * j0 + 1 <= k) ++j0;
  zpow = std::pow(z, k - 2 * j0 - 1);
  const Cplx iz2 = 1.0 / (z * z);
  for (int j = j0; j < j0 + 200; ++j) {
    const Cplx term = zpow / static_cast<double>(2 * j + 1);
    sum += term;
    if (std::abs(term) < 1e-18 * (1.0 + std::abs(sum))) break;
    zpow *= iz2;
  }
  return -2.0 * sum;
}

Cplx w_direct(int k, Cplx z) {
  Cplx poly = 0.0;
  switch (k) {
    case 0: poly = 0.0; break;
    case 1: poly = 2.0; break;
    case 2: poly = 2.0 * z; break;
    case 3: poly = 2.0 / 3.0 + 2.0 * z * z; break;
    case 4: poly = (2.0 / 3.0) * z + 2.0 * z * z * z; break;
    default: throw DomainError("thickness integral order out of range");
  }
  return std::pow(z, k) * log_kernel(z) + poly;
}

Cplx w_eval(int k, Cplx z) { return (std::abs(z) >= 2.0) ? w_scaled_series(k, z) : w_direct(k, z); }

// j_k = integral over [-1,1] of x^k / (1 - tau x + B x^2).
void j_closed(double tau, double B, double j[5]) {
  if (std::abs(B) < 1e-30) {
    if (std::abs(tau) < 1e-14) {
      for (int k = 0; k < 5; ++k) j[k] = p_hat(k);
      return;
    }
    if (std::abs(tau) < 0.5) {
      // geometric series in tau x
      for (int k = 0; k < 5; ++k) {
        double sum = 0.0, tp = 1.0;
        for (int m = 0; m < 400; ++m) {
          const double term = tp * p_hat(m + k);
          sum += term;
          tp *= tau;
          if (std::abs(tp) * 2.0 < 1e-18 * std::abs(sum)) break;
        }
        j[k] = sum;
      }
      return;
    }
    j[0] = std::log((1.0 + tau) / (1.0 - tau)) / tau;
    for (int k = 1; k < 5; ++k) j[k] = (j[k - 1] - p_hat(k - 1)) / tau;
    return;
  }

  // roots of B x^2 - tau x + 1, stable split: product x1 x2 = 1/B
  const double disc = tau * tau - 4.0 * B;
  Cplx q;
  if (disc >= 0.0) {
    const double s = std::sqrt(disc);
    q = 0.5 * (tau + ((tau >= 0.0) ? s : -s));
  } else {
    q = Cplx(0.5 * tau, 0.5 * std::sqrt(-disc));
  }
  const Cplx x1 = q / B;
  const Cplx x2 = 1.0 / q;

  if (std::min(std::abs(x1), std::abs(x2)) >= 2.0) {
    // divided-difference series: j_k = 2 sum_j S_{2j+1-k} / (2j+1),
    // S_m = sum_{i} x1^{-(m-1-i)} x2^{-i}; stable for coincident roots.
    constexpr int max_m = 240;
    std::array<Cplx, max_m + 1> S{};
    const Cplx ix1 = 1.0 / x1;
    Cplx x2p = 1.0;  // x2^{-(m-1)}
    const Cplx ix2 = 1.0 / x2;
    S[1] = 1.0;
    int m_top = 1;
    for (int m = 2; m <= max_m; ++m) {
      x2p *= ix2;
      S[static_cast<size_t>(m)] = S[static_cast<size_t>(m - 1)] * ix1 + x2p;
      m_top = m;
      if (std::abs(S[static_cast<size_t>(m)]) < 1e-22) break;
    }
    for (int k = 0; k < 5; ++k) {
      Cplx sum = 0.0;
      for (int jj = 0;; ++jj) {
        const int m = 2 * jj + 1 - k;
        if (m < 1) continue;
        if (m > m_top) break;
        sum += S[static_cast<size_t>(m)] / static_cast<double>(2 * jj + 1);
      }
      j[k] = 2.0 * sum.real();
    }
    return;
  }

  if (std::abs(x1 - x2) < 1e-8 * (std::abs(x1) + std::abs(x2)))
    throw DomainError("thickness integrals: nearly parabolic shifter outside the stable range");

  const Cplx pref = x1 * x2 / (x1 - x2);
  for (int k = 0; k < 5; ++k) j[k] = (pref * (w_eval(k, x1) - w_eval(k, x2))).real();
}

}  // namespace

ThicknessIntegrals thickness_integrals_quadrature(double T, double b_det, double h, int n_points) {
  if (n_points < 2) throw DomainError("quadrature needs at least 2 points");
  check_positive_shifter(T, b_det, h);
  ThicknessIntegrals out;
  out.T = T;
  out.b_det = b_det;
  out.h = h;
  const GaussRule rule = gauss_legendre(n_points);
  const double c = 0.5 * h;
  for (int i = 0; i < n_points; ++i) {
    const double z = c * rule.points[static_cast<size_t>(i)];
    const double w = c * rule.weights[static_cast<size_t>(i)];
    const double g0 = 1.0 - z * T + z * z * b_det;
    double zp = 1.0;
    for (int k = 0; k < 5; ++k) {
      out.I[k] += w * zp / g0;
      zp *= z;
    }
  }
  return out;
}

ThicknessIntegrals thickness_integrals_closed(double T, double b_det, double h,
                                              const ThicknessIntegralOptions& opts) {
  check_positive_shifter(T, b_det, h);
  if (std::abs(T) * h < opts.kh_switch)
    return thickness_integrals_quadrature(T, b_det, h, opts.fallback_points);

  ThicknessIntegrals out;
  out.T = T;
  out.b_det = b_det;
  out.h = h;
  const double c = 0.5 * h;
  double j[5];
  try {
    j_closed(T * c, b_det * c * c, j);
  } catch (const DomainError&) {
    return thickness_integrals_quadrature(T, b_det, h, 64);
  }
  double cp = c;
  for (int k = 0; k < 5; ++k) {
    out.I[k] = cp * j[k];
    cp *= c;
  }
  return out;
}

Ten4 plane_stress_material_tensor(const Mat2& g_inv, const MaterialParams& mat) {
  const double c1 = mat.mu;
  const double c2 = 2.0 * mat.mu * mat.nu / (1.0 - mat.nu);
  Ten4 D;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int cc = 0; cc < 2; ++cc)
        for (int d = 0; d < 2; ++d)
          D(a, b, cc, d) = c1 * (g_inv(a, cc) * g_inv(b, d) + g_inv(a, d) * g_inv(b, cc)) +
                           c2 * g_inv(a, b) * g_inv(cc, d);
  return D;
}

Ten4 plane_stress_material_tensor(const MidsurfaceMetric& m, const MaterialParams& mat) {
  return plane_stress_material_tensor(m.g_inv, mat);
}

ConstitutiveModel constitutive_model_from_string(const std::string& tag) {
  if (tag == "Da") return ConstitutiveModel::Da;
  if (tag == "D0") return ConstitutiveModel::D0;
  if (tag == "D1") return ConstitutiveModel::D1;
  if (tag == "D2") return ConstitutiveModel::D2;
  throw SchemaError("unknown constitutive model tag '" + tag + "'");
}

std::string to_string(ConstitutiveModel model) {
  switch (model) {
    case ConstitutiveModel::Da: return "Da";
    case ConstitutiveModel::D0: return "D0";
    case ConstitutiveModel::D1: return "D1";
    case ConstitutiveModel::D2: return "D2";
  }
  return "?";
}

namespace {

// Sb^{mn}_{rs} = d^m_r b^n_s + b^m_r d^n_s
Ten4 sym_kron_b(const Mat2& b) {
  Ten4 t;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          t(i, j, k, l) = ((i == k) ? b(j, l) : 0.0) + ((j == l) ? b(i, k) : 0.0);
  return t;
}

// Hb^{gl}_{ew} = 1/2 (b^l_e d^g_w + d^l_e b^g_w), indices (g, l, e, w)
Ten4 half_kron_b(const Mat2& b) {
  Ten4 t;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          t(i, j, k, l) = 0.5 * (((i == l) ? b(j, k) : 0.0) + ((j == k) ? b(i, l) : 0.0));
  return t;
}

Mat6 assemble_blocks(const Mat3& M, const Mat3& MB, const Mat3& B) {
  Mat6 D;
  D.block<3, 3>(0, 0) = 0.5 * (M + M.transpose());
  D.block<3, 3>(0, 3) = MB;
  D.block<3, 3>(3, 0) = MB.transpose();
  D.block<3, 3>(3, 3) = 0.5 * (B + B.transpose());
  return D;
}

}  // namespace

ConstitutiveTensor constitutive_Da(const MidsurfaceMetric& m, const MaterialParams& mat, double h,
                                   const ThicknessIntegralOptions& opts) {
  const Ten4 Dm = plane_stress_material_tensor(m, mat);
  const double T = m.trace_b;
  const double bd = m.det_b;
  const ThicknessIntegrals ti = thickness_integrals_closed(T, bd, h, opts);

  // The block integrands collapse to polynomials in zeta over the shifter:
  // with E = (1 - zeta T - zeta^2 det b) I + 2 zeta b and Chat = (1 - zeta T) I + zeta b,
  //   D_M  =  int 1/g0      P_A D P_A,   P_A = sym(I (x) E)      = Id + zeta (Sb - T Id) - zeta^2 det(b) Id
  //   D_MB = -int zeta/g0   P_A D P_B,   P_B = sym(I (x) Chat)   = IdT + zeta (Hb - T IdT)
  //   D_B  =  int zeta^2/g0 P_B D P_B
  // which the I_0..I_4 integrals evaluate exactly.
  const Ten4 Sb = sym_kron_b(m.b_mix);
  const Ten4 Hb = half_kron_b(m.b_mix);
  const Ten4 Id = Ten4::identity();
  const Ten4 IdT = Ten4::identity_t();

  Ten4 PA[3] = {Id, Sb - Id * T, Id * (-bd)};
  Ten4 PB[2] = {IdT, Hb - IdT * T};

  Ten4 AD[3], BD[2];
  for (int i = 0; i < 3; ++i) AD[i] = contract(PA[i], Dm);
  for (int i = 0; i < 2; ++i) BD[i] = contract(PB[i], Dm);
  Ten4 PAt[3], PBt[2];
  for (int i = 0; i < 3; ++i) PAt[i] = PA[i].pair_transpose();
  for (int i = 0; i < 2; ++i) PBt[i] = PB[i].pair_transpose();

  Ten4 DM = Ten4::zero(), DMB = Ten4::zero(), DB = Ten4::zero();
  for (int i = 0; i < 3; ++i)
    for (int jj = 0; jj < 3; ++jj) DM += contract(AD[i], PAt[jj]) * ti.I[i + jj];
  for (int i = 0; i < 3; ++i)
    for (int jj = 0; jj < 2; ++jj) DMB += contract(AD[i], PBt[jj]) * (-ti.I[i + jj + 1]);
  for (int i = 0; i < 2; ++i)
    for (int jj = 0; jj < 2; ++jj) DB += contract(BD[i], PBt[jj]) * ti.I[i + jj + 2];

  ConstitutiveTensor out;
  out.model = ConstitutiveModel::Da;
  out.D = assemble_blocks(to_voigt(DM), to_voigt(DMB), to_voigt(DB));
  return out;
}

ConstitutiveTensor constitutive_reduced(const MidsurfaceMetric& m, const MaterialParams& mat,
                                        double h, ConstitutiveModel model) {
  const Ten4 Dm = plane_stress_material_tensor(m, mat);
  const Mat3 V = to_voigt(Dm);
  const double h3 = h * h * h / 12.0;
  ConstitutiveTensor out;
  out.model = model;
  Mat3 MB = Mat3::Zero();
  switch (model) {
    case ConstitutiveModel::D0:
      break;
    case ConstitutiveModel::D1:
      MB = h3 * m.trace_b * V;
      break;
    case ConstitutiveModel::D2: {
      // O(zeta^2) truncation of the analytic coupling block
      const Ten4 X = Dm * m.trace_b - contract(sym_kron_b(m.b_mix), Dm) -
                     contract(Dm, half_kron_b(m.b_mix).pair_transpose());
      MB = h3 * to_voigt(X);
      break;
    }
    case ConstitutiveModel::Da:
      throw DomainError("Da is not a reduced model");
  }
  out.D = assemble_blocks(h * V, MB, h3 * V);
  return out;
}

ConstitutiveTensor constitutive(const MidsurfaceMetric& m, const MaterialParams& mat, double h,
                                ConstitutiveModel model, const ThicknessIntegralOptions& opts) {
  if (model == ConstitutiveModel::Da) return constitutive_Da(m, mat, h, opts);
  return constitutive_reduced(m, mat, h, model);
}

Vec6 section_force_rate(const ConstitutiveTensor& D, const Vec6& e) { return D.D * e; }

EquidistantStress equidistant_stress(const MidsurfaceMetric& m, const MaterialParams& mat,
                                     double zeta, const Mat2& d_equidistant) {
  const Mat2 g_inv_eq = equidistant_metric_inv(m, zeta);
  const Ten4 Deq = plane_stress_material_tensor(g_inv_eq, mat);
  EquidistantStress out;
  out.contravariant = apply(Deq, d_equidistant);
  const Mat2 g_cov_eq = equidistant_metric_cov(m, zeta);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      out.physical(a, b) = out.contravariant(a, b) * std::sqrt(g_cov_eq(a, a) * g_cov_eq(b, b));
  return out;
}

}  // namespace kshell
