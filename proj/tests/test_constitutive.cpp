#include <doctest.h>

#include <random>

#include "kshell/constitutive.hpp"
#include "oracles.hpp"

using namespace kshell;
using namespace kshell::test;

namespace {

MidsurfaceMetric plate_metric() {
  Eigen::Matrix<double, 3, 2> d1;
  d1.col(0) = Vec3(1, 0, 0);
  d1.col(1) = Vec3(0, 1, 0);
  return compute_metric(d1, Eigen::Matrix<double, 3, 3>::Zero());
}

MidsurfaceMetric cylinder_metric(double R) {
  Eigen::Matrix<double, 3, 2> d1;
  d1.col(0) = Vec3(0, 0, 1);
  d1.col(1) = Vec3(0, 1, 0);
  Eigen::Matrix<double, 3, 3> d2 = Eigen::Matrix<double, 3, 3>::Zero();
  d2.col(1) = Vec3(-1.0 / R, 0, 0);
  return compute_metric(d1, d2);
}

// hyperbolic point (saddle), det b < 0
MidsurfaceMetric saddle_metric(double k1, double k2) {
  Eigen::Matrix<double, 3, 2> d1;
  d1.col(0) = Vec3(1, 0, 0);
  d1.col(1) = Vec3(0, 1, 0);
  Eigen::Matrix<double, 3, 3> d2 = Eigen::Matrix<double, 3, 3>::Zero();
  d2.col(0) = Vec3(0, 0, k1);
  d2.col(1) = Vec3(0, 0, -k2);
  return compute_metric(d1, d2);
}

}  // namespace

TEST_CASE("plane stress tensor: orthonormal special cases") {
  const MidsurfaceMetric m = plate_metric();
  SUBCASE("E = 1, nu = 0") {
    const MaterialParams mat = MaterialParams::isotropic(1.0, 0.0);
    const Mat3 V = to_voigt(plane_stress_material_tensor(m, mat));
    CHECK(V(0, 0) == doctest::Approx(1.0));
    CHECK(V(1, 1) == doctest::Approx(1.0));
    CHECK(V(2, 2) == doctest::Approx(0.5));
    CHECK(std::abs(V(0, 1)) <= 1e-15);
  }
  SUBCASE("classical plane-stress matrix") {
    const double E = 210.0, nu = 0.3;
    const MaterialParams mat = MaterialParams::isotropic(E, nu);
    const Mat3 V = to_voigt(plane_stress_material_tensor(m, mat));
    const double f = E / (1.0 - nu * nu);
    CHECK(V(0, 0) == doctest::Approx(f).epsilon(1e-12));
    CHECK(V(0, 1) == doctest::Approx(f * nu).epsilon(1e-12));
    CHECK(V(2, 2) == doctest::Approx(f * (1.0 - nu) / 2.0).epsilon(1e-12));
    CHECK(V(0, 2) == doctest::Approx(0.0));
  }
}

TEST_CASE("plane stress tensor transforms correctly under a skewed basis") {
  const MaterialParams mat = MaterialParams::isotropic(3.0, 0.25);
  const MidsurfaceMetric ortho = plate_metric();
  Mat2 J;
  J << 1.3, 0.4, -0.2, 0.9;  // new tangents g'_a = J(b, a) g_b
  Eigen::Matrix<double, 3, 2> d1;
  d1.col(0) = Vec3(J(0, 0), J(1, 0), 0.0);
  d1.col(1) = Vec3(J(0, 1), J(1, 1), 0.0);
  const MidsurfaceMetric skew = compute_metric(d1, Eigen::Matrix<double, 3, 3>::Zero());

  Mat2 eps_phys;
  eps_phys << 0.01, 0.004, 0.004, -0.02;
  // covariant components in the skewed frame: e'_{ab} = J^c_a J^d_b e_{cd}
  const Mat2 eps_skew = J.transpose() * eps_phys * J;
  const Mat2 sig_skew = apply(plane_stress_material_tensor(skew, mat), eps_skew);
  // push contravariant components back to the Cartesian frame
  const Mat2 sig_phys_from_skew = J * sig_skew * J.transpose();
  const Mat2 sig_phys = apply(plane_stress_material_tensor(ortho, mat), eps_phys);
  CHECK((sig_phys_from_skew - sig_phys).norm() <= 1e-12 * sig_phys.norm());
}

TEST_CASE("thickness integrals: plate closed forms") {
  const ThicknessIntegrals ti = thickness_integrals_closed(0.0, 0.0, 2.0);
  CHECK(ti.I[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(ti.I[1]) <= 1e-16);
  CHECK(ti.I[2] == doctest::Approx(8.0 / 12.0).epsilon(1e-13));
  CHECK(std::abs(ti.I[3]) <= 1e-16);
  CHECK(ti.I[4] == doctest::Approx(32.0 / 80.0).epsilon(1e-13));
}

TEST_CASE("thickness integrals: cylinder and sphere against quadrature") {
  SUBCASE("cylinder Kh = 0.3") {
    const double R = 2.0, h = 0.3 * R;
    const ThicknessIntegrals cf = thickness_integrals_closed(1.0 / R, 0.0, h);
    const ThicknessIntegrals q = thickness_integrals_quadrature(1.0 / R, 0.0, h, 64);
    for (int k = 0; k < 5; ++k)
      CHECK(std::abs(cf.I[k] - q.I[k]) <= 1e-10 * std::abs(q.I[k]));
  }
  SUBCASE("sphere Kh = 0.5") {
    const double R = 2.0, h = 0.25 * R;  // Kh = 2h/R
    const ThicknessIntegrals cf = thickness_integrals_closed(2.0 / R, 1.0 / (R * R), h);
    const ThicknessIntegrals q = thickness_integrals_quadrature(2.0 / R, 1.0 / (R * R), h, 64);
    for (int k = 0; k < 5; ++k)
      CHECK(std::abs(cf.I[k] - q.I[k]) <= 1e-10 * std::abs(q.I[k]));
  }
}

TEST_CASE("thickness integrals: 1000 random states at 1e-9") {
  std::mt19937 rng(29);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int tested = 0;
  while (tested < 1000) {
    const double kh = 0.05 + 1.45 * u(rng);
    const double T = (u(rng) < 0.5 ? -1.0 : 1.0) * kh;  // work at h = 1
    const double h = 1.0;
    const double c = -2.0 + 2.25 * u(rng);  // b in [-2, 0.25] T^2
    const double b = c * T * T;
    // keep the shifter positive across the thickness
    const double g0p = 1.0 - 0.5 * h * T + 0.25 * h * h * b;
    const double g0m = 1.0 + 0.5 * h * T + 0.25 * h * h * b;
    if (g0p <= 0.05 || g0m <= 0.05) continue;
    if (b > 0.0) {
      const double zv = T / (2.0 * b);
      if (std::abs(zv) < 0.5 * h && 1.0 - T * T / (4.0 * b) <= 0.05) continue;
    }
    const ThicknessIntegrals cf = thickness_integrals_closed(T, b, h);
    const ThicknessIntegrals q = thickness_integrals_quadrature(T, b, h, 64);
    for (int k = 0; k < 5; ++k) {
      const double scale = std::max(std::abs(q.I[k]), 1e-3 * std::abs(q.I[0]));
      CHECK(std::abs(cf.I[k] - q.I[k]) <= 1e-9 * scale);
    }
    ++tested;
  }
}

TEST_CASE("thickness integrals: quadrature behaviour") {
  // plate case is a polynomial integrand: exact for small rules
  const ThicknessIntegrals q3 = thickness_integrals_quadrature(0.0, 0.0, 1.4, 3);
  CHECK(q3.I[2] == doctest::Approx(std::pow(1.4, 3) / 12.0).epsilon(1e-14));
  // self-convergence at Kh = 1.0
  const double T = 1.0, h = 1.0, b = 0.1;
  const ThicknessIntegrals ref = thickness_integrals_quadrature(T, b, h, 96);
  double prev_err = 1e99;
  for (int n : {4, 8, 16, 32}) {
    const ThicknessIntegrals q = thickness_integrals_quadrature(T, b, h, n);
    double err = 0.0;
    for (int k = 0; k < 5; ++k) err = std::max(err, std::abs(q.I[k] - ref.I[k]));
    CHECK(err < prev_err + 1e-18);
    prev_err = err;
  }
  CHECK(prev_err <= 1e-12);
  CHECK_THROWS_AS(thickness_integrals_quadrature(0.0, 0.0, 1.0, 1), DomainError);
}

TEST_CASE("thickness integrals: self-penetration detected") {
  CHECK_THROWS_AS(thickness_integrals_closed(2.5, 0.0, 1.0), SelfPenetrationError);
  CHECK_THROWS_AS(thickness_integrals_quadrature(2.5, 0.0, 1.0, 16), SelfPenetrationError);
}

TEST_CASE("Da equals D0 on a plate") {
  const MaterialParams mat = MaterialParams::isotropic(200.0, 0.3);
  const MidsurfaceMetric m = plate_metric();
  const ConstitutiveTensor da = constitutive_Da(m, mat, 0.1);
  const ConstitutiveTensor d0 = constitutive_reduced(m, mat, 0.1, ConstitutiveModel::D0);
  CHECK((da.D - d0.D).norm() <= 1e-12 * d0.D.norm());
}

TEST_CASE("Da matches the numerical block-integration oracle") {
  const MaterialParams mat = MaterialParams::isotropic(70.0, 0.3);
  std::mt19937 rng(31);
  SUBCASE("cylinder across curviness levels") {
    for (double kh : {0.1, 0.236, 0.6, 1.0}) {
      const MidsurfaceMetric m = cylinder_metric(1.0);
      const double h = kh;
      const ConstitutiveTensor da = constitutive_Da(m, mat, h);
      const Mat6 oracle = oracle_constitutive_blocks(m, mat, h, 32);
      CHECK((da.D - oracle).norm() <= 1e-8 * oracle.norm());
    }
  }
  SUBCASE("saddle point") {
    const MidsurfaceMetric m = saddle_metric(1.0, 0.55);
    const double h = 0.4 / std::abs(m.trace_b);
    const ConstitutiveTensor da = constitutive_Da(m, mat, h);
    const Mat6 oracle = oracle_constitutive_blocks(m, mat, h, 32);
    CHECK((da.D - oracle).norm() <= 1e-8 * oracle.norm());
  }
  SUBCASE("random metrics") {
    for (int rep = 0; rep < 30; ++rep) {
      RandomMetric rm = random_metric(rng);
      const double h = safe_thickness(rm.metric, 0.5);
      const ConstitutiveTensor da = constitutive_Da(rm.metric, mat, h);
      const Mat6 oracle = oracle_constitutive_blocks(rm.metric, mat, h, 32);
      CHECK((da.D - oracle).norm() <= 1e-8 * oracle.norm());
    }
  }
  SUBCASE("small curviness goes through the quadrature switch") {
    const MidsurfaceMetric m = cylinder_metric(100.0);
    const ConstitutiveTensor da = constitutive_Da(m, mat, 1.0);  // Kh = 0.01
    const Mat6 oracle = oracle_constitutive_blocks(m, mat, 1.0, 32);
    CHECK((da.D - oracle).norm() <= 1e-7 * oracle.norm());
  }
}

TEST_CASE("constitutive tensor is symmetric") {
  const MaterialParams mat = MaterialParams::isotropic(70.0, 0.3);
  std::mt19937 rng(37);
  for (int rep = 0; rep < 10; ++rep) {
    RandomMetric rm = random_metric(rng);
    const double h = safe_thickness(rm.metric, 0.7);
    const ConstitutiveTensor da = constitutive_Da(rm.metric, mat, h);
    CHECK((da.D - da.D.transpose()).norm() <= 1e-12 * da.D.norm());
  }
}

TEST_CASE("reduced model structure and hierarchy") {
  const MaterialParams mat = MaterialParams::isotropic(70.0, 0.3);
  const double R = 1.0;
  const MidsurfaceMetric m = cylinder_metric(R);

  SUBCASE("plate: all models identical") {
    const MidsurfaceMetric p = plate_metric();
    const ConstitutiveTensor da = constitutive_Da(p, mat, 0.2);
    for (auto model : {ConstitutiveModel::D0, ConstitutiveModel::D1, ConstitutiveModel::D2}) {
      const ConstitutiveTensor r = constitutive_reduced(p, mat, 0.2, model);
      CHECK((da.D - r.D).norm() <= 1e-12 * da.D.norm());
    }
  }

  SUBCASE("D1 and D2 share membrane and bending blocks with D0") {
    const double h = 0.236;
    const ConstitutiveTensor d0 = constitutive_reduced(m, mat, h, ConstitutiveModel::D0);
    const ConstitutiveTensor d1 = constitutive_reduced(m, mat, h, ConstitutiveModel::D1);
    const ConstitutiveTensor d2 = constitutive_reduced(m, mat, h, ConstitutiveModel::D2);
    CHECK((d1.membrane() - d0.membrane()).norm() == 0.0);
    CHECK((d2.membrane() - d0.membrane()).norm() == 0.0);
    CHECK((d1.bending() - d0.bending()).norm() == 0.0);
    CHECK((d2.bending() - d0.bending()).norm() == 0.0);
    CHECK(d0.coupling().norm() == 0.0);
    CHECK(d1.coupling().norm() > 0.0);
  }

  SUBCASE("tensor-level accuracy ordering on the strongly curved cylinder") {
    for (double kh : {0.236, 0.4, 0.5}) {
      const double h = kh * R;
      const ConstitutiveTensor da = constitutive_Da(m, mat, h);
      const double e0 = (constitutive_reduced(m, mat, h, ConstitutiveModel::D0).D - da.D).norm();
      const double e1 = (constitutive_reduced(m, mat, h, ConstitutiveModel::D1).D - da.D).norm();
      const double e2 = (constitutive_reduced(m, mat, h, ConstitutiveModel::D2).D - da.D).norm();
      CHECK(e2 < e0);
      CHECK(e0 < e1);
    }
  }
}

TEST_CASE("section force rate") {
  const MaterialParams mat = MaterialParams::isotropic(10.0, 0.3);
  const MidsurfaceMetric cyl = cylinder_metric(1.0);
  const double h = 0.3;
  const ConstitutiveTensor da = constitutive_Da(cyl, mat, h);
  CHECK(section_force_rate(da, Vec6::Zero()).norm() == 0.0);

  // pure membrane on a plate: no moments
  const ConstitutiveTensor d0 = constitutive_Da(plate_metric(), mat, h);
  Vec6 e = Vec6::Zero();
  e(0) = 0.01;
  CHECK(section_force_rate(d0, e).tail<3>().norm() <= 1e-16);

  // pure bending on the curved point couples into membrane forces under Da
  Vec6 eb = Vec6::Zero();
  eb(4) = 0.1;
  CHECK(section_force_rate(da, eb).head<3>().norm() > 1e-6);
  const ConstitutiveTensor red0 = constitutive_reduced(cyl, mat, h, ConstitutiveModel::D0);
  CHECK(section_force_rate(red0, eb).head<3>().norm() == 0.0);
}

TEST_CASE("equidistant stress") {
  const MaterialParams mat = MaterialParams::isotropic(100.0, 0.3);
  SUBCASE("plate uniaxial strain") {
    const MidsurfaceMetric p = plate_metric();
    Mat2 d;
    d << 0.01, 0.0, 0.0, 0.0;
    const EquidistantStress s = equidistant_stress(p, mat, 0.0, d);
    const double f = mat.E / (1.0 - mat.nu * mat.nu);
    CHECK(s.physical(0, 0) == doctest::Approx(f * 0.01).epsilon(1e-12));
    CHECK(s.physical(1, 1) == doctest::Approx(f * mat.nu * 0.01).epsilon(1e-12));
  }
  SUBCASE("midsurface limit reduces to the midsurface law") {
    std::mt19937 rng(41);
    RandomMetric rm = random_metric(rng);
    Mat2 d;
    d << 0.01, 0.003, 0.003, -0.004;
    const EquidistantStress s = equidistant_stress(rm.metric, mat, 0.0, d);
    const Mat2 direct = apply(plane_stress_material_tensor(rm.metric, mat), d);
    CHECK((s.contravariant - direct).norm() <= 1e-13 * direct.norm());
  }
  SUBCASE("curved point matches direct inversion of the equidistant metric") {
    std::mt19937 rng(43);
    RandomMetric rm = random_metric(rng);
    const double zeta = 0.15 / std::abs(rm.metric.trace_b);
    Mat2 d;
    d << 0.01, 0.003, 0.003, -0.004;
    const EquidistantStress s = equidistant_stress(rm.metric, mat, zeta, d);
    const Mat2 g_inv_direct = equidistant_metric_cov(rm.metric, zeta).inverse();
    const Mat2 want = apply(plane_stress_material_tensor(g_inv_direct, mat), d);
    CHECK((s.contravariant - want).norm() <= 1e-10 * want.norm());
  }
}
