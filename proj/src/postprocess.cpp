#include "kshell/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace kshell {

std::vector<FieldSample> curviness_field(const Assembler& assembler, const Configuration& c,
                                         double lpf, int grid_per_element, double threshold) {
  std::vector<FieldSample> out;
  const double h = assembler.model().thickness;
  for (const auto& el : assembler.mesh().elements) {
    for (int a = 0; a <= grid_per_element; ++a) {
      for (int b = 0; b <= grid_per_element; ++b) {
        FieldSample s;
        s.xi = el.xi0 + (el.xi1 - el.xi0) * a / grid_per_element;
        s.eta = el.eta0 + (el.eta1 - el.eta0) * b / grid_per_element;
        const SurfacePoint sp = assembler.deformed_point(c, s.xi, s.eta);
        const MidsurfaceMetric m = compute_metric(sp.der1, sp.der2);
        s.x = sp.r;
        s.lpf = lpf;
        const double kh = curviness(m, h);
        s.values["Kh"] = kh;
        s.values["Kh_clamped"] = std::min(kh, threshold);
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

double max_field_value(const std::vector<FieldSample>& samples, const std::string& key) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    const auto it = s.values.find(key);
    if (it != s.values.end()) m = std::max(m, it->second);
  }
  return m;
}

namespace {

MidsurfaceMetric metric_of(const Assembler& assembler, const VecX& q_raw, const BasisEval& b) {
  Eigen::Matrix<double, 3, 2> d1 = Eigen::Matrix<double, 3, 2>::Zero();
  Eigen::Matrix<double, 3, 3> d2 = Eigen::Matrix<double, 3, 3>::Zero();
  for (size_t k = 0; k < b.support.size(); ++k) {
    const int g = b.support[k];
    const Vec3 P =
        assembler.model().surface.points[static_cast<size_t>(g)] + q_raw.segment<3>(3 * g);
    d1.col(0) += b.der1[k](0) * P;
    d1.col(1) += b.der1[k](1) * P;
    for (int j = 0; j < 3; ++j) d2.col(j) += b.der2[k](j) * P;
  }
  return compute_metric(d1, d2);
}

std::vector<Vec3> local_velocities(const VecX& dq_raw, const BasisEval& b) {
  std::vector<Vec3> v(b.support.size());
  for (size_t k = 0; k < b.support.size(); ++k) v[k] = dq_raw.segment<3>(3 * b.support[k]);
  return v;
}

}  // namespace

StrainHistory accumulated_reference_strain(const Assembler& assembler,
                                           const std::vector<PathPoint>& path, const Vec2& at) {
  StrainHistory hist;
  if (path.empty()) return hist;
  const BasisEval basis = basis_derivatives(assembler.model().surface, at(0), at(1));
  const VecX q0 = VecX::Zero(assembler.dofs().n_raw);
  const MidsurfaceMetric m_ref = metric_of(assembler, q0, basis);

  Mat2 kappa = Mat2::Zero();
  VecX q_prev = q0;
  for (const auto& p : path) {
    const MidsurfaceMetric m_prev = metric_of(assembler, q_prev, basis);
    const Mat2 kdot =
        curvature_change_rate(m_prev, basis, local_velocities(p.q_raw - q_prev, basis));
    kappa += kdot;
    const MidsurfaceMetric m_cur = metric_of(assembler, p.q_raw, basis);
    hist.lambda.push_back(p.lambda);
    hist.membrane.push_back(0.5 * (m_cur.g_cov - m_ref.g_cov));
    hist.kappa_accum.push_back(kappa);
    hist.kappa_diff.push_back(m_cur.b_cov - m_ref.b_cov);
    q_prev = p.q_raw;
  }
  return hist;
}

FiberHistory outer_fiber_state(const Assembler& assembler, const std::vector<PathPoint>& path,
                               const Vec2& at, double zeta, DistributionMode mode) {
  FiberHistory hist;
  if (path.empty()) return hist;
  const BasisEval basis = basis_derivatives(assembler.model().surface, at(0), at(1));
  const MaterialParams& mat = assembler.model().material;

  Mat2 strain = Mat2::Zero();
  VecX q_prev = VecX::Zero(assembler.dofs().n_raw);
  for (const auto& p : path) {
    const MidsurfaceMetric m_prev = metric_of(assembler, q_prev, basis);
    const StrainOperator op = build_strain_operator(m_prev, basis);
    VecX dq_local(3 * op.support_count());
    for (int a = 0; a < op.support_count(); ++a)
      dq_local.segment<3>(3 * a) =
          (p.q_raw - q_prev).segment<3>(3 * op.support[static_cast<size_t>(a)]);
    const Vec6 e_inc = op.apply(dq_local);
    strain += equidistant_strain(e_inc, m_prev, zeta, mode);

    const MidsurfaceMetric m_cur = metric_of(assembler, p.q_raw, basis);
    hist.lambda.push_back(p.lambda);
    hist.strain_cov.push_back(strain);
    hist.strain_phys.push_back(physical_strain(strain, m_cur, zeta));
    const EquidistantStress s = equidistant_stress(m_cur, mat, zeta, strain);
    hist.stress_phys.push_back(s.physical);
    q_prev = p.q_raw;
  }
  return hist;
}

std::vector<FieldSample> nodal_average(const std::vector<FieldSample>& samples, double tol) {
  std::vector<FieldSample> out;
  std::vector<bool> used(samples.size(), false);
  for (size_t i = 0; i < samples.size(); ++i) {
    if (used[i]) continue;
    FieldSample merged = samples[i];
    int count = 1;
    for (size_t j = i + 1; j < samples.size(); ++j) {
      if (used[j]) continue;
      if (std::abs(samples[j].xi - samples[i].xi) <= tol &&
          std::abs(samples[j].eta - samples[i].eta) <= tol) {
        for (auto& [key, val] : merged.values) val += samples[j].values.at(key);
        used[j] = true;
        ++count;
      }
    }
    for (auto& [key, val] : merged.values) val /= count;
    out.push_back(std::move(merged));
  }
  return out;
}

}  // namespace kshell
