#include "kshell/assembly.hpp"

#include <cmath>
#include <numeric>
#include <thread>

namespace kshell {

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[static_cast<size_t>(a)] != a) {
      parent[static_cast<size_t>(a)] = parent[static_cast<size_t>(parent[static_cast<size_t>(a)])];
      a = parent[static_cast<size_t>(a)];
    }
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
  }
};

}  // namespace

DofMap DofMap::build(int n_control_points, const std::vector<FixDof>& fixed,
                     const std::vector<CoupleDof>& couplings) {
  DofMap map;
  map.n_raw = 3 * n_control_points;
  UnionFind uf(map.n_raw);
  for (const auto& c : couplings)
    uf.unite(3 * c.cp_slave + c.dir_slave, 3 * c.cp_master + c.dir_master);
  std::vector<bool> root_fixed(static_cast<size_t>(map.n_raw), false);
  for (const auto& f : fixed) root_fixed[static_cast<size_t>(uf.find(3 * f.cp + f.dir))] = true;

  std::vector<int> root_eq(static_cast<size_t>(map.n_raw), -2);
  map.eq.resize(static_cast<size_t>(map.n_raw));
  int next = 0;
  for (int d = 0; d < map.n_raw; ++d) {
    const int r = uf.find(d);
    if (root_eq[static_cast<size_t>(r)] == -2)
      root_eq[static_cast<size_t>(r)] = root_fixed[static_cast<size_t>(r)] ? -1 : next++;
    map.eq[static_cast<size_t>(d)] = root_eq[static_cast<size_t>(r)];
  }
  map.n_free = next;
  return map;
}

VecX DofMap::expand(const VecX& free) const {
  VecX raw = VecX::Zero(n_raw);
  for (int d = 0; d < n_raw; ++d)
    if (eq[static_cast<size_t>(d)] >= 0) raw(d) = free(eq[static_cast<size_t>(d)]);
  return raw;
}

VecX DofMap::reduce_add(const VecX& raw) const {
  VecX out = VecX::Zero(n_free);
  for (int d = 0; d < n_raw; ++d)
    if (eq[static_cast<size_t>(d)] >= 0) out(eq[static_cast<size_t>(d)]) += raw(d);
  return out;
}

Eigen::Matrix<double, 15, 15> build_G(const Vec6& f, const MidsurfaceMetric& m) {
  const double N11 = f(0), N22 = f(1), N12 = f(2);
  const double M11 = f(3), M22 = f(4), M12 = f(5);
  // Gamma^nu_M = Gamma^nu_11 M11 + 2 Gamma^nu_12 M12 + Gamma^nu_22 M22
  const double gM[2] = {
      m.gamma[0][0][0] * M11 + 2.0 * m.gamma[0][0][1] * M12 + m.gamma[0][1][1] * M22,
      m.gamma[1][0][0] * M11 + 2.0 * m.gamma[1][0][1] * M12 + m.gamma[1][1][1] * M22};
  const Vec3 g3 = m.g3;
  const Vec3 gr[2] = {m.g1_rec, m.g2_rec};

  // M : b feeds the normal-normal coupling that the Christoffel variation
  // produces through the reciprocal-basis change along the normal.
  const double Mb = M11 * m.b_cov(0, 0) + 2.0 * M12 * m.b_cov(0, 1) + M22 * m.b_cov(1, 1);

  Eigen::Matrix<double, 15, 15> G = Eigen::Matrix<double, 15, 15>::Zero();
  for (int mm = 0; mm < 3; ++mm) {
    for (int nn = 0; nn < 3; ++nn) {
      Eigen::Matrix<double, 5, 5> B = Eigen::Matrix<double, 5, 5>::Zero();
      const double dnm = (mm == nn) ? 1.0 : 0.0;
      const double nmn = g3(mm) * g3(nn);
      B(0, 0) = gM[0] * (g3(nn) * gr[0](mm) + gr[0](nn) * g3(mm)) + dnm * N11 -
                Mb * m.g_inv(0, 0) * nmn;
      B(0, 1) = gM[0] * g3(nn) * gr[1](mm) + gM[1] * gr[0](nn) * g3(mm) + dnm * N12 -
                Mb * m.g_inv(0, 1) * nmn;
      B(1, 0) = gM[1] * g3(nn) * gr[0](mm) + gM[0] * gr[1](nn) * g3(mm) + dnm * N12 -
                Mb * m.g_inv(1, 0) * nmn;
      B(1, 1) = gM[1] * (g3(nn) * gr[1](mm) + gr[1](nn) * g3(mm)) + dnm * N22 -
                Mb * m.g_inv(1, 1) * nmn;
      const double c[3] = {-M11, -M22, -2.0 * M12};
      for (int k = 0; k < 3; ++k) {
        B(0, 2 + k) = c[k] * gr[0](nn) * g3(mm);
        B(1, 2 + k) = c[k] * gr[1](nn) * g3(mm);
        B(2 + k, 0) = c[k] * g3(nn) * gr[0](mm);
        B(2 + k, 1) = c[k] * g3(nn) * gr[1](mm);
      }
      G.block<5, 5>(5 * mm, 5 * nn) = B;
    }
  }
  return G;
}

Assembler::Assembler(Model model) : model_(std::move(model)) {
  model_.surface.validate();
  mesh_ = build_mesh(model_.surface, model_.gauss_u, model_.gauss_v);
  dofs_ = DofMap::build(model_.surface.cp_count(), model_.fixed, model_.couplings);
  gp_offset_.resize(mesh_.elements.size());
  int ofs = 0;
  for (size_t e = 0; e < mesh_.elements.size(); ++e) {
    gp_offset_[e] = ofs;
    ofs += static_cast<int>(mesh_.elements[e].gauss.size());
  }
  n_gp_ = ofs;
}

Configuration Assembler::initial_configuration() const {
  Configuration c;
  c.q = VecX::Zero(dofs_.n_raw);
  c.gp.resize(static_cast<size_t>(n_gp_));
  return c;
}

void Assembler::element_gradients(const Configuration& c, const Element&,
                                  const ElementGaussPoint& gp, Eigen::Matrix<double, 3, 2>& d1,
                                  Eigen::Matrix<double, 3, 3>& d2) const {
  d1.setZero();
  d2.setZero();
  const auto& b = gp.basis;
  for (size_t k = 0; k < b.support.size(); ++k) {
    const int g = b.support[k];
    const Vec3 P = model_.surface.points[static_cast<size_t>(g)] + c.q.segment<3>(3 * g);
    d1.col(0) += b.der1[k](0) * P;
    d1.col(1) += b.der1[k](1) * P;
    for (int j = 0; j < 3; ++j) d2.col(j) += b.der2[k](j) * P;
  }
}

void Assembler::element_tangent(const Configuration& c, size_t e, int gp_base, MatX& k) const {
  const Element& el = mesh_.elements[e];
  const int n_sup = static_cast<int>(el.support.size());
  k.setZero(3 * n_sup, 3 * n_sup);
  Eigen::Matrix<double, 3, 2> d1;
  Eigen::Matrix<double, 3, 3> d2;
  std::vector<Eigen::Matrix<double, 6, 3>> L(static_cast<size_t>(n_sup));
  std::vector<Eigen::Matrix<double, 6, 3>> DL(static_cast<size_t>(n_sup));
  for (size_t g = 0; g < el.gauss.size(); ++g) {
    const ElementGaussPoint& gp = el.gauss[g];
    element_gradients(c, el, gp, d1, d2);
    const MidsurfaceMetric m = compute_metric(d1, d2);
    const double w = gp.weight * m.sqrt_g;
    const ConstitutiveTensor D =
        constitutive(m, model_.material, model_.thickness, model_.model_tag, model_.ti_opts);
    const StrainOperator op = build_strain_operator(m, gp.basis);
    for (int a = 0; a < n_sup; ++a) {
      L[static_cast<size_t>(a)] = op.bl_block(a);
      DL[static_cast<size_t>(a)] = D.D * L[static_cast<size_t>(a)];
    }
    const Eigen::Matrix<double, 15, 15> G = build_G(c.gp[static_cast<size_t>(gp_base) + g].f, m);
    for (int a = 0; a < n_sup; ++a) {
      const auto& da = op.cp_derivs[static_cast<size_t>(a)];
      for (int b = a; b < n_sup; ++b) {
        const auto& db = op.cp_derivs[static_cast<size_t>(b)];
        Mat3 kab = L[static_cast<size_t>(a)].transpose() * DL[static_cast<size_t>(b)];
        for (int mm = 0; mm < 3; ++mm)
          for (int nn = 0; nn < 3; ++nn)
            kab(mm, nn) += da.dot(G.block<5, 5>(5 * mm, 5 * nn) * db);
        k.block<3, 3>(3 * a, 3 * b) += w * kab;
        if (b != a) k.block<3, 3>(3 * b, 3 * a) += w * kab.transpose();
      }
    }
  }
}

SpMat Assembler::tangent(const Configuration& c) const {
  const int n_el = static_cast<int>(mesh_.elements.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<size_t>(n_el) * 400);

  const int n_threads = std::max(1, model_.threads);
  const int batch = (n_threads > 1) ? 32 * n_threads : n_el;
  std::vector<MatX> kbuf(static_cast<size_t>(std::min(batch, n_el)));

  for (int start = 0; start < n_el; start += batch) {
    const int end = std::min(start + batch, n_el);
    const auto work = [&](int tid) {
      for (int e = start + tid; e < end; e += n_threads)
        element_tangent(c, static_cast<size_t>(e), gp_offset_[static_cast<size_t>(e)],
                        kbuf[static_cast<size_t>(e - start)]);
    };
    if (n_threads == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < n_threads; ++t) pool.emplace_back(work, t);
      for (auto& t : pool) t.join();
    }
    for (int e = start; e < end; ++e) {
      const Element& el = mesh_.elements[static_cast<size_t>(e)];
      const MatX& k = kbuf[static_cast<size_t>(e - start)];
      const int n_sup = static_cast<int>(el.support.size());
      for (int a = 0; a < n_sup; ++a)
        for (int ma = 0; ma < 3; ++ma) {
          const int ra = dofs_.eq[static_cast<size_t>(3 * el.support[static_cast<size_t>(a)] + ma)];
          if (ra < 0) continue;
          for (int b = 0; b < n_sup; ++b)
            for (int mb = 0; mb < 3; ++mb) {
              const int rb =
                  dofs_.eq[static_cast<size_t>(3 * el.support[static_cast<size_t>(b)] + mb)];
              if (rb < 0) continue;
              trip.emplace_back(ra, rb, k(3 * a + ma, 3 * b + mb));
            }
        }
    }
  }
  SpMat K(dofs_.n_free, dofs_.n_free);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

VecX Assembler::internal_forces(const Configuration& c) const {
  VecX F_raw = VecX::Zero(dofs_.n_raw);
  Eigen::Matrix<double, 3, 2> d1;
  Eigen::Matrix<double, 3, 3> d2;
  for (size_t e = 0; e < mesh_.elements.size(); ++e) {
    const Element& el = mesh_.elements[e];
    for (size_t g = 0; g < el.gauss.size(); ++g) {
      const ElementGaussPoint& gp = el.gauss[g];
      element_gradients(c, el, gp, d1, d2);
      const MidsurfaceMetric m = compute_metric(d1, d2);
      const double w = gp.weight * m.sqrt_g;
      const StrainOperator op = build_strain_operator(m, gp.basis);
      const Vec6& f = c.gp[static_cast<size_t>(gp_offset_[e]) + g].f;
      for (int a = 0; a < static_cast<int>(el.support.size()); ++a) {
        F_raw.segment<3>(3 * el.support[static_cast<size_t>(a)]) +=
            w * (op.bl_block(a).transpose() * f);
      }
    }
  }
  return dofs_.reduce_add(F_raw);
}

VecX Assembler::external_forces() const {
  VecX Q_raw = VecX::Zero(dofs_.n_raw);
  for (const auto& pl : model_.point_loads) {
    const BasisEval b = basis_derivatives(model_.surface, pl.at(0), pl.at(1));
    for (size_t k = 0; k < b.support.size(); ++k)
      Q_raw.segment<3>(3 * b.support[k]) += b.value[k] * pl.force;
  }
  if (!model_.tractions.empty()) {
    Eigen::Matrix<double, 3, 2> d1;
    Eigen::Matrix<double, 3, 3> d2;
    Configuration c0;
    c0.q = VecX::Zero(dofs_.n_raw);
    for (const auto& el : mesh_.elements) {
      for (const auto& gp : el.gauss) {
        element_gradients(c0, el, gp, d1, d2);
        const MidsurfaceMetric m = compute_metric(d1, d2);
        const double w = gp.weight * m.sqrt_g;
        for (const auto& tr : model_.tractions)
          for (size_t k = 0; k < gp.basis.support.size(); ++k)
            Q_raw.segment<3>(3 * gp.basis.support[k]) += w * gp.basis.value[k] * tr.p;
      }
    }
  }
  return dofs_.reduce_add(Q_raw);
}

void Assembler::update_state(Configuration& c, const VecX& dq_free) const {
  const VecX dq_raw = dofs_.expand(dq_free);
  Eigen::Matrix<double, 3, 2> d1;
  Eigen::Matrix<double, 3, 3> d2;
  Configuration next = c;
  next.q = c.q + dq_raw;
  for (size_t e = 0; e < mesh_.elements.size(); ++e) {
    const Element& el = mesh_.elements[e];
    const int n_sup = static_cast<int>(el.support.size());
    VecX dq_local(3 * n_sup);
    for (int a = 0; a < n_sup; ++a)
      dq_local.segment<3>(3 * a) = dq_raw.segment<3>(3 * el.support[static_cast<size_t>(a)]);
    for (size_t g = 0; g < el.gauss.size(); ++g) {
      const ElementGaussPoint& gp = el.gauss[g];
      element_gradients(c, el, gp, d1, d2);
      const MidsurfaceMetric m_old = compute_metric(d1, d2);
      const StrainOperator op = build_strain_operator(m_old, gp.basis);
      const Vec6 e_inc = op.apply(dq_local);
      const ConstitutiveTensor D =
          constitutive(m_old, model_.material, model_.thickness, model_.model_tag, model_.ti_opts);
      element_gradients(next, el, gp, d1, d2);
      const MidsurfaceMetric m_new = compute_metric(d1, d2);
      const double scale = std::sqrt(m_old.g_det / m_new.g_det);
      GaussPointState& s = next.gp[static_cast<size_t>(gp_offset_[e]) + g];
      s.f = s.f * scale + D.D * e_inc;
    }
  }
  c = std::move(next);
}

double Assembler::monitor_value(const Configuration& c, const Monitor& m) const {
  const BasisEval b = basis_derivatives(model_.surface, m.at(0), m.at(1));
  Vec3 u = Vec3::Zero();
  for (size_t k = 0; k < b.support.size(); ++k)
    u += b.value[k] * c.q.segment<3>(3 * b.support[k]);
  return m.direction.dot(u);
}

MidsurfaceMetric Assembler::metric_at(const Configuration& c, double xi, double eta) const {
  const SurfacePoint sp = deformed_point(c, xi, eta);
  return compute_metric(sp.der1, sp.der2);
}

SurfacePoint Assembler::deformed_point(const Configuration& c, double xi, double eta) const {
  const BasisEval b = basis_derivatives(model_.surface, xi, eta);
  SurfacePoint sp;
  sp.r.setZero();
  sp.der1.setZero();
  sp.der2.setZero();
  for (size_t k = 0; k < b.support.size(); ++k) {
    const int g = b.support[k];
    const Vec3 P = model_.surface.points[static_cast<size_t>(g)] + c.q.segment<3>(3 * g);
    sp.r += b.value[k] * P;
    sp.der1.col(0) += b.der1[k](0) * P;
    sp.der1.col(1) += b.der1[k](1) * P;
    for (int j = 0; j < 3; ++j) sp.der2.col(j) += b.der2[k](j) * P;
  }
  return sp;
}

StrainOperator Assembler::strain_operator_at(const Configuration& c, double xi, double eta) const {
  const BasisEval b = basis_derivatives(model_.surface, xi, eta);
  return build_strain_operator(metric_at(c, xi, eta), b);
}

LinearSolveResult linear_solve(const SpMat& K, const VecX& rhs) {
  TangentFactorization fact;
  fact.factorize(K);
  return {fact.solve(rhs), fact.inertia()};
}

void TangentFactorization::factorize(const SpMat& K) {
  if (!analyzed_) {
    ldlt_.analyzePattern(K);
    analyzed_ = true;
  }
  ldlt_.factorize(K);
  if (ldlt_.info() != Eigen::Success)
    throw SingularMatrixError("LDL^T factorization failed (structurally singular or zero pivot)");
  const auto& d = ldlt_.vectorD();
  double dmax = 0.0;
  for (int i = 0; i < d.size(); ++i) dmax = std::max(dmax, std::abs(d(i)));
  inertia_ = 0;
  for (int i = 0; i < d.size(); ++i) {
    if (std::abs(d(i)) <= 1e-14 * dmax)
      throw SingularMatrixError("LDL^T factorization hit a vanishing pivot at row " +
                                std::to_string(i));
    if (d(i) < 0.0) ++inertia_;
  }
}

VecX TangentFactorization::solve(const VecX& rhs) const { return ldlt_.solve(rhs); }

}  // namespace kshell
