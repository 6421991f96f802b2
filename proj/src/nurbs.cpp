#include "kshell/nurbs.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "kshell/gauss.hpp"

namespace kshell {

void KnotVector::validate() const {
  if (degree < 1) throw DomainError("knot vector degree must be >= 1");
  const int n = static_cast<int>(values.size());
  if (n < 2 * (degree + 1)) throw DomainError("knot vector too short for its degree");
  for (int i = 0; i + 1 < n; ++i)
    if (values[static_cast<size_t>(i)] > values[static_cast<size_t>(i + 1)])
      throw DomainError("knot vector not nondecreasing");
  for (int i = 0; i <= degree; ++i) {
    if (values[static_cast<size_t>(i)] != values.front() ||
        values[static_cast<size_t>(n - 1 - i)] != values.back())
      throw DomainError("knot vector is not open/clamped");
  }
  if (values.front() == values.back()) throw DomainError("knot vector has no nonempty span");
}

int find_span(const KnotVector& kv, double t) {
  const auto& u = kv.values;
  const int p = kv.degree;
  const int n = kv.basis_count();  // valid spans live in [p, n-1]
  if (t < u.front() || t > u.back())
    throw DomainError("parameter " + std::to_string(t) + " outside knot domain [" +
                      std::to_string(u.front()) + ", " + std::to_string(u.back()) + "]");
  if (t >= u[static_cast<size_t>(n)]) {
    // closure convention: last nonempty span
    int i = n - 1;
    while (u[static_cast<size_t>(i)] == u[static_cast<size_t>(i + 1)]) --i;
    return i;
  }
  int lo = p, hi = n;
  while (lo + 1 < hi) {
    const int mid = (lo + hi) / 2;
    if (t < u[static_cast<size_t>(mid)])
      hi = mid;
    else
      lo = mid;
  }
  return lo;
}

// Piegl & Tiller A2.3.
Eigen::MatrixXd bspline_ders(const KnotVector& kv, int span, double t, int n_der) {
  const int p = kv.degree;
  const auto& U = kv.values;
  const int nd = std::min(n_der, p);

  Eigen::MatrixXd ndu(p + 1, p + 1);
  std::vector<double> left(static_cast<size_t>(p + 1)), right(static_cast<size_t>(p + 1));
  ndu(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[static_cast<size_t>(j)] = t - U[static_cast<size_t>(span + 1 - j)];
    right[static_cast<size_t>(j)] = U[static_cast<size_t>(span + j)] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[static_cast<size_t>(r + 1)] + left[static_cast<size_t>(j - r)];
      const double temp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[static_cast<size_t>(r + 1)] * temp;
      saved = left[static_cast<size_t>(j - r)] * temp;
    }
    ndu(j, j) = saved;
  }

  Eigen::MatrixXd ders = Eigen::MatrixXd::Zero(n_der + 1, p + 1);
  for (int j = 0; j <= p; ++j) ders(0, j) = ndu(j, p);

  Eigen::MatrixXd a(2, p + 1);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a(0, 0) = 1.0;
    for (int k = 1; k <= nd; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        d = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = (rk >= -1) ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        d += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        d += a(s2, k) * ndu(r, pk);
      }
      ders(k, r) = d;
      std::swap(s1, s2);
    }
  }
  double fac = p;
  for (int k = 1; k <= nd; ++k) {
    for (int j = 0; j <= p; ++j) ders(k, j) *= fac;
    fac *= (p - k);
  }
  return ders;
}

void NurbsSurface::validate() const {
  knots_u.validate();
  knots_v.validate();
  if (nu != knots_u.basis_count() || nv != knots_v.basis_count())
    throw DomainError("control net size does not match knot vectors");
  if (static_cast<int>(points.size()) != nu * nv || points.size() != weights.size())
    throw DomainError("control net arrays inconsistent");
  for (double w : weights)
    if (!(w > 0.0)) throw DomainError("control point weights must be strictly positive");
}

BasisEval basis_derivatives(const NurbsSurface& s, double xi, double eta) {
  const int p = s.knots_u.degree, q = s.knots_v.degree;
  const int su = find_span(s.knots_u, xi);
  const int sv = find_span(s.knots_v, eta);
  const Eigen::MatrixXd Nu = bspline_ders(s.knots_u, su, xi, 2);
  const Eigen::MatrixXd Nv = bspline_ders(s.knots_v, sv, eta, 2);

  const int n_sup = (p + 1) * (q + 1);
  BasisEval out;
  out.support.resize(static_cast<size_t>(n_sup));
  out.value.resize(static_cast<size_t>(n_sup));
  out.der1.resize(static_cast<size_t>(n_sup));
  out.der2.resize(static_cast<size_t>(n_sup));

  // Weighted basis phi = N M w and its derivatives, then the quotient rule.
  std::vector<double> phi(static_cast<size_t>(n_sup));
  std::vector<Vec2> phi1(static_cast<size_t>(n_sup));
  std::vector<Vec3> phi2(static_cast<size_t>(n_sup));
  double W = 0.0;
  Vec2 W1 = Vec2::Zero();
  Vec3 W2 = Vec3::Zero();
  int a = 0;
  for (int i = 0; i <= p; ++i) {
    for (int j = 0; j <= q; ++j, ++a) {
      const int gi = su - p + i, gj = sv - q + j;
      const int g = s.cp(gi, gj);
      const double w = s.weights[static_cast<size_t>(g)];
      out.support[static_cast<size_t>(a)] = g;
      phi[static_cast<size_t>(a)] = Nu(0, i) * Nv(0, j) * w;
      phi1[static_cast<size_t>(a)] = Vec2(Nu(1, i) * Nv(0, j), Nu(0, i) * Nv(1, j)) * w;
      phi2[static_cast<size_t>(a)] =
          Vec3(Nu(2, i) * Nv(0, j), Nu(0, i) * Nv(2, j), Nu(1, i) * Nv(1, j)) * w;
      W += phi[static_cast<size_t>(a)];
      W1 += phi1[static_cast<size_t>(a)];
      W2 += phi2[static_cast<size_t>(a)];
    }
  }
  const double iW = 1.0 / W;
  for (int k = 0; k < n_sup; ++k) {
    const auto ks = static_cast<size_t>(k);
    const double R = phi[ks] * iW;
    out.value[ks] = R;
    const Vec2 R1 = (phi1[ks] - R * W1) * iW;
    out.der1[ks] = R1;
    Vec3 R2;
    // indices: 0 -> (1,1), 1 -> (2,2), 2 -> (1,2)
    R2(0) = (phi2[ks](0) - 2.0 * R1(0) * W1(0) - R * W2(0)) * iW;
    R2(1) = (phi2[ks](1) - 2.0 * R1(1) * W1(1) - R * W2(1)) * iW;
    R2(2) = (phi2[ks](2) - R1(0) * W1(1) - R1(1) * W1(0) - R * W2(2)) * iW;
    out.der2[ks] = R2;
  }
  return out;
}

SurfacePoint surface_point(const NurbsSurface& s, double xi, double eta) {
  const BasisEval b = basis_derivatives(s, xi, eta);
  SurfacePoint sp;
  sp.r.setZero();
  sp.der1.setZero();
  sp.der2.setZero();
  for (size_t k = 0; k < b.support.size(); ++k) {
    const Vec3& P = s.points[static_cast<size_t>(b.support[k])];
    sp.r += b.value[k] * P;
    sp.der1.col(0) += b.der1[k](0) * P;
    sp.der1.col(1) += b.der1[k](1) * P;
    sp.der2.col(0) += b.der2[k](0) * P;
    sp.der2.col(1) += b.der2[k](1) * P;
    sp.der2.col(2) += b.der2[k](2) * P;
  }
  return sp;
}

namespace {

using Hom = Eigen::Vector4d;  // weighted coordinates (wx, wy, wz, w)

std::vector<Hom> to_homogeneous(const NurbsSurface& s) {
  std::vector<Hom> h(static_cast<size_t>(s.cp_count()));
  for (int k = 0; k < s.cp_count(); ++k) {
    const auto ks = static_cast<size_t>(k);
    h[ks].head<3>() = s.points[ks] * s.weights[ks];
    h[ks](3) = s.weights[ks];
  }
  return h;
}

void from_homogeneous(NurbsSurface& s, const std::vector<Hom>& h) {
  s.points.resize(h.size());
  s.weights.resize(h.size());
  for (size_t k = 0; k < h.size(); ++k) {
    s.weights[k] = h[k](3);
    s.points[k] = h[k].head<3>() / h[k](3);
  }
}

int knot_multiplicity(const KnotVector& kv, double t) {
  int m = 0;
  for (double u : kv.values)
    if (u == t) ++m;
  return m;
}

}  // namespace

NurbsSurface insert_knot(const NurbsSurface& s, int direction, double t, int mult) {
  NurbsSurface cur = s;
  for (int step = 0; step < mult; ++step) {
    const KnotVector& kv = (direction == 0) ? cur.knots_u : cur.knots_v;
    const int p = kv.degree;
    if (knot_multiplicity(kv, t) >= p)
      break;  // C^0 already; inserting past multiplicity p would split the patch
    const int span = find_span(kv, t);
    auto h = to_homogeneous(cur);

    NurbsSurface next = cur;
    KnotVector& nkv = (direction == 0) ? next.knots_u : next.knots_v;
    nkv.values.insert(nkv.values.begin() + span + 1, t);

    if (direction == 0) {
      next.nu = cur.nu + 1;
      std::vector<Hom> nh(static_cast<size_t>(next.nu * next.nv));
      for (int j = 0; j < cur.nv; ++j) {
        for (int i = 0; i <= span - p; ++i) nh[static_cast<size_t>(i * next.nv + j)] = h[static_cast<size_t>(i * cur.nv + j)];
        for (int i = span - p + 1; i <= span; ++i) {
          const double num = t - kv.values[static_cast<size_t>(i)];
          const double den = kv.values[static_cast<size_t>(i + p)] - kv.values[static_cast<size_t>(i)];
          const double alpha = num / den;
          nh[static_cast<size_t>(i * next.nv + j)] =
              alpha * h[static_cast<size_t>(i * cur.nv + j)] + (1.0 - alpha) * h[static_cast<size_t>((i - 1) * cur.nv + j)];
        }
        for (int i = span + 1; i < next.nu; ++i) nh[static_cast<size_t>(i * next.nv + j)] = h[static_cast<size_t>((i - 1) * cur.nv + j)];
      }
      from_homogeneous(next, nh);
    } else {
      next.nv = cur.nv + 1;
      std::vector<Hom> nh(static_cast<size_t>(next.nu * next.nv));
      for (int i = 0; i < cur.nu; ++i) {
        for (int j = 0; j <= span - p; ++j) nh[static_cast<size_t>(i * next.nv + j)] = h[static_cast<size_t>(i * cur.nv + j)];
        for (int j = span - p + 1; j <= span; ++j) {
          const double num = t - kv.values[static_cast<size_t>(j)];
          const double den = kv.values[static_cast<size_t>(j + p)] - kv.values[static_cast<size_t>(j)];
          const double alpha = num / den;
          nh[static_cast<size_t>(i * next.nv + j)] =
              alpha * h[static_cast<size_t>(i * cur.nv + j)] + (1.0 - alpha) * h[static_cast<size_t>(i * cur.nv + j - 1)];
        }
        for (int j = span + 1; j < next.nv; ++j) nh[static_cast<size_t>(i * next.nv + j)] = h[static_cast<size_t>(i * cur.nv + j - 1)];
      }
      from_homogeneous(next, nh);
    }
    cur = std::move(next);
  }
  return cur;
}

NurbsSurface elevate_degree(const NurbsSurface& s, int direction, int steps) {
  if (steps <= 0) return s;
  NurbsSurface cur = s;
  for (int step = 0; step < steps; ++step) {
    const KnotVector& kv = (direction == 0) ? cur.knots_u : cur.knots_v;
    const int p = kv.degree;
    if (static_cast<int>(kv.values.size()) != 2 * (p + 1))
      throw DomainError("degree elevation requires a Bezier patch (no interior knots); refine after elevating");
    auto h = to_homogeneous(cur);

    NurbsSurface next = cur;
    KnotVector& nkv = (direction == 0) ? next.knots_u : next.knots_v;
    nkv.degree = p + 1;
    nkv.values.clear();
    for (int i = 0; i <= p + 1; ++i) nkv.values.push_back(kv.front());
    for (int i = 0; i <= p + 1; ++i) nkv.values.push_back(kv.back());

    // Bezier elevation: Q_i = i/(p+1) P_{i-1} + (1 - i/(p+1)) P_i on weighted points.
    if (direction == 0) {
      next.nu = cur.nu + 1;
      std::vector<Hom> nh(static_cast<size_t>(next.nu * next.nv), Hom::Zero());
      for (int j = 0; j < cur.nv; ++j) {
        for (int i = 0; i <= p + 1; ++i) {
          const double a = static_cast<double>(i) / (p + 1);
          Hom v = Hom::Zero();
          if (i > 0) v += a * h[static_cast<size_t>((i - 1) * cur.nv + j)];
          if (i <= p) v += (1.0 - a) * h[static_cast<size_t>(i * cur.nv + j)];
          nh[static_cast<size_t>(i * next.nv + j)] = v;
        }
      }
      from_homogeneous(next, nh);
    } else {
      next.nv = cur.nv + 1;
      std::vector<Hom> nh(static_cast<size_t>(next.nu * next.nv), Hom::Zero());
      for (int i = 0; i < cur.nu; ++i) {
        for (int j = 0; j <= p + 1; ++j) {
          const double a = static_cast<double>(j) / (p + 1);
          Hom v = Hom::Zero();
          if (j > 0) v += a * h[static_cast<size_t>(i * cur.nv + j - 1)];
          if (j <= p) v += (1.0 - a) * h[static_cast<size_t>(i * cur.nv + j)];
          nh[static_cast<size_t>(i * next.nv + j)] = v;
        }
      }
      from_homogeneous(next, nh);
    }
    cur = std::move(next);
  }
  return cur;
}

NurbsSurface refine(const NurbsSurface& s, const RefineSpec& spec) {
  NurbsSurface cur = s;
  if (spec.degree_u > 0 && spec.degree_u < cur.knots_u.degree)
    throw DomainError("cannot lower degree_u");
  if (spec.degree_v > 0 && spec.degree_v < cur.knots_v.degree)
    throw DomainError("cannot lower degree_v");
  if (spec.degree_u > cur.knots_u.degree)
    cur = elevate_degree(cur, 0, spec.degree_u - cur.knots_u.degree);
  if (spec.degree_v > cur.knots_v.degree)
    cur = elevate_degree(cur, 1, spec.degree_v - cur.knots_v.degree);

  for (int dir = 0; dir < 2; ++dir) {
    const KnotVector& kv = (dir == 0) ? cur.knots_u : cur.knots_v;
    const int p = kv.degree;
    int k = (spec.continuity < 0) ? (p - 1) : spec.continuity;
    if (k >= p) throw DomainError("requested continuity C^" + std::to_string(k) +
                                  " invalid for degree " + std::to_string(p));
    const int mult = p - k;
    const int n_el = (dir == 0) ? spec.elements_u : spec.elements_v;
    if (n_el < 1) throw DomainError("element count must be >= 1");
    const double a = kv.front(), b = kv.back();
    for (int e = 1; e < n_el; ++e) {
      const double t = a + (b - a) * static_cast<double>(e) / n_el;
      cur = insert_knot(cur, dir, t, mult);
    }
  }
  return cur;
}

ElementMesh build_mesh(const NurbsSurface& s, int gauss_u, int gauss_v) {
  const int p = s.knots_u.degree, q = s.knots_v.degree;
  ElementMesh mesh;
  mesh.gauss_u = (gauss_u > 0) ? gauss_u : p + 1;
  mesh.gauss_v = (gauss_v > 0) ? gauss_v : q + 1;
  const GaussRule gu = gauss_legendre(mesh.gauss_u);
  const GaussRule gv = gauss_legendre(mesh.gauss_v);

  std::vector<double> su, sv;  // unique span breakpoints
  for (size_t i = 0; i + 1 < s.knots_u.values.size(); ++i)
    if (s.knots_u.values[i] < s.knots_u.values[i + 1]) {
      if (su.empty()) su.push_back(s.knots_u.values[i]);
      su.push_back(s.knots_u.values[i + 1]);
    }
  for (size_t j = 0; j + 1 < s.knots_v.values.size(); ++j)
    if (s.knots_v.values[j] < s.knots_v.values[j + 1]) {
      if (sv.empty()) sv.push_back(s.knots_v.values[j]);
      sv.push_back(s.knots_v.values[j + 1]);
    }

  for (size_t ei = 0; ei + 1 < su.size(); ++ei) {
    for (size_t ej = 0; ej + 1 < sv.size(); ++ej) {
      Element el;
      el.xi0 = su[ei];
      el.xi1 = su[ei + 1];
      el.eta0 = sv[ej];
      el.eta1 = sv[ej + 1];
      const double jac = 0.25 * (el.xi1 - el.xi0) * (el.eta1 - el.eta0);
      for (int a = 0; a < mesh.gauss_u; ++a) {
        for (int b = 0; b < mesh.gauss_v; ++b) {
          ElementGaussPoint gp;
          gp.xi = 0.5 * (el.xi0 + el.xi1) + 0.5 * (el.xi1 - el.xi0) * gu.points[static_cast<size_t>(a)];
          gp.eta = 0.5 * (el.eta0 + el.eta1) + 0.5 * (el.eta1 - el.eta0) * gv.points[static_cast<size_t>(b)];
          gp.weight = gu.weights[static_cast<size_t>(a)] * gv.weights[static_cast<size_t>(b)] * jac;
          gp.basis = basis_derivatives(s, gp.xi, gp.eta);
          el.gauss.push_back(std::move(gp));
        }
      }
      el.support = el.gauss.front().basis.support;
      mesh.elements.push_back(std::move(el));
    }
  }
  return mesh;
}

std::string NurbsSurface::to_json() const {
  nlohmann::json j;
  j["degree_u"] = knots_u.degree;
  j["degree_v"] = knots_v.degree;
  j["knots_u"] = knots_u.values;
  j["knots_v"] = knots_v.values;
  auto& cps = j["control_points"] = nlohmann::json::array();
  for (int k = 0; k < cp_count(); ++k) {
    const auto ks = static_cast<size_t>(k);
    cps.push_back({points[ks](0), points[ks](1), points[ks](2), weights[ks]});
  }
  return j.dump(2);
}

NurbsSurface from_json_object(const nlohmann::json& j) {
  NurbsSurface s;
  s.knots_u.degree = j.at("degree_u").get<int>();
  s.knots_v.degree = j.at("degree_v").get<int>();
  s.knots_u.values = j.at("knots_u").get<std::vector<double>>();
  s.knots_v.values = j.at("knots_v").get<std::vector<double>>();
  s.nu = s.knots_u.basis_count();
  s.nv = s.knots_v.basis_count();
  for (const auto& cp : j.at("control_points")) {
    if (!cp.is_array() || cp.size() != 4) throw SchemaError("control_points entries must be [x, y, z, w]");
    s.points.emplace_back(cp[0].get<double>(), cp[1].get<double>(), cp[2].get<double>());
    s.weights.push_back(cp[3].get<double>());
  }
  s.validate();
  return s;
}

NurbsSurface NurbsSurface::from_json(const std::string& text) {
  return from_json_object(nlohmann::json::parse(text));
}

}  // namespace kshell
