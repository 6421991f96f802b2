#pragma once

#include <cmath>

#include "kshell/nurbs.hpp"

namespace kshell::test {

inline KnotVector clamped_knots(int degree, double a = 0.0, double b = 1.0) {
  KnotVector kv;
  kv.degree = degree;
  for (int i = 0; i <= degree; ++i) kv.values.push_back(a);
  for (int i = 0; i <= degree; ++i) kv.values.push_back(b);
  return kv;
}

/// Flat unit square, bilinear, unit weights.
inline NurbsSurface unit_square_patch() {
  NurbsSurface s;
  s.knots_u = clamped_knots(1);
  s.knots_v = clamped_knots(1);
  s.nu = s.nv = 2;
  s.points = {Vec3(0, 0, 0), Vec3(0, 1, 0), Vec3(1, 0, 0), Vec3(1, 1, 0)};
  s.weights = {1, 1, 1, 1};
  return s;
}

/// Exact cylinder patch: u axial in [z0, z1], v a circular arc of
/// [theta0, theta1] (< pi) at radius R about the z axis.
inline NurbsSurface cylinder_patch(double R, double z0, double z1, double th0, double th1) {
  const double dth = 0.5 * (th1 - th0);
  const double thm = 0.5 * (th0 + th1);
  const double w_mid = std::cos(dth);
  NurbsSurface s;
  s.knots_u = clamped_knots(1);
  s.knots_v = clamped_knots(2);
  s.nu = 2;
  s.nv = 3;
  const Vec3 a0(R * std::cos(th0), R * std::sin(th0), 0.0);
  const Vec3 a1((R / w_mid) * std::cos(thm), (R / w_mid) * std::sin(thm), 0.0);
  const Vec3 a2(R * std::cos(th1), R * std::sin(th1), 0.0);
  for (double z : {z0, z1})
    for (const Vec3& a : {a0, a1, a2}) s.points.push_back(a + Vec3(0, 0, z));
  s.weights = {1, w_mid, 1, 1, w_mid, 1};
  return s;
}

}  // namespace kshell::test
