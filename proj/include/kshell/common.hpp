#pragma once

#include <Eigen/Dense>
#include <array>
#include <stdexcept>
#include <string>

namespace kshell {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Parameter outside the knot domain, invalid continuity request, bad input.
class DomainError : public Error {
public:
  explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// |g1 x g2| below the scale-relative tolerance.
class DegenerateSurfaceError : public Error {
public:
  explicit DegenerateSurfaceError(const std::string& msg) : Error(msg) {}
};

/// Shifter g0 <= 0 somewhere in the thickness: equidistant surface inverted.
class SelfPenetrationError : public Error {
public:
  SelfPenetrationError(double curviness, double zeta, double g0)
      : Error("shell self-penetration: g0 = " + std::to_string(g0) +
              " at zeta = " + std::to_string(zeta) +
              " (Kh = " + std::to_string(curviness) + ")"),
        curviness(curviness), zeta(zeta), g0(g0) {}
  double curviness;
  double zeta;
  double g0;
};

/// Tangent matrix factorization failed (zero pivot / structural singularity).
class SingularMatrixError : public Error {
public:
  explicit SingularMatrixError(const std::string& msg) : Error(msg) {}
};

/// Path tracing gave up (arc length cut below minimum, divergence).
class SolverError : public Error {
public:
  explicit SolverError(const std::string& msg) : Error(msg) {}
};

/// Model-file schema violation; names the offending key.
class SchemaError : public Error {
public:
  explicit SchemaError(const std::string& msg) : Error(msg) {}
};

/// Fourth-order tensor on the 2D surface, all indices in {0,1}.
/// Index convention of the stored array: t(i,j,k,l) with (ij) the first
/// pair and (kl) the second pair, mixed variance as the context defines.
struct Ten4 {
  std::array<double, 16> v{};

  double& operator()(int i, int j, int k, int l) {
    return v[static_cast<size_t>(((i * 2 + j) * 2 + k) * 2 + l)];
  }
  double operator()(int i, int j, int k, int l) const {
    return v[static_cast<size_t>(((i * 2 + j) * 2 + k) * 2 + l)];
  }

  Ten4 operator+(const Ten4& o) const {
    Ten4 r;
    for (int i = 0; i < 16; ++i) r.v[static_cast<size_t>(i)] = v[static_cast<size_t>(i)] + o.v[static_cast<size_t>(i)];
    return r;
  }
  Ten4 operator-(const Ten4& o) const {
    Ten4 r;
    for (int i = 0; i < 16; ++i) r.v[static_cast<size_t>(i)] = v[static_cast<size_t>(i)] - o.v[static_cast<size_t>(i)];
    return r;
  }
  Ten4 operator*(double s) const {
    Ten4 r;
    for (int i = 0; i < 16; ++i) r.v[static_cast<size_t>(i)] = v[static_cast<size_t>(i)] * s;
    return r;
  }
  Ten4& operator+=(const Ten4& o) {
    for (int i = 0; i < 16; ++i) v[static_cast<size_t>(i)] += o.v[static_cast<size_t>(i)];
    return *this;
  }

  /// Frobenius norm.
  double norm() const {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  }

  static Ten4 zero() { return Ten4{}; }

  /// delta^i_k delta^j_l
  static Ten4 identity() {
    Ten4 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r(i, j, i, j) = 1.0;
    return r;
  }

  /// delta^j_k delta^i_l (pair-transposed identity)
  static Ten4 identity_t() {
    Ten4 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r(i, j, j, i) = 1.0;
    return r;
  }

  /// Swap the two index pairs: r(kl,ij) = t(ij,kl).
  Ten4 pair_transpose() const {
    Ten4 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) r(k, l, i, j) = (*this)(i, j, k, l);
    return r;
  }

  /// Symmetrize within each index pair.
  Ten4 minor_symmetrized() const {
    Ten4 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l)
            r(i, j, k, l) = 0.25 * ((*this)(i, j, k, l) + (*this)(j, i, k, l) +
                                    (*this)(i, j, l, k) + (*this)(j, i, l, k));
    return r;
  }
};

/// contract X^{ij}_{ab} Y^{ab}_{kl} over the middle pair.
inline Ten4 contract(const Ten4& x, const Ten4& y) {
  Ten4 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          double s = 0.0;
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) s += x(i, j, a, b) * y(a, b, k, l);
          r(i, j, k, l) = s;
        }
  return r;
}

/// Apply a 4-index tensor to a symmetric 2x2 tensor: r^{ij} = t^{ij}_{kl} s^{kl}.
inline Mat2 apply(const Ten4& t, const Mat2& s) {
  Mat2 r = Mat2::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) r(i, j) += t(i, j, k, l) * s(k, l);
  return r;
}

/// Voigt 3x3 view of a minor-symmetric 4-index tensor.
/// Rows/columns ordered [11, 22, 12]; acts on strain-like vectors
/// [e11, e22, 2 e12] and produces force-like vectors [s11, s22, s12].
inline Mat3 to_voigt(const Ten4& t) {
  const Ten4 s = t.minor_symmetrized();
  Mat3 m;
  constexpr int idx[3][2] = {{0, 0}, {1, 1}, {0, 1}};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      m(a, b) = s(idx[a][0], idx[a][1], idx[b][0], idx[b][1]);
  return m;
}

/// Pack a symmetric 2x2 strain-like tensor as [e11, e22, 2 e12].
inline Vec3 strain_voigt(const Mat2& e) { return Vec3(e(0, 0), e(1, 1), e(0, 1) + e(1, 0)); }

/// Unpack [e11, e22, 2 e12] into the symmetric 2x2 tensor.
inline Mat2 strain_from_voigt(const Vec3& v) {
  Mat2 e;
  e << v(0), 0.5 * v(2), 0.5 * v(2), v(1);
  return e;
}

}  // namespace kshell
