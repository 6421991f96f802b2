#pragma once

#include <string>
#include <vector>

#include "kshell/common.hpp"

namespace kshell {

/// Open (clamped) knot vector: first and last knot carry multiplicity p+1.
struct KnotVector {
  std::vector<double> values;
  int degree = 1;

  double front() const { return values.front(); }
  double back() const { return values.back(); }
  /// Basis function count for this knot vector.
  int basis_count() const { return static_cast<int>(values.size()) - degree - 1; }

  /// Throws DomainError if the clamped-knot invariants are violated.
  void validate() const;
};

/// Span index i with knot[i] <= t < knot[i+1]; the last nonempty span is
/// closed on the right so t = back() is valid.
int find_span(const KnotVector& kv, double t);

/// B-spline basis values and first `n_der` derivatives at t for the span.
/// ders(k, j): k-th derivative of basis function (span - degree + j).
Eigen::MatrixXd bspline_ders(const KnotVector& kv, int span, double t, int n_der);

/// Tensor-product NURBS surface with a weighted control net.
/// Net storage is row-major with the eta index fastest: cp(i, j) = i * nv + j.
struct NurbsSurface {
  KnotVector knots_u;
  KnotVector knots_v;
  int nu = 0;
  int nv = 0;
  std::vector<Vec3> points;
  std::vector<double> weights;

  int cp(int i, int j) const { return i * nv + j; }
  int cp_count() const { return nu * nv; }

  void validate() const;

  /// JSON exchange: {degree_u, degree_v, knots_u, knots_v, control_points}.
  std::string to_json() const;
  static NurbsSurface from_json(const std::string& text);
};

/// Rational basis values and parametric derivatives at one point, restricted
/// to the (p+1)(q+1) supporting control points.
struct BasisEval {
  std::vector<int> support;      // global control point indices
  std::vector<double> value;     // R
  std::vector<Vec2> der1;        // [R_,1  R_,2]
  std::vector<Vec3> der2;        // [R_,11  R_,22  R_,12]
};

BasisEval basis_derivatives(const NurbsSurface& s, double xi, double eta);

/// Position and parametric derivatives of the surface map.
struct SurfacePoint {
  Vec3 r;
  Eigen::Matrix<double, 3, 2> der1;  // columns: x_,1  x_,2
  Eigen::Matrix<double, 3, 3> der2;  // columns: x_,11  x_,22  x_,12
};

SurfacePoint surface_point(const NurbsSurface& s, double xi, double eta);

/// Mesh construction request. Degree elevation runs before knot insertion and
/// requires the input patch to have no interior knots in the direction being
/// elevated.
struct RefineSpec {
  int elements_u = 1;
  int elements_v = 1;
  int degree_u = 0;      // 0: keep current degree
  int degree_v = 0;
  int continuity = -1;   // C^k at interior knots; -1: maximum (p-1)
};

NurbsSurface refine(const NurbsSurface& s, const RefineSpec& spec);

/// Insert a single knot value `t` with multiplicity `mult` (direction 0 = u).
NurbsSurface insert_knot(const NurbsSurface& s, int direction, double t, int mult);

/// Raise the degree in one direction by `steps` (Bezier patches only).
NurbsSurface elevate_degree(const NurbsSurface& s, int direction, int steps);

/// One integration point of an element, with cached basis data.
struct ElementGaussPoint {
  double xi = 0.0;
  double eta = 0.0;
  double weight = 0.0;  // Gauss weight x parametric span Jacobian
  BasisEval basis;
};

struct Element {
  double xi0 = 0.0, xi1 = 0.0, eta0 = 0.0, eta1 = 0.0;
  std::vector<int> support;               // supporting control points
  std::vector<ElementGaussPoint> gauss;
};

/// Elements are the nonempty knot spans. Gauss rule: (p+1) x (q+1) points by
/// default; pass positive overrides to pin a different rule per direction.
struct ElementMesh {
  std::vector<Element> elements;
  int gauss_u = 0;
  int gauss_v = 0;
};

ElementMesh build_mesh(const NurbsSurface& s, int gauss_u = 0, int gauss_v = 0);

}  // namespace kshell
