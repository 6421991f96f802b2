#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <string>
#include <vector>

#include "kshell/constitutive.hpp"
#include "kshell/kinematics.hpp"
#include "kshell/nurbs.hpp"

namespace kshell {

using SpMat = Eigen::SparseMatrix<double>;

struct PointLoad {
  Vec2 at;     // parametric location
  Vec3 force;
};

/// Deformation-independent traction per unit reference midsurface area.
struct SurfaceTraction {
  Vec3 p;
};

struct FixDof {
  int cp = 0;
  int dir = 0;
};

/// Equal-displacement coupling u[slave] = u[master] (master-slave elimination).
struct CoupleDof {
  int cp_slave = 0;
  int dir_slave = 0;
  int cp_master = 0;
  int dir_master = 0;
};

struct Monitor {
  std::string name;
  Vec2 at;
  Vec3 direction;  // reported value = direction . u(at)
};

struct Model {
  NurbsSurface surface;
  double thickness = 1.0;
  MaterialParams material;
  ConstitutiveModel model_tag = ConstitutiveModel::Da;
  ThicknessIntegralOptions ti_opts;
  int gauss_u = 0;  // 0: (p+1)
  int gauss_v = 0;
  std::vector<FixDof> fixed;
  std::vector<CoupleDof> couplings;
  std::vector<PointLoad> point_loads;
  std::vector<SurfaceTraction> tractions;
  std::vector<Monitor> monitors;
  int threads = 1;
};

/// Free-DOF numbering with fixed supports and equal-displacement couplings,
/// resolved through a union-find so chained and crossing couplings merge.
struct DofMap {
  int n_raw = 0;
  int n_free = 0;
  std::vector<int> eq;  // raw dof -> equation index, -1 when fixed

  static DofMap build(int n_control_points, const std::vector<FixDof>& fixed,
                      const std::vector<CoupleDof>& couplings);

  VecX expand(const VecX& free) const;   // free -> raw (slaves mirror masters)
  VecX reduce_add(const VecX& raw) const;  // raw load -> free (slaves add into masters)
};

/// Generalized section-force matrix of the geometric stiffness, 15x15 over
/// the gradient vector w = [v1_,1 v1_,2 v1_,11 v1_,22 v1_,12, v2..., v3...].
Eigen::Matrix<double, 15, 15> build_G(const Vec6& f, const MidsurfaceMetric& m);

/// Per-Gauss-point persistent state of the updated Lagrangian scheme.
struct GaussPointState {
  Vec6 f = Vec6::Zero();  // stored resultants [N11 N22 N12 M11 M22 M12]
};

struct Configuration {
  VecX q;  // raw control-point displacements (3 per point)
  std::vector<GaussPointState> gp;
};

class Assembler {
 public:
  explicit Assembler(Model model);

  const Model& model() const { return model_; }
  const ElementMesh& mesh() const { return mesh_; }
  const DofMap& dofs() const { return dofs_; }

  Configuration initial_configuration() const;

  /// K_T = int B_L^T D B_L da + int B^T G B da on the deformed midsurface.
  SpMat tangent(const Configuration& c) const;

  /// F = int B_L^T f da (free DOFs).
  VecX internal_forces(const Configuration& c) const;

  /// Reference load vector Q_f: tractions integrated on the undeformed
  /// midsurface plus point loads spread through the basis.
  VecX external_forces() const;

  /// Advance the configuration: transport stored resultants to the new
  /// metric and add D * (B_L dq) evaluated at the old one.
  void update_state(Configuration& c, const VecX& dq_free) const;

  double monitor_value(const Configuration& c, const Monitor& m) const;

  MidsurfaceMetric metric_at(const Configuration& c, double xi, double eta) const;
  SurfacePoint deformed_point(const Configuration& c, double xi, double eta) const;

  /// Reference strain operator and deformed metric at a parametric point.
  StrainOperator strain_operator_at(const Configuration& c, double xi, double eta) const;

  int gp_count() const { return n_gp_; }

 private:
  struct ElementMatrices {
    MatX k;
    VecX f;
  };

  void element_gradients(const Configuration& c, const Element& el, const ElementGaussPoint& gp,
                         Eigen::Matrix<double, 3, 2>& d1, Eigen::Matrix<double, 3, 3>& d2) const;
  void element_tangent(const Configuration& c, size_t e, int gp_base, MatX& k) const;

  Model model_;
  ElementMesh mesh_;
  DofMap dofs_;
  std::vector<int> gp_offset_;  // flattened gauss point index per element
  int n_gp_ = 0;
};

struct LinearSolveResult {
  VecX x;
  int inertia = 0;  // negative pivots of the LDL^T factorization
};

/// Direct symmetric-indefinite solve; throws SingularMatrixError on failure.
LinearSolveResult linear_solve(const SpMat& K, const VecX& rhs);

/// Reusable factorization for repeated solves against one matrix.
class TangentFactorization {
 public:
  void factorize(const SpMat& K);
  VecX solve(const VecX& rhs) const;
  int inertia() const { return inertia_; }

 private:
  Eigen::SimplicialLDLT<SpMat> ldlt_;
  bool analyzed_ = false;
  int inertia_ = 0;
};

}  // namespace kshell
