#pragma once

#include "rkhs/kernel.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace rkhs {

/// One generator of the raw family: either a monomial x^degree or a finite
/// kernel expansion sum_i coeffs[i] * k(anchors[i], .).
struct RawFunction {
  int degree = -1;
  std::vector<double> anchors;
  std::vector<double> coeffs;

  static RawFunction monomial(int degree) { return {degree, {}, {}}; }
  static RawFunction kernel_expansion(std::vector<double> anchors, std::vector<double> coeffs);
  static RawFunction kernel_translate(double anchor) { return {-1, {anchor}, {1.0}}; }

  bool is_monomial() const { return degree >= 0; }
};

/// Generators plus point constraints v(p) = 0. The resulting space has
/// dimension raw.size() - zero_at.size().
struct SubspaceSpec {
  std::vector<RawFunction> raw;
  std::vector<double> zero_at;

  /// span{1, x, ..., x^(d-1)}
  static SubspaceSpec polynomial(int d);
  /// span{1, x, ..., x^(d+1)} subject to v(-1) = v(1) = 0.
  static SubspaceSpec polynomial_zero_boundary(int d);
  static SubspaceSpec monomials(std::vector<int> degrees, std::vector<double> zero_at = {});
  /// The polynomial space used with each kernel in the experiments.
  static SubspaceSpec standard(KernelVariant variant, int d);

  int dimension() const { return static_cast<int>(raw.size() - zero_at.size()); }
};

/// A d-dimensional subspace V_d with a V-orthonormal basis b and an
/// L2(nu)-orthonormal basis of the same space. Immutable after construction.
class SubspaceModel {
 public:
  /// Throws std::invalid_argument for inconsistent specs and std::runtime_error
  /// when a Gram matrix is numerically rank deficient.
  SubspaceModel(const KernelModel& kernel, SubspaceSpec spec);

  int dimension() const { return dimension_; }
  const KernelModel& kernel() const { return kernel_; }
  const SubspaceSpec& spec() const { return spec_; }

  /// Rows express b_j (resp. the L2 basis) in the evaluation family: the
  /// nu-orthonormal polynomials phi_0..phi_P followed by the kernel expansions
  /// of the raw family. Monomials are rewritten in the phi basis before
  /// orthonormalisation, which keeps the Gram matrices well conditioned.
  const Eigen::MatrixXd& v_coefficients() const { return v_coeffs_; }
  const Eigen::MatrixXd& l2_coefficients() const { return l2_coeffs_; }

  Eigen::VectorXd family_values(double x) const;
  Eigen::VectorXd family_derivatives(double x) const;

  /// b(x)
  Eigen::VectorXd basis(double x) const { return v_coeffs_ * family_values(x); }
  /// b(x) for several points, d x n.
  Eigen::MatrixXd basis(std::span<const double> xs) const;
  Eigen::VectorXd basis_derivative(double x) const { return v_coeffs_ * family_derivatives(x); }
  Eigen::VectorXd l2_basis(double x) const { return l2_coeffs_ * family_values(x); }

  /// k_d(x, y) = b(x)^T b(y)
  double kernel_eval(double x, double y) const;
  /// Inverse Christoffel function, sum of squares of the L2(nu)-orthonormal basis.
  double christoffel(double x) const;

  /// Anchor points of all kernel expansions in the raw family (kinks of b).
  const std::vector<double>& kinks() const { return kinks_; }

 private:
  KernelModel kernel_;
  SubspaceSpec spec_;
  int dimension_;
  Eigen::MatrixXd v_coeffs_;
  Eigen::MatrixXd l2_coeffs_;
  int poly_count_ = 0;
  std::vector<double> recurrence_;  // off-diagonal of the Jacobi matrix of nu
  std::vector<RawFunction> expansions_;
  std::vector<double> kinks_;
};

}  // namespace rkhs
