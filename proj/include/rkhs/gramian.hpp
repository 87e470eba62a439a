#pragma once

#include "rkhs/subspace.hpp"

#include <Eigen/Dense>

#include <limits>
#include <span>
#include <vector>

namespace rkhs {

struct QuasiOptimality {
  double mu;      // lambda_min(G)^(-1/2), +inf when G is singular
  double tau;     // min(|I - G|_F + |I - G|_2, 1)
  double lambda;  // lambda_min(G)
  double eta;     // tr G
};

/// Outcome of appending one point.
struct Extension {
  bool active = false;  // false for (near-)duplicates; the point is recorded with g = 0
  double pivot = 0.0;   // K(y) - k(y,x) K(x)^-1 k(x,y)
  Eigen::VectorXd l;    // L^-1 k(x, y) over the active points
  Eigen::VectorXd g;    // (b(y) - B K(x)^-1 k(x,y)) / sqrt(pivot)
};

/// Ordered point set with an incrementally grown Cholesky factor of K(x) and
/// the Gramian G = b(x) K(x)^+ b(x)^T. Points whose pivot falls below
/// 1e-10 K(y) are kept in `points()` but excluded from the factorisation.
class SampleState {
 public:
  explicit SampleState(const SubspaceModel& subspace);

  static constexpr double kDuplicateRelTol = 1e-10;
  static constexpr double kSingularEigenvalue = 1e-12;

  const SubspaceModel& subspace() const { return *subspace_; }
  const KernelModel& kernel() const { return subspace_->kernel(); }
  int dimension() const { return subspace_->dimension(); }
  int size() const { return static_cast<int>(points_.size()); }
  int active_size() const { return static_cast<int>(active_.size()); }

  const std::vector<double>& points() const { return points_; }
  /// Indices into points() that carry a Cholesky pivot.
  const std::vector<int>& active() const { return active_; }
  std::vector<double> active_points() const;

  /// Lower Cholesky factor of K over the active points.
  Eigen::Ref<const Eigen::MatrixXd> chol() const { return l_.topLeftCorner(na(), na()); }
  /// b(x) for all recorded points, d x n.
  Eigen::Ref<const Eigen::MatrixXd> b() const { return b_.leftCols(size()); }
  /// Rows are the g vectors of the active points; G = W^T W.
  Eigen::Ref<const Eigen::MatrixXd> w() const { return w_.topRows(na()); }
  const Eigen::MatrixXd& gramian() const { return g_; }

  Extension extend(double y);
  /// The pivot and vectors l, g that extend(y) would produce, without appending.
  Extension trial(double y) const;

  /// v(x)^T K(x)^+ w(x); arguments hold values at all recorded points.
  double semi_inner(std::span<const double> v, std::span<const double> w) const;
  /// K(x)^+ v(x) expressed as coefficients on all recorded points (zero on inactive ones).
  Eigen::VectorXd kernel_solve(std::span<const double> v) const;

  QuasiOptimality quasi_optimality() const;
  double mu() const { return quasi_optimality().mu; }
  double tau() const { return quasi_optimality().tau; }
  double lambda() const { return quasi_optimality().lambda; }
  double eta() const { return g_.trace(); }

  /// log det G; -inf while G is singular.
  double logdet_gramian() const { return logdet_g_; }
  /// log det K over the active points.
  double logdet_kernel() const { return logdet_k_; }
  /// Sum of log q over the first-stage points, log det K_d(x) / det K(x) while n <= d.
  double logdet_kd_over_k() const { return logdet_q_; }

  /// q(y|x): ratio of the residual of b(y) against span b(x) to the pivot. Zero
  /// for duplicates.
  double q_conditional(double y) const;
  /// r(y|x) = g^T G^-1 g. Throws std::logic_error when G is singular.
  double r_conditional(double y) const;
  double r_from_g(const Eigen::VectorXd& g) const;

  /// Orthonormal basis of span b(x_active) in R^d.
  Eigen::Ref<const Eigen::MatrixXd> range_basis() const { return q_.leftCols(rank_); }

 private:
  int na() const { return static_cast<int>(active_.size()); }
  void refresh_gramian_factor();

  const SubspaceModel* subspace_;
  std::vector<double> points_;
  std::vector<int> active_;
  Eigen::MatrixXd l_;
  Eigen::MatrixXd b_;
  Eigen::MatrixXd w_;
  Eigen::MatrixXd g_;
  Eigen::MatrixXd q_;
  int rank_ = 0;
  double logdet_g_ = -std::numeric_limits<double>::infinity();
  double logdet_k_ = 0.0;
  double logdet_q_ = 0.0;
  Eigen::MatrixXd g_r_;
  bool g_regular_ = false;
};

/// G computed in one shot as b(x) K(x)^+ b(x)^T with an eigenvalue pseudo-inverse.
Eigen::MatrixXd batch_gramian(const SubspaceModel& subspace, std::span<const double> points);

/// mu, tau, lambda and eta of an explicit Gramian.
QuasiOptimality quasi_optimality(const Eigen::MatrixXd& gramian);

}  // namespace rkhs
