#pragma once

#include <Eigen/Dense>

namespace rkhs {

/// Moore-Penrose inverse of a symmetric PSD matrix; eigenvalues below
/// `relative_cutoff * lambda_max` are treated as zero.
Eigen::MatrixXd symmetric_pinv(const Eigen::MatrixXd& a, double relative_cutoff = 1e-12);

double min_eigenvalue(const Eigen::MatrixXd& symmetric);
double max_eigenvalue(const Eigen::MatrixXd& symmetric);

/// Orthonormal basis (columns) of ker(a), via SVD with a relative rank cutoff.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double relative_tolerance = 1e-12);

}  // namespace rkhs
