#pragma once

#include "rkhs/gramian.hpp"
#include "rkhs/subspace.hpp"

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace rkhs {

/// u = sum_i a_i k(z_i, .) + sum_j c_j b_j. Norms and projections are exact
/// functions of kernel and basis evaluations.
struct RepresentedFunction {
  std::vector<double> anchors;
  Eigen::VectorXd a;
  Eigen::VectorXd c;

  static RepresentedFunction zero(int d);
  static RepresentedFunction in_subspace(Eigen::VectorXd c);
  static RepresentedFunction kernel_sum(std::vector<double> anchors, Eigen::VectorXd a, int d);

  double value(const SubspaceModel& subspace, double x) const;
  double derivative(const SubspaceModel& subspace, double x) const;
  std::vector<double> values(const SubspaceModel& subspace, std::span<const double> xs) const;
};

/// u - w as a single represented function.
RepresentedFunction difference(const RepresentedFunction& u, const RepresentedFunction& w);

double v_inner(const SubspaceModel& subspace, const RepresentedFunction& u,
               const RepresentedFunction& w);
double v_norm(const SubspaceModel& subspace, const RepresentedFunction& u);

/// Coefficients (u, b_j)_V of P_{V_d} u.
Eigen::VectorXd project_exact(const SubspaceModel& subspace, const RepresentedFunction& u);

/// argmin over V_d of |u - v|_x from the values u(x) at state.points().
/// Throws std::runtime_error when mu(x) is infinite.
Eigen::VectorXd project_empirical(const SampleState& state, std::span<const double> u_values);

/// P_{V_x} u = sum_i alpha_i k(x_i, .) with alpha = K(x)^+ u(x).
RepresentedFunction kernel_interpolate(const SampleState& state, std::span<const double> u_values);

/// P^x u + P_{V_x}(u - P^x u).
RepresentedFunction pbdw(const SampleState& state, std::span<const double> u_values);

/// |u - P_W u|_V with W = V_d + (V_x cap V_d^perp). The second summand is
/// {alpha^T k(x, .) : b(x) alpha = 0}, so W is assembled from the null space of b(x).
double pbdw_oracle_rhs(const SampleState& state, const RepresentedFunction& u);

/// Noise kernel k_R with the constant c_n of the regularised matrix
/// K_S = K + c_n K_R.
struct NoiseModel {
  enum class Kind { Rkhs, White };
  Kind kind = Kind::Rkhs;
  std::function<double(double, double)> kernel;  // k_R for Kind::Rkhs
  std::function<double(double)> weight;          // gamma for Kind::White

  static NoiseModel rkhs(std::function<double(double, double)> kernel);
  static NoiseModel white(std::function<double(double)> gamma);
  static NoiseModel none();

  /// 1 for RKHS noise, sqrt(n) for white noise.
  double c_n(int n) const;
  Eigen::MatrixXd matrix(std::span<const double> points) const;
};

struct NoisyProjection {
  Eigen::VectorXd coeffs;
  double mu_s;
};

/// argmin over V_d of |y - v(x)| in the K_S(x)^+ norm, over all recorded points.
/// Throws std::runtime_error when b(x) K_S^+ b(x)^T is singular.
NoisyProjection project_noisy(const SampleState& state, std::span<const double> y_values,
                              const NoiseModel& noise);

/// sup of gamma^(-1/2) |eta| over a uniform grid on [lower, upper] plus `extra`.
double white_noise_norm(const std::function<double(double)>& eta,
                        const std::function<double(double)>& gamma, double lower, double upper,
                        std::span<const double> extra = {}, int grid = 20001);

}  // namespace rkhs
