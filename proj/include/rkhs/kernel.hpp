#pragma once

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <string_view>

namespace rkhs {

/// The three Sobolev-type spaces with closed-form reproducing kernels.
///
///   H1Uniform  : H^1([-1,1], dx/2),   (v,w) = int (v'w' + vw) dnu
///   H10Uniform : H^1_0([-1,1], dx/2), (v,w) = 2 int_{-1}^{1} v'w' dx
///   H1Gauss    : H^1(R, N(0,1)),      (v,w) = int (v'w' + vw) dnu
enum class KernelVariant { H1Uniform, H10Uniform, H1Gauss };

/// Accepts "h1", "h10" and "h1gauss"; throws std::invalid_argument otherwise.
KernelVariant parse_kernel_variant(std::string_view name);
std::string_view kernel_name(KernelVariant variant);

class KernelModel {
 public:
  /// `truncation` is the radius R used for quadrature and grid sampling on the
  /// unbounded Gaussian domain. It does not affect kernel evaluation.
  explicit KernelModel(KernelVariant variant, double truncation = 10.0);

  KernelVariant variant() const { return variant_; }
  double truncation() const { return truncation_; }

  /// Numeric interval used for integration and sampling.
  double lower() const;
  double upper() const;

  bool contains(double x) const;

  /// k(x, y). Throws std::domain_error for points outside the domain.
  double operator()(double x, double y) const;
  double diagonal(double x) const { return (*this)(x, x); }

  /// d/dy k(x, y). At y == x the right derivative is returned.
  double derivative(double x, double y) const;

  /// Density of the reference measure nu with respect to Lebesgue measure.
  double reference_density(double x) const;

  /// Weights of the Sobolev form (v,w)_V = int (dw * v'w' + vw_ * v w) dnu.
  double derivative_weight() const;
  double value_weight() const;

  /// int x^k dnu (exact).
  double moment(int k) const;

 private:
  KernelVariant variant_;
  double truncation_;
};

Eigen::MatrixXd kernel_matrix(const KernelModel& kernel, std::span<const double> points);
Eigen::MatrixXd kernel_matrix(const KernelModel& kernel, std::span<const double> rows,
                              std::span<const double> cols);

/// A differentiable test function for the reproducing-property check.
struct TestFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;

  /// Polynomial with coefficients in increasing degree.
  static TestFunction polynomial(std::vector<double> coefficients);
  /// p(x) * (1 - x^2); vanishes at +-1 so it lies in H^1_0.
  static TestFunction polynomial_vanishing_at_boundary(std::vector<double> coefficients);
  static TestFunction zero();
};

struct ReproducingCheck {
  double residual;
  double integral;
  bool within_ceiling;
};

/// |(phi, k(x,.))_V - phi(x)| with the V inner product integrated by composite
/// Gauss-Legendre quadrature. Panels are split at x where k(x,.) has a kink and
/// doubled until two successive results agree to `tolerance`.
ReproducingCheck reproducing_residual(const KernelModel& kernel, const TestFunction& phi, double x,
                                      double ceiling = 1e-6, double tolerance = 1e-10);

}  // namespace rkhs
