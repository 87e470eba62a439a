#include "rkhs/kernel.hpp"

#include "rkhs/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace rkhs {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
const double kSqrtHalfPi = std::sqrt(0.5 * std::numbers::pi);
// Jump condition (k_L' - k_R')(x) rho(x) = 1 with rho the N(0,1) density.
constexpr double kGaussScale = 0.5 * std::numbers::pi;
const double kSinh2 = std::sinh(2.0);

// log(erfc(t)); std::erfc keeps full relative accuracy until it underflows.
double log_erfc(double t) {
  if (t < 25.0) return std::log(std::erfc(t));
  const double inv = 1.0 / (t * t);
  return -t * t - std::log(t * std::sqrt(std::numbers::pi)) +
         std::log1p(-0.5 * inv + 0.75 * inv * inv);
}

// exp(x^2/2) * erfc(t) evaluated without overflow.
double scaled_erfc(double x, double t) {
  if (std::abs(x) < 5.0) return std::exp(0.5 * x * x) * std::erfc(t);
  return std::exp(0.5 * x * x + log_erfc(t));
}

double gauss_kernel(double x, double y) {
  const double lo = std::min(x, y);
  const double hi = std::max(x, y);
  if (std::max(std::abs(lo), std::abs(hi)) < 5.0) {
    return kGaussScale * std::exp(0.5 * (x * x + y * y)) * std::erfc(-lo / kSqrt2) *
           std::erfc(hi / kSqrt2);
  }
  return kGaussScale *
         std::exp(0.5 * (x * x + y * y) + log_erfc(-lo / kSqrt2) + log_erfc(hi / kSqrt2));
}

double double_factorial(int k) {
  double r = 1.0;
  for (int i = k; i > 1; i -= 2) r *= i;
  return r;
}

}  // namespace

KernelVariant parse_kernel_variant(std::string_view name) {
  if (name == "h1") return KernelVariant::H1Uniform;
  if (name == "h10") return KernelVariant::H10Uniform;
  if (name == "h1gauss") return KernelVariant::H1Gauss;
  throw std::invalid_argument("unknown kernel '" + std::string(name) +
                              "' (expected h1, h10 or h1gauss)");
}

std::string_view kernel_name(KernelVariant variant) {
  switch (variant) {
    case KernelVariant::H1Uniform: return "h1";
    case KernelVariant::H10Uniform: return "h10";
    case KernelVariant::H1Gauss: return "h1gauss";
  }
  return "unknown";
}

KernelModel::KernelModel(KernelVariant variant, double truncation)
    : variant_(variant), truncation_(truncation) {
  if (!(truncation > 0.0)) throw std::invalid_argument("KernelModel: truncation must be positive");
}

double KernelModel::lower() const {
  return variant_ == KernelVariant::H1Gauss ? -truncation_ : -1.0;
}

double KernelModel::upper() const {
  return variant_ == KernelVariant::H1Gauss ? truncation_ : 1.0;
}

bool KernelModel::contains(double x) const {
  if (variant_ == KernelVariant::H1Gauss) return std::isfinite(x);
  return x >= -1.0 && x <= 1.0;
}

double KernelModel::operator()(double x, double y) const {
  if (!contains(x) || !contains(y)) throw std::domain_error("kernel evaluated outside its domain");
  const double lo = std::min(x, y);
  const double hi = std::max(x, y);
  switch (variant_) {
    case KernelVariant::H1Uniform:
      return 2.0 * std::cosh(1.0 - hi) * std::cosh(1.0 + lo) / kSinh2;
    case KernelVariant::H10Uniform:
      return 0.25 * (lo + 1.0) * (1.0 - hi);
    case KernelVariant::H1Gauss:
      return gauss_kernel(x, y);
  }
  return 0.0;
}

double KernelModel::derivative(double x, double y) const {
  if (!contains(x) || !contains(y)) throw std::domain_error("kernel evaluated outside its domain");
  const bool left = y < x;
  switch (variant_) {
    case KernelVariant::H1Uniform:
      return left ? 2.0 * std::cosh(1.0 - x) * std::sinh(1.0 + y) / kSinh2
                  : -2.0 * std::sinh(1.0 - y) * std::cosh(1.0 + x) / kSinh2;
    case KernelVariant::H10Uniform:
      return left ? 0.25 * (1.0 - x) : -0.25 * (1.0 + x);
    case KernelVariant::H1Gauss: {
      const double k = gauss_kernel(x, y);
      return left ? y * k + kSqrtHalfPi * scaled_erfc(x, x / kSqrt2)
                  : y * k - kSqrtHalfPi * scaled_erfc(x, -x / kSqrt2);
    }
  }
  return 0.0;
}

double KernelModel::reference_density(double x) const {
  if (variant_ == KernelVariant::H1Gauss) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  }
  return (x >= -1.0 && x <= 1.0) ? 0.5 : 0.0;
}

double KernelModel::derivative_weight() const {
  return variant_ == KernelVariant::H10Uniform ? 4.0 : 1.0;
}

double KernelModel::value_weight() const {
  return variant_ == KernelVariant::H10Uniform ? 0.0 : 1.0;
}

double KernelModel::moment(int k) const {
  if (k < 0) throw std::invalid_argument("moment: negative order");
  if (k % 2 == 1) return 0.0;
  if (variant_ == KernelVariant::H1Gauss) return double_factorial(k - 1);
  return 1.0 / (k + 1.0);
}

Eigen::MatrixXd kernel_matrix(const KernelModel& kernel, std::span<const double> points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = kernel(points[i], points[j]);
      k(j, i) = k(i, j);
    }
  }
  return k;
}

Eigen::MatrixXd kernel_matrix(const KernelModel& kernel, std::span<const double> rows,
                              std::span<const double> cols) {
  Eigen::MatrixXd k(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) k(i, j) = kernel(rows[i], cols[j]);
  }
  return k;
}

TestFunction TestFunction::polynomial(std::vector<double> coefficients) {
  auto value = [c = coefficients](double x) {
    double s = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
    return s;
  };
  auto derivative = [c = std::move(coefficients)](double x) {
    double s = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) s = s * x + static_cast<double>(k) * c[k];
    return s;
  };
  return {value, derivative};
}

TestFunction TestFunction::polynomial_vanishing_at_boundary(std::vector<double> coefficients) {
  TestFunction p = polynomial(std::move(coefficients));
  return {[p](double x) { return p.value(x) * (1.0 - x * x); },
          [p](double x) { return p.derivative(x) * (1.0 - x * x) - 2.0 * x * p.value(x); }};
}

TestFunction TestFunction::zero() {
  return {[](double) { return 0.0; }, [](double) { return 0.0; }};
}

ReproducingCheck reproducing_residual(const KernelModel& kernel, const TestFunction& phi, double x,
                                      double ceiling, double tolerance) {
  const double dw = kernel.derivative_weight();
  const double vw = kernel.value_weight();
  const double cut[] = {x};
  const QuadratureResult q = integrate_reference(
      kernel,
      [&](double y) {
        return dw * phi.derivative(y) * kernel.derivative(x, y) + vw * phi.value(y) * kernel(x, y);
      },
      cut, tolerance);
  const double residual = std::abs(q.value - phi.value(x));
  return {residual, q.value, q.converged && residual <= ceiling};
}

}  // namespace rkhs
