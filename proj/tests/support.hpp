#pragma once

#include "rkhs/kernel.hpp"
#include "rkhs/quadrature.hpp"
#include "rkhs/random.hpp"
#include "rkhs/subspace.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace test {

inline const rkhs::KernelVariant kAllKernels[] = {rkhs::KernelVariant::H1Uniform,
                                                  rkhs::KernelVariant::H10Uniform,
                                                  rkhs::KernelVariant::H1Gauss};

inline double uniform(rkhs::Rng& rng, double a, double b) {
  return a + (b - a) * rkhs::uniform01(rng);
}

// A point where the reference measure has most of its mass.
inline double random_point(const rkhs::KernelModel& k, rkhs::Rng& rng) {
  if (k.variant() == rkhs::KernelVariant::H1Gauss) return uniform(rng, -3.0, 3.0);
  return uniform(rng, k.lower(), k.upper());
}

inline std::vector<double> random_points(const rkhs::KernelModel& k, int n, rkhs::Rng& rng) {
  std::vector<double> x(n);
  for (double& v : x) v = random_point(k, rng);
  return x;
}

inline Eigen::VectorXd random_vector(int n, rkhs::Rng& rng) {
  Eigen::VectorXd v(n);
  for (double& e : v) e = uniform(rng, -1.0, 1.0);
  return v;
}

// Sobolev inner product of two functions given by value and derivative
// callbacks, by brute-force composite quadrature with the given kinks.
inline double sobolev_inner(const rkhs::KernelModel& k, const std::function<double(double)>& f,
                            const std::function<double(double)>& df,
                            const std::function<double(double)>& g,
                            const std::function<double(double)>& dg,
                            std::vector<double> kinks = {}) {
  const double dw = k.derivative_weight(), vw = k.value_weight();
  auto integrand = [&](double x) {
    return (dw * df(x) * dg(x) + vw * f(x) * g(x)) * k.reference_density(x);
  };
  return rkhs::integrate(integrand, k.lower(), k.upper(), kinks, 400, 20);
}

}  // namespace test

namespace test {

// Kolmogorov-Smirnov statistic of a sample against a continuous cdf.
inline double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

// Critical value at level 0.001.
inline double ks_critical(std::size_t n) { return 1.95 / std::sqrt(static_cast<double>(n)); }

}  // namespace test
