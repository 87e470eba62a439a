#include "rkhs/quadrature.hpp"

#include "rkhs/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rkhs {

GaussLegendreRule gauss_legendre(int order) {
  if (order < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
  GaussLegendreRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[order - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[order - 1 - i] = w;
  }
  return rule;
}

void for_each_node(double a, double b, std::span<const double> breakpoints, int panels,
                   const GaussLegendreRule& rule,
                   const std::function<void(double, double)>& visit) {
  std::vector<double> cuts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double h = (cuts[s + 1] - cuts[s]) / panels;
    for (int p = 0; p < panels; ++p) {
      const double lo = cuts[s] + p * h;
      const double mid = lo + 0.5 * h;
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        visit(mid + 0.5 * h * rule.nodes[k], 0.5 * h * rule.weights[k]);
      }
    }
  }
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints, int panels, int order) {
  const GaussLegendreRule rule = gauss_legendre(order);
  double sum = 0.0;
  for_each_node(a, b, breakpoints, panels, rule, [&](double x, double w) { sum += w * f(x); });
  return sum;
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    std::span<const double> breakpoints, double tolerance,
                                    int order, int max_panels) {
  const GaussLegendreRule rule = gauss_legendre(order);
  auto run = [&](int panels) {
    double sum = 0.0;
    for_each_node(a, b, breakpoints, panels, rule, [&](double x, double w) { sum += w * f(x); });
    return sum;
  };
  int panels = 1;
  double previous = run(panels);
  while (panels < max_panels) {
    panels *= 2;
    const double current = run(panels);
    const double scale = std::max(1.0, std::abs(current));
    if (std::abs(current - previous) < tolerance * scale) return {current, panels, true};
    previous = current;
  }
  return {previous, panels, false};
}

QuadratureResult integrate_reference(const KernelModel& kernel,
                                     const std::function<double(double)>& f,
                                     std::span<const double> breakpoints, double tolerance) {
  // Extra cuts on the Gaussian domain keep panels short where the weight varies.
  std::vector<double> cuts(breakpoints.begin(), breakpoints.end());
  if (kernel.variant() == KernelVariant::H1Gauss) {
    for (double c : {-6.0, -4.0, -2.0, 0.0, 2.0, 4.0, 6.0}) cuts.push_back(c);
  }
  return integrate_adaptive(
      [&](double x) { return f(x) * kernel.reference_density(x); }, kernel.lower(),
      kernel.upper(), cuts, tolerance);
}

}  // namespace rkhs
