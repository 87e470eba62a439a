#pragma once

#include <functional>
#include <span>
#include <vector>

namespace rkhs {

class KernelModel;

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int order);

/// Visits the nodes of a composite Gauss-Legendre rule on [a, b]. The interval
/// is first split at every breakpoint strictly inside (a, b), then each segment
/// is cut into `panels` equal panels.
void for_each_node(double a, double b, std::span<const double> breakpoints, int panels,
                   const GaussLegendreRule& rule,
                   const std::function<void(double x, double w)>& visit);

double integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints, int panels, int order = 20);

struct QuadratureResult {
  double value;
  int panels;
  bool converged;
};

/// Doubles the panel count until successive results differ by less than
/// `tolerance` (absolute, or relative when the value exceeds one).
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    std::span<const double> breakpoints, double tolerance = 1e-10,
                                    int order = 20, int max_panels = 1 << 12);

/// int f dnu over the (truncated) domain of `kernel`.
QuadratureResult integrate_reference(const KernelModel& kernel,
                                     const std::function<double(double)>& f,
                                     std::span<const double> breakpoints = {},
                                     double tolerance = 1e-10);

}  // namespace rkhs
