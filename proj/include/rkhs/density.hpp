#pragma once

#include "rkhs/random.hpp"

#include <span>
#include <vector>

namespace rkhs {

/// Unnormalised density given by its values on a grid, linear between nodes.
/// The CDF is the exact integral of that interpolant (trapezoid rule), and
/// draws invert it exactly, solving a quadratic inside the selected cell.
class GridDensity {
 public:
  /// Throws std::invalid_argument for non-increasing nodes, negative values or
  /// zero total mass. Values above -1e-12 * max are clamped to zero.
  GridDensity(std::vector<double> nodes, std::vector<double> values);

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }
  double mass() const { return cumulative_.back(); }

  /// Normalised CDF.
  double cdf(double x) const;
  double quantile(double u) const;
  double draw(Rng& rng) const { return quantile(uniform01(rng)); }

 private:
  std::vector<double> nodes_;
  std::vector<double> values_;
  std::vector<double> cumulative_;
};

/// Trapezoid integral of `values` over `nodes`.
double trapezoid(std::span<const double> nodes, std::span<const double> values);

}  // namespace rkhs
