#include "rkhs/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rkhs {

GridDensity::GridDensity(std::vector<double> nodes, std::vector<double> values)
    : nodes_(std::move(nodes)), values_(std::move(values)) {
  if (nodes_.size() < 2 || nodes_.size() != values_.size()) {
    throw std::invalid_argument("GridDensity: need at least two nodes and matching values");
  }
  double vmax = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (i > 0 && !(nodes_[i] > nodes_[i - 1])) {
      throw std::invalid_argument("GridDensity: nodes must be strictly increasing");
    }
    if (!std::isfinite(values_[i])) throw std::invalid_argument("GridDensity: non-finite value");
    vmax = std::max(vmax, values_[i]);
  }
  for (double& v : values_) {
    if (v < 0.0) {
      if (v < -1e-12 * vmax) throw std::invalid_argument("GridDensity: negative density value");
      v = 0.0;
    }
  }
  cumulative_.assign(nodes_.size(), 0.0);
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    cumulative_[i] = cumulative_[i - 1] +
                     0.5 * (nodes_[i] - nodes_[i - 1]) * (values_[i] + values_[i - 1]);
  }
  if (!(mass() > 0.0)) throw std::invalid_argument("GridDensity: zero total mass");
}

double GridDensity::cdf(double x) const {
  if (x <= nodes_.front()) return 0.0;
  if (x >= nodes_.back()) return 1.0;
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  const double h = nodes_[i + 1] - nodes_[i];
  const double t = x - nodes_[i];
  const double slope = (values_[i + 1] - values_[i]) / h;
  return (cumulative_[i] + values_[i] * t + 0.5 * slope * t * t) / mass();
}

double GridDensity::quantile(double u) const {
  const double target = std::clamp(u, 0.0, 1.0) * mass();
  auto it = std::lower_bound(cumulative_.begin() + 1, cumulative_.end(), target);
  if (it == cumulative_.end()) --it;
  const std::size_t i = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  const double h = nodes_[i + 1] - nodes_[i];
  const double rest = target - cumulative_[i];
  const double f0 = values_[i];
  const double slope = (values_[i + 1] - f0) / h;
  // f0 t + slope t^2 / 2 = rest, in the cancellation-free form.
  const double disc = std::max(f0 * f0 + 2.0 * slope * rest, 0.0);
  const double denom = f0 + std::sqrt(disc);
  const double t = denom > 0.0 ? 2.0 * rest / denom : 0.0;
  return nodes_[i] + std::clamp(t, 0.0, h);
}

double trapezoid(std::span<const double> nodes, std::span<const double> values) {
  double s = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    s += 0.5 * (nodes[i] - nodes[i - 1]) * (values[i] + values[i - 1]);
  }
  return s;
}

}  // namespace rkhs
