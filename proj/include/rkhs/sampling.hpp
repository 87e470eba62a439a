#pragma once

#include "rkhs/density.hpp"
#include "rkhs/gramian.hpp"
#include "rkhs/random.hpp"
#include "rkhs/subspace.hpp"

#include <Eigen/Dense>

#include <vector>

namespace rkhs {

struct SamplerConfig {
  int grid_size = 4096;
  double mu_star = 2.0;
  /// Upper bound on the sample size of the extension phase; 0 means 4d.
  int max_points = 0;
  int gibbs_sweeps = 2;

  int cap(int d) const { return max_points > 0 ? max_points : 4 * d; }
  /// Throws std::invalid_argument unless mu_star > 1, cap >= d and grid_size >= 2.
  void validate(int d) const;
};

/// Uniform grid over the (truncated) domain with everything the samplers need
/// that does not depend on the points drawn so far.
class SamplingGrid {
 public:
  SamplingGrid(const SubspaceModel& subspace, int size = 4096);

  const SubspaceModel& subspace() const { return *subspace_; }
  const KernelModel& kernel() const { return subspace_->kernel(); }
  int size() const { return static_cast<int>(nodes_.size()); }

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& nu() const { return nu_; }
  /// K(y) on the grid.
  const std::vector<double>& kernel_diagonal() const { return kdiag_; }
  /// K_d(y) = |b(y)|^2 on the grid.
  const std::vector<double>& subspace_diagonal() const { return kd_; }
  const std::vector<double>& christoffel() const { return christoffel_; }
  /// b on the grid, d x N.
  const Eigen::MatrixXd& basis() const { return basis_; }

  /// (Christoffel / K_d) K nu, the first-stage reference density (zero where K_d vanishes).
  const std::vector<double>& first_stage_weight() const { return first_weight_; }
  /// Christoffel * nu.
  const std::vector<double>& christoffel_weight() const { return christoffel_weight_; }
  const GridDensity& christoffel_density() const { return christoffel_density_; }

 private:
  const SubspaceModel* subspace_;
  std::vector<double> nodes_, nu_, kdiag_, kd_, christoffel_;
  Eigen::MatrixXd basis_;
  std::vector<double> first_weight_, christoffel_weight_;
  GridDensity christoffel_density_;
};

/// A SampleState together with the conditional quantities on every grid node,
/// updated incrementally at O((n + d) N) per appended point.
class ConditionalGrid {
 public:
  /// With `track_subspace` false only the kernel residual is maintained (CVS).
  explicit ConditionalGrid(const SamplingGrid& grid, bool track_subspace = true);

  const SamplingGrid& grid() const { return *grid_; }
  const SampleState& state() const { return state_; }
  Extension extend(double y);

  /// K(y) - k(y,x) K(x)^-1 k(x,y) on the grid.
  const Eigen::VectorXd& pivot() const { return resid_; }
  /// q(y|x) on the grid; zero on duplicates of the current points.
  std::vector<double> q_values() const;
  /// r(y|x) on the grid. Throws std::logic_error while G is singular.
  std::vector<double> r_values() const;

  /// q(y|x) times the first-stage reference density, unnormalised.
  std::vector<double> first_stage_density() const;
  /// (1 + r(y|x)) Christoffel(y) nu(y), unnormalised.
  std::vector<double> extension_density() const;
  /// Kernel residual times nu, the sequential volume-sampling conditional.
  std::vector<double> volume_density() const;

  /// Normalising constants: int q drho_i and int (1 + r) drho with the
  /// reference densities normalised on the same grid.
  double z_first_stage() const;
  double z_extension() const;

 private:
  bool usable(int j) const;

  const SamplingGrid* grid_;
  bool track_;
  SampleState state_;
  Eigen::MatrixXd p_;      // L^-1 K(x_active, Y)
  Eigen::VectorXd resid_;  // kernel residual
  Eigen::MatrixXd e_;      // W^T P
  Eigen::VectorXd qnum_;   // residual of b(Y) against span b(x)
};

std::vector<double> sample_christoffel_iid(const SamplingGrid& grid, int n, Rng& rng);

/// Sequential volume sampling followed by `gibbs_sweeps` sweeps that redraw
/// each point from its full conditional given the others.
std::vector<double> sample_cvs(const SamplingGrid& grid, int n, Rng& rng, int gibbs_sweeps = 2);

struct SivsStep {
  int index;  // 1-based position of the drawn point
  double z;   // normaliser of the conditional it was drawn from
  double mu;  // mu(x) after appending it
};

struct SivsResult {
  std::vector<double> points;
  std::vector<SivsStep> trace;
  bool reached = false;  // mu <= mu_star before the cap
  double mu = 0.0;
};

/// d first-stage points, then extension points until mu <= mu_star or the cap.
SivsResult sample_sivs(const SamplingGrid& grid, const SamplerConfig& config, Rng& rng);

/// Exactly n points from the same two-stage scheme, without the stopping rule.
SivsResult sample_sivs_fixed(const SamplingGrid& grid, int n, Rng& rng);

}  // namespace rkhs
