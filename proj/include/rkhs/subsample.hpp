#pragma once

#include "rkhs/random.hpp"
#include "rkhs/sampling.hpp"
#include "rkhs/subspace.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace rkhs {

struct GreedyTrace {
  std::vector<int> selected;  // indices into the candidate list, in order
  std::vector<double> eta;    // eta after each step
  std::vector<double> mu;     // mu after each step
  bool reached = false;       // mu <= mu_star at the end
};

struct GreedyOptions {
  double mu_star = 2.0;
  int max_steps = 0;          // 0 means no limit beyond the candidate count
  bool stop_at_mu_star = true;
};

/// Greedy maximisation of eta = tr G over the candidates. Each step scans the
/// remaining candidates with the rank-one gain |g_y|^2 and takes the largest,
/// lowest index first on ties. Exact duplicates are skipped. Stops once no
/// candidate increases eta. Throws std::invalid_argument for an empty list.
GreedyTrace greedy_subsample(const SubspaceModel& subspace, std::span<const double> candidates,
                             const GreedyOptions& options = {});

/// tr(b(x) K(x)^+ b(x)^T), computed from scratch.
double eta_of(const SubspaceModel& subspace, std::span<const double> points);

/// C_ij = k(x_i, x_j) / sqrt(K(x_i) K(x_j)).
Eigen::MatrixXd correlation_matrix(const KernelModel& kernel, std::span<const double> candidates);

/// min over |S| <= k of lambda_min(C_SS), by enumeration.
double sparse_min_eigenvalue(const Eigen::MatrixXd& c, int k);

/// C/C_LL = C_SS - C_SL C_LL^-1 C_LS for the complement S of `l`.
Eigen::MatrixXd schur_complement(const Eigen::MatrixXd& c, std::span<const int> l);

/// Brute-force submodularity ratio of eta with respect to U and k over the
/// candidate set, with 0/0 = 1. Requires |U| + k <= 8 and at most 16 candidates.
double submodularity_ratio(const SubspaceModel& subspace, std::span<const double> candidates,
                           std::span<const int> u, int k);

/// An instance on which lambda = mu^-2 violates the submodular inequality:
/// V_d = V_{x'} + span{w3} with w3 = (I - P_{V_x}) k(y, .).
struct NonsubmodularWitness {
  std::vector<double> x_small;  // x'
  std::vector<double> x_large;  // x, contains x'
  double y = 0.0;
  SubspaceSpec spec;
  double lambda_small = 0.0, lambda_small_y = 0.0;
  double lambda_large = 0.0, lambda_large_y = 0.0;
  /// (lambda(x+y) - lambda(x)) - (lambda(x'+y) - lambda(x')); positive means violated.
  double margin = 0.0;
  /// Both sides of the reduced inequality for v = w2 + w3:
  /// (w3, v)^2 / |w3|^2 <= (w2 + w3, v)^2 / |w2 + w3|^2.
  double alt_lhs = 0.0, alt_rhs = 0.0;
};

/// Tries a fixed list of configurations and returns the first one whose
/// components w2 and w3 are both non-degenerate. Throws std::runtime_error if none is.
NonsubmodularWitness nonsubmodular_witness(const KernelModel& kernel);

struct GreedySamplingResult {
  std::vector<double> pool;  // the Algorithm 1 sample
  double pool_mu = 0.0;
  GreedyTrace trace;
  std::vector<double> points;  // the selected subsample
};

inline constexpr double kDefaultGreedyBeta = 2.0;

/// Draws a pool with SIVS until mu <= 1 + (mu_star - 1) / beta, then greedily
/// subsamples it until mu <= mu_star.
GreedySamplingResult sample_with_greedy(const SamplingGrid& grid, const SamplerConfig& config,
                                        double beta, Rng& rng);
inline GreedySamplingResult sample_with_greedy(const SamplingGrid& grid, const SamplerConfig& config,
                                               Rng& rng) {
  return sample_with_greedy(grid, config, kDefaultGreedyBeta, rng);
}

}  // namespace rkhs
