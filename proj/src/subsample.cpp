#include "rkhs/subsample.hpp"

#include "rkhs/gramian.hpp"
#include "rkhs/linalg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace rkhs {

GreedyTrace greedy_subsample(const SubspaceModel& subspace, std::span<const double> candidates,
                             const GreedyOptions& options) {
  if (candidates.empty()) throw std::invalid_argument("greedy_subsample: no candidates");
  const KernelModel& kernel = subspace.kernel();

  std::vector<int> index;
  std::vector<double> pts;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    bool seen = false;
    for (double p : pts) seen = seen || p == candidates[i];
    if (!seen) {
      index.push_back(static_cast<int>(i));
      pts.push_back(candidates[i]);
    }
  }
  const int m = static_cast<int>(pts.size());
  const Eigen::MatrixXd b = subspace.basis(pts);
  Eigen::VectorXd kdiag(m);
  for (int j = 0; j < m; ++j) kdiag(j) = kernel.diagonal(pts[j]);
  Eigen::VectorXd resid = kdiag;
  Eigen::MatrixXd p(0, m);
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(subspace.dimension(), m);
  std::vector<bool> taken(m, false);

  SampleState state(subspace);
  GreedyTrace trace;
  const int limit = options.max_steps > 0 ? std::min(options.max_steps, m) : m;
  while (static_cast<int>(trace.selected.size()) < limit) {
    int best = -1;
    double best_gain = 0.0;
    for (int j = 0; j < m; ++j) {
      if (taken[j] || !(resid(j) > SampleState::kDuplicateRelTol * kdiag(j))) continue;
      const double gain = (b.col(j) - e.col(j)).squaredNorm() / resid(j);
      if (gain > best_gain) {
        best_gain = gain;
        best = j;
      }
    }
    if (best < 0 || !(best_gain > 1e-15)) break;

    taken[best] = true;
    const Extension ext = state.extend(pts[best]);
    if (ext.active) {
      Eigen::RowVectorXd row(m);
      for (int j = 0; j < m; ++j) row(j) = kernel(pts[best], pts[j]);
      if (p.rows() > 0) row.noalias() -= ext.l.transpose() * p;
      row /= std::sqrt(ext.pivot);
      p.conservativeResize(p.rows() + 1, Eigen::NoChange);
      p.row(p.rows() - 1) = row;
      resid -= row.transpose().cwiseAbs2();
      e.noalias() += ext.g * row;
    }
    const QuasiOptimality qo = state.quasi_optimality();
    trace.selected.push_back(index[best]);
    trace.eta.push_back(qo.eta);
    trace.mu.push_back(qo.mu);
    if (options.stop_at_mu_star && qo.mu <= options.mu_star) break;
  }
  trace.reached = !trace.mu.empty() && trace.mu.back() <= options.mu_star;
  return trace;
}

double eta_of(const SubspaceModel& subspace, std::span<const double> points) {
  if (points.empty()) return 0.0;
  return batch_gramian(subspace, points).trace();
}

Eigen::MatrixXd correlation_matrix(const KernelModel& kernel, std::span<const double> candidates) {
  Eigen::MatrixXd c = kernel_matrix(kernel, candidates);
  const Eigen::VectorXd s = c.diagonal().cwiseSqrt().cwiseInverse();
  c = s.asDiagonal() * c * s.asDiagonal();
  c.diagonal().setOnes();
  return c;
}

double sparse_min_eigenvalue(const Eigen::MatrixXd& c, int k) {
  const int n = static_cast<int>(c.rows());
  if (n > 20) throw std::invalid_argument("sparse_min_eigenvalue: matrix too large to enumerate");
  const int size = std::min(k, n);
  if (size < 1) throw std::invalid_argument("sparse_min_eigenvalue: k must be positive");
  // Principal submatrices interlace, so subsets of the largest size suffice.
  double best = std::numeric_limits<double>::infinity();
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != size) continue;
    std::vector<int> idx;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) idx.push_back(i);
    }
    best = std::min(best, min_eigenvalue(c(idx, idx)));
  }
  return best;
}

Eigen::MatrixXd schur_complement(const Eigen::MatrixXd& c, std::span<const int> l) {
  const int n = static_cast<int>(c.rows());
  std::vector<bool> in_l(n, false);
  for (int i : l) {
    if (i < 0 || i >= n) throw std::invalid_argument("schur_complement: index out of range");
    in_l[i] = true;
  }
  std::vector<int> li, si;
  for (int i = 0; i < n; ++i) (in_l[i] ? li : si).push_back(i);
  const Eigen::MatrixXd css = c(si, si);
  if (li.empty()) return css;
  const Eigen::MatrixXd csl = c(si, li);
  return css - csl * c(li, li).ldlt().solve(csl.transpose());
}

double submodularity_ratio(const SubspaceModel& subspace, std::span<const double> candidates,
                           std::span<const int> u, int k) {
  const int m = static_cast<int>(candidates.size());
  if (k < 1) throw std::invalid_argument("submodularity_ratio: k must be positive");
  if (static_cast<int>(u.size()) + k > 8 || m > 16) {
    throw std::invalid_argument("submodularity_ratio: instance too large for enumeration");
  }
  unsigned umask = 0;
  for (int i : u) {
    if (i < 0 || i >= m) throw std::invalid_argument("submodularity_ratio: index out of range");
    umask |= 1u << i;
  }

  std::unordered_map<unsigned, double> cache;
  auto eta = [&](unsigned mask) {
    auto it = cache.find(mask);
    if (it != cache.end()) return it->second;
    std::vector<double> pts;
    for (int i = 0; i < m; ++i) {
      if (mask & (1u << i)) pts.push_back(candidates[i]);
    }
    const double v = eta_of(subspace, pts);
    cache.emplace(mask, v);
    return v;
  };

  constexpr double kZero = 1e-12;
  double best = std::numeric_limits<double>::infinity();
  for (unsigned lmask = umask;; lmask = (lmask - 1) & umask) {
    const double base = eta(lmask);
    const unsigned rest = ((1u << m) - 1) & ~lmask;
    for (unsigned smask = rest; smask; smask = (smask - 1) & rest) {
      if (__builtin_popcount(smask) > k) continue;
      double num = 0.0;
      for (int i = 0; i < m; ++i) {
        if (smask & (1u << i)) num += eta(lmask | (1u << i)) - base;
      }
      const double den = eta(lmask | smask) - base;
      double ratio;
      if (den <= kZero) {
        if (num > kZero) continue;
        ratio = 1.0;
      } else {
        ratio = num / den;
      }
      best = std::min(best, ratio);
    }
    if (lmask == 0) break;
  }
  return std::isfinite(best) ? best : 1.0;
}

namespace {

// Coefficients over anchors (y, x...) of P_{V_z} k(y, .) for z the first `count` entries of x.
Eigen::VectorXd projection_of_translate(const KernelModel& kernel, double y,
                                        const std::vector<double>& x, std::size_t count) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size() + 1);
  if (count == 0) return out;
  const std::vector<double> z(x.begin(), x.begin() + count);
  const Eigen::MatrixXd k = kernel_matrix(kernel, z);
  Eigen::VectorXd ky(count);
  for (std::size_t i = 0; i < count; ++i) ky(i) = kernel(z[i], y);
  out.segment(1, count) = k.ldlt().solve(ky);
  return out;
}

double state_lambda(const SubspaceModel& sub, const std::vector<double>& pts) {
  SampleState s(sub);
  for (double p : pts) s.extend(p);
  return s.lambda();
}

}  // namespace

NonsubmodularWitness nonsubmodular_witness(const KernelModel& kernel) {
  struct Config {
    std::vector<double> x;
    std::size_t small;
    double y;
  };
  const std::vector<Config> configs = {
      {{-0.5, 0.2}, 1, 0.4}, {{0.0, 0.5}, 1, -0.3}, {{-0.6, 0.1, 0.7}, 2, 0.4}, {{0.3, -0.2}, 1, 0.6}};

  for (const Config& cfg : configs) {
    bool inside = kernel.contains(cfg.y);
    for (double p : cfg.x) inside = inside && kernel.contains(p);
    if (!inside) continue;

    std::vector<double> anchors{cfg.y};
    anchors.insert(anchors.end(), cfg.x.begin(), cfg.x.end());
    const Eigen::MatrixXd gram = kernel_matrix(kernel, anchors);
    Eigen::VectorXd ky = Eigen::VectorXd::Zero(anchors.size());
    ky(0) = 1.0;
    const Eigen::VectorXd px = projection_of_translate(kernel, cfg.y, cfg.x, cfg.x.size());
    const Eigen::VectorXd pxs = projection_of_translate(kernel, cfg.y, cfg.x, cfg.small);
    const Eigen::VectorXd w2 = px - pxs;
    const Eigen::VectorXd w3 = ky - px;
    const double n2 = w2.dot(gram * w2);
    const double n3 = w3.dot(gram * w3);
    const double scale = kernel.diagonal(cfg.y);
    if (!(n2 > 1e-8 * scale) || !(n3 > 1e-8 * scale)) continue;

    NonsubmodularWitness w;
    w.x_small.assign(cfg.x.begin(), cfg.x.begin() + cfg.small);
    w.x_large = cfg.x;
    w.y = cfg.y;
    for (double p : w.x_small) w.spec.raw.push_back(RawFunction::kernel_translate(p));
    w.spec.raw.push_back(RawFunction::kernel_expansion(
        anchors, std::vector<double>(w3.data(), w3.data() + w3.size())));

    const SubspaceModel sub(kernel, w.spec);
    std::vector<double> small_y = w.x_small, large_y = w.x_large;
    small_y.push_back(cfg.y);
    large_y.push_back(cfg.y);
    w.lambda_small = state_lambda(sub, w.x_small);
    w.lambda_small_y = state_lambda(sub, small_y);
    w.lambda_large = state_lambda(sub, w.x_large);
    w.lambda_large_y = state_lambda(sub, large_y);
    w.margin = (w.lambda_large_y - w.lambda_large) - (w.lambda_small_y - w.lambda_small);

    const Eigen::VectorXd v = w2 + w3;
    const double w3v = w3.dot(gram * v);
    const double w23v = v.dot(gram * v);
    w.alt_lhs = w3v * w3v / n3;
    w.alt_rhs = w23v * w23v / v.dot(gram * v);
    if (w.margin > 1e-6) return w;
  }
  throw std::runtime_error("nonsubmodular_witness: every configuration was degenerate");
}

GreedySamplingResult sample_with_greedy(const SamplingGrid& grid, const SamplerConfig& config,
                                        double beta, Rng& rng) {
  if (!(beta >= 1.0)) throw std::invalid_argument("sample_with_greedy: beta must be at least 1");
  SamplerConfig pool_config = config;
  pool_config.mu_star = 1.0 + (config.mu_star - 1.0) / beta;
  const SivsResult pool = sample_sivs(grid, pool_config, rng);

  GreedySamplingResult out;
  out.pool = pool.points;
  out.pool_mu = pool.mu;
  GreedyOptions options;
  options.mu_star = config.mu_star;
  out.trace = greedy_subsample(grid.subspace(), out.pool, options);
  for (int i : out.trace.selected) out.points.push_back(out.pool[i]);
  return out;
}

}  // namespace rkhs
