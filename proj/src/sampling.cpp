#include "rkhs/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace rkhs {
namespace {

std::vector<double> uniform_nodes(const KernelModel& kernel, int size) {
  if (size < 2) throw std::invalid_argument("SamplingGrid: need at least two nodes");
  std::vector<double> nodes(size);
  const double a = kernel.lower();
  const double b = kernel.upper();
  for (int i = 0; i < size; ++i) nodes[i] = a + (b - a) * i / (size - 1.0);
  nodes.back() = b;
  return nodes;
}

std::vector<double> christoffel_nu(const SubspaceModel& sub, const std::vector<double>& nodes) {
  std::vector<double> w(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    w[i] = sub.christoffel(nodes[i]) * sub.kernel().reference_density(nodes[i]);
  }
  return w;
}

}  // namespace

void SamplerConfig::validate(int d) const {
  if (!(mu_star > 1.0)) throw std::invalid_argument("SamplerConfig: mu_star must exceed 1");
  if (cap(d) < d) throw std::invalid_argument("SamplerConfig: point cap must be at least d");
  if (grid_size < 2) throw std::invalid_argument("SamplerConfig: grid_size must be at least 2");
  if (gibbs_sweeps < 0) throw std::invalid_argument("SamplerConfig: gibbs_sweeps must be >= 0");
}

SamplingGrid::SamplingGrid(const SubspaceModel& subspace, int size)
    : subspace_(&subspace),
      nodes_(uniform_nodes(subspace.kernel(), size)),
      christoffel_weight_(christoffel_nu(subspace, nodes_)),
      christoffel_density_(nodes_, christoffel_weight_) {
  const KernelModel& k = subspace.kernel();
  const int n = this->size();
  nu_.resize(n);
  kdiag_.resize(n);
  kd_.resize(n);
  christoffel_.resize(n);
  first_weight_.resize(n);
  basis_ = subspace.basis(nodes_);
  double kd_max = 0.0;
  for (int i = 0; i < n; ++i) {
    nu_[i] = k.reference_density(nodes_[i]);
    kdiag_[i] = k.diagonal(nodes_[i]);
    kd_[i] = basis_.col(i).squaredNorm();
    christoffel_[i] = subspace.christoffel(nodes_[i]);
    kd_max = std::max(kd_max, kd_[i]);
  }
  for (int i = 0; i < n; ++i) {
    first_weight_[i] = kd_[i] > 1e-14 * kd_max ? christoffel_[i] / kd_[i] * kdiag_[i] * nu_[i] : 0.0;
  }
}

ConditionalGrid::ConditionalGrid(const SamplingGrid& grid, bool track_subspace)
    : grid_(&grid),
      track_(track_subspace),
      state_(grid.subspace()),
      p_(0, grid.size()),
      resid_(Eigen::Map<const Eigen::VectorXd>(grid.kernel_diagonal().data(), grid.size())) {
  if (track_) {
    e_ = Eigen::MatrixXd::Zero(grid.subspace().dimension(), grid.size());
    qnum_ = Eigen::Map<const Eigen::VectorXd>(grid.subspace_diagonal().data(), grid.size());
  }
}

bool ConditionalGrid::usable(int j) const {
  return resid_(j) > SampleState::kDuplicateRelTol * grid_->kernel_diagonal()[j];
}

Extension ConditionalGrid::extend(double y) {
  const int rank_before = static_cast<int>(state_.range_basis().cols());
  Extension ext = state_.extend(y);
  if (!ext.active) return ext;

  const KernelModel& k = grid_->kernel();
  const std::vector<double>& nodes = grid_->nodes();
  const int n = grid_->size();
  Eigen::RowVectorXd row(n);
  for (int j = 0; j < n; ++j) row(j) = k(y, nodes[j]);
  if (p_.rows() > 0) row.noalias() -= ext.l.transpose() * p_;
  row /= std::sqrt(ext.pivot);

  const Eigen::Index m = p_.rows();
  p_.conservativeResize(m + 1, Eigen::NoChange);
  p_.row(m) = row;
  resid_ -= row.transpose().cwiseAbs2();

  if (track_) {
    e_.noalias() += ext.g * row;
    const int rank_after = static_cast<int>(state_.range_basis().cols());
    if (rank_after > rank_before) {
      const Eigen::VectorXd u = state_.range_basis().col(rank_after - 1);
      qnum_ -= (u.transpose() * grid_->basis()).transpose().cwiseAbs2();
    }
  }
  return ext;
}

std::vector<double> ConditionalGrid::q_values() const {
  if (!track_) throw std::logic_error("ConditionalGrid: subspace quantities are not tracked");
  std::vector<double> q(grid_->size(), 0.0);
  for (int j = 0; j < grid_->size(); ++j) {
    if (usable(j)) q[j] = std::max(qnum_(j), 0.0) / resid_(j);
  }
  return q;
}

std::vector<double> ConditionalGrid::r_values() const {
  if (!track_) throw std::logic_error("ConditionalGrid: subspace quantities are not tracked");
  const int n = grid_->size();
  Eigen::LLT<Eigen::MatrixXd> llt(state_.gramian());
  if (state_.active_size() < state_.dimension() || llt.info() != Eigen::Success) {
    throw std::logic_error("r_values: Gramian is singular");
  }
  Eigen::MatrixXd g = grid_->basis() - e_;
  for (int j = 0; j < n; ++j) {
    if (usable(j)) {
      g.col(j) /= std::sqrt(resid_(j));
    } else {
      g.col(j).setZero();
    }
  }
  llt.matrixL().solveInPlace(g);
  const Eigen::VectorXd r = g.colwise().squaredNorm().transpose();
  return std::vector<double>(r.data(), r.data() + n);
}

std::vector<double> ConditionalGrid::first_stage_density() const {
  std::vector<double> q = q_values();
  const std::vector<double>& w = grid_->first_stage_weight();
  for (std::size_t j = 0; j < q.size(); ++j) q[j] *= w[j];
  return q;
}

std::vector<double> ConditionalGrid::extension_density() const {
  std::vector<double> r = r_values();
  const std::vector<double>& w = grid_->christoffel_weight();
  for (std::size_t j = 0; j < r.size(); ++j) r[j] = (1.0 + r[j]) * w[j];
  return r;
}

std::vector<double> ConditionalGrid::volume_density() const {
  std::vector<double> v(grid_->size());
  for (int j = 0; j < grid_->size(); ++j) v[j] = std::max(resid_(j), 0.0) * grid_->nu()[j];
  return v;
}

double ConditionalGrid::z_first_stage() const {
  const std::vector<double>& nodes = grid_->nodes();
  return trapezoid(nodes, first_stage_density()) / trapezoid(nodes, grid_->first_stage_weight());
}

double ConditionalGrid::z_extension() const {
  const std::vector<double>& nodes = grid_->nodes();
  return trapezoid(nodes, extension_density()) / trapezoid(nodes, grid_->christoffel_weight());
}

std::vector<double> sample_christoffel_iid(const SamplingGrid& grid, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_christoffel_iid: n must be positive");
  std::vector<double> x(n);
  for (double& v : x) v = grid.christoffel_density().draw(rng);
  return x;
}

std::vector<double> sample_cvs(const SamplingGrid& grid, int n, Rng& rng, int gibbs_sweeps) {
  if (n < 1) throw std::invalid_argument("sample_cvs: n must be positive");
  std::vector<double> x;
  x.reserve(n);
  {
    ConditionalGrid cond(grid, false);
    for (int i = 0; i < n; ++i) {
      const double y = GridDensity(grid.nodes(), cond.volume_density()).draw(rng);
      cond.extend(y);
      x.push_back(y);
    }
  }
  for (int sweep = 0; sweep < gibbs_sweeps; ++sweep) {
    for (int i = 0; i < n; ++i) {
      ConditionalGrid cond(grid, false);
      for (int j = 0; j < n; ++j) {
        if (j != i) cond.extend(x[j]);
      }
      x[i] = GridDensity(grid.nodes(), cond.volume_density()).draw(rng);
    }
  }
  return x;
}

namespace {

// Shared driver: first-stage draws up to d points, then extension draws while
// `more` returns true.
template <class More>
SivsResult run_sivs(const SamplingGrid& grid, int first_stage, Rng& rng, More more) {
  const int d = grid.subspace().dimension();
  ConditionalGrid cond(grid);
  SivsResult out;
  auto record = [&](double y, double z) {
    cond.extend(y);
    out.points.push_back(y);
    out.mu = cond.state().mu();
    out.trace.push_back({static_cast<int>(out.points.size()), z, out.mu});
  };
  for (int i = 0; i < std::min(first_stage, d); ++i) {
    const std::vector<double> dens = cond.first_stage_density();
    const GridDensity density(grid.nodes(), dens);
    const double z = density.mass() / trapezoid(grid.nodes(), grid.first_stage_weight());
    record(density.draw(rng), z);
  }
  while (more(out)) {
    const std::vector<double> dens = cond.extension_density();
    const GridDensity density(grid.nodes(), dens);
    const double z = density.mass() / trapezoid(grid.nodes(), grid.christoffel_weight());
    record(density.draw(rng), z);
  }
  return out;
}

}  // namespace

SivsResult sample_sivs(const SamplingGrid& grid, const SamplerConfig& config, Rng& rng) {
  const int d = grid.subspace().dimension();
  config.validate(d);
  const int cap = config.cap(d);
  SivsResult out = run_sivs(grid, d, rng, [&](const SivsResult& r) {
    return r.mu > config.mu_star && static_cast<int>(r.points.size()) < cap;
  });
  out.reached = out.mu <= config.mu_star;
  return out;
}

SivsResult sample_sivs_fixed(const SamplingGrid& grid, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_sivs_fixed: n must be positive");
  SivsResult out = run_sivs(grid, n, rng, [&](const SivsResult& r) {
    return static_cast<int>(r.points.size()) < n;
  });
  out.reached = std::isfinite(out.mu);
  return out;
}

}  // namespace rkhs
