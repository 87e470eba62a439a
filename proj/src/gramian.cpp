#include "rkhs/gramian.hpp"

#include "rkhs/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace rkhs {

SampleState::SampleState(const SubspaceModel& subspace)
    : subspace_(&subspace),
      b_(subspace.dimension(), 0),
      w_(0, subspace.dimension()),
      g_(Eigen::MatrixXd::Zero(subspace.dimension(), subspace.dimension())),
      q_(Eigen::MatrixXd::Zero(subspace.dimension(), subspace.dimension())) {
  if (dimension() == 0) logdet_g_ = 0.0;
}

std::vector<double> SampleState::active_points() const {
  std::vector<double> out;
  out.reserve(active_.size());
  for (int i : active_) out.push_back(points_[i]);
  return out;
}

Extension SampleState::trial(double y) const {
  const KernelModel& k = kernel();
  const int n = na();
  Extension ext;
  Eigen::VectorXd kv(n);
  for (int i = 0; i < n; ++i) kv(i) = k(points_[active_[i]], y);
  ext.l = chol().triangularView<Eigen::Lower>().solve(kv);
  const double kyy = k.diagonal(y);
  ext.pivot = kyy - ext.l.squaredNorm();
  ext.active = ext.pivot > kDuplicateRelTol * kyy;
  if (ext.active) {
    ext.g = (subspace_->basis(y) - w().transpose() * ext.l) / std::sqrt(ext.pivot);
  } else {
    ext.g = Eigen::VectorXd::Zero(dimension());
  }
  return ext;
}

Extension SampleState::extend(double y) {
  Extension ext = trial(y);
  const int d = dimension();
  const int n = size();
  const Eigen::VectorXd by = subspace_->basis(y);
  points_.push_back(y);
  b_.conservativeResize(d, n + 1);
  b_.col(n) = by;
  if (!ext.active) return ext;

  const int m = na();
  const double s = std::sqrt(ext.pivot);

  // Residual of b(y) against span b(x_active), the numerator of q.
  Eigen::VectorXd u = by;
  for (int pass = 0; pass < 2; ++pass) {
    u -= range_basis() * (range_basis().transpose() * u);
  }
  const double qnum = u.squaredNorm();
  if (m < d) logdet_q_ += std::log(qnum / ext.pivot);
  if (rank_ < d && qnum > 1e-24 * std::max(by.squaredNorm(), 1e-300)) {
    q_.col(rank_++) = u / std::sqrt(qnum);
  }

  double r = 0.0;
  const bool had_regular = g_regular_;
  if (had_regular) r = r_from_g(ext.g);

  l_.conservativeResize(m + 1, m + 1);
  l_.row(m).head(m) = ext.l.transpose();
  l_.col(m).head(m).setZero();
  l_(m, m) = s;
  w_.conservativeResize(m + 1, d);
  w_.row(m) = ext.g.transpose();
  g_ += ext.g * ext.g.transpose();
  active_.push_back(n);
  logdet_k_ += std::log(ext.pivot);

  if (m + 1 < d) {
    logdet_g_ = -std::numeric_limits<double>::infinity();
  } else if (m + 1 == d) {
    logdet_g_ = logdet_q_;
  } else if (had_regular) {
    logdet_g_ += std::log1p(r);
  }
  refresh_gramian_factor();
  if (!had_regular && m + 1 > d && g_regular_) {
    logdet_g_ = 2.0 * g_r_.diagonal().array().abs().log().sum();
  }
  return ext;
}

void SampleState::refresh_gramian_factor() {
  g_regular_ = false;
  const int d = dimension();
  if (na() < d) return;
  // G = R^T R with R from a QR of W, never from G itself
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(w_);
  g_r_ = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  const double pivot = g_r_.diagonal().cwiseAbs().minCoeff();
  g_regular_ = pivot * pivot > kSingularEigenvalue;
}

double SampleState::semi_inner(std::span<const double> v, std::span<const double> w) const {
  if (static_cast<int>(v.size()) != size() || static_cast<int>(w.size()) != size()) {
    throw std::invalid_argument("semi_inner: value vectors must match the number of points");
  }
  const int n = na();
  Eigen::VectorXd va(n), wa(n);
  for (int i = 0; i < n; ++i) {
    va(i) = v[active_[i]];
    wa(i) = w[active_[i]];
  }
  const Eigen::MatrixXd l = chol();
  const auto lower = l.triangularView<Eigen::Lower>();
  return lower.solve(va).dot(lower.solve(wa));
}

Eigen::VectorXd SampleState::kernel_solve(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != size()) {
    throw std::invalid_argument("kernel_solve: value vector must match the number of points");
  }
  const int n = na();
  Eigen::VectorXd va(n);
  for (int i = 0; i < n; ++i) va(i) = v[active_[i]];
  const Eigen::MatrixXd l = chol();
  const auto lower = l.triangularView<Eigen::Lower>();
  const Eigen::VectorXd alpha = lower.transpose().solve(lower.solve(va));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(size());
  for (int i = 0; i < n; ++i) out(active_[i]) = alpha(i);
  return out;
}

QuasiOptimality SampleState::quasi_optimality() const { return rkhs::quasi_optimality(g_); }

double SampleState::q_conditional(double y) const {
  const Extension ext = trial(y);
  if (!ext.active) return 0.0;
  Eigen::VectorXd u = subspace_->basis(y);
  for (int pass = 0; pass < 2; ++pass) {
    u -= range_basis() * (range_basis().transpose() * u);
  }
  return u.squaredNorm() / ext.pivot;
}

double SampleState::r_conditional(double y) const { return r_from_g(trial(y).g); }

double SampleState::r_from_g(const Eigen::VectorXd& g) const {
  if (!g_regular_) throw std::logic_error("r_conditional: Gramian is singular");
  return g_r_.transpose().triangularView<Eigen::Lower>().solve(g).squaredNorm();
}

Eigen::MatrixXd batch_gramian(const SubspaceModel& subspace, std::span<const double> points) {
  const Eigen::MatrixXd k = kernel_matrix(subspace.kernel(), points);
  const Eigen::MatrixXd b = subspace.basis(points);
  return b * symmetric_pinv(k, 1e-12) * b.transpose();
}

QuasiOptimality quasi_optimality(const Eigen::MatrixXd& gramian) {
  const Eigen::Index d = gramian.rows();
  QuasiOptimality out{1.0, 0.0, 1.0, 0.0};
  if (d == 0) return out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gramian, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double lmin = ev.minCoeff();
  out.lambda = std::max(lmin, 0.0);
  out.mu = lmin > SampleState::kSingularEigenvalue ? 1.0 / std::sqrt(lmin)
                                                   : std::numeric_limits<double>::infinity();
  const double fro = (Eigen::MatrixXd::Identity(d, d) - gramian).norm();
  const double two = (1.0 - ev.array()).abs().maxCoeff();
  out.tau = std::min(fro + two, 1.0);
  out.eta = gramian.trace();
  return out;
}

}  // namespace rkhs
