#include "rkhs/projection.hpp"

#include "rkhs/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace rkhs {
namespace {

Eigen::VectorXd gather_active(const SampleState& state, std::span<const double> values) {
  if (static_cast<int>(values.size()) != state.size()) {
    throw std::invalid_argument("value vector must match the number of sample points");
  }
  Eigen::VectorXd out(state.active_size());
  for (int i = 0; i < state.active_size(); ++i) out(i) = values[state.active()[i]];
  return out;
}

// argmin |z - W c| with G = W^T W; throws unless lambda_min(G) > 1e-12.
struct WhitenedLstsq {
  Eigen::VectorXd c;
  double lambda_min;
};

WhitenedLstsq whitened_lstsq(const Eigen::MatrixXd& w, const Eigen::VectorXd& z, const char* what) {
  const Eigen::Index d = w.cols();
  if (w.rows() < d) throw std::runtime_error(what);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smin = d == 0 ? 1.0 : svd.singularValues()(d - 1);
  if (!(smin * smin > SampleState::kSingularEigenvalue)) throw std::runtime_error(what);
  return {svd.solve(z), smin * smin};
}

}  // namespace

RepresentedFunction RepresentedFunction::zero(int d) {
  return {{}, Eigen::VectorXd(0), Eigen::VectorXd::Zero(d)};
}

RepresentedFunction RepresentedFunction::in_subspace(Eigen::VectorXd c) {
  return {{}, Eigen::VectorXd(0), std::move(c)};
}

RepresentedFunction RepresentedFunction::kernel_sum(std::vector<double> anchors, Eigen::VectorXd a,
                                                    int d) {
  if (static_cast<Eigen::Index>(anchors.size()) != a.size()) {
    throw std::invalid_argument("kernel_sum: anchors and coefficients must match");
  }
  return {std::move(anchors), std::move(a), Eigen::VectorXd::Zero(d)};
}

double RepresentedFunction::value(const SubspaceModel& subspace, double x) const {
  double s = c.dot(subspace.basis(x));
  for (std::size_t i = 0; i < anchors.size(); ++i) s += a(i) * subspace.kernel()(anchors[i], x);
  return s;
}

double RepresentedFunction::derivative(const SubspaceModel& subspace, double x) const {
  double s = c.dot(subspace.basis_derivative(x));
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    s += a(i) * subspace.kernel().derivative(anchors[i], x);
  }
  return s;
}

std::vector<double> RepresentedFunction::values(const SubspaceModel& subspace,
                                                std::span<const double> xs) const {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = value(subspace, xs[i]);
  return out;
}

RepresentedFunction difference(const RepresentedFunction& u, const RepresentedFunction& w) {
  RepresentedFunction r;
  r.anchors = u.anchors;
  r.anchors.insert(r.anchors.end(), w.anchors.begin(), w.anchors.end());
  r.a.resize(u.a.size() + w.a.size());
  r.a << u.a, -w.a;
  r.c = u.c - w.c;
  return r;
}

double v_inner(const SubspaceModel& subspace, const RepresentedFunction& u,
               const RepresentedFunction& w) {
  double s = u.c.dot(w.c);
  if (!u.anchors.empty() && !w.anchors.empty()) {
    s += u.a.dot(kernel_matrix(subspace.kernel(), u.anchors, w.anchors) * w.a);
  }
  if (!u.anchors.empty()) s += u.a.dot(subspace.basis(u.anchors).transpose() * w.c);
  if (!w.anchors.empty()) s += w.a.dot(subspace.basis(w.anchors).transpose() * u.c);
  return s;
}

double v_norm(const SubspaceModel& subspace, const RepresentedFunction& u) {
  return std::sqrt(std::max(v_inner(subspace, u, u), 0.0));
}

Eigen::VectorXd project_exact(const SubspaceModel& subspace, const RepresentedFunction& u) {
  Eigen::VectorXd c = u.c;
  if (!u.anchors.empty()) c += subspace.basis(u.anchors) * u.a;
  return c;
}

Eigen::VectorXd project_empirical(const SampleState& state, std::span<const double> u_values) {
  const Eigen::VectorXd ua = gather_active(state, u_values);
  const Eigen::VectorXd z = state.chol().triangularView<Eigen::Lower>().solve(ua);
  return whitened_lstsq(state.w(), z, "empirical projection is not unique: mu(x) is infinite").c;
}

RepresentedFunction kernel_interpolate(const SampleState& state, std::span<const double> u_values) {
  const Eigen::VectorXd ua = gather_active(state, u_values);
  const Eigen::MatrixXd l = state.chol();
  const auto lower = l.triangularView<Eigen::Lower>();
  Eigen::VectorXd alpha = lower.transpose().solve(lower.solve(ua));
  return RepresentedFunction::kernel_sum(state.active_points(), std::move(alpha), state.dimension());
}

RepresentedFunction pbdw(const SampleState& state, std::span<const double> u_values) {
  const Eigen::VectorXd c = project_empirical(state, u_values);
  const Eigen::MatrixXd b = state.b();
  std::vector<double> residual(u_values.begin(), u_values.end());
  for (int i = 0; i < state.size(); ++i) residual[i] -= c.dot(b.col(i));
  RepresentedFunction out = kernel_interpolate(state, residual);
  out.c = c;
  return out;
}

double pbdw_oracle_rhs(const SampleState& state, const RepresentedFunction& u) {
  const SubspaceModel& sub = state.subspace();
  const std::vector<double> xa = state.active_points();
  RepresentedFunction residual = u;
  residual.c -= project_exact(sub, u);
  if (!xa.empty()) {
    const Eigen::MatrixXd ba = sub.basis(xa);
    const Eigen::MatrixXd null = null_space(ba, 1e-12);
    if (null.cols() > 0) {
      const Eigen::MatrixXd k = kernel_matrix(sub.kernel(), xa);
      const std::vector<double> ux = u.values(sub, xa);
      const Eigen::VectorXd rhs = null.transpose() * Eigen::Map<const Eigen::VectorXd>(ux.data(), ux.size());
      const Eigen::MatrixXd m = null.transpose() * k * null;
      const Eigen::VectorXd beta = m.ldlt().solve(rhs);
      RepresentedFunction part =
          RepresentedFunction::kernel_sum(xa, null * beta, sub.dimension());
      residual = difference(residual, part);
    }
  }
  return v_norm(sub, residual);
}

NoiseModel NoiseModel::rkhs(std::function<double(double, double)> kernel) {
  NoiseModel m;
  m.kind = Kind::Rkhs;
  m.kernel = std::move(kernel);
  return m;
}

NoiseModel NoiseModel::white(std::function<double(double)> gamma) {
  NoiseModel m;
  m.kind = Kind::White;
  m.weight = std::move(gamma);
  return m;
}

NoiseModel NoiseModel::none() {
  return rkhs([](double, double) { return 0.0; });
}

double NoiseModel::c_n(int n) const {
  return kind == Kind::White ? std::sqrt(static_cast<double>(n)) : 1.0;
}

Eigen::MatrixXd NoiseModel::matrix(std::span<const double> points) const {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (kind == Kind::White) {
      k(i, i) = weight(points[i]);
      continue;
    }
    for (Eigen::Index j = 0; j <= i; ++j) k(i, j) = k(j, i) = kernel(points[i], points[j]);
  }
  return k;
}

NoisyProjection project_noisy(const SampleState& state, std::span<const double> y_values,
                              const NoiseModel& noise) {
  if (static_cast<int>(y_values.size()) != state.size()) {
    throw std::invalid_argument("project_noisy: value vector must match the number of points");
  }
  const std::vector<double>& x = state.points();
  const Eigen::MatrixXd ks =
      kernel_matrix(state.kernel(), x) + noise.c_n(state.size()) * noise.matrix(x);
  const Eigen::MatrixXd b = state.b();
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(y_values.data(), y_values.size());
  Eigen::MatrixXd w;
  Eigen::VectorXd z;
  const Eigen::LLT<Eigen::MatrixXd> llt(ks);
  const bool regular =
      llt.info() == Eigen::Success &&
      llt.matrixLLT().diagonal().array().square().minCoeff() >
          SampleState::kDuplicateRelTol * ks.diagonal().maxCoeff();
  if (regular) {
    w = llt.matrixL().solve(b.transpose());
    z = llt.matrixL().solve(y);
  } else {
    // K_S^+ = V L^-1 V^T over the retained eigenvalues
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ks);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double cutoff = 1e-12 * ev.cwiseAbs().maxCoeff();
    Eigen::VectorXd scale = Eigen::VectorXd::Zero(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (ev(i) > cutoff) scale(i) = 1.0 / std::sqrt(ev(i));
    }
    w = scale.asDiagonal() * (es.eigenvectors().transpose() * b.transpose());
    z = scale.asDiagonal() * (es.eigenvectors().transpose() * y);
  }
  WhitenedLstsq ls = whitened_lstsq(w, z, "project_noisy: regularised Gramian is singular");
  return {std::move(ls.c), 1.0 / std::sqrt(ls.lambda_min)};
}

double white_noise_norm(const std::function<double(double)>& eta,
                        const std::function<double(double)>& gamma, double lower, double upper,
                        std::span<const double> extra, int grid) {
  double best = 0.0;
  auto visit = [&](double x) { best = std::max(best, std::abs(eta(x)) / std::sqrt(gamma(x))); };
  for (int i = 0; i < grid; ++i) visit(lower + (upper - lower) * i / (grid - 1.0));
  for (double x : extra) visit(x);
  return best;
}

}  // namespace rkhs
