#include "rkhs/subspace.hpp"

#include "rkhs/linalg.hpp"
#include "rkhs/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rkhs {
namespace {

// Off-diagonal entries a_k of the Jacobi matrix of nu, so that
// x phi_k = a_{k+1} phi_{k+1} + a_k phi_{k-1} for the orthonormal polynomials.
std::vector<double> jacobi_offdiagonal(KernelVariant variant, int count) {
  std::vector<double> a(std::max(count, 1) + 1, 0.0);
  for (std::size_t k = 1; k < a.size(); ++k) {
    const double kk = static_cast<double>(k);
    a[k] = variant == KernelVariant::H1Gauss ? std::sqrt(kk) : kk / std::sqrt(4.0 * kk * kk - 1.0);
  }
  return a;
}

// Symmetric inverse square root T with T^T M T = I, restricted to the
// generator coordinates `gen` (columns).
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& gen,
                               const char* what) {
  Eigen::MatrixXd coeffs = gen;
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::MatrixXd m = coeffs.transpose() * gram * coeffs;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    const Eigen::VectorXd& ev = es.eigenvalues();
    if (!(ev.minCoeff() > 1e-13 * ev.maxCoeff())) {
      throw std::runtime_error(std::string("SubspaceModel: ") + what +
                               " Gram matrix is numerically rank deficient");
    }
    coeffs = coeffs * es.eigenvectors() * ev.cwiseSqrt().cwiseInverse().asDiagonal() *
             es.eigenvectors().transpose();
  }
  Eigen::MatrixXd rows = coeffs.transpose();
  for (Eigen::Index j = 0; j < rows.rows(); ++j) {
    Eigen::Index k;
    rows.row(j).cwiseAbs().maxCoeff(&k);
    if (rows(j, k) < 0.0) rows.row(j) *= -1.0;
  }
  return rows;
}

}  // namespace

RawFunction RawFunction::kernel_expansion(std::vector<double> anchors, std::vector<double> coeffs) {
  if (anchors.empty() || anchors.size() != coeffs.size()) {
    throw std::invalid_argument("kernel_expansion: anchors and coefficients must match");
  }
  return {-1, std::move(anchors), std::move(coeffs)};
}

SubspaceSpec SubspaceSpec::polynomial(int d) {
  if (d < 1) throw std::invalid_argument("SubspaceSpec: dimension must be positive");
  std::vector<int> degrees(d);
  for (int i = 0; i < d; ++i) degrees[i] = i;
  return monomials(std::move(degrees));
}

SubspaceSpec SubspaceSpec::polynomial_zero_boundary(int d) {
  if (d < 1) throw std::invalid_argument("SubspaceSpec: dimension must be positive");
  std::vector<int> degrees(d + 2);
  for (int i = 0; i < d + 2; ++i) degrees[i] = i;
  return monomials(std::move(degrees), {-1.0, 1.0});
}

SubspaceSpec SubspaceSpec::monomials(std::vector<int> degrees, std::vector<double> zero_at) {
  SubspaceSpec spec;
  for (int p : degrees) spec.raw.push_back(RawFunction::monomial(p));
  spec.zero_at = std::move(zero_at);
  return spec;
}

SubspaceSpec SubspaceSpec::standard(KernelVariant variant, int d) {
  return variant == KernelVariant::H10Uniform ? polynomial_zero_boundary(d) : polynomial(d);
}

SubspaceModel::SubspaceModel(const KernelModel& kernel, SubspaceSpec spec)
    : kernel_(kernel), spec_(std::move(spec)), dimension_(spec_.dimension()) {
  if (dimension_ < 1) throw std::invalid_argument("SubspaceModel: dimension must be positive");

  int max_degree = -1;
  for (const RawFunction& f : spec_.raw) {
    if (f.is_monomial()) {
      max_degree = std::max(max_degree, f.degree);
    } else {
      if (f.anchors.empty() || f.anchors.size() != f.coeffs.size()) {
        throw std::invalid_argument("SubspaceModel: malformed kernel expansion");
      }
      for (double z : f.anchors) {
        if (!kernel_.contains(z)) throw std::invalid_argument("SubspaceModel: anchor outside domain");
        kinks_.push_back(z);
      }
      expansions_.push_back(f);
    }
  }
  for (double p : spec_.zero_at) {
    if (!kernel_.contains(p)) throw std::invalid_argument("SubspaceModel: constraint outside domain");
  }
  std::sort(kinks_.begin(), kinks_.end());
  kinks_.erase(std::unique(kinks_.begin(), kinks_.end()), kinks_.end());

  poly_count_ = max_degree + 1;
  recurrence_ = jacobi_offdiagonal(kernel_.variant(), poly_count_);
  const int np = poly_count_;
  const int family = np + static_cast<int>(expansions_.size());
  const int m = static_cast<int>(spec_.raw.size());

  // Raw generators in family coordinates; x^p via repeated Jacobi products.
  Eigen::MatrixXd raw = Eigen::MatrixXd::Zero(m, family);
  int next_expansion = np;
  for (int i = 0; i < m; ++i) {
    const RawFunction& f = spec_.raw[i];
    if (!f.is_monomial()) {
      raw(i, next_expansion++) = 1.0;
      continue;
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero(np);
    c(0) = 1.0;
    for (int step = 0; step < f.degree; ++step) {
      Eigen::VectorXd next = Eigen::VectorXd::Zero(np);
      for (int k = 0; k < np; ++k) {
        if (k > 0) next(k) += recurrence_[k] * c(k - 1);
        if (k + 1 < np) next(k) += recurrence_[k + 1] * c(k + 1);
      }
      c = next;
    }
    raw.row(i).head(np) = c.transpose();
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(raw, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (m > family || !(sv(m - 1) > 1e-13 * sv(0))) {
    throw std::runtime_error("SubspaceModel: raw family is linearly dependent");
  }
  const Eigen::MatrixXd span = svd.matrixV().leftCols(m);

  Eigen::MatrixXd generators = span;
  if (!spec_.zero_at.empty()) {
    Eigen::MatrixXd constraint(spec_.zero_at.size(), family);
    for (std::size_t i = 0; i < spec_.zero_at.size(); ++i) {
      constraint.row(i) = family_values(spec_.zero_at[i]).transpose();
    }
    const Eigen::MatrixXd null = null_space(constraint * span, 1e-12);
    if (null.cols() != dimension_) {
      throw std::invalid_argument("SubspaceModel: constraint matrix lacks full row rank");
    }
    generators = span * null;
  }

  // V and L2(nu) Gram matrices of the evaluation family.
  const double dw = kernel_.derivative_weight();
  const double vw = kernel_.value_weight();
  Eigen::MatrixXd gram_v = Eigen::MatrixXd::Zero(family, family);
  Eigen::MatrixXd gram_l2 = Eigen::MatrixXd::Zero(family, family);
  if (np > 0) {
    Eigen::MatrixXd dd = Eigen::MatrixXd::Zero(np, np);
    if (kernel_.variant() == KernelVariant::H1Gauss) {
      for (int k = 0; k < np; ++k) dd(k, k) = k;
    } else {
      const GaussLegendreRule rule = gauss_legendre(np + 1);
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const Eigen::VectorXd dphi = family_derivatives(rule.nodes[q]).head(np);
        dd += 0.5 * rule.weights[q] * dphi * dphi.transpose();
      }
    }
    gram_v.topLeftCorner(np, np) = dw * dd + vw * Eigen::MatrixXd::Identity(np, np);
    gram_l2.topLeftCorner(np, np).setIdentity();
  }
  const bool h10 = kernel_.variant() == KernelVariant::H10Uniform;
  for (std::size_t e = 0; e < expansions_.size(); ++e) {
    const RawFunction& f = expansions_[e];
    const int col = np + static_cast<int>(e);
    for (std::size_t i = 0; i < f.anchors.size(); ++i) {
      const double z = f.anchors[i];
      Eigen::VectorXd phi = family_values(z).head(np);
      if (h10 && np > 0) {
        // Boundary terms of 2 int v' k_z' dx for v not vanishing at +-1.
        phi -= 0.5 * ((1.0 - z) * family_values(-1.0).head(np) +
                      (1.0 + z) * family_values(1.0).head(np));
      }
      gram_v.col(col).head(np) += f.coeffs[i] * phi;
    }
    gram_v.row(col).head(np) = gram_v.col(col).head(np).transpose();
    for (std::size_t e2 = 0; e2 <= e; ++e2) {
      const RawFunction& g = expansions_[e2];
      double s = 0.0;
      for (std::size_t i = 0; i < f.anchors.size(); ++i) {
        for (std::size_t j = 0; j < g.anchors.size(); ++j) {
          s += f.coeffs[i] * g.coeffs[j] * kernel_(f.anchors[i], g.anchors[j]);
        }
      }
      gram_v(col, np + e2) = gram_v(np + e2, col) = s;
    }
  }

  if (!expansions_.empty()) {
    // Entries involving kernel expansions: composite quadrature, panels doubled
    // until the matrix settles.
    std::vector<double> cuts = kinks_;
    if (kernel_.variant() == KernelVariant::H1Gauss) {
      for (double c : {-6.0, -4.0, -2.0, 0.0, 2.0, 4.0, 6.0}) cuts.push_back(c);
    }
    const GaussLegendreRule rule = gauss_legendre(20);
    auto assemble = [&](int panels) {
      Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(family, family);
      for_each_node(kernel_.lower(), kernel_.upper(), cuts, panels, rule, [&](double x, double w) {
        const Eigen::VectorXd v = family_values(x);
        acc.noalias() += (w * kernel_.reference_density(x)) * v * v.transpose();
      });
      return acc;
    };
    Eigen::MatrixXd previous = assemble(1);
    Eigen::MatrixXd current = previous;
    for (int panels = 2; panels <= 1024; panels *= 2) {
      current = assemble(panels);
      const double scale = std::max(1.0, current.cwiseAbs().maxCoeff());
      if ((current - previous).cwiseAbs().maxCoeff() < 1e-13 * scale) break;
      previous = current;
    }
    gram_l2.rightCols(family - np) = current.rightCols(family - np);
    gram_l2.bottomRows(family - np) = current.bottomRows(family - np);
  }

  v_coeffs_ = orthonormalize(gram_v, generators, "V");
  l2_coeffs_ = orthonormalize(gram_l2, generators, "L2");

  if (h10) {
    const double edge = std::max(basis(-1.0).cwiseAbs().maxCoeff(), basis(1.0).cwiseAbs().maxCoeff());
    if (edge > 1e-8) {
      throw std::invalid_argument("SubspaceModel: space does not vanish at +-1 as H^1_0 requires");
    }
  }
}

Eigen::VectorXd SubspaceModel::family_values(double x) const {
  const int np = poly_count_;
  Eigen::VectorXd v(np + expansions_.size());
  if (np > 0) v(0) = 1.0;
  if (np > 1) v(1) = x / recurrence_[1];
  for (int k = 1; k + 1 < np; ++k) {
    v(k + 1) = (x * v(k) - recurrence_[k] * v(k - 1)) / recurrence_[k + 1];
  }
  for (std::size_t e = 0; e < expansions_.size(); ++e) {
    double s = 0.0;
    for (std::size_t i = 0; i < expansions_[e].anchors.size(); ++i) {
      s += expansions_[e].coeffs[i] * kernel_(expansions_[e].anchors[i], x);
    }
    v(np + e) = s;
  }
  return v;
}

Eigen::VectorXd SubspaceModel::family_derivatives(double x) const {
  const int np = poly_count_;
  Eigen::VectorXd d(np + expansions_.size());
  double v_prev = 0.0;
  double v_cur = 1.0;
  if (np > 0) d(0) = 0.0;
  if (np > 1) d(1) = 1.0 / recurrence_[1];
  for (int k = 0; k + 1 < np; ++k) {
    const double a_next = recurrence_[k + 1];
    const double v_next = (x * v_cur - recurrence_[k] * v_prev) / a_next;
    if (k > 0) d(k + 1) = (v_cur + x * d(k) - recurrence_[k] * d(k - 1)) / a_next;
    v_prev = v_cur;
    v_cur = v_next;
  }
  for (std::size_t e = 0; e < expansions_.size(); ++e) {
    double s = 0.0;
    for (std::size_t i = 0; i < expansions_[e].anchors.size(); ++i) {
      s += expansions_[e].coeffs[i] * kernel_.derivative(expansions_[e].anchors[i], x);
    }
    d(np + e) = s;
  }
  return d;
}

Eigen::MatrixXd SubspaceModel::basis(std::span<const double> xs) const {
  Eigen::MatrixXd out(dimension_, xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out.col(i) = basis(xs[i]);
  return out;
}

double SubspaceModel::kernel_eval(double x, double y) const {
  return basis(x).dot(basis(y));
}

double SubspaceModel::christoffel(double x) const {
  return l2_basis(x).squaredNorm();
}

}  // namespace rkhs
