#include "support.hpp"

#include <doctest.h>

using rkhs::KernelModel;
using rkhs::KernelVariant;
using rkhs::SubspaceModel;
using rkhs::SubspaceSpec;

namespace {

// Gram matrix of the V basis by brute-force quadrature of the Sobolev form.
Eigen::MatrixXd quadrature_v_gram(const SubspaceModel& s) {
  const int d = s.dimension();
  Eigen::MatrixXd g(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      g(i, j) = g(j, i) = test::sobolev_inner(
          s.kernel(), [&](double x) { return s.basis(x)(i); },
          [&](double x) { return s.basis_derivative(x)(i); }, [&](double x) { return s.basis(x)(j); },
          [&](double x) { return s.basis_derivative(x)(j); }, s.kinks());
    }
  }
  return g;
}

Eigen::MatrixXd quadrature_l2_gram(const SubspaceModel& s) {
  const int d = s.dimension();
  const KernelModel& k = s.kernel();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(d, d);
  const rkhs::GaussLegendreRule rule = rkhs::gauss_legendre(20);
  rkhs::for_each_node(k.lower(), k.upper(), s.kinks(), 400, rule, [&](double x, double w) {
    const Eigen::VectorXd b = s.l2_basis(x);
    g += w * k.reference_density(x) * b * b.transpose();
  });
  return g;
}

}  // namespace

TEST_CASE("polynomial bases are V- and L2-orthonormal under quadrature") {
  for (KernelVariant v : test::kAllKernels) {
    for (int d : {1, 4, 8}) {
      const KernelModel k(v);
      const SubspaceModel s(k, SubspaceSpec::standard(v, d));
      REQUIRE(s.dimension() == d);
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
      CHECK((quadrature_v_gram(s) - id).cwiseAbs().maxCoeff() < 1e-9);
      CHECK((quadrature_l2_gram(s) - id).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("the basis spans the requested polynomials") {
  rkhs::Rng rng(2);
  for (KernelVariant v : test::kAllKernels) {
    const int d = 6;
    const KernelModel k(v);
    const SubspaceModel s(k, SubspaceSpec::standard(v, d));
    const std::vector<double> x = test::random_points(k, 40, rng);
    const Eigen::MatrixXd b = s.basis(x).transpose();
    for (int p = 0; p < d; ++p) {
      Eigen::VectorXd target(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        target(i) = std::pow(x[i], p);
        if (v == KernelVariant::H10Uniform) target(i) *= 1.0 - x[i] * x[i];
      }
      const Eigen::VectorXd c = b.colPivHouseholderQr().solve(target);
      CHECK((b * c - target).norm() < 1e-9 * std::max(1.0, target.norm()));
    }
  }
}

TEST_CASE("H1_0 basis vanishes at the boundary") {
  const KernelModel k(KernelVariant::H10Uniform);
  const SubspaceModel s(k, SubspaceSpec::polynomial_zero_boundary(7));
  CHECK(s.basis(-1.0).norm() < 1e-12);
  CHECK(s.basis(1.0).norm() < 1e-12);
}

TEST_CASE("subspace kernel is dominated by the full kernel") {
  rkhs::Rng rng(4);
  for (KernelVariant v : test::kAllKernels) {
    const KernelModel k(v);
    const SubspaceModel s(k, SubspaceSpec::standard(v, 5));
    for (int i = 0; i < 50; ++i) {
      const double x = test::random_point(k, rng);
      const double y = test::random_point(k, rng);
      CHECK(s.kernel_eval(x, y) == doctest::Approx(s.basis(x).dot(s.basis(y))));
      CHECK(s.kernel_eval(x, x) <= k.diagonal(x) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("inverse Christoffel function integrates to the dimension") {
  for (KernelVariant v : test::kAllKernels) {
    const KernelModel k(v);
    const SubspaceModel s(k, SubspaceSpec::standard(v, 7));
    const rkhs::QuadratureResult q =
        rkhs::integrate_reference(k, [&](double x) { return s.christoffel(x); });
    CHECK(q.value == doctest::Approx(7.0).epsilon(1e-9));
  }
}

TEST_CASE("spaces with kernel translates are orthonormalised exactly") {
  const KernelModel k(KernelVariant::H1Uniform);
  SubspaceSpec spec;
  spec.raw = {rkhs::RawFunction::monomial(0), rkhs::RawFunction::monomial(1),
              rkhs::RawFunction::kernel_translate(0.3),
              rkhs::RawFunction::kernel_expansion({-0.5, 0.6}, {1.0, -2.0})};
  const SubspaceModel s(k, spec);
  REQUIRE(s.dimension() == 4);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
  CHECK((quadrature_v_gram(s) - id).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((quadrature_l2_gram(s) - id).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("point constraints remove dimensions") {
  const KernelModel k(KernelVariant::H1Uniform);
  const SubspaceModel s(k, SubspaceSpec::monomials({0, 1, 2, 3}, {0.0}));
  CHECK(s.dimension() == 3);
  CHECK(s.basis(0.0).norm() < 1e-12);
}

TEST_CASE("malformed specifications are rejected") {
  const KernelModel k(KernelVariant::H1Uniform);
  CHECK_THROWS(SubspaceSpec::polynomial(0));
  CHECK_THROWS(SubspaceModel(k, SubspaceSpec::monomials({0, 0})));
  CHECK_THROWS(SubspaceModel(k, SubspaceSpec::monomials({0}, {0.2, 0.5})));
  CHECK_THROWS(SubspaceModel(k, SubspaceSpec::monomials({0, 1}, {2.0})));
  CHECK_THROWS(SubspaceModel(KernelModel(KernelVariant::H10Uniform), SubspaceSpec::polynomial(3)));
}
