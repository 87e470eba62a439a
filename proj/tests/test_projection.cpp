#include "support.hpp"

#include "rkhs/linalg.hpp"
#include "rkhs/projection.hpp"

#include <doctest.h>

using rkhs::KernelModel;
using rkhs::KernelVariant;
using rkhs::RepresentedFunction;
using rkhs::SampleState;
using rkhs::SubspaceModel;
using rkhs::SubspaceSpec;

namespace {

RepresentedFunction random_function(const SubspaceModel& s, rkhs::Rng& rng, int anchors = 4) {
  const int d = s.dimension();
  std::vector<double> z = test::random_points(s.kernel(), anchors, rng);
  const RepresentedFunction kernel_part =
      RepresentedFunction::kernel_sum(z, test::random_vector(anchors, rng), d);
  return rkhs::difference(kernel_part, RepresentedFunction::in_subspace(-test::random_vector(d, rng)));
}

SampleState state_of(const SubspaceModel& s, const std::vector<double>& x) {
  SampleState st(s);
  for (double p : x) st.extend(p);
  return st;
}

RepresentedFunction subspace_part(const SubspaceModel& s, const RepresentedFunction& u) {
  return RepresentedFunction::in_subspace(rkhs::project_exact(s, u));
}

}  // namespace

TEST_CASE("V norm of represented functions matches quadrature of the Sobolev form") {
  rkhs::Rng rng(1);
  for (KernelVariant v : test::kAllKernels) {
    const KernelModel k(v);
    const SubspaceModel s(k, SubspaceSpec::standard(v, 4));
    for (int trial = 0; trial < 4; ++trial) {
      const RepresentedFunction u = random_function(s, rng);
      auto f = [&](double x) { return u.value(s, x); };
      auto df = [&](double x) { return u.derivative(s, x); };
      const double quad = std::sqrt(test::sobolev_inner(k, f, df, f, df, u.anchors));
      CHECK(rkhs::v_norm(s, u) == doctest::Approx(quad).epsilon(1e-6));
    }
  }
}

TEST_CASE("V norm of elementary functions") {
  const KernelModel k(KernelVariant::H1Uniform);
  const SubspaceModel s(k, SubspaceSpec::polynomial(3));
  CHECK(rkhs::v_norm(s, RepresentedFunction::zero(3)) == 0.0);
  Eigen::VectorXd one(1);
  one << 1.0;
  CHECK(rkhs::v_norm(s, RepresentedFunction::kernel_sum({0.4}, one, 3)) ==
        doctest::Approx(std::sqrt(k(0.4, 0.4))));
  CHECK(rkhs::v_norm(s, RepresentedFunction::in_subspace(Eigen::VectorXd::Unit(3, 0))) ==
        doctest::Approx(1.0));
}

TEST_CASE("exact projection of a kernel translate is b(z) and satisfies Pythagoras") {
  rkhs::Rng rng(2);
  for (KernelVariant v : test::kAllKernels) {
    const KernelModel k(v);
    const SubspaceModel s(k, SubspaceSpec::standard(v, 5));
    Eigen::VectorXd one(1);
    one << 1.0;
    const RepresentedFunction kz = RepresentedFunction::kernel_sum({0.25}, one, 5);
    CHECK((rkhs::project_exact(s, kz) - s.basis(0.25)).norm() < 1e-12);
    for (int trial = 0; trial < 10; ++trial) {
      const RepresentedFunction u = random_function(s, rng);
      const RepresentedFunction p = subspace_part(s, u);
      const double lhs = std::pow(rkhs::v_norm(s, u), 2);
      const double rhs = std::pow(rkhs::v_norm(s, p), 2) + std::pow(rkhs::v_norm(s, rkhs::difference(u, p)), 2);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }
  }
}

TEST_CASE("empirical projection recovers subspace functions and minimises the empirical norm") {
  rkhs::Rng rng(3);
  const KernelModel k(KernelVariant::H1Uniform);
  const SubspaceModel s(k, SubspaceSpec::polynomial(4));
  const SampleState st = state_of(s, test::random_points(k, 9, rng));
  const Eigen::VectorXd c = test::random_vector(4, rng);
  const std::vector<double> uv = RepresentedFunction::in_subspace(c).values(s, st.points());
  CHECK((rkhs::project_empirical(st, uv) - c).norm() < 1e-9);

  const RepresentedFunction u = random_function(s, rng);
  const std::vector<double> vals = u.values(s, st.points());
  const Eigen::VectorXd best = rkhs::project_empirical(st, vals);
  auto empirical_error = [&](const Eigen::VectorXd& coeffs) {
    const std::vector<double> vv = RepresentedFunction::in_subspace(coeffs).values(s, st.points());
    std::vector<double> r(vals.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = vals[i] - vv[i];
    return st.semi_inner(r, r);
  };
  const double e0 = empirical_error(best);
  int decreases = 0;
  for (int i = 0; i < 1000; ++i) {
    if (empirical_error(best + 1e-3 * test::random_vector(4, rng)) < e0 - 1e-14) ++decreases;
  }
  CHECK(decreases == 0);
}

TEST_CASE("empirical projection rejects point sets with infinite mu") {
  const KernelModel k(KernelVariant::H1Uniform);
  const SubspaceModel s(k, SubspaceSpec::polynomial(4));
  const SampleState st = state_of(s, {0.0, 0.5});
  CHECK_THROWS_AS(rkhs::project_empirical(st, std::vector<double>{1.0, 2.0}), std::runtime_error);
}

TEST_CASE("kernel interpolation interpolates and contracts") {
  rkhs::Rng rng(4);
  for (KernelVariant v : test::kAllKernels) {
    const KernelModel k(v);
    const SubspaceModel s(k, SubspaceSpec::standard(v, 3));
    const SampleState st = state_of(s, test::random_points(k, 6, rng));
    const RepresentedFunction u = random_function(s, rng);
    const std::vector<double> vals = u.values(s, st.points());
    const RepresentedFunction p = rkhs::kernel_interpolate(st, vals);
    const std::vector<double> back = p.values(s, st.points());
    for (std::size_t i = 0; i < vals.size(); ++i) CHECK(back[i] == doctest::Approx(vals[i]).epsilon(1e-8));
    CHECK(rkhs::v_norm(s, p) <= rkhs::v_norm(s, u) * (1.0 + 1e-10));
  }
}

TEST_CASE("PBDW reproduces subspace functions and kernel spans") {
  rkhs::Rng rng(5);
  const KernelModel k(KernelVariant::H1Gauss);
  const SubspaceModel s(k, SubspaceSpec::polynomial(3));
  const SampleState st = state_of(s, test::random_points(k, 6, rng));
  const RepresentedFunction u = RepresentedFunction::in_subspace(test::random_vector(3, rng));
  const RepresentedFunction w = rkhs::pbdw(st, u.values(s, st.points()));
  CHECK(rkhs::v_norm(s, rkhs::difference(u, w)) < 1e-8);
  CHECK(rkhs::pbdw_oracle_rhs(st, u) < 1e-8);
  // alpha in the null space of b(x) gives an element of V_x orthogonal to V_d.
  const Eigen::MatrixXd null = rkhs::null_space(s.basis(st.points()));
  REQUIRE(null.cols() == 3);
  const Eigen::VectorXd alpha = null * test::random_vector(3, rng);
  const RepresentedFunction perp = RepresentedFunction::kernel_sum(st.points(), alpha, 3);
  CHECK(rkhs::project_exact(s, perp).norm() < 1e-10);
  CHECK(rkhs::pbdw_oracle_rhs(st, perp) < 1e-7);
}

TEST_CASE("PBDW oracle residual is at most the best-approximation error") {
  rkhs::Rng rng(6);
  for (KernelVariant v : test::kAllKernels) {
    const KernelModel k(v);
    const SubspaceModel s(k, SubspaceSpec::standard(v, 4));
    for (int trial = 0; trial < 10; ++trial) {
      const SampleState st = state_of(s, test::random_points(k, 7, rng));
      const RepresentedFunction u = random_function(s, rng);
      const double best = rkhs::v_norm(s, rkhs::difference(u, subspace_part(s, u)));
      CHECK(rkhs::pbdw_oracle_rhs(st, u) <= best + 1e-10);
    }
  }
}

TEST_CASE("noisy projection without noise is the empirical projection") {
  rkhs::Rng rng(7);
  const KernelModel k(KernelVariant::H1Uniform);
  const SubspaceModel s(k, SubspaceSpec::polynomial(4));
  const SampleState st = state_of(s, test::random_points(k, 8, rng));
  const RepresentedFunction u = random_function(s, rng);
  const std::vector<double> vals = u.values(s, st.points());
  const rkhs::NoisyProjection np = rkhs::project_noisy(st, vals, rkhs::NoiseModel::none());
  CHECK((np.coeffs - rkhs::project_empirical(st, vals)).norm() < 1e-8);
  CHECK(np.mu_s == doctest::Approx(st.mu()).epsilon(1e-8));
}

TEST_CASE("regularisation can only increase the quasi-optimality constant") {
  rkhs::Rng rng(8);
  const KernelModel k(KernelVariant::H1Uniform);
  const SubspaceModel s(k, SubspaceSpec::polynomial(4));
  const rkhs::NoiseModel rkhs_noise = rkhs::NoiseModel::rkhs([&](double a, double b) { return 0.1 * k(a, b); });
  const rkhs::NoiseModel white = rkhs::NoiseModel::white([](double) { return 0.05; });
  for (int trial = 0; trial < 20; ++trial) {
    const SampleState st = state_of(s, test::random_points(k, 6 + trial % 5, rng));
    const std::vector<double> zero(st.size(), 0.0);
    for (const rkhs::NoiseModel* nm : {&rkhs_noise, &white}) {
      const rkhs::NoisyProjection np = rkhs::project_noisy(st, zero, *nm);
      CHECK(np.mu_s >= st.mu() * (1.0 - 1e-10));
      // Independent eigensolve of b K_S^-1 b^T.
      const Eigen::MatrixXd ks = rkhs::kernel_matrix(k, st.points()) + nm->c_n(st.size()) * nm->matrix(st.points());
      const Eigen::MatrixXd b = st.b();
      const Eigen::MatrixXd gs = b * ks.ldlt().solve(b.transpose());
      const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gs).eigenvalues().minCoeff();
      CHECK(np.mu_s == doctest::Approx(1.0 / std::sqrt(lmin)).epsilon(1e-8));
    }
  }
}

TEST_CASE("white noise constant grows like sqrt(n)") {
  const rkhs::NoiseModel w = rkhs::NoiseModel::white([](double x) { return 1.0 + x * x; });
  CHECK(w.c_n(9) == doctest::Approx(3.0));
  CHECK(rkhs::NoiseModel::rkhs([](double, double) { return 0.0; }).c_n(9) == 1.0);
  const Eigen::MatrixXd m = w.matrix(std::vector<double>{0.0, 2.0});
  CHECK(m(0, 0) == 1.0);
  CHECK(m(1, 1) == 5.0);
  CHECK(m(0, 1) == 0.0);
  const double norm = rkhs::white_noise_norm([](double x) { return x; }, [](double) { return 4.0; }, -1.0, 1.0);
  CHECK(norm == doctest::Approx(0.5));
}
