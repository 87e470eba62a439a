#include "rkhs/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

TEST_CASE("Gauss-Legendre weights sum to two and nodes are symmetric") {
  for (int order : {1, 2, 5, 20}) {
    const rkhs::GaussLegendreRule r = rkhs::gauss_legendre(order);
    REQUIRE(r.nodes.size() == static_cast<std::size_t>(order));
    double sum = 0.0;
    for (double w : r.weights) sum += w;
    CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
    for (int i = 0; i < order; ++i) {
      CHECK(r.nodes[i] == doctest::Approx(-r.nodes[order - 1 - i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("an n-point rule integrates monomials up to degree 2n-1 exactly") {
  const int n = 6;
  const rkhs::GaussLegendreRule r = rkhs::gauss_legendre(n);
  for (int k = 0; k <= 2 * n - 1; ++k) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], k);
    const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
    CHECK(s == doctest::Approx(exact).epsilon(1e-13));
  }
}

TEST_CASE("composite rule handles breakpoints of a kinked integrand") {
  const double v = rkhs::integrate([](double x) { return std::abs(x - 0.3); }, -1.0, 1.0, std::vector{0.3},
                                   1, 4);
  CHECK(v == doctest::Approx((1.3 * 1.3 + 0.7 * 0.7) / 2.0).epsilon(1e-14));
}

TEST_CASE("adaptive integration converges on smooth integrands") {
  const rkhs::QuadratureResult q =
      rkhs::integrate_adaptive([](double x) { return std::exp(x); }, 0.0, 2.0, {});
  CHECK(q.converged);
  CHECK(q.value == doctest::Approx(std::exp(2.0) - 1.0).epsilon(1e-12));
  const rkhs::QuadratureResult g = rkhs::integrate_adaptive(
      [](double x) { return std::exp(-x * x); }, -8.0, 8.0, {});
  CHECK(g.value == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
}
