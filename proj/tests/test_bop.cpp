#include <doctest.h>

#include <cmath>
#include <functional>

#include "helpers.hpp"
#include "msid/bop.hpp"

using namespace msid;

namespace {

double eval_coeffs(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k];
  return acc;
}

double eval_coeffs_dd(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 2;)
    acc = acc * x + c[k] * static_cast<double>(k) * static_cast<double>(k - 1);
  return acc;
}

}  // namespace

TEST_CASE("first constrained polynomial is x^4 - 2x^3 + x") {
  const auto bps = BopBasis::basic_polynomials(3);
  REQUIRE(bps[0].size() == 5);
  CHECK(bps[0][0] == doctest::Approx(0.0).scale(1.0));
  CHECK(bps[0][1] == doctest::Approx(1.0));
  CHECK(bps[0][2] == doctest::Approx(0.0).scale(1.0));
  CHECK(bps[0][3] == doctest::Approx(-2.0));
  CHECK(bps[0][4] == doctest::Approx(1.0));
}

TEST_CASE("second constrained polynomial has degree 5 with unit leading term") {
  const auto bps = BopBasis::basic_polynomials(2);
  REQUIRE(bps[1].size() == 6);
  CHECK(bps[1][5] == doctest::Approx(1.0));
}

TEST_CASE("every constrained polynomial meets the end conditions") {
  const auto bps = BopBasis::basic_polynomials(8);
  for (const auto& p : bps) {
    CHECK(std::abs(eval_coeffs(p, 0.0)) < 1e-10);
    CHECK(std::abs(eval_coeffs(p, 1.0)) < 1e-10);
    CHECK(std::abs(eval_coeffs_dd(p, 0.0)) < 1e-10);
    CHECK(std::abs(eval_coeffs_dd(p, 1.0)) < 1e-10);
  }
}

TEST_CASE("orthonormalized basis meets the end conditions") {
  const BopBasis basis = BopBasis::build(8);
  for (int i = 0; i < basis.size(); ++i) {
    CHECK(std::abs(basis.evaluate_one(i, 0.0)) < 1e-10);
    CHECK(std::abs(basis.evaluate_one(i, 1.0)) < 1e-10);
    CHECK(std::abs(basis.second_derivative_one(i, 0.0)) < 1e-10);
    CHECK(std::abs(basis.second_derivative_one(i, 1.0)) < 1e-10);
  }
}

TEST_CASE("orthonormality") {
  const BopBasis basis = BopBasis::build(8);
  CHECK(std::abs(basis.inner_product(0, 0) - 1.0) < 1e-12);
  CHECK(std::abs(basis.inner_product(0, 1)) < 1e-10);
  CHECK(basis.gram_residual() < 1e-9);
}

TEST_CASE("orthonormality against independent quadrature") {
  const BopBasis basis = BopBasis::build(8);
  for (int i = 0; i < 8; ++i)
    for (int j = i; j < 8; ++j) {
      const double q = test::gl_integrate_01(
          [&](double x) { return basis.evaluate_one(i, x) * basis.evaluate_one(j, x); },
          48);
      CHECK(std::abs(q - (i == j ? 1.0 : 0.0)) < 1e-9);
    }
}

TEST_CASE("basis evaluation vanishes at the supports") {
  const BopBasis basis = BopBasis::build(6);
  for (double x : {0.0, 10.0}) {
    const auto v = basis.evaluate(x, 10.0);
    for (double vi : v) CHECK(std::abs(vi) < 1e-10);
  }
  CHECK_THROWS(basis.evaluate(-0.1, 10.0));
  CHECK_THROWS(basis.evaluate(10.1, 10.0));
}

TEST_CASE("projection reconstructs the fundamental sine") {
  const BopBasis basis = BopBasis::build(8);
  std::vector<double> w(8);
  for (int i = 0; i < 8; ++i)
    w[static_cast<std::size_t>(i)] = test::gl_integrate_01(
        [&](double x) { return std::sin(M_PI * x) * basis.evaluate_one(i, x); }, 64);
  double worst = 0.0;
  for (int k = 0; k <= 200; ++k) {
    const double x = k / 200.0;
    double s = 0.0;
    for (int i = 0; i < 8; ++i) s += w[static_cast<std::size_t>(i)] * basis.evaluate_one(i, x);
    worst = std::max(worst, std::abs(s - std::sin(M_PI * x)));
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("completeness for the first four sines") {
  const BopBasis basis = BopBasis::build(8);
  for (int n = 1; n <= 4; ++n) {
    std::vector<double> w(8);
    for (int i = 0; i < 8; ++i)
      w[static_cast<std::size_t>(i)] = test::gl_integrate_01(
          [&](double x) { return std::sin(n * M_PI * x) * basis.evaluate_one(i, x); },
          64);
    const double res2 = test::gl_integrate_01(
        [&](double x) {
          double s = 0.0;
          for (int i = 0; i < 8; ++i)
            s += w[static_cast<std::size_t>(i)] * basis.evaluate_one(i, x);
          const double d = s - std::sin(n * M_PI * x);
          return d * d;
        },
        64);
    const double ref2 = 0.5;  // integral of sin^2 over [0,1]
    CHECK(std::sqrt(res2 / ref2) < 1e-3);
  }
}

TEST_CASE("evaluation is linear in the coefficient table") {
  const BopBasis basis = BopBasis::build(5);
  const auto table = basis.coefficients();
  for (double x : {0.137, 0.5, 0.81}) {
    for (int i = 0; i < 5; ++i) {
      CHECK(basis.evaluate_one(i, x) ==
            doctest::Approx(eval_coeffs(table[static_cast<std::size_t>(i)], x))
                .epsilon(1e-9));
    }
  }
}

TEST_CASE("rejects a non-positive count") {
  CHECK_THROWS(BopBasis::build(0));
  CHECK_THROWS(BopBasis::basic_polynomials(0));
}
