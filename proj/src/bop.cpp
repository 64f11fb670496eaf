#include "msid/bop.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace msid {

namespace {

using quad = __float128;

constexpr int kConstraints = 4;  // w and w'' fixed at both ends

// integral_0^1 of the product of two monomial-coefficient polynomials
quad inner(const std::vector<quad>& a, const std::vector<quad>& b) {
  quad s = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] == 0) continue;
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (b[k] == 0) continue;
      s += a[j] * b[k] / quad(j + k + 1);
    }
  }
  return s;
}

quad quad_sqrt(quad v) {
  // Newton refinement from a long double seed; plain arithmetic only.
  quad x = quad(std::sqrt(static_cast<long double>(v)));
  for (int it = 0; it < 3; ++it) x = (x + v / x) / quad(2);
  return x;
}

// Constrained polynomial number i (1-based): cubic correction solving the
// four end conditions, plus the monomial x^{m+i-1}.
std::vector<quad> raw_polynomial(int i) {
  const int m = kConstraints;
  const int deg = m + i - 1;
  // Constraint system rows at x0=0, x1=1: value and second derivative of the
  // cubic correction must cancel those of x^{m+i-1}.
  //   [1 0 0 0][p] = 0          (value at 0)
  //   [0 0 2 0][p] = 0          (curvature at 0)
  //   [1 1 1 1][p] = -1         (value at 1)
  //   [0 0 2 6][p] = -(m+i-1)(m+i-2)  (curvature at 1)
  const quad q3 = -quad((m + i - 1) * (m + i - 2));
  const quad p1 = 0;
  const quad p3 = 0;
  const quad p4 = (q3 - 2 * p3) / quad(6);
  const quad p2 = quad(-1) - p1 - p3 - p4;

  std::vector<quad> c(static_cast<std::size_t>(deg) + 1, quad(0));
  c[0] = p1;
  c[1] = p2;
  c[2] = p3;
  c[3] = p4;
  c[static_cast<std::size_t>(deg)] += quad(1);

  // back-substituted solve; verify the constraint rows
  assert(static_cast<double>(p1) == 0.0);
  assert(static_cast<double>(2 * p3) == 0.0);
  assert(std::abs(static_cast<double>(p1 + p2 + p3 + p4 + 1)) < 1e-30);
  assert(std::abs(static_cast<double>(2 * p3 + 6 * p4 - q3)) < 1e-30);
  return c;
}

}  // namespace

std::vector<std::vector<double>> BopBasis::basic_polynomials(int count) {
  if (count < 1) throw std::invalid_argument("basic_polynomials: count >= 1");
  std::vector<std::vector<double>> out;
  for (int i = 1; i <= count; ++i) {
    auto c = raw_polynomial(i);
    std::vector<double> d(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) d[k] = static_cast<double>(c[k]);
    out.push_back(std::move(d));
  }
  return out;
}

BopBasis BopBasis::build(int count) {
  if (count < 1) throw std::invalid_argument("BopBasis: count >= 1");
  BopBasis basis;
  for (int i = 1; i <= count; ++i) {
    std::vector<quad> v = raw_polynomial(i);
    v.resize(static_cast<std::size_t>(kConstraints + count), quad(0));
    // two orthogonalization passes keep the basis orthogonal despite the
    // monomial representation's conditioning
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : basis.table_) {
        quad c = inner(v, q);
        for (std::size_t k = 0; k < q.size(); ++k) v[k] -= c * q[k];
      }
    }
    const quad nrm2 = inner(v, v);
    if (static_cast<double>(nrm2) < 1e-24)
      throw std::runtime_error("BopBasis: rank deficiency in orthogonalization");
    const quad nrm = quad_sqrt(nrm2);
    for (auto& c : v) c /= nrm;
    basis.table_.push_back(std::move(v));
  }
  return basis;
}

std::vector<double> BopBasis::evaluate(double x, double length) const {
  if (x < -1e-12 || x > length + 1e-12)
    throw std::out_of_range("BopBasis::evaluate: x off span");
  const double xi = std::min(std::max(x / length, 0.0), 1.0);
  std::vector<double> out(table_.size());
  for (std::size_t i = 0; i < table_.size(); ++i)
    out[i] = evaluate_one(static_cast<int>(i), xi);
  return out;
}

double BopBasis::evaluate_one(int index, double xi) const {
  const auto& c = table_.at(static_cast<std::size_t>(index));
  quad acc = 0;
  const quad q = quad(xi);
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * q + c[k];
  return static_cast<double>(acc);
}

double BopBasis::second_derivative_one(int index, double xi) const {
  const auto& c = table_.at(static_cast<std::size_t>(index));
  quad acc = 0;
  const quad q = quad(xi);
  for (std::size_t k = c.size(); k-- > 2;)
    acc = acc * q + c[k] * quad(k) * quad(k - 1);
  return static_cast<double>(acc);
}

double BopBasis::inner_product(int i, int j) const {
  return static_cast<double>(inner(table_.at(static_cast<std::size_t>(i)),
                                   table_.at(static_cast<std::size_t>(j))));
}

double BopBasis::gram_residual() const {
  double worst = 0.0;
  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < size(); ++j) {
      const double g = inner_product(i, j) - (i == j ? 1.0 : 0.0);
      worst = std::max(worst, std::abs(g));
    }
  return worst;
}

std::vector<std::vector<double>> BopBasis::coefficients() const {
  std::vector<std::vector<double>> out;
  for (const auto& row : table_) {
    std::vector<double> d(row.size());
    for (std::size_t k = 0; k < row.size(); ++k) d[k] = static_cast<double>(row[k]);
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace msid
