#pragma once

#include <vector>

namespace msid {

// Orthonormal polynomial basis on [0,1] satisfying the simply supported
// boundary conditions p(0)=p(1)=p''(0)=p''(1)=0.
//
// Construction starts from boundary-constrained monomial combinations
// (a cubic correction plus the monomial x^{m+i-1}, m = 4 constraints) and
// orthonormalizes them by modified Gram-Schmidt under the inner product
// <f,g> = integral_0^1 f g dx. Inner products are evaluated exactly from the
// monomial exponents (integral of x^k is 1/(k+1)). The monomial
// representation of an L2-orthonormal family is badly conditioned, so the
// table is built and kept in quad precision; only results are rounded to
// double.
class BopBasis {
 public:
  // raw constrained polynomials, lowest first; [i][k] = coefficient of x^k
  static std::vector<std::vector<double>> basic_polynomials(int count);

  static BopBasis build(int count);

  int size() const { return static_cast<int>(table_.size()); }

  // [P1(x/L), ..., Pn(x/L)]; throws if x is off the span
  std::vector<double> evaluate(double x, double length) const;

  double evaluate_one(int index, double xi) const;  // 0-based, xi in [0,1]

  // d^2/dxi^2, for boundary-condition checks
  double second_derivative_one(int index, double xi) const;

  // <Pi, Pj> on [0,1] (0-based indices)
  double inner_product(int i, int j) const;

  // max |Gram - I| entry, for invariant checks
  double gram_residual() const;

  std::vector<std::vector<double>> coefficients() const;  // rounded table

 private:
  std::vector<std::vector<__float128>> table_;
};

}  // namespace msid
