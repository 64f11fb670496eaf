#pragma once

#include <Eigen/Dense>
#include <array>

#include "msid/beam.hpp"

namespace msid {

// Cubic Hermite shape functions on [0, le], DOF order
// [w_left, theta_left, w_right, theta_right].
std::array<double, 4> hermite_shape(double xi, double le);
std::array<double, 4> hermite_shape_deriv(double xi, double le);  // d/dx

// Simply supported FE beam: consistent-mass Hermite elements, end
// translations constrained, C = alpha*M + beta*K. Matrices live on the
// active DOFs. Immutable after assembly.
struct FeBeam {
  int n_elements = 0;
  double element_length = 0.0;
  double length = 0.0;
  double alpha = 0.0, beta = 0.0;  // Rayleigh pair actually applied
  Eigen::MatrixXd mass, stiffness, damping;
  std::vector<int> active_index;  // full DOF index -> active index, -1 if fixed

  int n_active() const { return static_cast<int>(mass.rows()); }
  int n_full() const { return 2 * (n_elements + 1); }

  // element index and local coordinate of a span position
  int locate(double x, double& xi) const;

  // active-DOF column of shape-function values (or derivatives) at x
  Eigen::VectorXd shape_column(double x, bool derivative = false) const;
};

// Full (unconstrained) consistent mass and stiffness, for tests and assembly.
void fe_full_matrices(const BeamSpec& beam, int n_elements,
                      Eigen::MatrixXd& mass, Eigen::MatrixXd& stiffness);

// n_elements >= 4. Per-mode damping specs are converted to a Rayleigh pair by
// least squares over the analytic frequencies of the spec's modes.
FeBeam fe_assemble(const BeamSpec& beam, int n_elements);

struct FeModes {
  Eigen::VectorXd omega;     // rad/s, ascending
  Eigen::MatrixXd vectors;   // active DOFs x count, mass-orthonormal
};

FeModes fe_eigen_modes(const FeBeam& fe, int count);

Eigen::VectorXd fe_static_solve(const FeBeam& fe, const Eigen::VectorXd& load);

}  // namespace msid
