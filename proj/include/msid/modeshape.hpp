#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "msid/bop.hpp"
#include "msid/record.hpp"
#include "msid/sigproc.hpp"
#include "msid/traffic.hpp"

namespace msid {

// modal assurance criterion, invariant to independent nonzero scaling
double mac(std::span<const double> a, std::span<const double> b);

// Signed shape from a magnitude profile: the curve is segmented at interior
// near-zero dips (below 10% of the maximum) and signs alternate across
// segments, first segment positive. A multi-hump profile with no near-zero
// dip cannot be segmented; it is returned single-signed with the fallback
// flag set.
std::vector<double> assign_signs(const std::vector<double>& magnitude,
                                 bool* fallback = nullptr);

std::vector<double> normalize_unit_max(std::vector<double> shape);

struct ModeEstimate {
  double omega = 0.0;  // rad/s
  double zeta = 0.0;
};

struct FitOptions {
  int max_iterations = 200;
  double objective_tol = 1e-8;  // relative decrease per accepted step
};

struct FitResult {
  Eigen::MatrixXd weights;  // one row per fitted mode, sign-fixed
  double objective = 0.0;   // final residual 2-norm
  bool converged = false;
  int iterations = 0;
};

// Weight fit against a record under a known fixed-location force. The
// identified frequencies/damping enter the forward model; the weights enter
// through the shape values at the force location and the sensor path and
// through the modal mass, which the basis orthonormality reduces to
// m*L*|w|^2. Levenberg-Marquardt on a numerically differenced Jacobian,
// started from unit diagonal weights.
FitResult fit_bop_weights(const SensorRecord& rec,
                          const std::vector<ModeEstimate>& modes,
                          const std::vector<double>& force, double location,
                          const BopBasis& basis, double mass_per_length,
                          double length, const FitOptions& opt = {});

// Same fit under a known moving-mass stream.
FitResult fit_bop_weights(const SensorRecord& rec,
                          const std::vector<ModeEstimate>& modes,
                          const TrafficRealization& traffic,
                          const BopBasis& basis, double mass_per_length,
                          double length, const FitOptions& opt = {});

// phi(x) = sum_i w_i P_i(x/L) on the given grid
std::vector<double> shapes_from_weights(const Eigen::VectorXd& weights,
                                        const BopBasis& basis,
                                        const std::vector<double>& x_grid,
                                        double length);

// Ensemble standard deviation of a modal channel across runs, 3-point
// smoothed: proportional to |phi| along the sensor path. Needs >= 10 runs.
std::vector<double> sd_modeshape(const std::vector<std::vector<double>>& ensemble);

// Row of the evolutionary power matrix nearest the modal frequency (averaged
// with its neighbors), square-rooted and smoothed: proportional to |phi|.
std::vector<double> eps_modeshape(const EpsMatrix& eps, double omega);

}  // namespace msid
