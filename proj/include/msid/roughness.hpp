#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace msid {

// Harmonic road-surface field r(x) = sum_i d_i cos(2*pi*kappa_i*x + theta_i).
// Spatial frequencies are in cycle/m; the 2*pi factor in the argument keeps
// the amplitude rule and the cycle/m PSD consistent (pinned by the PSD
// property test). Phases are frozen at generation, so evaluation is
// deterministic and reentrant.
struct RoughnessProfile {
  std::vector<double> amplitude;  // d_i, m
  std::vector<double> frequency;  // kappa_i, cycle/m, strictly increasing
  std::vector<double> phase;      // theta_i in [0, 2*pi)
  double psd_level = 0.0;         // G_d(kappa0), m^3
  double reference_frequency = 0.1;  // kappa0, cycle/m
  double exponent = 2.0;          // w

  // (r, dr/dx) evaluated analytically
  std::pair<double, double> evaluate(double x) const;
};

struct RoughnessModel {
  double psd_level = 0.0;  // G_d(kappa0); 0 gives a smooth road
  double kappa_min = 1.0;
  double kappa_max = 100.0;
  double dkappa = 0.04;
  double kappa0 = 0.1;
  double exponent = 2.0;
};

// d_i = sqrt(2 * G_d(kappa0) * (kappa_i/kappa0)^-w * dkappa), theta_i ~ U[0,2pi)
RoughnessProfile generate_profile(const RoughnessModel& model, std::uint64_t seed);

// Streams (r, r') at x0, x0+dx, x0+2*dx, ... using per-harmonic rotation
// recurrences: analytic evaluation without per-step trig calls. Matches
// RoughnessProfile::evaluate to rounding.
class RoughnessTracker {
 public:
  RoughnessTracker(const RoughnessProfile& profile, double x0, double dx);
  std::pair<double, double> next();

 private:
  std::vector<double> cos_, sin_, rot_c_, rot_s_, amp_, amp_slope_;
  bool first_ = true;
};

}  // namespace msid
