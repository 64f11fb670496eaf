#pragma once

#include <complex>
#include <vector>

#include "msid/beam.hpp"
#include "msid/record.hpp"
#include "msid/rng.hpp"
#include "msid/traffic.hpp"

namespace msid {

constexpr double kGravity = 9.81;  // m/s^2

// Running convolutions Is = int f(tau) e^{-zw(t-tau)} sin(wd(t-tau)) dtau and
// the matching cosine integral, updated one step at a time. The forcing is
// taken piecewise linear between samples and the per-step integral is exact,
// so no error accumulates over long records.
class ModalConvolution {
 public:
  ModalConvolution(double omega, double zeta, double dt);

  void step(double f_next);   // advance by dt to the next forcing sample
  void reset(double f_start);

  double is() const { return state_.imag(); }
  double ic() const { return state_.real(); }

 private:
  std::complex<double> state_{0.0, 0.0};  // Ic + i*Is
  std::complex<double> rot_, w0_, w1_;    // e^{z h}, step-integral weights
  double f_prev_ = 0.0;
  double dt_ = 0.0;
};

// acceleration bracket per mode: f(t) - (1-2z^2)/sqrt(1-z^2)*w*Is - 2zw*Ic,
// all scaled by 1/Mn and the shape factors by the callers
double accel_bracket(const ModalModel& modal, int n, double f_now, double is,
                     double ic);

// Response to a known force series applied at a fixed location, sampled by
// the moving sensor. The force is sampled on the same dt grid from t = 0 and
// must cover the trajectory. Modal channels are retained.
SensorRecord duhamel_fixed_force(const ModalModel& modal,
                                 const std::vector<double>& force, double force_dt,
                                 double location, const SensorTrajectory& traj);

// Per-mode generalized-coordinate accelerations for a moving-mass stream,
// on the grid t_start + k*dt. Includes free-vibration tails of departed
// masses. Row n-1 holds mode n.
std::vector<std::vector<double>> modal_qddot(const ModalModel& modal,
                                             const TrafficRealization& traffic,
                                             double t_start, double dt,
                                             int n_steps);

// Massless moving-load response sampled by the moving sensor; modal channels
// u_n = phi_n(x_I) * qddot_n are retained.
SensorRecord duhamel_moving_masses(const ModalModel& modal,
                                   const TrafficRealization& traffic,
                                   const SensorTrajectory& traj);

// Adds zero-mean white Gaussian noise with SD = fraction * RMS(acc) to the
// measured channel (modal channels stay clean).
SensorRecord add_noise(const SensorRecord& rec, double rms_fraction, Rng& rng);

}  // namespace msid
