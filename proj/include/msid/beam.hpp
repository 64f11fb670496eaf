#pragma once

#include <utility>
#include <vector>

namespace msid {

// Damping given either as per-mode ratios (lowest mode first) or as a
// Rayleigh pair C = alpha*M + beta*K.
struct DampingSpec {
  std::vector<double> ratios;
  double alpha = 0.0;
  double beta = 0.0;
  bool use_rayleigh = false;

  static DampingSpec uniform_ratio(double zeta, int n_modes);
  static DampingSpec rayleigh(double alpha, double beta);
};

// Uniform simply supported Euler-Bernoulli beam.
struct BeamSpec {
  double length = 0.0;            // m
  double mass_per_length = 0.0;   // kg/m
  double flexural_rigidity = 0.0; // N*m^2
  int n_modes = 4;
  DampingSpec damping;

  void validate() const;  // throws std::invalid_argument
};

// (n*pi/L)^2 * sqrt(EI/m), n >= 1
double natural_frequency(const BeamSpec& beam, int n);

// sin(n*pi*x/L); the reference "true" shape for a uniform simply supported
// beam. Throws if x is off the span.
double mode_shape_analytic(int n, double x, double length);

// integral m*sin^2 over the span = m*L/2 for every mode
double modal_mass(const BeamSpec& beam, int n);

// Least-squares (alpha, beta) so that alpha/(2w) + beta*w/2 tracks the target
// ratios at the given frequencies. Needs at least two distinct frequencies.
std::pair<double, double> rayleigh_from_targets(
    const std::vector<double>& omegas, const std::vector<double>& zetas);

inline double rayleigh_ratio(double alpha, double beta, double omega) {
  return alpha / (2.0 * omega) + beta * omega / 2.0;
}

// Analytic modal representation: frequencies, damping, modal masses and the
// sine shape evaluator. Immutable once built.
class ModalModel {
 public:
  static ModalModel from_spec(const BeamSpec& beam);

  int n_modes() const { return static_cast<int>(omega_.size()); }
  double length() const { return length_; }
  double omega(int n) const { return omega_.at(n - 1); }      // rad/s
  double omega_d(int n) const { return omega_d_.at(n - 1); }  // rad/s
  double zeta(int n) const { return zeta_.at(n - 1); }
  double modal_mass(int n) const { return modal_mass_.at(n - 1); }  // kg
  double shape(int n, double x) const;

 private:
  double length_ = 0.0;
  std::vector<double> omega_, omega_d_, zeta_, modal_mass_;
};

}  // namespace msid
