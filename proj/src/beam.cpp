#include "msid/beam.hpp"

#include <cmath>
#include <stdexcept>

namespace msid {

DampingSpec DampingSpec::uniform_ratio(double zeta, int n_modes) {
  DampingSpec d;
  d.ratios.assign(static_cast<std::size_t>(n_modes), zeta);
  return d;
}

DampingSpec DampingSpec::rayleigh(double alpha, double beta) {
  DampingSpec d;
  d.alpha = alpha;
  d.beta = beta;
  d.use_rayleigh = true;
  return d;
}

void BeamSpec::validate() const {
  if (length <= 0.0) throw std::invalid_argument("beam: length must be > 0");
  if (mass_per_length <= 0.0)
    throw std::invalid_argument("beam: mass per length must be > 0");
  if (flexural_rigidity <= 0.0)
    throw std::invalid_argument("beam: flexural rigidity must be > 0");
  if (n_modes < 1) throw std::invalid_argument("beam: need at least one mode");
  if (!damping.use_rayleigh) {
    if (static_cast<int>(damping.ratios.size()) < n_modes)
      throw std::invalid_argument("beam: damping ratio per mode required");
    for (double z : damping.ratios)
      if (z < 0.0 || z >= 1.0)
        throw std::invalid_argument("beam: damping ratios must be in [0,1)");
  }
}

double natural_frequency(const BeamSpec& beam, int n) {
  if (n < 1) throw std::invalid_argument("natural_frequency: n >= 1");
  const double k = n * M_PI / beam.length;
  return k * k * std::sqrt(beam.flexural_rigidity / beam.mass_per_length);
}

double mode_shape_analytic(int n, double x, double length) {
  if (x < -1e-12 || x > length + 1e-12)
    throw std::out_of_range("mode_shape_analytic: x off span");
  return std::sin(n * M_PI * x / length);
}

double modal_mass(const BeamSpec& beam, int n) {
  (void)n;  // identical for every sine mode of a uniform beam
  return beam.mass_per_length * beam.length / 2.0;
}

std::pair<double, double> rayleigh_from_targets(
    const std::vector<double>& omegas, const std::vector<double>& zetas) {
  if (omegas.size() != zetas.size() || omegas.size() < 2)
    throw std::invalid_argument("rayleigh_from_targets: need >= 2 modes");
  bool distinct = false;
  for (std::size_t i = 1; i < omegas.size(); ++i)
    if (omegas[i] != omegas[0]) distinct = true;
  if (!distinct)
    throw std::invalid_argument("rayleigh_from_targets: frequencies coincide");

  // normal equations for the 2-parameter model zeta(w) = a/(2w) + b*w/2
  double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    const double c1 = 1.0 / (2.0 * omegas[i]);
    const double c2 = omegas[i] / 2.0;
    s11 += c1 * c1;
    s12 += c1 * c2;
    s22 += c2 * c2;
    r1 += c1 * zetas[i];
    r2 += c2 * zetas[i];
  }
  const double det = s11 * s22 - s12 * s12;
  if (std::abs(det) < 1e-300)
    throw std::invalid_argument("rayleigh_from_targets: singular fit");
  double alpha = (r1 * s22 - r2 * s12) / det;
  double beta = (s11 * r2 - s12 * r1) / det;

  // Linear least squares over-weights the high-frequency modes when the set
  // spans several octaves and lets the mid-band ratio sag far below the
  // target. Refine on log residuals, which bounds the relative misfit; the
  // two-mode case stays an exact interpolation either way.
  bool positive = true;
  for (double z : zetas) positive = positive && z > 0.0;
  if (positive) {
    for (int it = 0; it < 60; ++it) {
      double j11 = 0, j12 = 0, j22 = 0, g1 = 0, g2 = 0;
      bool valid = true;
      for (std::size_t i = 0; i < omegas.size(); ++i) {
        const double f = rayleigh_ratio(alpha, beta, omegas[i]);
        if (f <= 0.0) {
          valid = false;
          break;
        }
        const double r = std::log(f / zetas[i]);
        const double c1 = 1.0 / (2.0 * omegas[i] * f);
        const double c2 = omegas[i] / (2.0 * f);
        j11 += c1 * c1;
        j12 += c1 * c2;
        j22 += c2 * c2;
        g1 += c1 * r;
        g2 += c2 * r;
      }
      if (!valid) break;
      const double d = j11 * j22 - j12 * j12;
      if (std::abs(d) < 1e-300) break;
      const double da = -(g1 * j22 - g2 * j12) / d;
      const double db = -(j11 * g2 - j12 * g1) / d;
      alpha += da;
      beta += db;
      if (std::abs(da) < 1e-14 * (1.0 + std::abs(alpha)) &&
          std::abs(db) < 1e-14 * (1.0 + std::abs(beta)))
        break;
    }
  }
  return {alpha, beta};
}

ModalModel ModalModel::from_spec(const BeamSpec& beam) {
  beam.validate();
  ModalModel m;
  m.length_ = beam.length;
  for (int n = 1; n <= beam.n_modes; ++n) {
    const double w = natural_frequency(beam, n);
    double z;
    if (beam.damping.use_rayleigh)
      z = rayleigh_ratio(beam.damping.alpha, beam.damping.beta, w);
    else
      z = beam.damping.ratios[static_cast<std::size_t>(n - 1)];
    if (z < 0.0 || z >= 1.0)
      throw std::invalid_argument("modal model: damping ratio out of [0,1)");
    m.omega_.push_back(w);
    m.zeta_.push_back(z);
    m.omega_d_.push_back(w * std::sqrt(1.0 - z * z));
    m.modal_mass_.push_back(msid::modal_mass(beam, n));
  }
  return m;
}

double ModalModel::shape(int n, double x) const {
  return mode_shape_analytic(n, x, length_);
}

}  // namespace msid
