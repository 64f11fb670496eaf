#include "msid/roughness.hpp"

#include <cmath>
#include <stdexcept>

#include "msid/rng.hpp"

namespace msid {

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;
}

std::pair<double, double> RoughnessProfile::evaluate(double x) const {
  if (x < 0.0) throw std::invalid_argument("roughness: x >= 0");
  double r = 0.0, slope = 0.0;
  for (std::size_t i = 0; i < amplitude.size(); ++i) {
    const double arg = kTwoPi * frequency[i] * x + phase[i];
    r += amplitude[i] * std::cos(arg);
    slope -= amplitude[i] * kTwoPi * frequency[i] * std::sin(arg);
  }
  return {r, slope};
}

RoughnessProfile generate_profile(const RoughnessModel& model, std::uint64_t seed) {
  if (model.dkappa <= 0.0 || model.kappa_min <= 0.0 ||
      model.kappa_max < model.kappa_min)
    throw std::invalid_argument("roughness: bad frequency range");
  RoughnessProfile p;
  p.psd_level = model.psd_level;
  p.reference_frequency = model.kappa0;
  p.exponent = model.exponent;
  Rng rng(seed);
  const int n =
      static_cast<int>(std::floor((model.kappa_max - model.kappa_min) / model.dkappa + 1e-9)) + 1;
  for (int i = 0; i < n; ++i) {
    const double kappa = model.kappa_min + i * model.dkappa;
    const double gd =
        model.psd_level * std::pow(kappa / model.kappa0, -model.exponent);
    p.frequency.push_back(kappa);
    p.amplitude.push_back(std::sqrt(2.0 * gd * model.dkappa));
    p.phase.push_back(rng.uniform(0.0, kTwoPi));
  }
  return p;
}

RoughnessTracker::RoughnessTracker(const RoughnessProfile& profile, double x0,
                                   double dx) {
  const std::size_t n = profile.amplitude.size();
  cos_.resize(n);
  sin_.resize(n);
  rot_c_.resize(n);
  rot_s_.resize(n);
  amp_.resize(n);
  amp_slope_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double arg = kTwoPi * profile.frequency[i] * x0 + profile.phase[i];
    cos_[i] = std::cos(arg);
    sin_[i] = std::sin(arg);
    const double step = kTwoPi * profile.frequency[i] * dx;
    rot_c_[i] = std::cos(step);
    rot_s_[i] = std::sin(step);
    amp_[i] = profile.amplitude[i];
    amp_slope_[i] = profile.amplitude[i] * kTwoPi * profile.frequency[i];
  }
}

std::pair<double, double> RoughnessTracker::next() {
  if (!first_) {
    for (std::size_t i = 0; i < cos_.size(); ++i) {
      const double c = cos_[i] * rot_c_[i] - sin_[i] * rot_s_[i];
      const double s = sin_[i] * rot_c_[i] + cos_[i] * rot_s_[i];
      cos_[i] = c;
      sin_[i] = s;
    }
  }
  first_ = false;
  double r = 0.0, slope = 0.0;
  for (std::size_t i = 0; i < cos_.size(); ++i) {
    r += amp_[i] * cos_[i];
    slope -= amp_slope_[i] * sin_[i];
  }
  return {r, slope};
}

}  // namespace msid
