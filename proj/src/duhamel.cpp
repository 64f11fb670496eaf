#include "msid/duhamel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "msid/stats.hpp"

namespace msid {

ModalConvolution::ModalConvolution(double omega, double zeta, double dt)
    : dt_(dt) {
  if (omega <= 0.0 || dt <= 0.0)
    throw std::invalid_argument("ModalConvolution: omega, dt > 0");
  const double a = zeta * omega;
  const double b = omega * std::sqrt(1.0 - zeta * zeta);
  const std::complex<double> z(-a, b);
  const std::complex<double> ezh = std::exp(z * dt);
  rot_ = ezh;
  const std::complex<double> i0 = (ezh - 1.0) / z;
  const std::complex<double> i1 = ((z * dt - 1.0) * ezh + 1.0) / (z * z);
  // forcing linear between samples: f(t+h-u) = f_next - (f_next-f_prev)*u/h
  w1_ = i0 - i1 / dt;  // weight of the new sample
  w0_ = i1 / dt;       // weight of the previous sample
}

void ModalConvolution::step(double f_next) {
  state_ = state_ * rot_ + w0_ * f_prev_ + w1_ * f_next;
  f_prev_ = f_next;
}

void ModalConvolution::reset(double f_start) {
  state_ = {0.0, 0.0};
  f_prev_ = f_start;
}

double accel_bracket(const ModalModel& modal, int n, double f_now, double is,
                     double ic) {
  const double z = modal.zeta(n);
  const double w = modal.omega(n);
  const double c1 = (1.0 - 2.0 * z * z) / std::sqrt(1.0 - z * z);
  return f_now - c1 * w * is - 2.0 * z * w * ic;
}

SensorRecord duhamel_fixed_force(const ModalModel& modal,
                                 const std::vector<double>& force, double force_dt,
                                 double location, const SensorTrajectory& traj) {
  traj.validate(modal.length());
  if (location <= 0.0 || location >= modal.length())
    throw std::invalid_argument("duhamel_fixed_force: location inside span");
  if (std::abs(force_dt - traj.dt) > 1e-12 * traj.dt)
    throw std::invalid_argument("duhamel_fixed_force: force grid must match dt");
  if (traj.entry_time < -1e-12)
    throw std::invalid_argument("duhamel_fixed_force: entry before force start");

  const int k_entry = static_cast<int>(std::llround(traj.entry_time / traj.dt));
  if (std::abs(k_entry * traj.dt - traj.entry_time) > 1e-9)
    throw std::invalid_argument("duhamel_fixed_force: entry_time off the grid");
  const int k_last = k_entry + traj.n_samples - 1;
  if (static_cast<int>(force.size()) < k_last + 1)
    throw std::invalid_argument("duhamel_fixed_force: force series shorter than trajectory");

  const int nm = modal.n_modes();
  std::vector<ModalConvolution> conv;
  conv.reserve(static_cast<std::size_t>(nm));
  for (int n = 1; n <= nm; ++n) {
    conv.emplace_back(modal.omega(n), modal.zeta(n), traj.dt);
    conv.back().reset(force[0]);
  }

  SensorRecord rec;
  rec.scenario = "fixed-force";
  rec.modal.assign(static_cast<std::size_t>(nm), {});
  for (int k = 0; k <= k_last; ++k) {
    if (k > 0)
      for (auto& c : conv) c.step(force[static_cast<std::size_t>(k)]);
    if (k < k_entry) continue;
    const int j = k - k_entry;
    const double x = traj.position(j);
    rec.time.push_back(traj.time(j));
    rec.position.push_back(x);
    double total = 0.0;
    for (int n = 1; n <= nm; ++n) {
      const auto& c = conv[static_cast<std::size_t>(n - 1)];
      const double bracket =
          accel_bracket(modal, n, force[static_cast<std::size_t>(k)], c.is(), c.ic());
      const double u = modal.shape(n, location) / modal.modal_mass(n) * bracket *
                       modal.shape(n, x);
      rec.modal[static_cast<std::size_t>(n - 1)].push_back(u);
      total += u;
    }
    rec.acc.push_back(total);
  }
  return rec;
}

std::vector<std::vector<double>> modal_qddot(const ModalModel& modal,
                                             const TrafficRealization& traffic,
                                             double t_start, double dt,
                                             int n_steps) {
  if (dt <= 0.0 || n_steps < 1)
    throw std::invalid_argument("modal_qddot: bad grid");
  traffic.validate();
  for (const auto& v : traffic.vehicles)
    if (v.arrival < t_start - 1e-9)
      throw std::invalid_argument("modal_qddot: arrivals precede the grid start");

  const int nm = modal.n_modes();
  const double span = modal.length();
  std::vector<std::vector<double>> q(static_cast<std::size_t>(nm));
  for (auto& row : q) row.resize(static_cast<std::size_t>(n_steps));

  std::vector<ModalConvolution> conv;
  conv.reserve(static_cast<std::size_t>(nm));
  for (int n = 1; n <= nm; ++n)
    conv.emplace_back(modal.omega(n), modal.zeta(n), dt);

  // combined per-mode forcing of all on-span masses; each mass's forcing
  // vanishes continuously at its entry and exit
  auto forcing = [&](int n, double t) {
    double g = 0.0;
    for (const auto& v : traffic.vehicles) {
      if (!v.on_span(t, span)) continue;
      g += v.mass * kGravity * modal.shape(n, v.position(t, span));
    }
    return g;
  };

  for (int n = 1; n <= nm; ++n)
    conv[static_cast<std::size_t>(n - 1)].reset(forcing(n, t_start));

  for (int k = 0; k < n_steps; ++k) {
    const double t = t_start + k * dt;
    for (int n = 1; n <= nm; ++n) {
      auto& c = conv[static_cast<std::size_t>(n - 1)];
      const double f = forcing(n, t);
      if (k > 0) c.step(f);
      q[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(k)] =
          accel_bracket(modal, n, f, c.is(), c.ic()) / modal.modal_mass(n);
    }
  }
  return q;
}

SensorRecord duhamel_moving_masses(const ModalModel& modal,
                                   const TrafficRealization& traffic,
                                   const SensorTrajectory& traj) {
  traj.validate(modal.length());
  double t_start = traj.entry_time;
  for (const auto& v : traffic.vehicles) t_start = std::min(t_start, v.arrival);
  const int k0 = static_cast<int>(std::ceil((traj.entry_time - t_start) / traj.dt - 1e-9));
  const double grid_start = traj.entry_time - k0 * traj.dt;
  const int n_steps = k0 + traj.n_samples;

  const auto q = modal_qddot(modal, traffic, grid_start, traj.dt, n_steps);

  const int nm = modal.n_modes();
  SensorRecord rec;
  rec.scenario = "moving-mass";
  rec.modal.assign(static_cast<std::size_t>(nm), {});
  for (int j = 0; j < traj.n_samples; ++j) {
    const double x = traj.position(j);
    rec.time.push_back(traj.time(j));
    rec.position.push_back(x);
    double total = 0.0;
    for (int n = 1; n <= nm; ++n) {
      const double u = modal.shape(n, x) *
                       q[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(j + k0)];
      rec.modal[static_cast<std::size_t>(n - 1)].push_back(u);
      total += u;
    }
    rec.acc.push_back(total);
  }
  return rec;
}

SensorRecord add_noise(const SensorRecord& rec, double rms_fraction, Rng& rng) {
  if (rms_fraction < 0.0)
    throw std::invalid_argument("add_noise: fraction >= 0");
  SensorRecord out = rec;
  if (rms_fraction == 0.0 || rec.acc.empty()) return out;
  const double sd = rms_fraction * rms(rec.acc);
  if (sd == 0.0) return out;
  for (auto& a : out.acc) a += sd * rng.normal();
  return out;
}

}  // namespace msid
