#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "msid/duhamel.hpp"
#include "msid/stats.hpp"

using namespace msid;

namespace {

BeamSpec lab_beam(int n_modes = 4, double zeta = 0.02) {
  BeamSpec b;
  b.length = 10.0;
  b.mass_per_length = 6.1;
  b.flexural_rigidity = 152.67e3;
  b.n_modes = n_modes;
  b.damping = DampingSpec::uniform_ratio(zeta, n_modes);
  return b;
}

}  // namespace

TEST_CASE("zero force gives a zero record") {
  const ModalModel modal = ModalModel::from_spec(lab_beam());
  const auto traj = SensorTrajectory::crossing(10.0, 1.0, 0.001);
  std::vector<double> force(static_cast<std::size_t>(traj.n_samples), 0.0);
  const SensorRecord rec = duhamel_fixed_force(modal, force, 0.001, 2.0, traj);
  CHECK(max_abs(rec.acc) == 0.0);
}

TEST_CASE("midspan forcing leaves the even modes silent") {
  const ModalModel modal = ModalModel::from_spec(lab_beam());
  const auto traj = SensorTrajectory::crossing(10.0, 1.0, 0.001);
  Rng rng(5);
  std::vector<double> force(static_cast<std::size_t>(traj.n_samples));
  for (auto& f : force) f = rng.normal();
  const SensorRecord rec = duhamel_fixed_force(modal, force, 0.001, 5.0, traj);
  CHECK(max_abs(rec.modal[1]) < 1e-12 * max_abs(rec.acc));
  CHECK(max_abs(rec.modal[3]) < 1e-12 * max_abs(rec.acc));
  CHECK(max_abs(rec.modal[0]) > 0.0);
  CHECK(max_abs(rec.modal[2]) > 0.0);
}

TEST_CASE("stepped convolution matches fine trapezoid quadrature") {
  const double omega = 15.61, zeta = 0.02, dt = 1e-3;
  // discrete pulse, piecewise linear between samples
  const int n = 3000;
  std::vector<double> f(static_cast<std::size_t>(n), 0.0);
  f[0] = 1.0;
  f[700] = -0.4;  // second kick mid-record
  ModalConvolution conv(omega, zeta, dt);
  conv.reset(f[0]);
  auto f_lin = [&](double t) {
    const double k = t / dt;
    const int k0 = static_cast<int>(std::floor(k));
    if (k0 < 0 || k0 >= n - 1) return 0.0;
    const double a = k - k0;
    return (1.0 - a) * f[static_cast<std::size_t>(k0)] +
           a * f[static_cast<std::size_t>(k0 + 1)];
  };
  const double a = zeta * omega, b = omega * std::sqrt(1.0 - zeta * zeta);
  double max_is = 0.0, max_err = 0.0;
  for (int k = 1; k < n; ++k) {
    conv.step(f[static_cast<std::size_t>(k)]);
    if (k % 250 != 0) continue;
    const double t = k * dt;
    // trapezoid at 100x finer steps
    const double h = dt / 100.0;
    const int m = k * 100;
    double is = 0.0;
    for (int j = 0; j <= m; ++j) {
      const double tau = j * h;
      const double w = (j == 0 || j == m) ? 0.5 : 1.0;
      is += w * f_lin(tau) * std::exp(-a * (t - tau)) * std::sin(b * (t - tau));
    }
    is *= h;
    max_is = std::max(max_is, std::abs(is));
    max_err = std::max(max_err, std::abs(is - conv.is()));
  }
  CHECK(max_err < 1e-6 * max_is);
}

TEST_CASE("moving-mass modal response matches an adaptive ODE oracle") {
  const BeamSpec spec = lab_beam();
  const ModalModel modal = ModalModel::from_spec(spec);
  const auto traffic = scripted_stream({1.0}, {1.0}, {0.0});
  const double dt = 1e-3;
  const int n = 15000;
  const auto q = modal_qddot(modal, traffic, 0.0, dt, n);
  for (int mode = 1; mode <= 4; ++mode) {
    auto p = [&](double t) {
      const auto& v = traffic.vehicles[0];
      if (!v.on_span(t, spec.length)) return 0.0;
      return v.mass * kGravity *
             mode_shape_analytic(mode, v.position(t, spec.length), spec.length) /
             modal_mass(spec, mode);
    };
    const auto trace = test::integrate_oscillator(modal.omega(mode),
                                                  modal.zeta(mode), p, 0.0, dt, n);
    const double err = rms_diff(q[static_cast<std::size_t>(mode - 1)], trace.qdd);
    CHECK(err < 0.005 * rms(trace.qdd));
  }
}

TEST_CASE("a long-departed mass leaves almost no trace") {
  BeamSpec spec = lab_beam(4, 0.2);  // heavy damping
  const ModalModel modal = ModalModel::from_spec(spec);
  // crossing finishes at t=1, sensor enters at t=20
  const auto traffic = scripted_stream({1.0}, {10.0}, {0.0});
  auto traj = SensorTrajectory::crossing(10.0, 1.0, 0.001, 20.0);
  const SensorRecord rec = duhamel_moving_masses(modal, traffic, traj);
  // compare with the response level while the mass was crossing
  auto traj0 = SensorTrajectory::crossing(10.0, 10.0, 0.001, 0.0);
  const SensorRecord rec0 = duhamel_moving_masses(modal, traffic, traj0);
  CHECK(max_abs(rec.acc) < 1e-9 * max_abs(rec0.acc));
}

TEST_CASE("superposition of two streams") {
  const ModalModel modal = ModalModel::from_spec(lab_beam());
  const auto t1 = scripted_stream({1.0, 2.0}, {1.0, 2.0}, {0.0, 1.0});
  const auto t2 = scripted_stream({0.5}, {1.5}, {0.7});
  TrafficRealization merged;
  merged.vehicles = t1.vehicles;
  for (const auto& v : t2.vehicles) merged.vehicles.push_back(v);
  std::stable_sort(merged.vehicles.begin(), merged.vehicles.end(),
                   [](const Vehicle& a, const Vehicle& b) { return a.arrival < b.arrival; });
  const auto traj = SensorTrajectory::crossing(10.0, 1.0, 0.002);
  const SensorRecord ra = duhamel_moving_masses(modal, t1, traj);
  const SensorRecord rb = duhamel_moving_masses(modal, t2, traj);
  const SensorRecord rm = duhamel_moving_masses(modal, merged, traj);
  double worst = 0.0;
  for (int k = 0; k < rm.size(); ++k)
    worst = std::max(worst, std::abs(rm.acc[static_cast<std::size_t>(k)] -
                                     ra.acc[static_cast<std::size_t>(k)] -
                                     rb.acc[static_cast<std::size_t>(k)]));
  CHECK(worst < 1e-12 * std::max(1.0, max_abs(rm.acc)));
}

TEST_CASE("modal channels factor and sum exactly") {
  const BeamSpec spec = lab_beam();
  const ModalModel modal = ModalModel::from_spec(spec);
  const auto traffic = scripted_stream({1.0, 1.0}, {2.0, 1.0}, {0.5, 0.5});
  auto traj = SensorTrajectory::crossing(10.0, 0.5, 0.002, 0.5);
  const SensorRecord rec = duhamel_moving_masses(modal, traffic, traj);

  // channel sum reproduces the record bit for bit
  for (int k = 0; k < rec.size(); ++k) {
    double s = 0.0;
    for (const auto& ch : rec.modal) s += ch[static_cast<std::size_t>(k)];
    CHECK(s == rec.acc[static_cast<std::size_t>(k)]);
  }

  // channels equal shape times the generalized acceleration (grid aligned
  // because every arrival is at/after the sensor entry)
  const auto q = modal_qddot(modal, traffic, traj.entry_time, traj.dt, traj.n_samples);
  for (int n = 1; n <= 4; ++n)
    for (int k = 0; k < rec.size(); ++k) {
      const double expected =
          modal.shape(n, traj.position(k)) *
          q[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(k)];
      CHECK(rec.modal[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(k)] ==
            doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("zero traffic gives a zero record") {
  const ModalModel modal = ModalModel::from_spec(lab_beam());
  TrafficRealization none;
  const auto traj = SensorTrajectory::crossing(10.0, 1.0, 0.01);
  const SensorRecord rec = duhamel_moving_masses(modal, none, traj);
  CHECK(max_abs(rec.acc) == 0.0);
}

TEST_CASE("noise injection") {
  const ModalModel modal = ModalModel::from_spec(lab_beam());
  const auto traffic = scripted_stream({1.0}, {1.0}, {0.0});
  const auto traj = SensorTrajectory::crossing(10.0, 1.0, 0.001);
  const SensorRecord clean = duhamel_moving_masses(modal, traffic, traj);

  Rng rng(9);
  const SensorRecord same = add_noise(clean, 0.0, rng);
  CHECK(same.acc == clean.acc);

  // unit-RMS synthetic record, 1e5 samples
  SensorRecord unit;
  unit.time.assign(100000, 0.0);
  unit.position.assign(100000, 0.0);
  unit.acc.assign(100000, 1.0);  // RMS exactly 1
  Rng rng2(11);
  const SensorRecord noisy = add_noise(unit, 0.05, rng2);
  std::vector<double> noise(noisy.acc);
  for (auto& v : noise) v -= 1.0;
  const double sd = stdev(noise);
  CHECK(sd > 0.045);
  CHECK(sd < 0.055);

  // distinct derived seeds decorrelate the noise
  Rng ra(derive_seed(1234, 1)), rb(derive_seed(1234, 2));
  const SensorRecord na = add_noise(unit, 0.05, ra);
  const SensorRecord nb = add_noise(unit, 0.05, rb);
  std::vector<double> xa(na.acc), xb(nb.acc);
  CHECK(std::abs(pearson(xa, xb)) < 0.05);
}

TEST_CASE("force series shorter than the trajectory is rejected") {
  const ModalModel modal = ModalModel::from_spec(lab_beam());
  const auto traj = SensorTrajectory::crossing(10.0, 1.0, 0.001);
  std::vector<double> force(100, 1.0);
  CHECK_THROWS(duhamel_fixed_force(modal, force, 0.001, 2.0, traj));
}
