#include <doctest.h>

#include <cmath>

#include "msid/duhamel.hpp"
#include "msid/stationary.hpp"
#include "msid/stats.hpp"

using namespace msid;

namespace {

BeamSpec lab_beam(int n_modes = 2, double zeta = 0.02) {
  BeamSpec b;
  b.length = 10.0;
  b.mass_per_length = 6.1;
  b.flexural_rigidity = 152.67e3;
  b.n_modes = n_modes;
  b.damping = DampingSpec::uniform_ratio(zeta, n_modes);
  return b;
}

}  // namespace

TEST_CASE("crossing response matches the generic convolution") {
  const ModalModel modal = ModalModel::from_spec(lab_beam(2));
  const double T = 5.0;
  for (int n = 1; n <= 2; ++n) {
    const CrossingResponse resp(modal, n, T);
    const double beta = n * M_PI / T;
    const double dt = 1e-4;
    ModalConvolution conv(modal.omega(n), modal.zeta(n), dt);
    conv.reset(0.0);
    double max_q = 0.0, err_q = 0.0, max_qdd = 0.0, err_qdd = 0.0;
    const int n_steps = static_cast<int>(2.5 * T / dt);
    for (int k = 1; k <= n_steps; ++k) {
      const double t = k * dt;
      const double f = t <= T ? std::sin(beta * t) : 0.0;
      conv.step(f);
      const double q_ref = conv.is() / (modal.modal_mass(n) * modal.omega_d(n));
      const double qdd_ref =
          accel_bracket(modal, n, f, conv.is(), conv.ic()) / modal.modal_mass(n);
      const double q_cf = t <= T ? resp.q_on_span(t) : resp.q_after(t - T);
      const double qdd_cf =
          t <= T ? resp.qddot_on_span(t) : resp.qddot_after(t - T);
      max_q = std::max(max_q, std::abs(q_ref));
      max_qdd = std::max(max_qdd, std::abs(qdd_ref));
      err_q = std::max(err_q, std::abs(q_ref - q_cf));
      err_qdd = std::max(err_qdd, std::abs(qdd_ref - qdd_cf));
    }
    CHECK(err_q < 1e-6 * max_q);
    CHECK(err_qdd < 1e-6 * max_qdd);
  }
}

TEST_CASE("crossing response is continuous at departure") {
  const ModalModel modal = ModalModel::from_spec(lab_beam(2));
  for (int n = 1; n <= 2; ++n) {
    const CrossingResponse resp(modal, n, 3.7);
    CHECK(resp.q_on_span(3.7) == doctest::Approx(resp.q_after(0.0)).epsilon(1e-12));
    CHECK(resp.qddot_on_span(3.7) ==
          doctest::Approx(resp.qddot_after(0.0)).epsilon(1e-12));
  }
}

TEST_CASE("variance is linear in the arrival rate") {
  const ModalModel modal = ModalModel::from_spec(lab_beam(1));
  StationaryStreamSpec spec;
  spec.rate = 1.0;
  spec.mean_amp = 1.0;
  spec.mean_amp_sq = 1.0;
  spec.atoms = {{5.0, 1.0}};
  const double v1 = sigma_ss_qddot(spec, modal, 1);
  spec.rate = 2.0;
  const double v2 = sigma_ss_qddot(spec, modal, 1);
  CHECK(v2 == doctest::Approx(2.0 * v1).epsilon(1e-12));
}

TEST_CASE("variance is independent of the evaluation time") {
  const ModalModel modal = ModalModel::from_spec(lab_beam(1));
  StationaryStreamSpec spec;
  spec.rate = 1.0;
  spec.mean_amp = 1.0;
  spec.mean_amp_sq = 1.0;
  spec.atoms = {{5.0, 0.5}, {8.0, 0.5}};
  const double va = sigma_ss_qddot(spec, modal, 1, 0.0);
  const double vb = sigma_ss_qddot(spec, modal, 1, 137.25);
  CHECK(std::abs(va - vb) <= 1e-9 * std::abs(va));
}

TEST_CASE("variance matches a Monte Carlo ensemble") {
  const BeamSpec beam = lab_beam(1);
  const ModalModel modal = ModalModel::from_spec(beam);

  const double rate = 0.5;
  const double crossing_velocity = 2.0;  // T = 5 s
  StationaryStreamSpec spec;
  spec.rate = rate;
  spec.mean_amp = 1.0;
  spec.mean_amp_sq = 1.0;
  spec.atoms = {{beam.length / crossing_velocity, 1.0}};
  const double analytic = sigma_ss_qddot(spec, modal, 1);

  // constant-amplitude Poisson stream, unit force amplitude via mass = 1/g
  const int n_runs = 1200;
  const double warmup = 26.0;
  const double dt = 0.005;
  const int n_steps = static_cast<int>(30.0 / dt);
  std::vector<std::vector<double>> samples(8);
  for (int r = 0; r < n_runs; ++r) {
    TrafficModel tm;
    tm.count = 0;
    tm.window = 30.0;
    tm.start = -warmup;
    tm.arrival_rate = rate;
    tm.mean_mass = 1.0 / kGravity;
    tm.mass_spread = 0.0;
    tm.mean_velocity = crossing_velocity;
    tm.velocity_spread = 0.0;
    const auto traffic = sample_vehicles(tm, derive_seed(777, static_cast<std::uint64_t>(r)));
    if (traffic.count() == 0) continue;
    const auto q = modal_qddot(modal, traffic, -warmup, dt, n_steps);
    // eight decorrelated probes in the stationary window
    for (int p = 0; p < 8; ++p) {
      const int k = static_cast<int>((warmup - 0.5 + 0.4 * p) / dt);
      samples[static_cast<std::size_t>(p)].push_back(
          q[0][static_cast<std::size_t>(k)]);
    }
  }
  double mc = 0.0;
  for (const auto& s : samples) mc += variance(s);
  mc /= 8.0;
  CHECK(std::abs(mc - analytic) / analytic < 0.2);
}

TEST_CASE("stream spec validation") {
  StationaryStreamSpec spec;
  spec.rate = 1.0;
  spec.mean_amp = 2.0;
  spec.mean_amp_sq = 1.0;  // below E[A]^2
  spec.atoms = {{5.0, 1.0}};
  CHECK_THROWS(spec.validate());
  spec.mean_amp_sq = 5.0;
  spec.atoms = {{5.0, 0.7}};
  CHECK_THROWS(spec.validate());
  spec.atoms = {{5.0, 1.0}};
  CHECK_NOTHROW(spec.validate());
}
