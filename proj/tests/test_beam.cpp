#include <doctest.h>

#include <cmath>

#include "msid/beam.hpp"
#include "msid/fe_beam.hpp"

using namespace msid;

namespace {

BeamSpec lab_beam() {
  BeamSpec b;
  b.length = 10.0;
  b.mass_per_length = 6.1;
  b.flexural_rigidity = 152.67e3;
  b.n_modes = 4;
  b.damping = DampingSpec::uniform_ratio(0.02, 4);
  return b;
}

BeamSpec highway_bridge() {
  BeamSpec b;
  b.length = 30.0;
  b.mass_per_length = 1000.0;
  b.flexural_rigidity = 27.5e9 * 0.175;
  b.n_modes = 6;
  b.damping = DampingSpec::uniform_ratio(0.01, 6);
  return b;
}

}  // namespace

TEST_CASE("natural frequencies of the 10 m laboratory beam") {
  const BeamSpec b = lab_beam();
  CHECK(natural_frequency(b, 1) == doctest::Approx(15.61).epsilon(1e-3));
  CHECK(natural_frequency(b, 2) == doctest::Approx(62.46).epsilon(1e-3));
  CHECK(natural_frequency(b, 3) == doctest::Approx(140.53).epsilon(1e-3));
  CHECK(natural_frequency(b, 4) == doctest::Approx(249.82).epsilon(1e-3));
}

TEST_CASE("natural frequency of the 30 m bridge in Hz") {
  const BeamSpec b = highway_bridge();
  CHECK(natural_frequency(b, 1) / (2.0 * M_PI) == doctest::Approx(3.83).epsilon(3e-3));
}

TEST_CASE("frequency scaling with length") {
  BeamSpec b = lab_beam();
  const double f1 = natural_frequency(b, 3);
  b.length *= 2.0;
  CHECK(natural_frequency(b, 3) == doctest::Approx(f1 / 4.0).epsilon(1e-14));
}

TEST_CASE("analytic mode shapes") {
  CHECK(mode_shape_analytic(1, 5.0, 10.0) == doctest::Approx(1.0));
  CHECK(mode_shape_analytic(2, 5.0, 10.0) == doctest::Approx(0.0).scale(1.0));
  CHECK(mode_shape_analytic(3, 10.0 / 6.0, 10.0) == doctest::Approx(1.0));
  CHECK_THROWS(mode_shape_analytic(1, -0.5, 10.0));
  CHECK_THROWS(mode_shape_analytic(1, 10.5, 10.0));
}

TEST_CASE("modal mass") {
  CHECK(modal_mass(lab_beam(), 1) == doctest::Approx(30.5));
  CHECK(modal_mass(highway_bridge(), 2) == doctest::Approx(15000.0));
  BeamSpec b = lab_beam();
  b.mass_per_length *= 3.0;
  CHECK(modal_mass(b, 1) == doctest::Approx(3.0 * 30.5));
}

TEST_CASE("rayleigh fit hits two targets exactly") {
  auto [a, bta] = rayleigh_from_targets({15.61, 62.46}, {0.01, 0.01});
  CHECK(rayleigh_ratio(a, bta, 15.61) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(rayleigh_ratio(a, bta, 62.46) == doctest::Approx(0.01).epsilon(1e-12));
}

TEST_CASE("rayleigh fit over six modes stays near the target") {
  const BeamSpec b = highway_bridge();
  std::vector<double> ws, zs;
  for (int n = 1; n <= 6; ++n) {
    ws.push_back(natural_frequency(b, n));
    zs.push_back(0.01);
  }
  auto [a, bta] = rayleigh_from_targets(ws, zs);
  for (double w : ws) {
    const double z = rayleigh_ratio(a, bta, w);
    CHECK(z >= 0.005);
    CHECK(z <= 0.02);
  }
}

TEST_CASE("rayleigh fit edge cases") {
  auto [a, bta] = rayleigh_from_targets({10.0, 20.0}, {0.0, 0.0});
  CHECK(a == doctest::Approx(0.0).scale(1.0));
  CHECK(bta == doctest::Approx(0.0).scale(1.0));
  CHECK_THROWS(rayleigh_from_targets({10.0}, {0.01}));
  CHECK_THROWS(rayleigh_from_targets({10.0, 10.0}, {0.01, 0.01}));
}

TEST_CASE("modal model invariants") {
  const ModalModel m = ModalModel::from_spec(lab_beam());
  for (int n = 1; n <= m.n_modes(); ++n) {
    CHECK(m.omega_d(n) <= m.omega(n));
    if (n > 1) CHECK(m.omega(n) > m.omega(n - 1));
    CHECK(m.modal_mass(n) > 0.0);
  }
  BeamSpec undamped = lab_beam();
  undamped.damping = DampingSpec::uniform_ratio(0.0, 4);
  const ModalModel mu = ModalModel::from_spec(undamped);
  CHECK(mu.omega_d(1) == mu.omega(1));
}

TEST_CASE("hermite shape end conditions and partition of unity") {
  const double le = 0.73;
  auto n0 = hermite_shape(0.0, le);
  CHECK(n0[0] == doctest::Approx(1.0));
  CHECK(n0[1] == doctest::Approx(0.0).scale(1.0));
  CHECK(n0[2] == doctest::Approx(0.0).scale(1.0));
  CHECK(n0[3] == doctest::Approx(0.0).scale(1.0));
  auto n1 = hermite_shape(le, le);
  CHECK(n1[0] == doctest::Approx(0.0).scale(1.0));
  CHECK(n1[2] == doctest::Approx(1.0));
  for (int i = 0; i <= 20; ++i) {
    const double xi = le * i / 20.0;
    auto n = hermite_shape(xi, le);
    CHECK(n[0] + n[2] == doctest::Approx(1.0).epsilon(1e-14));
    auto d = hermite_shape_deriv(xi, le);
    CHECK(d[0] + d[2] == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));
  }
  CHECK_THROWS(hermite_shape(-0.1, le));
  CHECK_THROWS(hermite_shape(le + 0.1, le));
}

TEST_CASE("FE eigenfrequencies match the analytic beam") {
  const BeamSpec b = highway_bridge();
  const FeBeam fe = fe_assemble(b, 30);
  const FeModes modes = fe_eigen_modes(fe, 4);
  const double truth[4] = {3.83, 15.32, 34.46, 61.26};
  for (int n = 0; n < 4; ++n) {
    const double hz = modes.omega(n) / (2.0 * M_PI);
    CHECK(std::abs(hz - truth[n]) / truth[n] < 0.005);
  }
}

TEST_CASE("unconstrained stiffness annihilates rigid-body motion") {
  const BeamSpec b = lab_beam();
  Eigen::MatrixXd m, k;
  fe_full_matrices(b, 8, m, k);
  const int n_nodes = 9;
  Eigen::VectorXd translation = Eigen::VectorXd::Zero(2 * n_nodes);
  Eigen::VectorXd rotation = Eigen::VectorXd::Zero(2 * n_nodes);
  const double le = b.length / 8;
  for (int i = 0; i < n_nodes; ++i) {
    translation(2 * i) = 1.0;
    rotation(2 * i) = i * le;   // w = x
    rotation(2 * i + 1) = 1.0;  // theta = 1
  }
  CHECK((k * translation).cwiseAbs().maxCoeff() < 1e-8 * k.cwiseAbs().maxCoeff());
  CHECK((k * rotation).cwiseAbs().maxCoeff() < 1e-8 * k.cwiseAbs().maxCoeff());
}

TEST_CASE("FE static midspan deflection matches the closed form") {
  const BeamSpec b = highway_bridge();
  const FeBeam fe = fe_assemble(b, 30);
  const double p = 1.0e5;
  Eigen::VectorXd load = p * fe.shape_column(b.length / 2.0);
  const Eigen::VectorXd u = fe_static_solve(fe, load);
  const double midspan = fe.shape_column(b.length / 2.0).dot(u);
  const double closed = p * std::pow(b.length, 3) / (48.0 * b.flexural_rigidity);
  CHECK(std::abs(midspan - closed) / closed < 1e-3);
}

TEST_CASE("FE eigenvectors are mass-orthogonal") {
  const FeBeam fe = fe_assemble(lab_beam(), 12);
  const FeModes modes = fe_eigen_modes(fe, 6);
  const double mnorm = fe.mass.norm();
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      if (i == j) continue;
      const double vi = modes.vectors.col(i).norm();
      const double vj = modes.vectors.col(j).norm();
      const double cross = modes.vectors.col(i).dot(fe.mass * modes.vectors.col(j));
      CHECK(std::abs(cross) <= 1e-8 * vi * vj * mnorm);
    }
}

TEST_CASE("modal expansion of a distributed load matches FE statics") {
  BeamSpec b = lab_beam();
  b.n_modes = 12;
  b.damping = DampingSpec::uniform_ratio(0.02, 12);
  const FeBeam fe = fe_assemble(b, 40);
  const double w0 = 250.0;  // N/m

  Eigen::VectorXd load = Eigen::VectorXd::Zero(fe.n_active());
  // consistent nodal load of a uniform line load
  const double le = fe.element_length;
  for (int e = 0; e < fe.n_elements; ++e) {
    const double local[4] = {w0 * le / 2.0, w0 * le * le / 12.0, w0 * le / 2.0,
                             -w0 * le * le / 12.0};
    for (int i = 0; i < 4; ++i) {
      const int ai = fe.active_index[static_cast<std::size_t>(2 * e + i)];
      if (ai >= 0) load(ai) += local[i];
    }
  }
  const Eigen::VectorXd u = fe_static_solve(fe, load);

  for (double x : {2.5, 5.0, 7.1}) {
    double modal_sum = 0.0;
    for (int n = 1; n <= 12; ++n) {
      const double wn = natural_frequency(b, n);
      const double fn = w0 * b.length / (n * M_PI) * (1.0 - std::cos(n * M_PI));
      modal_sum += mode_shape_analytic(n, x, b.length) * fn /
                   (modal_mass(b, n) * wn * wn);
    }
    const double fe_val = fe.shape_column(x).dot(u);
    CHECK(std::abs(modal_sum - fe_val) / std::abs(fe_val) < 0.01);
  }
}

TEST_CASE("constructor validation") {
  BeamSpec b = lab_beam();
  b.length = -1.0;
  CHECK_THROWS(ModalModel::from_spec(b));
  b = lab_beam();
  b.damping.ratios = {0.02};
  CHECK_THROWS(ModalModel::from_spec(b));
  CHECK_THROWS(fe_assemble(lab_beam(), 3));
}
