#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "msid/traffic.hpp"

using namespace msid;

TEST_CASE("zero rate gives no arrivals") {
  Rng rng(7);
  CHECK(sample_arrivals(0.0, 100.0, rng).empty());
}

TEST_CASE("arrival counts pool to the expected rate") {
  double total = 0.0;
  for (int s = 0; s < 200; ++s) {
    Rng rng(derive_seed(42, static_cast<std::uint64_t>(s)));
    total += static_cast<double>(sample_arrivals(1.0, 1000.0, rng).size());
  }
  const double mean_count = total / 200.0;
  CHECK(mean_count > 950.0);
  CHECK(mean_count < 1050.0);
}

TEST_CASE("gaps pass a KS test against the exponential law") {
  Rng rng(12345);
  const int n = 10000;
  std::vector<double> gaps;
  double prev = 0.0;
  while (gaps.size() < static_cast<std::size_t>(n)) {
    const double t = prev + rng.exponential(2.0);
    gaps.push_back(t - prev);
    prev = t;
  }
  std::sort(gaps.begin(), gaps.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double cdf = 1.0 - std::exp(-2.0 * gaps[static_cast<std::size_t>(i)]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(std::abs(cdf - lo), std::abs(cdf - hi)));
  }
  // critical value at the 1% level
  CHECK(d < 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("sampled vehicle marginals respect the bounds") {
  TrafficModel model;
  model.count = 25;
  model.mean_mass = 1.0;
  model.mass_spread = 0.20;
  model.mean_velocity = 2.0;
  model.velocity_spread = 0.025;
  model.arrival_rate = 1.0;
  const TrafficRealization tr = sample_vehicles(model, 99);
  REQUIRE(tr.count() == 25);
  for (const auto& v : tr.vehicles) {
    CHECK(v.mass >= 0.8);
    CHECK(v.mass <= 1.2);
    CHECK(v.velocity >= 1.95);
    CHECK(v.velocity <= 2.05);
  }
}

TEST_CASE("zero spread collapses to the mean") {
  TrafficModel model;
  model.count = 10;
  model.mean_mass = 3.0;
  model.mass_spread = 0.0;
  model.mean_velocity = 7.0;
  model.velocity_spread = 0.0;
  const TrafficRealization tr = sample_vehicles(model, 5);
  for (const auto& v : tr.vehicles) {
    CHECK(v.mass == doctest::Approx(3.0));
    CHECK(v.velocity == doctest::Approx(7.0));
  }
}

TEST_CASE("latin hypercube stratification puts one mass per bin") {
  TrafficModel model;
  model.count = 40;
  model.mean_mass = 1.0;
  model.mass_spread = 0.2;
  model.mean_velocity = 1.0;
  const TrafficRealization tr = sample_vehicles(model, 321);
  std::vector<double> masses;
  for (const auto& v : tr.vehicles) masses.push_back(v.mass);
  std::sort(masses.begin(), masses.end());
  const double lo = 0.8, hi = 1.2;
  for (int i = 0; i < 40; ++i) {
    const double bin_lo = lo + (hi - lo) * i / 40.0;
    const double bin_hi = lo + (hi - lo) * (i + 1) / 40.0;
    CHECK(masses[static_cast<std::size_t>(i)] >= bin_lo);
    CHECK(masses[static_cast<std::size_t>(i)] <= bin_hi);
  }
}

TEST_CASE("identical seed reproduces the realization bit for bit") {
  TrafficModel model;
  model.count = 15;
  model.mean_mass = 1500.0;
  model.mean_velocity = 20.0;
  model.spring = 170e3;
  model.damping_ratio = 0.2;
  const TrafficRealization a = sample_vehicles(model, 2024);
  const TrafficRealization b = sample_vehicles(model, 2024);
  REQUIRE(a.count() == b.count());
  for (int i = 0; i < a.count(); ++i) {
    const auto& va = a.vehicles[static_cast<std::size_t>(i)];
    const auto& vb = b.vehicles[static_cast<std::size_t>(i)];
    CHECK(va.mass == vb.mass);
    CHECK(va.velocity == vb.velocity);
    CHECK(va.arrival == vb.arrival);
    CHECK(va.damper == vb.damper);
  }
  const TrafficRealization c = sample_vehicles(model, 2025);
  bool differs = false;
  for (int i = 0; i < std::min(a.count(), c.count()); ++i)
    if (a.vehicles[static_cast<std::size_t>(i)].mass !=
        c.vehicles[static_cast<std::size_t>(i)].mass)
      differs = true;
  CHECK(differs);
}

TEST_CASE("scripted stream reproduces the five-mass schedule") {
  const auto tr = scripted_stream({1, 1, 1, 1, 1}, {1.0, 0.5, 2.0, 1.5, 4.0},
                                  {0, 1, 1, 1, 1});
  REQUIRE(tr.count() == 5);
  for (int i = 0; i < 5; ++i)
    CHECK(tr.vehicles[static_cast<std::size_t>(i)].arrival == doctest::Approx(i));
  CHECK(tr.vehicles[1].velocity == doctest::Approx(0.5));
  CHECK(tr.vehicles[4].velocity == doctest::Approx(4.0));
}

TEST_CASE("scripted stream edge cases") {
  CHECK(scripted_stream({}, {}, {}).count() == 0);
  CHECK_THROWS(scripted_stream({1.0}, {1.0, 2.0}, {0.0}));
  const auto tr = scripted_stream({2.0}, {4.0}, {0.0});
  REQUIRE(tr.count() == 1);
  // single mass from t=0: position is linear on the span, zero outside
  const auto& v = tr.vehicles[0];
  CHECK(v.position(0.5, 10.0) == doctest::Approx(2.0));
  CHECK(v.position(2.5, 10.0) == doctest::Approx(10.0));
  CHECK(v.position(2.6, 10.0) == doctest::Approx(0.0).scale(1.0));
  CHECK(v.position(-0.1, 10.0) == doctest::Approx(0.0).scale(1.0));
  CHECK(v.exit_time(10.0) == doctest::Approx(2.5));
}

TEST_CASE("horizon mode fills the requested window") {
  TrafficModel model;
  model.count = 0;
  model.window = 50.0;
  model.start = -10.0;
  model.arrival_rate = 2.0;
  const TrafficRealization tr = sample_vehicles(model, 77);
  CHECK(tr.count() > 50);
  CHECK(tr.vehicles.front().arrival >= -10.0);
  CHECK(tr.vehicles.back().arrival <= 40.0);
}

TEST_CASE("rejects bad parameters") {
  TrafficModel m;
  m.count = 5;
  m.mean_mass = -1.0;
  CHECK_THROWS(sample_vehicles(m, 1));
  m.mean_mass = 1.0;
  m.mass_spread = 1.5;
  CHECK_THROWS(sample_vehicles(m, 1));
}
