#include <doctest.h>

#include <cmath>

#include "msid/roughness.hpp"
#include "msid/stats.hpp"

using namespace msid;

TEST_CASE("amplitude at the reference frequency") {
  RoughnessModel model;
  model.psd_level = 0.25e-6;
  model.kappa_min = 0.1;  // place the first harmonic at kappa0
  model.kappa_max = 0.1;
  model.dkappa = 0.04;
  const RoughnessProfile p = generate_profile(model, 1);
  REQUIRE(p.amplitude.size() == 1);
  CHECK(p.amplitude[0] == doctest::Approx(std::sqrt(2.0 * 0.25e-6 * 0.04)).epsilon(1e-12));
  CHECK(p.amplitude[0] == doctest::Approx(1.414e-4).epsilon(1e-3));
}

TEST_CASE("null class gives a flat road") {
  RoughnessModel model;
  model.psd_level = 0.0;
  const RoughnessProfile p = generate_profile(model, 3);
  for (double d : p.amplitude) CHECK(d == 0.0);
  auto [r, slope] = p.evaluate(12.3);
  CHECK(r == 0.0);
  CHECK(slope == 0.0);
}

TEST_CASE("quadrupling the class level doubles every amplitude") {
  RoughnessModel model;
  model.psd_level = 1e-6;
  const RoughnessProfile a = generate_profile(model, 11);
  model.psd_level = 4e-6;
  const RoughnessProfile b = generate_profile(model, 11);
  for (std::size_t i = 0; i < a.amplitude.size(); ++i)
    CHECK(b.amplitude[i] == doctest::Approx(2.0 * a.amplitude[i]).epsilon(1e-12));
}

TEST_CASE("single harmonic evaluation") {
  RoughnessProfile p;
  p.amplitude = {1e-3};
  p.frequency = {1.0};
  p.phase = {0.0};
  auto [r, slope] = p.evaluate(0.0);
  CHECK(r == doctest::Approx(1e-3));
  CHECK(slope == doctest::Approx(0.0).scale(1.0));
  // slope maximum a quarter cycle in
  auto [r2, slope2] = p.evaluate(0.25);
  CHECK(r2 == doctest::Approx(0.0).scale(1e-3).epsilon(1e-9));
  CHECK(slope2 == doctest::Approx(-1e-3 * 2.0 * M_PI).epsilon(1e-9));
}

TEST_CASE("sample variance matches the harmonic sum") {
  RoughnessModel model;
  model.psd_level = 0.25e-6;
  model.kappa_max = 20.0;  // keep the dx sampling above Nyquist
  const RoughnessProfile p = generate_profile(model, 21);
  double expected = 0.0;
  for (double d : p.amplitude) expected += d * d / 2.0;
  const double dx = 0.01;
  std::vector<double> samples;
  for (int i = 0; i < 100000; ++i) samples.push_back(p.evaluate(i * dx).first);
  const double var = variance(samples);
  CHECK(std::abs(var - expected) / expected < 0.05);
}

TEST_CASE("empirical PSD reproduces the class law within a factor of two") {
  RoughnessModel model;
  model.psd_level = 1e-6;
  const RoughnessProfile p = generate_profile(model, 8);
  // direct periodogram against the definition: with r = sum d_i cos(2 pi k x
  // + phase), the one-sided PSD at k_i is d_i^2 / (2 dkappa). Log-binned
  // comparison over [1, 50] cycle/m.
  for (double kappa : {1.0, 2.0, 5.0, 10.0, 20.0, 50.0}) {
    const std::size_t idx =
        static_cast<std::size_t>(std::llround((kappa - model.kappa_min) / model.dkappa));
    double band = 0.0;
    int count = 0;
    for (std::size_t i = idx >= 12 ? idx - 12 : 0;
         i <= idx + 12 && i < p.amplitude.size(); ++i) {
      band += p.amplitude[i] * p.amplitude[i] / (2.0 * model.dkappa);
      ++count;
    }
    band /= count;
    const double truth = model.psd_level * std::pow(kappa / model.kappa0, -2.0);
    CHECK(band / truth > 0.5);
    CHECK(band / truth < 2.0);
  }
}

TEST_CASE("tracker matches direct evaluation") {
  RoughnessModel model;
  model.psd_level = 0.25e-6;
  const RoughnessProfile p = generate_profile(model, 5);
  const double x0 = 3.7, dx = 0.016;
  RoughnessTracker tracker(p, x0, dx);
  double scale = 0.0;
  for (double d : p.amplitude) scale += d;
  for (int k = 0; k < 4000; ++k) {
    auto [r_fast, s_fast] = tracker.next();
    auto [r_ref, s_ref] = p.evaluate(x0 + k * dx);
    CHECK(std::abs(r_fast - r_ref) < 1e-9 * scale * 10);
    CHECK(std::abs(s_fast - s_ref) < 1e-7);
  }
}

TEST_CASE("profiles are deterministic per seed") {
  RoughnessModel model;
  model.psd_level = 1e-6;
  const RoughnessProfile a = generate_profile(model, 4);
  const RoughnessProfile b = generate_profile(model, 4);
  const RoughnessProfile c = generate_profile(model, 9);
  CHECK(a.phase == b.phase);
  CHECK(a.phase != c.phase);
  CHECK(a.evaluate(5.0).first == b.evaluate(5.0).first);
}

TEST_CASE("frequency grid matches the configured resolution") {
  RoughnessModel model;
  model.psd_level = 1e-6;
  const RoughnessProfile p = generate_profile(model, 2);
  CHECK(p.frequency.size() == 2476);
  CHECK(p.frequency.front() == doctest::Approx(1.0));
  CHECK(p.frequency.back() == doctest::Approx(100.0));
  for (std::size_t i = 1; i < p.frequency.size(); ++i)
    CHECK(p.frequency[i] > p.frequency[i - 1]);
}
