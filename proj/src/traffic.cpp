#include "msid/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace msid {

void TrafficRealization::validate() const {
  double last = -1e300;
  for (const auto& v : vehicles) {
    if (v.mass <= 0.0) throw std::invalid_argument("traffic: mass must be > 0");
    if (v.velocity <= 0.0)
      throw std::invalid_argument("traffic: velocity must be > 0");
    if (v.arrival < last)
      throw std::invalid_argument("traffic: arrivals must be non-decreasing");
    last = v.arrival;
  }
}

std::vector<double> sample_arrivals(double rate, double horizon, Rng& rng) {
  if (rate < 0.0) throw std::invalid_argument("sample_arrivals: rate >= 0");
  if (horizon <= 0.0) throw std::invalid_argument("sample_arrivals: horizon > 0");
  std::vector<double> out;
  if (rate == 0.0) return out;
  double t = 0.0;
  for (;;) {
    t += rng.exponential(rate);
    if (t >= horizon) break;
    out.push_back(t);
  }
  return out;
}

namespace {

// one uniform sample per stratum, randomly paired across dimensions
std::vector<double> latin_hypercube_dim(int n, double lo, double hi, Rng& rng) {
  std::vector<double> u(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    u[static_cast<std::size_t>(i)] = (i + rng.uniform()) / n;
  // Fisher-Yates
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.uniform() * (i + 1));
    std::swap(u[static_cast<std::size_t>(i)], u[static_cast<std::size_t>(j)]);
  }
  for (auto& x : u) x = lo + (hi - lo) * x;
  return u;
}

}  // namespace

TrafficRealization sample_vehicles(const TrafficModel& model, std::uint64_t seed) {
  if (model.mean_mass <= 0.0 || model.mean_velocity <= 0.0)
    throw std::invalid_argument("sample_vehicles: means must be > 0");
  if (model.mass_spread < 0.0 || model.mass_spread >= 1.0 ||
      model.velocity_spread < 0.0 || model.velocity_spread >= 1.0)
    throw std::invalid_argument("sample_vehicles: spreads must be in [0,1)");

  Rng rng(seed);
  std::vector<double> arrivals;
  if (model.count > 0) {
    double t = 0.0;
    for (int i = 0; i < model.count; ++i) {
      t += model.arrival_rate > 0.0 ? rng.exponential(model.arrival_rate) : 0.0;
      arrivals.push_back(t);
    }
  } else {
    arrivals = sample_arrivals(model.arrival_rate, model.window, rng);
  }

  const int n = static_cast<int>(arrivals.size());
  TrafficRealization tr;
  tr.seed = seed;
  if (n == 0) return tr;

  const auto masses = latin_hypercube_dim(
      n, model.mean_mass * (1.0 - model.mass_spread),
      model.mean_mass * (1.0 + model.mass_spread), rng);
  const auto velocities = latin_hypercube_dim(
      n, model.mean_velocity * (1.0 - model.velocity_spread),
      model.mean_velocity * (1.0 + model.velocity_spread), rng);

  for (int i = 0; i < n; ++i) {
    Vehicle v;
    v.mass = masses[static_cast<std::size_t>(i)];
    v.velocity = velocities[static_cast<std::size_t>(i)];
    v.arrival = model.start + arrivals[static_cast<std::size_t>(i)];
    v.spring = model.spring;
    v.damper = model.spring > 0.0
                   ? 2.0 * model.damping_ratio * std::sqrt(model.spring * v.mass)
                   : 0.0;
    tr.vehicles.push_back(v);
  }
  tr.validate();
  return tr;
}

TrafficRealization scripted_stream(const std::vector<double>& masses,
                                   const std::vector<double>& velocities,
                                   const std::vector<double>& lags) {
  if (masses.size() != velocities.size() || masses.size() != lags.size())
    throw std::invalid_argument("scripted_stream: list length mismatch");
  TrafficRealization tr;
  double t = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    t += lags[i];
    Vehicle v;
    v.mass = masses[i];
    v.velocity = velocities[i];
    v.arrival = t;
    tr.vehicles.push_back(v);
  }
  std::stable_sort(tr.vehicles.begin(), tr.vehicles.end(),
                   [](const Vehicle& a, const Vehicle& b) { return a.arrival < b.arrival; });
  tr.validate();
  return tr;
}

}  // namespace msid
