#pragma once

#include <cstdint>
#include <vector>

#include "msid/rng.hpp"

namespace msid {

struct Vehicle {
  double mass = 0.0;      // kg
  double velocity = 0.0;  // m/s
  double arrival = 0.0;   // s
  double spring = 0.0;    // N/m, used by the interaction model only
  double damper = 0.0;    // N*s/m

  double exit_time(double span) const { return arrival + span / velocity; }
  bool on_span(double t, double span) const {
    return t >= arrival && t <= exit_time(span);
  }
  // linear on-span, zero otherwise
  double position(double t, double span) const {
    return on_span(t, span) ? velocity * (t - arrival) : 0.0;
  }
};

struct TrafficRealization {
  std::vector<Vehicle> vehicles;  // sorted by arrival
  std::uint64_t seed = 0;

  int count() const { return static_cast<int>(vehicles.size()); }
  void validate() const;  // positive masses/velocities, sorted arrivals
};

// Homogeneous Poisson arrival times on [0, horizon): i.i.d. exponential gaps
// with mean 1/rate, sorted. rate == 0 gives an empty list.
std::vector<double> sample_arrivals(double rate, double horizon, Rng& rng);

struct TrafficModel {
  int count = 0;         // fixed vehicle count; 0 = fill the arrival window
  double window = 0.0;   // arrival window length when count == 0
  double start = 0.0;    // arrivals are offset by this (e.g. -warmup)
  double arrival_rate = 1.0;  // vehicles per second
  double mean_mass = 1.0;     // kg
  double mass_spread = 0.20;  // +-20% uniform by default
  double mean_velocity = 1.0;    // m/s
  double velocity_spread = 0.025;  // +-2.5% uniform by default
  double spring = 0.0;         // N/m
  double damping_ratio = 0.0;  // damper = 2*ratio*sqrt(spring*mass)
};

// Masses and velocities paired by 2-D Latin hypercube sampling (one draw per
// stratum per dimension, independent random pairing); arrivals Poisson.
// Identical seed gives a bit-identical realization.
TrafficRealization sample_vehicles(const TrafficModel& model, std::uint64_t seed);

// Deterministic stream. lags[i] is the delay of vehicle i after vehicle i-1
// (lags[0] after t = 0).
TrafficRealization scripted_stream(const std::vector<double>& masses,
                                   const std::vector<double>& velocities,
                                   const std::vector<double>& lags);

}  // namespace msid
