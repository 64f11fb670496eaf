#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace msid {

// Constant-speed sensor pass over the span, sampled at a fixed interval.
struct SensorTrajectory {
  double velocity = 0.0;    // m/s
  double entry_time = 0.0;  // s
  double dt = 0.0;          // s
  int n_samples = 0;

  double time(int k) const { return entry_time + k * dt; }
  double position(int k) const { return velocity * k * dt; }
  double exit_time() const { return time(n_samples - 1); }
  void validate(double span) const;

  // full crossing of a span
  static SensorTrajectory crossing(double span, double velocity, double dt,
                                   double entry_time = 0.0);
};

struct SensorRecord {
  std::vector<double> time;      // s
  std::vector<double> position;  // m, sensor location
  std::vector<double> acc;       // m/s^2, measured total
  std::vector<std::vector<double>> modal;  // per-mode channels, may be empty
  std::uint64_t seed = 0;
  std::string scenario;

  int size() const { return static_cast<int>(time.size()); }
  void validate() const;
};

// columns t, x_I, acc, acc_m1..acc_mN
void write_record_csv(const std::filesystem::path& path, const SensorRecord& rec);
SensorRecord read_record_csv(const std::filesystem::path& path);

}  // namespace msid
