#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "msid/beam.hpp"
#include "msid/record.hpp"
#include "msid/roughness.hpp"
#include "msid/traffic.hpp"

namespace msid {

inline constexpr const char* kToolkitVersion = "0.1.0";

enum class ScenarioKind { kFixedForce, kMovingMass, kVbi };

std::string to_string(ScenarioKind kind);

struct FixedForceConfig {
  double location = 0.0;   // m from the left support
  double force_rms = 1.0;  // N, white Gaussian sample SD
};

struct MovingMassConfig {
  // scripted stream (used when the mass list is non-empty)
  std::vector<double> script_masses, script_velocities, script_lags;
  int ride_vehicle = -1;  // sensor rides this scripted mass

  // sampled stream
  TrafficModel model;
  double warmup = 6.0;       // traffic lead time before the sensor enters, s
  double sensor_mass = 0.0;  // >0 adds the sensor itself as a moving mass
};

struct VbiConfig {
  int n_elements = 30;
  TrafficModel model;  // spring/damping_ratio used for every vehicle
  double warmup = 5.0;
  double instrumented_velocity = 4.0;
  double instrumented_mass = 0.0;  // 0 = mean traffic mass
  RoughnessModel roughness;
  bool frozen_roughness = false;  // one shared profile instead of per-run draws
  double step = 0.0;              // integration step; 0 = auto from bandwidth
};

// One metric gate evaluated by `report --check`.
struct CheckSpec {
  std::string estimator;  // nls | sd | eps
  std::string metric;     // mac | corr | freq | unexcited
  int mode = 1;           // 1-based
  double min = 0.0;       // mac/corr lower bound, freq: max relative error
};

struct ExperimentConfig {
  ScenarioKind kind = ScenarioKind::kFixedForce;
  BeamSpec beam;
  double sensor_velocity = 1.0;
  double sensor_dt = 0.001;
  FixedForceConfig fixed;
  MovingMassConfig moving;
  VbiConfig vbi;
  double noise_rms_fraction = 0.0;
  int runs = 1;
  std::uint64_t master_seed = 1;
  int n_modes_identify = 4;
  std::vector<CheckSpec> checks;
  std::string out_dir = "out";

  void validate() const;
  std::string to_json() const;  // normalized, key-sorted
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig from_file(const std::filesystem::path& path);
};

std::string config_hash(const ExperimentConfig& config);

// Per-run excitation kept for persistence and for the known-input fit.
struct SimArtifacts {
  std::uint64_t run_seed = 0;
  std::vector<double> force;    // fixed-force scenario
  TrafficRealization traffic;   // moving-mass / vbi scenarios
};

// Deterministic single-run simulation; run_index selects the derived seed.
SensorRecord simulate_run(const ExperimentConfig& config, int run_index,
                          SimArtifacts* artifacts = nullptr);

struct RunManifest {
  std::string config_hash;
  std::string version;
  std::string timestamp;
  std::uint64_t master_seed = 0;
  std::vector<std::uint64_t> run_seeds;
  std::vector<std::string> record_files;
  std::vector<std::string> excitation_files;
  bool all_ok = false;

  std::string to_json() const;
  static RunManifest from_file(const std::filesystem::path& path);
};

// Executes all runs (parallel across runs), writes one record CSV per run
// plus excitation sidecars, a normalized config copy and the manifest.
RunManifest run_simulate(const ExperimentConfig& config,
                         const std::filesystem::path& out_dir, int workers);

struct IdentifiedSummary {
  std::string estimator;
  std::vector<double> x;                       // shape grid
  std::vector<std::vector<double>> shapes;     // per mode, unit-max signed
  std::vector<double> omega, zeta;             // ensemble means per mode
  std::vector<double> omega_sd, zeta_sd;       // across runs
  std::vector<bool> excited;
  std::vector<double> mac_vs_truth;            // signed shapes vs sine truth
  std::vector<double> corr_vs_truth;           // |shape| vs |sine|

  std::string to_json() const;
  static IdentifiedSummary from_file(const std::filesystem::path& path);
};

// Reads a simulation directory and runs the selected estimator end to end;
// writes frequency/damping and shape tables plus a JSON summary.
IdentifiedSummary run_identify(const std::filesystem::path& out_dir,
                               const std::string& estimator, int workers);

struct CheckOutcome {
  std::string description;
  bool passed = false;
  double value = 0.0;
};

struct ReportOutcome {
  std::vector<CheckOutcome> checks;
  bool all_passed = true;
};

// Consolidates identify outputs into report/ (merged JSON + plot-ready curve
// files); with check=true also evaluates the config's gates.
ReportOutcome run_report(const std::filesystem::path& out_dir, bool check);

// Property-suite smoke tests over synthetic oracles; returns failure count.
int selftest(std::ostream& log);

}  // namespace msid
