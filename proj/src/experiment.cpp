#include "msid/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "msid/bop.hpp"
#include "msid/csv.hpp"
#include "msid/duhamel.hpp"
#include "msid/ensemble.hpp"
#include "msid/fe_beam.hpp"
#include "msid/modeshape.hpp"
#include "msid/sigproc.hpp"
#include "msid/stats.hpp"
#include "msid/vbi.hpp"

namespace msid {

using nlohmann::json;

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kFixedForce: return "fixed-force";
    case ScenarioKind::kMovingMass: return "moving-mass";
    case ScenarioKind::kVbi: return "vbi";
  }
  return "?";
}

namespace {

ScenarioKind scenario_from_string(const std::string& s) {
  if (s == "fixed-force") return ScenarioKind::kFixedForce;
  if (s == "moving-mass") return ScenarioKind::kMovingMass;
  if (s == "vbi") return ScenarioKind::kVbi;
  throw std::invalid_argument("config: unknown scenario '" + s + "'");
}

json beam_to_json(const BeamSpec& b) {
  json j;
  j["length"] = b.length;
  j["mass_per_length"] = b.mass_per_length;
  j["flexural_rigidity"] = b.flexural_rigidity;
  j["n_modes"] = b.n_modes;
  if (b.damping.use_rayleigh) {
    j["rayleigh_alpha"] = b.damping.alpha;
    j["rayleigh_beta"] = b.damping.beta;
  } else {
    j["damping_ratios"] = b.damping.ratios;
  }
  return j;
}

BeamSpec beam_from_json(const json& j) {
  BeamSpec b;
  b.length = j.at("length").get<double>();
  b.mass_per_length = j.at("mass_per_length").get<double>();
  b.flexural_rigidity = j.at("flexural_rigidity").get<double>();
  b.n_modes = j.value("n_modes", 4);
  if (j.contains("rayleigh_alpha")) {
    b.damping = DampingSpec::rayleigh(j.at("rayleigh_alpha").get<double>(),
                                      j.at("rayleigh_beta").get<double>());
  } else {
    b.damping.ratios = j.at("damping_ratios").get<std::vector<double>>();
  }
  return b;
}

json traffic_model_to_json(const TrafficModel& m) {
  json j;
  j["count"] = m.count;
  j["window"] = m.window;
  j["rate"] = m.arrival_rate;
  j["mean_mass"] = m.mean_mass;
  j["mass_spread"] = m.mass_spread;
  j["mean_velocity"] = m.mean_velocity;
  j["velocity_spread"] = m.velocity_spread;
  j["spring"] = m.spring;
  j["damping_ratio"] = m.damping_ratio;
  return j;
}

TrafficModel traffic_model_from_json(const json& j) {
  TrafficModel m;
  m.count = j.value("count", 0);
  m.window = j.value("window", 0.0);
  m.arrival_rate = j.value("rate", 1.0);
  m.mean_mass = j.value("mean_mass", 1.0);
  m.mass_spread = j.value("mass_spread", 0.20);
  m.mean_velocity = j.value("mean_velocity", 1.0);
  m.velocity_spread = j.value("velocity_spread", 0.025);
  m.spring = j.value("spring", 0.0);
  m.damping_ratio = j.value("damping_ratio", 0.0);
  return m;
}

// insert keeping arrivals sorted; returns the new index
int insert_vehicle(TrafficRealization& traffic, const Vehicle& v) {
  auto it = std::upper_bound(
      traffic.vehicles.begin(), traffic.vehicles.end(), v,
      [](const Vehicle& a, const Vehicle& b) { return a.arrival < b.arrival; });
  const int index = static_cast<int>(it - traffic.vehicles.begin());
  traffic.vehicles.insert(it, v);
  return index;
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  beam.validate();
  if (sensor_velocity <= 0.0) throw std::invalid_argument("config: sensor velocity > 0");
  if (sensor_dt <= 0.0) throw std::invalid_argument("config: sensor dt > 0");
  if (runs < 1) throw std::invalid_argument("config: runs >= 1");
  if (noise_rms_fraction < 0.0) throw std::invalid_argument("config: noise fraction >= 0");
  if (n_modes_identify < 1) throw std::invalid_argument("config: identify at least one mode");
  switch (kind) {
    case ScenarioKind::kFixedForce:
      if (fixed.location <= 0.0 || fixed.location >= beam.length)
        throw std::invalid_argument("config: force location inside the span");
      if (fixed.force_rms < 0.0) throw std::invalid_argument("config: force rms >= 0");
      break;
    case ScenarioKind::kMovingMass:
      if (!moving.script_masses.empty()) {
        if (moving.script_masses.size() != moving.script_velocities.size() ||
            moving.script_masses.size() != moving.script_lags.size())
          throw std::invalid_argument("config: script lists must have equal length");
        if (moving.ride_vehicle < 0 ||
            moving.ride_vehicle >= static_cast<int>(moving.script_masses.size()))
          throw std::invalid_argument("config: ride_vehicle out of range");
      } else {
        if (moving.warmup < 0.0) throw std::invalid_argument("config: warmup >= 0");
      }
      break;
    case ScenarioKind::kVbi:
      if (vbi.n_elements < 4) throw std::invalid_argument("config: need >= 4 elements");
      if (vbi.instrumented_velocity <= 0.0)
        throw std::invalid_argument("config: instrumented velocity > 0");
      if (vbi.model.spring <= 0.0)
        throw std::invalid_argument("config: vehicle spring > 0");
      break;
  }
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["scenario"] = to_string(kind);
  j["beam"] = beam_to_json(beam);
  j["sensor"]["velocity"] = sensor_velocity;
  j["sensor"]["dt"] = sensor_dt;
  j["noise_rms_fraction"] = noise_rms_fraction;
  j["runs"] = runs;
  j["master_seed"] = master_seed;
  j["identify"]["n_modes"] = n_modes_identify;
  j["out"] = out_dir;

  json& e = j["excitation"];
  switch (kind) {
    case ScenarioKind::kFixedForce:
      e["location"] = fixed.location;
      e["force_rms"] = fixed.force_rms;
      break;
    case ScenarioKind::kMovingMass:
      if (!moving.script_masses.empty()) {
        e["script"]["masses"] = moving.script_masses;
        e["script"]["velocities"] = moving.script_velocities;
        e["script"]["lags"] = moving.script_lags;
        e["script"]["ride_vehicle"] = moving.ride_vehicle;
      } else {
        e["traffic"] = traffic_model_to_json(moving.model);
        e["warmup"] = moving.warmup;
        e["sensor_mass"] = moving.sensor_mass;
      }
      break;
    case ScenarioKind::kVbi:
      e["traffic"] = traffic_model_to_json(vbi.model);
      e["warmup"] = vbi.warmup;
      e["n_elements"] = vbi.n_elements;
      e["instrumented"]["velocity"] = vbi.instrumented_velocity;
      e["instrumented"]["mass"] = vbi.instrumented_mass;
      e["roughness"]["psd_level"] = vbi.roughness.psd_level;
      e["roughness"]["kappa_min"] = vbi.roughness.kappa_min;
      e["roughness"]["kappa_max"] = vbi.roughness.kappa_max;
      e["roughness"]["dkappa"] = vbi.roughness.dkappa;
      e["roughness"]["frozen"] = vbi.frozen_roughness;
      e["step"] = vbi.step;
      break;
  }
  if (!checks.empty()) {
    json arr = json::array();
    for (const auto& c : checks) {
      json cj;
      cj["estimator"] = c.estimator;
      cj["metric"] = c.metric;
      cj["mode"] = c.mode;
      cj["min"] = c.min;
      arr.push_back(cj);
    }
    j["checks"] = arr;
  }
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& err) {
    throw std::invalid_argument(std::string("config: parse error: ") + err.what());
  }
  ExperimentConfig c;
  try {
    c.kind = scenario_from_string(j.at("scenario").get<std::string>());
    c.beam = beam_from_json(j.at("beam"));
    c.sensor_velocity = j.at("sensor").at("velocity").get<double>();
    c.sensor_dt = j.at("sensor").at("dt").get<double>();
    c.noise_rms_fraction = j.value("noise_rms_fraction", 0.0);
    c.runs = j.value("runs", 1);
    c.master_seed = j.value("master_seed", std::uint64_t{1});
    if (j.contains("identify")) c.n_modes_identify = j["identify"].value("n_modes", 4);
    c.out_dir = j.value("out", "out");

    const json& e = j.at("excitation");
    switch (c.kind) {
      case ScenarioKind::kFixedForce:
        c.fixed.location = e.at("location").get<double>();
        c.fixed.force_rms = e.value("force_rms", 1.0);
        break;
      case ScenarioKind::kMovingMass:
        if (e.contains("script")) {
          c.moving.script_masses = e["script"].at("masses").get<std::vector<double>>();
          c.moving.script_velocities =
              e["script"].at("velocities").get<std::vector<double>>();
          c.moving.script_lags = e["script"].at("lags").get<std::vector<double>>();
          c.moving.ride_vehicle = e["script"].value("ride_vehicle", 0);
        } else {
          c.moving.model = traffic_model_from_json(e.at("traffic"));
          c.moving.warmup = e.value("warmup", 6.0);
          c.moving.sensor_mass = e.value("sensor_mass", 0.0);
        }
        break;
      case ScenarioKind::kVbi:
        c.vbi.model = traffic_model_from_json(e.at("traffic"));
        c.vbi.warmup = e.value("warmup", 5.0);
        c.vbi.n_elements = e.value("n_elements", 30);
        c.vbi.instrumented_velocity = e.at("instrumented").at("velocity").get<double>();
        c.vbi.instrumented_mass = e["instrumented"].value("mass", 0.0);
        if (e.contains("roughness")) {
          c.vbi.roughness.psd_level = e["roughness"].value("psd_level", 0.0);
          c.vbi.roughness.kappa_min = e["roughness"].value("kappa_min", 1.0);
          c.vbi.roughness.kappa_max = e["roughness"].value("kappa_max", 100.0);
          c.vbi.roughness.dkappa = e["roughness"].value("dkappa", 0.04);
          c.vbi.frozen_roughness = e["roughness"].value("frozen", false);
        }
        c.vbi.step = e.value("step", 0.0);
        break;
    }
    if (j.contains("checks")) {
      for (const auto& cj : j["checks"]) {
        CheckSpec spec;
        spec.estimator = cj.at("estimator").get<std::string>();
        spec.metric = cj.at("metric").get<std::string>();
        spec.mode = cj.value("mode", 1);
        spec.min = cj.value("min", 0.0);
        c.checks.push_back(spec);
      }
    }
  } catch (const json::exception& err) {
    throw std::invalid_argument(std::string("config: ") + err.what());
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

std::string config_hash(const ExperimentConfig& config) {
  // FNV-1a over the canonical (key-sorted) serialization
  const std::string text = config.to_json();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// simulation

namespace {

constexpr std::uint64_t kStreamTraffic = 1;
constexpr std::uint64_t kStreamRoughness = 2;
constexpr std::uint64_t kStreamNoise = 3;
constexpr std::uint64_t kStreamForce = 4;

SensorRecord simulate_fixed_force(const ExperimentConfig& c, std::uint64_t run_seed,
                                  SimArtifacts* artifacts) {
  const ModalModel modal = ModalModel::from_spec(c.beam);
  const auto traj =
      SensorTrajectory::crossing(c.beam.length, c.sensor_velocity, c.sensor_dt);
  Rng force_rng(derive_seed(run_seed, kStreamForce));
  std::vector<double> force(static_cast<std::size_t>(traj.n_samples));
  for (auto& f : force) f = c.fixed.force_rms * force_rng.normal();
  SensorRecord rec = duhamel_fixed_force(modal, force, c.sensor_dt,
                                         c.fixed.location, traj);
  if (artifacts) artifacts->force = std::move(force);
  return rec;
}

SensorRecord simulate_moving_mass(const ExperimentConfig& c, std::uint64_t run_seed,
                                  SimArtifacts* artifacts) {
  const ModalModel modal = ModalModel::from_spec(c.beam);
  TrafficRealization traffic;
  SensorTrajectory traj;
  if (!c.moving.script_masses.empty()) {
    traffic = scripted_stream(c.moving.script_masses, c.moving.script_velocities,
                              c.moving.script_lags);
    const Vehicle& ride =
        traffic.vehicles.at(static_cast<std::size_t>(c.moving.ride_vehicle));
    traj = SensorTrajectory::crossing(c.beam.length, ride.velocity, c.sensor_dt,
                                      ride.arrival);
  } else {
    TrafficModel model = c.moving.model;
    model.start = -c.moving.warmup;
    traffic = sample_vehicles(model, derive_seed(run_seed, kStreamTraffic));
    if (c.moving.sensor_mass > 0.0) {
      Vehicle sensor;
      sensor.mass = c.moving.sensor_mass;
      sensor.velocity = c.sensor_velocity;
      sensor.arrival = 0.0;
      insert_vehicle(traffic, sensor);
    }
    traj = SensorTrajectory::crossing(c.beam.length, c.sensor_velocity, c.sensor_dt);
  }
  SensorRecord rec = duhamel_moving_masses(modal, traffic, traj);
  if (artifacts) artifacts->traffic = std::move(traffic);
  return rec;
}

SensorRecord simulate_vbi(const ExperimentConfig& c, std::uint64_t run_seed,
                          SimArtifacts* artifacts) {
  VbiScenario sc;
  sc.fe = fe_assemble(c.beam, c.vbi.n_elements);

  TrafficModel model = c.vbi.model;
  model.start = -c.vbi.warmup;
  sc.traffic = sample_vehicles(model, derive_seed(run_seed, kStreamTraffic));
  Vehicle instrumented;
  instrumented.mass =
      c.vbi.instrumented_mass > 0.0 ? c.vbi.instrumented_mass : model.mean_mass;
  instrumented.velocity = c.vbi.instrumented_velocity;
  instrumented.arrival = 0.0;
  instrumented.spring = model.spring;
  instrumented.damper =
      2.0 * model.damping_ratio * std::sqrt(model.spring * instrumented.mass);
  sc.instrumented = insert_vehicle(sc.traffic, instrumented);

  const std::uint64_t rough_seed =
      c.vbi.frozen_roughness ? derive_seed(c.master_seed, kStreamRoughness)
                             : derive_seed(run_seed, kStreamRoughness);
  sc.roughness = generate_profile(c.vbi.roughness, rough_seed);

  sc.sensor_dt = c.sensor_dt;
  sc.modal_channels = std::min(c.n_modes_identify, 4);
  if (c.vbi.step > 0.0) {
    sc.step = c.vbi.step;
  } else {
    const double f_max =
        natural_frequency(c.beam, std::max(sc.modal_channels, 1)) / (2.0 * M_PI);
    const int m = std::max(1, static_cast<int>(std::ceil(c.sensor_dt * 20.0 * f_max)));
    sc.step = c.sensor_dt / m;
  }
  if (artifacts) artifacts->traffic = sc.traffic;
  return vbi_integrate(sc, false).record;
}

}  // namespace

SensorRecord simulate_run(const ExperimentConfig& config, int run_index,
                          SimArtifacts* artifacts) {
  config.validate();
  const std::uint64_t run_seed =
      derive_seed(config.master_seed, static_cast<std::uint64_t>(run_index));
  if (artifacts) artifacts->run_seed = run_seed;

  SensorRecord rec;
  switch (config.kind) {
    case ScenarioKind::kFixedForce:
      rec = simulate_fixed_force(config, run_seed, artifacts);
      break;
    case ScenarioKind::kMovingMass:
      rec = simulate_moving_mass(config, run_seed, artifacts);
      break;
    case ScenarioKind::kVbi:
      rec = simulate_vbi(config, run_seed, artifacts);
      break;
  }
  rec.seed = run_seed;
  rec.scenario = to_string(config.kind);
  if (config.noise_rms_fraction > 0.0) {
    Rng noise_rng(derive_seed(run_seed, kStreamNoise));
    rec = add_noise(rec, config.noise_rms_fraction, noise_rng);
  }
  return rec;
}

std::string RunManifest::to_json() const {
  json j;
  j["config_hash"] = config_hash;
  j["version"] = version;
  j["timestamp"] = timestamp;
  j["master_seed"] = master_seed;
  j["run_seeds"] = run_seeds;
  j["record_files"] = record_files;
  j["excitation_files"] = excitation_files;
  j["all_ok"] = all_ok;
  return j.dump(2);
}

RunManifest RunManifest::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("manifest: cannot open " + path.string());
  json j = json::parse(in);
  RunManifest m;
  m.config_hash = j.at("config_hash").get<std::string>();
  m.version = j.at("version").get<std::string>();
  m.timestamp = j.at("timestamp").get<std::string>();
  m.master_seed = j.at("master_seed").get<std::uint64_t>();
  m.run_seeds = j.at("run_seeds").get<std::vector<std::uint64_t>>();
  m.record_files = j.at("record_files").get<std::vector<std::string>>();
  m.excitation_files = j.at("excitation_files").get<std::vector<std::string>>();
  m.all_ok = j.at("all_ok").get<bool>();
  return m;
}

namespace {

void write_traffic_csv(const std::filesystem::path& path,
                       const TrafficRealization& traffic) {
  std::vector<double> mass, velocity, arrival, spring, damper;
  for (const auto& v : traffic.vehicles) {
    mass.push_back(v.mass);
    velocity.push_back(v.velocity);
    arrival.push_back(v.arrival);
    spring.push_back(v.spring);
    damper.push_back(v.damper);
  }
  write_csv(path, {"mass", "velocity", "arrival", "spring", "damper"},
            {mass, velocity, arrival, spring, damper});
}

TrafficRealization read_traffic_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  TrafficRealization tr;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    Vehicle v;
    v.mass = t.column("mass")[r];
    v.velocity = t.column("velocity")[r];
    v.arrival = t.column("arrival")[r];
    v.spring = t.column("spring")[r];
    v.damper = t.column("damper")[r];
    tr.vehicles.push_back(v);
  }
  return tr;
}

}  // namespace

RunManifest run_simulate(const ExperimentConfig& config,
                         const std::filesystem::path& out_dir, int workers) {
  config.validate();
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "runs");

  {
    std::ofstream cfg(out_dir / "config.json");
    cfg << config.to_json() << '\n';
  }

  RunManifest manifest;
  manifest.config_hash = msid::config_hash(config);
  manifest.version = kToolkitVersion;
  manifest.timestamp = iso_timestamp();
  manifest.master_seed = config.master_seed;
  manifest.run_seeds.resize(static_cast<std::size_t>(config.runs));
  manifest.record_files.resize(static_cast<std::size_t>(config.runs));
  manifest.excitation_files.resize(static_cast<std::size_t>(config.runs));
  std::vector<std::string> failures(static_cast<std::size_t>(config.runs));

  run_indexed(config.runs, workers, [&](int r) {
    const std::size_t idx = static_cast<std::size_t>(r);
    char name[32];
    std::snprintf(name, sizeof(name), "run_%03d", r);
    const fs::path run_dir = out_dir / "runs" / name;
    fs::create_directories(run_dir);
    try {
      SimArtifacts artifacts;
      const SensorRecord rec = simulate_run(config, r, &artifacts);
      write_record_csv(run_dir / "record.csv", rec);
      manifest.record_files[idx] = std::string("runs/") + name + "/record.csv";
      manifest.run_seeds[idx] = artifacts.run_seed;

      if (config.kind == ScenarioKind::kFixedForce) {
        std::vector<double> t(artifacts.force.size());
        for (std::size_t k = 0; k < t.size(); ++k) t[k] = static_cast<double>(k) * config.sensor_dt;
        write_csv(run_dir / "excitation.csv", {"t", "f"}, {t, artifacts.force});
        manifest.excitation_files[idx] = std::string("runs/") + name + "/excitation.csv";
      } else {
        write_traffic_csv(run_dir / "traffic.csv", artifacts.traffic);
        manifest.excitation_files[idx] = std::string("runs/") + name + "/traffic.csv";
      }

      json meta;
      meta["run"] = r;
      meta["seed"] = artifacts.run_seed;
      meta["scenario"] = to_string(config.kind);
      meta["config_hash"] = manifest.config_hash;
      std::ofstream ms(run_dir / "meta.json");
      ms << meta.dump(2) << '\n';
    } catch (const std::exception& err) {
      failures[idx] = err.what();
    }
  });

  manifest.all_ok = true;
  for (std::size_t r = 0; r < failures.size(); ++r) {
    if (!failures[r].empty()) {
      manifest.all_ok = false;
      manifest.record_files[r] = std::string("FAILED: ") + failures[r];
    }
  }
  std::ofstream mf(out_dir / "manifest.json");
  mf << manifest.to_json() << '\n';
  if (!mf) throw std::runtime_error("run_simulate: cannot write manifest");
  return manifest;
}

// ---------------------------------------------------------------------------
// identification

namespace {

struct ModeCluster {
  double omega_mean = 0.0, omega_sd = 0.0;
  double zeta_mean = 0.0, zeta_sd = 0.0;
  int population = 0;
};

std::vector<ModeCluster> cluster_modes(const std::vector<EfddResult>& per_run) {
  struct Obs {
    double omega, zeta;
  };
  std::vector<Obs> all;
  for (const auto& res : per_run)
    for (const auto& m : res.modes)
      if (m.resolved) all.push_back({m.omega, m.zeta});
  std::sort(all.begin(), all.end(),
            [](const Obs& a, const Obs& b) { return a.omega < b.omega; });

  std::vector<ModeCluster> clusters;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i + 1;
    while (j < all.size() && all[j].omega < 1.15 * all[j - 1].omega) ++j;
    ModeCluster c;
    c.population = static_cast<int>(j - i);
    std::vector<double> ws, zs;
    for (std::size_t k = i; k < j; ++k) {
      ws.push_back(all[k].omega);
      zs.push_back(all[k].zeta);
    }
    c.omega_mean = mean(ws);
    c.zeta_mean = mean(zs);
    c.omega_sd = ws.size() > 1 ? stdev(ws) : 0.0;
    c.zeta_sd = zs.size() > 1 ? stdev(zs) : 0.0;
    clusters.push_back(c);
    i = j;
  }
  return clusters;
}

std::vector<double> truth_shape(const BeamSpec& beam, int n,
                                const std::vector<double>& x) {
  std::vector<double> out;
  out.reserve(x.size());
  for (double xi : x) out.push_back(mode_shape_analytic(n, xi, beam.length));
  return out;
}

}  // namespace

std::string IdentifiedSummary::to_json() const {
  json j;
  j["estimator"] = estimator;
  j["omega"] = omega;
  j["zeta"] = zeta;
  j["omega_sd"] = omega_sd;
  j["zeta_sd"] = zeta_sd;
  std::vector<int> exc;
  for (bool e : excited) exc.push_back(e ? 1 : 0);
  j["excited"] = exc;
  j["mac_vs_truth"] = mac_vs_truth;
  j["corr_vs_truth"] = corr_vs_truth;
  return j.dump(2);
}

IdentifiedSummary IdentifiedSummary::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("summary: cannot open " + path.string());
  json j = json::parse(in);
  IdentifiedSummary s;
  s.estimator = j.at("estimator").get<std::string>();
  s.omega = j.at("omega").get<std::vector<double>>();
  s.zeta = j.at("zeta").get<std::vector<double>>();
  s.omega_sd = j.at("omega_sd").get<std::vector<double>>();
  s.zeta_sd = j.at("zeta_sd").get<std::vector<double>>();
  for (int e : j.at("excited").get<std::vector<int>>()) s.excited.push_back(e != 0);
  s.mac_vs_truth = j.at("mac_vs_truth").get<std::vector<double>>();
  s.corr_vs_truth = j.at("corr_vs_truth").get<std::vector<double>>();
  return s;
}

IdentifiedSummary run_identify(const std::filesystem::path& out_dir,
                               const std::string& estimator, int workers) {
  namespace fs = std::filesystem;
  if (estimator != "nls" && estimator != "sd" && estimator != "eps")
    throw std::invalid_argument("identify: estimator must be nls, sd or eps");
  const ExperimentConfig config = ExperimentConfig::from_file(out_dir / "config.json");
  const RunManifest manifest = RunManifest::from_file(out_dir / "manifest.json");
  if (!manifest.all_ok)
    throw std::runtime_error("identify: manifest marks failed runs");
  if (estimator == "nls" && config.kind == ScenarioKind::kVbi)
    throw std::invalid_argument(
        "identify: the nls estimator requires a known excitation; the "
        "interaction scenario's roughness forcing is not known to the "
        "identification side");
  if (estimator == "eps" && config.runs < 2)
    throw std::invalid_argument("identify: eps needs an ensemble of runs");
  if (estimator == "sd" && config.runs < 10)
    throw std::invalid_argument("identify: sd needs >= 10 runs");

  const int n_runs = config.runs;
  std::vector<SensorRecord> records(static_cast<std::size_t>(n_runs));
  for (int r = 0; r < n_runs; ++r)
    records[static_cast<std::size_t>(r)] = read_record_csv(
        out_dir / manifest.record_files[static_cast<std::size_t>(r)]);

  const double dt = config.sensor_dt;
  const int n_modes = config.n_modes_identify;

  // per-run frequency/damping identification, then ensemble clustering
  std::vector<EfddResult> efdd(static_cast<std::size_t>(n_runs));
  run_indexed(n_runs, workers, [&](int r) {
    efdd[static_cast<std::size_t>(r)] =
        efdd_identify(records[static_cast<std::size_t>(r)].acc, dt, n_modes);
  });
  const std::vector<ModeCluster> clusters = cluster_modes(efdd);

  // match clusters to the analytic mode slots of the configured beam
  IdentifiedSummary summary;
  summary.estimator = estimator;
  summary.omega.assign(static_cast<std::size_t>(n_modes), 0.0);
  summary.zeta.assign(static_cast<std::size_t>(n_modes), 0.0);
  summary.omega_sd.assign(static_cast<std::size_t>(n_modes), 0.0);
  summary.zeta_sd.assign(static_cast<std::size_t>(n_modes), 0.0);
  summary.excited.assign(static_cast<std::size_t>(n_modes), false);
  std::vector<bool> matched(static_cast<std::size_t>(n_modes), false);
  for (int n = 1; n <= n_modes; ++n) {
    const double truth = natural_frequency(config.beam, n);
    const ModeCluster* best = nullptr;
    for (const auto& c : clusters)
      if (std::abs(c.omega_mean - truth) < 0.2 * truth)
        if (!best || c.population > best->population) best = &c;
    const std::size_t idx = static_cast<std::size_t>(n - 1);
    if (best) {
      summary.omega[idx] = best->omega_mean;
      summary.zeta[idx] = best->zeta_mean;
      summary.omega_sd[idx] = best->omega_sd;
      summary.zeta_sd[idx] = best->zeta_sd;
      matched[idx] = true;
    } else {
      summary.omega[idx] = truth;  // slot kept on the analytic line
      summary.zeta[idx] = 0.0;
    }
  }

  // shape grid = sensor path of the ensemble
  summary.x = records[0].position;
  const std::size_t n_t = records[0].acc.size();
  for (const auto& rec : records)
    if (rec.acc.size() != n_t)
      throw std::runtime_error("identify: records disagree in length");

  std::vector<double> targets = summary.omega;
  summary.shapes.assign(static_cast<std::size_t>(n_modes),
                        std::vector<double>(n_t, 0.0));

  if (estimator == "nls") {
    // fit only the modes the data can support
    std::vector<ModeEstimate> modes;
    std::vector<int> slot_of;
    for (int n = 0; n < n_modes; ++n)
      if (matched[static_cast<std::size_t>(n)]) {
        modes.push_back({summary.omega[static_cast<std::size_t>(n)],
                         std::max(1e-4, summary.zeta[static_cast<std::size_t>(n)])});
        slot_of.push_back(n);
      }
    if (modes.empty()) throw std::runtime_error("identify: no resolvable modes");
    const BopBasis basis = BopBasis::build(8);

    std::vector<double> mac_acc(static_cast<std::size_t>(n_modes), 0.0);
    std::vector<double> corr_acc(static_cast<std::size_t>(n_modes), 0.0);
    int fitted_runs = 0;
    for (int r = 0; r < n_runs; ++r) {
      const fs::path exc =
          out_dir / manifest.excitation_files[static_cast<std::size_t>(r)];
      FitResult fit;
      if (config.kind == ScenarioKind::kFixedForce) {
        const CsvTable t = read_csv(exc);
        fit = fit_bop_weights(records[static_cast<std::size_t>(r)], modes,
                              t.column("f"), config.fixed.location, basis,
                              config.beam.mass_per_length, config.beam.length);
      } else {
        fit = fit_bop_weights(records[static_cast<std::size_t>(r)], modes,
                              read_traffic_csv(exc), basis,
                              config.beam.mass_per_length, config.beam.length);
      }
      ++fitted_runs;
      for (std::size_t m = 0; m < modes.size(); ++m) {
        const int slot = slot_of[m];
        auto shape = shapes_from_weights(fit.weights.row(static_cast<int>(m)),
                                         basis, summary.x, config.beam.length);
        const auto truth = truth_shape(config.beam, slot + 1, summary.x);
        mac_acc[static_cast<std::size_t>(slot)] += mac(shape, truth);
        std::vector<double> mag(shape.size());
        std::vector<double> truth_mag(truth.size());
        for (std::size_t k = 0; k < shape.size(); ++k) {
          mag[k] = std::abs(shape[k]);
          truth_mag[k] = std::abs(truth[k]);
        }
        corr_acc[static_cast<std::size_t>(slot)] += pearson(mag, truth_mag);
        if (r == 0)
          summary.shapes[static_cast<std::size_t>(slot)] = normalize_unit_max(shape);
      }
    }
    summary.mac_vs_truth.assign(static_cast<std::size_t>(n_modes), 0.0);
    summary.corr_vs_truth.assign(static_cast<std::size_t>(n_modes), 0.0);
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const std::size_t slot = static_cast<std::size_t>(slot_of[m]);
      summary.excited[slot] = true;
      summary.mac_vs_truth[slot] = mac_acc[slot] / fitted_runs;
      summary.corr_vs_truth[slot] = corr_acc[slot] / fitted_runs;
    }
  } else {
    // modal channels per run through the decomposition flow
    std::vector<ModalChannels> channels(static_cast<std::size_t>(n_runs));
    run_indexed(n_runs, workers, [&](int r) {
      channels[static_cast<std::size_t>(r)] =
          modal_decompose(records[static_cast<std::size_t>(r)].acc, dt, targets);
    });

    summary.mac_vs_truth.assign(static_cast<std::size_t>(n_modes), 0.0);
    summary.corr_vs_truth.assign(static_cast<std::size_t>(n_modes), 0.0);
    for (int n = 0; n < n_modes; ++n) {
      const std::size_t slot = static_cast<std::size_t>(n);
      int excited_votes = 0;
      for (const auto& ch : channels)
        if (ch.excited[slot]) ++excited_votes;
      summary.excited[slot] = excited_votes * 2 > n_runs;
      if (!summary.excited[slot]) continue;

      std::vector<std::vector<double>> ensemble;
      ensemble.reserve(static_cast<std::size_t>(n_runs));
      for (const auto& ch : channels) ensemble.push_back(ch.series[slot]);

      std::vector<double> magnitude;
      if (estimator == "sd") {
        magnitude = sd_modeshape(ensemble);
      } else {
        const EpsMatrix eps = build_eps(ensemble, dt, workers);
        magnitude = eps_modeshape(eps, summary.omega[slot]);
      }
      bool fallback = false;
      auto signed_shape = assign_signs(magnitude, &fallback);
      summary.shapes[slot] = normalize_unit_max(signed_shape);

      const auto truth = truth_shape(config.beam, n + 1, summary.x);
      summary.mac_vs_truth[slot] = mac(summary.shapes[slot], truth);
      std::vector<double> truth_mag(truth.size());
      for (std::size_t k = 0; k < truth.size(); ++k) truth_mag[k] = std::abs(truth[k]);
      summary.corr_vs_truth[slot] = pearson(magnitude, truth_mag);
    }
  }

  // persist tables
  fs::create_directories(out_dir / "identified");
  {
    std::vector<double> mode_col, w_col, z_col, wsd_col, zsd_col, exc_col;
    for (int n = 0; n < n_modes; ++n) {
      mode_col.push_back(n + 1);
      w_col.push_back(summary.omega[static_cast<std::size_t>(n)]);
      z_col.push_back(summary.zeta[static_cast<std::size_t>(n)]);
      wsd_col.push_back(summary.omega_sd[static_cast<std::size_t>(n)]);
      zsd_col.push_back(summary.zeta_sd[static_cast<std::size_t>(n)]);
      exc_col.push_back(summary.excited[static_cast<std::size_t>(n)] ? 1.0 : 0.0);
    }
    write_csv(out_dir / "identified" / ("frequencies_" + estimator + ".csv"),
              {"mode", "omega", "zeta", "omega_sd", "zeta_sd", "excited"},
              {mode_col, w_col, z_col, wsd_col, zsd_col, exc_col});
  }
  {
    std::vector<std::string> header = {"x"};
    std::vector<std::vector<double>> cols = {summary.x};
    for (int n = 0; n < n_modes; ++n) {
      header.push_back("phi" + std::to_string(n + 1));
      cols.push_back(summary.shapes[static_cast<std::size_t>(n)]);
    }
    write_csv(out_dir / "identified" / ("shapes_" + estimator + ".csv"), header, cols);
  }
  {
    std::ofstream sj(out_dir / "identified" / ("summary_" + estimator + ".json"));
    sj << summary.to_json() << '\n';
  }
  return summary;
}

// ---------------------------------------------------------------------------
// report

ReportOutcome run_report(const std::filesystem::path& out_dir, bool check) {
  namespace fs = std::filesystem;
  const ExperimentConfig config = ExperimentConfig::from_file(out_dir / "config.json");
  const RunManifest manifest = RunManifest::from_file(out_dir / "manifest.json");

  std::vector<IdentifiedSummary> summaries;
  for (const char* est : {"nls", "sd", "eps"}) {
    const fs::path p = out_dir / "identified" / (std::string("summary_") + est + ".json");
    if (fs::exists(p)) summaries.push_back(IdentifiedSummary::from_file(p));
  }
  if (summaries.empty())
    throw std::runtime_error("report: no identify outputs under " + out_dir.string());

  fs::create_directories(out_dir / "report");

  // merged report
  json merged;
  merged["config_hash"] = manifest.config_hash;
  merged["scenario"] = to_string(config.kind);
  merged["runs"] = config.runs;
  for (const auto& s : summaries) merged["estimators"][s.estimator] = json::parse(s.to_json());
  {
    std::ofstream out(out_dir / "report" / "report.json");
    out << merged.dump(2) << '\n';
  }

  // plot-ready curves: shapes per estimator, PSD of the first record
  for (const auto& s : summaries) {
    const fs::path src = out_dir / "identified" / ("shapes_" + s.estimator + ".csv");
    if (fs::exists(src))
      fs::copy_file(src, out_dir / "report" / ("curves_" + s.estimator + ".csv"),
                    fs::copy_options::overwrite_existing);
  }
  {
    const SensorRecord rec0 = read_record_csv(out_dir / manifest.record_files[0]);
    const PsdEstimate psd = welch_psd(rec0.acc, config.sensor_dt);
    write_csv(out_dir / "report" / "psd_run0.csv", {"omega", "power"},
              {psd.omega, psd.power});
  }

  ReportOutcome outcome;
  if (!check) return outcome;

  for (const auto& spec : config.checks) {
    const IdentifiedSummary* s = nullptr;
    for (const auto& cand : summaries)
      if (cand.estimator == spec.estimator) s = &cand;
    CheckOutcome co;
    std::ostringstream desc;
    desc << spec.estimator << " mode " << spec.mode << " " << spec.metric;
    co.description = desc.str();
    if (!s || spec.mode < 1 || spec.mode > static_cast<int>(s->omega.size())) {
      co.passed = false;
    } else {
      const std::size_t idx = static_cast<std::size_t>(spec.mode - 1);
      if (spec.metric == "mac") {
        co.value = s->mac_vs_truth[idx];
        co.passed = co.value >= spec.min;
      } else if (spec.metric == "corr") {
        co.value = s->corr_vs_truth[idx];
        co.passed = co.value >= spec.min;
      } else if (spec.metric == "freq") {
        const double truth = natural_frequency(config.beam, spec.mode);
        co.value = std::abs(s->omega[idx] - truth) / truth;
        co.passed = co.value <= spec.min;
      } else if (spec.metric == "unexcited") {
        co.value = s->excited[idx] ? 1.0 : 0.0;
        co.passed = !s->excited[idx];
      } else {
        co.passed = false;
      }
    }
    outcome.all_passed = outcome.all_passed && co.passed;
    outcome.checks.push_back(co);
  }
  return outcome;
}

}  // namespace msid
