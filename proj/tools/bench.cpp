// Serial vs OpenMP timing for the ensemble kernels: the closed-form
// moving-mass ensemble, the interaction-model ensemble, and the evolutionary
// power construction. Small sizes; intended as a smoke benchmark.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "msid/duhamel.hpp"
#include "msid/ensemble.hpp"
#include "msid/experiment.hpp"
#include "msid/rng.hpp"
#include "msid/sigproc.hpp"

using namespace msid;

namespace {

double seconds(std::chrono::steady_clock::time_point a,
               std::chrono::steady_clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

template <typename F>
double timed(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return seconds(t0, std::chrono::steady_clock::now());
}

BeamSpec lab_beam() {
  BeamSpec b;
  b.length = 10.0;
  b.mass_per_length = 6.1;
  b.flexural_rigidity = 152.67e3;
  b.n_modes = 4;
  b.damping = DampingSpec::uniform_ratio(0.02, 4);
  return b;
}

}  // namespace

int main() {
  int hw = 1;
#ifdef _OPENMP
  hw = omp_get_max_threads();
#endif
  std::printf("hardware threads: %d\n\n", hw);

  {  // closed-form moving-mass ensemble
    ExperimentConfig cfg;
    cfg.kind = ScenarioKind::kMovingMass;
    cfg.beam = lab_beam();
    cfg.sensor_velocity = 0.5;
    cfg.sensor_dt = 0.005;
    cfg.moving.model.count = 25;
    cfg.moving.model.mean_mass = 1.0;
    cfg.moving.model.mean_velocity = 2.0;
    cfg.moving.model.arrival_rate = 1.0;
    cfg.moving.warmup = 6.0;
    cfg.runs = 24;
    cfg.master_seed = 7;

    std::vector<SensorRecord> slots(static_cast<std::size_t>(cfg.runs));
    auto body = [&](int r) { slots[static_cast<std::size_t>(r)] = simulate_run(cfg, r); };
    const double serial = timed([&] { run_indexed(cfg.runs, 1, body); });
    const double parallel = timed([&] { run_indexed(cfg.runs, 0, body); });
    std::printf("moving-mass ensemble (%d runs):  serial %.3f s  parallel %.3f s  speedup %.2fx\n",
                cfg.runs, serial, parallel, serial / parallel);
  }

  {  // interaction-model ensemble (small mesh to keep the benchmark quick)
    ExperimentConfig cfg;
    cfg.kind = ScenarioKind::kVbi;
    cfg.beam.length = 30.0;
    cfg.beam.mass_per_length = 1000.0;
    cfg.beam.flexural_rigidity = 27.5e9 * 0.175;
    cfg.beam.n_modes = 6;
    cfg.beam.damping = DampingSpec::uniform_ratio(0.01, 6);
    cfg.sensor_velocity = 4.0;
    cfg.sensor_dt = 0.005;
    cfg.vbi.n_elements = 16;
    cfg.vbi.model.count = 8;
    cfg.vbi.model.mean_mass = 1500.0;
    cfg.vbi.model.mean_velocity = 20.0;
    cfg.vbi.model.arrival_rate = 2.0;
    cfg.vbi.model.spring = 170e3;
    cfg.vbi.model.damping_ratio = 0.2;
    cfg.vbi.warmup = 2.0;
    cfg.vbi.instrumented_velocity = 10.0;
    cfg.vbi.roughness.psd_level = 0.25e-6;
    cfg.runs = 4;
    cfg.master_seed = 7;

    std::vector<SensorRecord> slots(static_cast<std::size_t>(cfg.runs));
    auto body = [&](int r) { slots[static_cast<std::size_t>(r)] = simulate_run(cfg, r); };
    const double serial = timed([&] { run_indexed(cfg.runs, 1, body); });
    const double parallel = timed([&] { run_indexed(cfg.runs, 0, body); });
    std::printf("interaction ensemble (%d runs):  serial %.3f s  parallel %.3f s  speedup %.2fx\n",
                cfg.runs, serial, parallel, serial / parallel);
  }

  {  // evolutionary power construction
    Rng rng(3);
    const int runs = 32, nt = 2000;
    std::vector<std::vector<double>> ensemble(runs, std::vector<double>(nt));
    for (auto& run : ensemble)
      for (auto& v : run) v = rng.normal();
    EpsMatrix a, b;
    const double serial = timed([&] { a = build_eps(ensemble, 0.005, 1); });
    const double parallel = timed([&] { b = build_eps(ensemble, 0.005, 0); });
    const double diff = (a.power - b.power).cwiseAbs().maxCoeff();
    std::printf("evolutionary power (%d x %d):    serial %.3f s  parallel %.3f s  speedup %.2fx  max diff %.1e\n",
                runs, nt, serial, parallel, serial / parallel, diff);
  }
  return 0;
}
