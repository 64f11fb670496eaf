#pragma once

#include <Eigen/Dense>

#include "msid/fe_beam.hpp"
#include "msid/record.hpp"
#include "msid/roughness.hpp"
#include "msid/traffic.hpp"

namespace msid {

struct CoupledState {
  Eigen::VectorXd vehicle_disp, vehicle_vel, vehicle_acc;
  Eigen::VectorXd bridge_disp, bridge_vel, bridge_acc;
  double time = 0.0;
};

// Coupled sprung-mass vehicles on the FE beam with road roughness. The
// instrumented vehicle's arrival defines the sensor window; the sensor
// output is the bridge acceleration interpolated at its contact point.
struct VbiScenario {
  FeBeam fe;
  TrafficRealization traffic;  // all vehicles, the instrumented one included
  int instrumented = 0;        // index into traffic.vehicles
  RoughnessProfile roughness;
  double step = 0.0;       // integration step, s
  double sensor_dt = 0.0;  // output interval, an integer multiple of step
  int modal_channels = 4;
  bool moving_load_only = false;  // vehicles reduced to moving gravity loads
  Eigen::VectorXd initial_bridge_disp;  // optional, active DOFs

  void validate() const;
  const Vehicle& sensor_vehicle() const {
    return traffic.vehicles.at(static_cast<std::size_t>(instrumented));
  }
};

struct CoupledMatrices {
  Eigen::MatrixXd mass, damping, stiffness;
  Eigen::VectorXd load;
};

// Contact shape matrix N_G (active DOFs x vehicles) and its spatial
// derivative; off-span vehicles contribute zero columns.
void contact_shape_matrix(const VbiScenario& sc, double t, Eigen::MatrixXd& ng,
                          Eigen::MatrixXd& ng_prime);

// Block system over [vehicle DOFs; bridge DOFs] at time t, including the
// velocity coupling through the shape derivative, the roughness forcing and
// the gravity loads.
CoupledMatrices assemble_coupled(const VbiScenario& sc, double t);

// Contact force of vehicle j (negative pushes the deck down). Rejects
// off-span vehicles.
double contact_force(const CoupledState& state, const VbiScenario& sc, int j,
                     double t);

struct VbiResult {
  SensorRecord record;  // lowpass-filtered and decimated to sensor_dt
  std::vector<CoupledState> history;  // one per sensor sample, when requested
};

// Newmark average-acceleration stepping with the coupled matrices
// reassembled every step. Aborts with a diagnostic if the response grows
// beyond any physical bound.
VbiResult vbi_integrate(const VbiScenario& sc, bool keep_history = false);

}  // namespace msid
