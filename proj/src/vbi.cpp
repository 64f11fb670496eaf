#include "msid/vbi.hpp"

#include <cmath>
#include <stdexcept>

#include "msid/duhamel.hpp"
#include "msid/sigproc.hpp"

namespace msid {

void VbiScenario::validate() const {
  traffic.validate();
  if (traffic.count() == 0) throw std::invalid_argument("vbi: no vehicles");
  if (instrumented < 0 || instrumented >= traffic.count())
    throw std::invalid_argument("vbi: instrumented index out of range");
  if (step <= 0.0) throw std::invalid_argument("vbi: step > 0");
  if (sensor_dt <= 0.0) throw std::invalid_argument("vbi: sensor_dt > 0");
  const double ratio = sensor_dt / step;
  if (std::abs(ratio - std::llround(ratio)) > 1e-9)
    throw std::invalid_argument("vbi: sensor_dt must be a multiple of step");
  if (!moving_load_only)
    for (const auto& v : traffic.vehicles) {
      if (v.spring <= 0.0) throw std::invalid_argument("vbi: vehicle spring > 0");
      if (v.damper < 0.0) throw std::invalid_argument("vbi: vehicle damper >= 0");
    }
  if (modal_channels < 0 || modal_channels > fe.n_active())
    throw std::invalid_argument("vbi: bad modal channel count");
}

namespace {

struct ContactPoint {
  bool on_span = false;
  int element = 0;
  std::array<double, 4> shape{};
  std::array<double, 4> shape_prime{};
};

ContactPoint locate_contact(const FeBeam& fe, const Vehicle& v, double t,
                            double span) {
  ContactPoint c;
  if (!v.on_span(t, span)) return c;
  const double x = std::min(v.position(t, span), span);
  double xi = 0.0;
  c.element = fe.locate(x, xi);
  c.shape = hermite_shape(xi, fe.element_length);
  c.shape_prime = hermite_shape_deriv(xi, fe.element_length);
  c.on_span = true;
  return c;
}

void scatter(const FeBeam& fe, const ContactPoint& c, const std::array<double, 4>& local,
             Eigen::MatrixXd& target, int col) {
  for (int i = 0; i < 4; ++i) {
    const int ai = fe.active_index[static_cast<std::size_t>(2 * c.element + i)];
    if (ai >= 0) target(ai, col) += local[static_cast<std::size_t>(i)];
  }
}

// shared assembly core; roughness values at the contact points are injected
void assemble_core(const VbiScenario& sc, double t,
                   const std::vector<double>& rough,
                   const std::vector<double>& rough_slope, CoupledMatrices& out) {
  const FeBeam& fe = sc.fe;
  const int nv = sc.traffic.count();
  const int nb = fe.n_active();
  const int n = nv + nb;
  const double span = fe.length;

  if (out.mass.rows() != n) {
    out.mass.resize(n, n);
    out.damping.resize(n, n);
    out.stiffness.resize(n, n);
    out.load.resize(n);
  }
  out.mass.setZero();
  out.damping.setZero();
  out.stiffness.setZero();
  out.load.setZero();

  out.mass.bottomRightCorner(nb, nb) = fe.mass;
  out.damping.bottomRightCorner(nb, nb) = fe.damping;
  out.stiffness.bottomRightCorner(nb, nb) = fe.stiffness;

  for (int j = 0; j < nv; ++j) {
    const Vehicle& veh = sc.traffic.vehicles[static_cast<std::size_t>(j)];
    out.mass(j, j) = veh.mass;
    const ContactPoint c = locate_contact(fe, veh, t, span);

    if (sc.moving_load_only) {
      // pure gravity load tracking the contact point; vehicle DOF decoupled
      if (c.on_span) {
        for (int i = 0; i < 4; ++i) {
          const int ai = fe.active_index[static_cast<std::size_t>(2 * c.element + i)];
          if (ai >= 0)
            out.load(nv + ai) -= veh.mass * kGravity * c.shape[static_cast<std::size_t>(i)];
        }
      }
      continue;
    }

    out.damping(j, j) = veh.damper;
    out.stiffness(j, j) = veh.spring;
    if (!c.on_span) continue;

    const double r = rough[static_cast<std::size_t>(j)];
    const double rp = rough_slope[static_cast<std::size_t>(j)];
    const double cv = veh.damper, kv = veh.spring, vv = veh.velocity;

    for (int i = 0; i < 4; ++i) {
      const int ai = fe.active_index[static_cast<std::size_t>(2 * c.element + i)];
      if (ai < 0) continue;
      const double ni = c.shape[static_cast<std::size_t>(i)];
      const double di = c.shape_prime[static_cast<std::size_t>(i)];

      out.damping(j, nv + ai) -= cv * ni;
      out.damping(nv + ai, j) -= cv * ni;
      out.stiffness(j, nv + ai) -= cv * vv * di + kv * ni;
      out.stiffness(nv + ai, j) -= kv * ni;
      out.load(nv + ai) -= (cv * vv * rp + kv * r + veh.mass * kGravity) * ni;

      for (int l = 0; l < 4; ++l) {
        const int al = fe.active_index[static_cast<std::size_t>(2 * c.element + l)];
        if (al < 0) continue;
        const double nl = c.shape[static_cast<std::size_t>(l)];
        const double dl = c.shape_prime[static_cast<std::size_t>(l)];
        out.damping(nv + ai, nv + al) += cv * ni * nl;
        out.stiffness(nv + ai, nv + al) += cv * vv * ni * dl + kv * ni * nl;
      }
    }
    out.load(j) += cv * vv * rp + kv * r;
  }
}

}  // namespace

void contact_shape_matrix(const VbiScenario& sc, double t, Eigen::MatrixXd& ng,
                          Eigen::MatrixXd& ng_prime) {
  const int nv = sc.traffic.count();
  const int nb = sc.fe.n_active();
  ng = Eigen::MatrixXd::Zero(nb, nv);
  ng_prime = Eigen::MatrixXd::Zero(nb, nv);
  for (int j = 0; j < nv; ++j) {
    const ContactPoint c =
        locate_contact(sc.fe, sc.traffic.vehicles[static_cast<std::size_t>(j)], t, sc.fe.length);
    if (!c.on_span) continue;
    scatter(sc.fe, c, c.shape, ng, j);
    scatter(sc.fe, c, c.shape_prime, ng_prime, j);
  }
}

CoupledMatrices assemble_coupled(const VbiScenario& sc, double t) {
  const int nv = sc.traffic.count();
  std::vector<double> r(static_cast<std::size_t>(nv), 0.0),
      rp(static_cast<std::size_t>(nv), 0.0);
  for (int j = 0; j < nv; ++j) {
    const Vehicle& veh = sc.traffic.vehicles[static_cast<std::size_t>(j)];
    if (!veh.on_span(t, sc.fe.length)) continue;
    const auto [rr, ss] = sc.roughness.evaluate(veh.position(t, sc.fe.length));
    r[static_cast<std::size_t>(j)] = rr;
    rp[static_cast<std::size_t>(j)] = ss;
  }
  CoupledMatrices out;
  assemble_core(sc, t, r, rp, out);
  return out;
}

double contact_force(const CoupledState& state, const VbiScenario& sc, int j,
                     double t) {
  const Vehicle& veh = sc.traffic.vehicles.at(static_cast<std::size_t>(j));
  if (!veh.on_span(t, sc.fe.length))
    throw std::invalid_argument("contact_force: vehicle off the span");
  const ContactPoint c = locate_contact(sc.fe, veh, t, sc.fe.length);
  const auto [r, rp] = sc.roughness.evaluate(veh.position(t, sc.fe.length));

  double nb_disp = 0.0, nb_vel = 0.0, nb_disp_prime = 0.0;
  for (int i = 0; i < 4; ++i) {
    const int ai = sc.fe.active_index[static_cast<std::size_t>(2 * c.element + i)];
    if (ai < 0) continue;
    nb_disp += c.shape[static_cast<std::size_t>(i)] * state.bridge_disp(ai);
    nb_vel += c.shape[static_cast<std::size_t>(i)] * state.bridge_vel(ai);
    nb_disp_prime += c.shape_prime[static_cast<std::size_t>(i)] * state.bridge_disp(ai);
  }
  const double rel = state.vehicle_disp(j) - nb_disp - r;
  const double rel_rate = state.vehicle_vel(j) - nb_vel -
                          veh.velocity * nb_disp_prime - veh.velocity * rp;
  return -veh.mass * kGravity + veh.damper * rel_rate + veh.spring * rel;
}

VbiResult vbi_integrate(const VbiScenario& sc, bool keep_history) {
  sc.validate();
  const FeBeam& fe = sc.fe;
  const int nv = sc.traffic.count();
  const int nb = fe.n_active();
  const int n = nv + nb;
  const double h = sc.step;
  const double span = fe.length;

  const Vehicle& sensor = sc.sensor_vehicle();
  const double t_entry = sensor.arrival;
  const double t_exit = sensor.exit_time(span);

  double t_first = t_entry;
  for (const auto& v : sc.traffic.vehicles) t_first = std::min(t_first, v.arrival);
  const int j_start = -static_cast<int>(std::ceil((t_entry - t_first) / h - 1e-9));
  const int j_end = static_cast<int>(std::floor((t_exit - t_entry) / h + 1e-9));
  auto time_at = [&](int j) { return t_entry + j * h; };

  // per-vehicle roughness streams over the on-span step range
  std::vector<int> enter_step(static_cast<std::size_t>(nv)), exit_step(static_cast<std::size_t>(nv));
  std::vector<RoughnessTracker> trackers;
  trackers.reserve(static_cast<std::size_t>(nv));
  for (int j = 0; j < nv; ++j) {
    const Vehicle& v = sc.traffic.vehicles[static_cast<std::size_t>(j)];
    enter_step[static_cast<std::size_t>(j)] =
        static_cast<int>(std::ceil((v.arrival - t_entry) / h - 1e-9));
    exit_step[static_cast<std::size_t>(j)] =
        static_cast<int>(std::floor((v.exit_time(span) - t_entry) / h + 1e-9));
    const double x0 = v.velocity * (time_at(enter_step[static_cast<std::size_t>(j)]) - v.arrival);
    trackers.emplace_back(sc.roughness, std::max(0.0, x0), v.velocity * h);
  }

  // Newmark average acceleration
  const double a0 = 4.0 / (h * h), a1 = 2.0 / h;

  Eigen::VectorXd u = Eigen::VectorXd::Zero(n), v1 = Eigen::VectorXd::Zero(n),
                  acc = Eigen::VectorXd::Zero(n);
  if (sc.initial_bridge_disp.size() > 0) {
    if (sc.initial_bridge_disp.size() != nb)
      throw std::invalid_argument("vbi: initial displacement size mismatch");
    u.tail(nb) = sc.initial_bridge_disp;
  }
  CoupledMatrices mats;
  std::vector<double> rough(static_cast<std::size_t>(nv), 0.0),
      rough_slope(static_cast<std::size_t>(nv), 0.0);

  auto fill_roughness = [&](int step_index) {
    for (int j = 0; j < nv; ++j) {
      if (step_index >= enter_step[static_cast<std::size_t>(j)] &&
          step_index <= exit_step[static_cast<std::size_t>(j)]) {
        const auto [r, s] = trackers[static_cast<std::size_t>(j)].next();
        rough[static_cast<std::size_t>(j)] = r;
        rough_slope[static_cast<std::size_t>(j)] = s;
      } else {
        rough[static_cast<std::size_t>(j)] = 0.0;
        rough_slope[static_cast<std::size_t>(j)] = 0.0;
      }
    }
  };

  fill_roughness(j_start);
  assemble_core(sc, time_at(j_start), rough, rough_slope, mats);
  acc = mats.mass.ldlt().solve(mats.load - mats.damping * v1 - mats.stiffness * u);

  // modal projectors for the retained channels
  Eigen::MatrixXd proj;           // channels x nb, rows = (M vn)^T
  Eigen::MatrixXd mode_vectors;   // nb x channels
  if (sc.modal_channels > 0) {
    const FeModes modes = fe_eigen_modes(fe, sc.modal_channels);
    mode_vectors = modes.vectors;
    proj = (fe.mass * modes.vectors).transpose();
  }

  std::vector<double> raw_time, raw_pos, raw_acc;
  std::vector<std::vector<double>> raw_modal(static_cast<std::size_t>(sc.modal_channels));
  VbiResult result;

  // physical bound for the divergence guard: static deflection under the
  // whole fleet parked at midspan, plus the roughness envelope
  double weight = 0.0;
  for (const auto& veh : sc.traffic.vehicles) weight += veh.mass * kGravity;
  double rough_envelope = 0.0;
  for (double d : sc.roughness.amplitude) rough_envelope += d;
  const double static_scale =
      fe_static_solve(fe, weight * fe.shape_column(span / 2.0)).cwiseAbs().maxCoeff() +
      rough_envelope + 1e-9;

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(n);
  Eigen::MatrixXd keff(n, n);
  Eigen::VectorXd rhs(n), u_new(n), acc_new(n);

  const int decimation = static_cast<int>(std::llround(sc.sensor_dt / h));

  // the coupled equations carry deflection upward-positive (gravity loads
  // enter negative); records are emitted downward-positive to match the
  // closed-form module's measurement convention
  auto emit = [&](int step_index) {
    const double t = time_at(step_index);
    const double x = sensor.position(t, span);
    raw_time.push_back(t);
    raw_pos.push_back(std::min(x, span));
    const Eigen::VectorXd bridge_acc = acc.tail(nb);
    double xi = 0.0;
    const int e = fe.locate(std::min(x, span), xi);
    const auto shape = hermite_shape(xi, fe.element_length);
    double sensor_acc = 0.0;
    for (int i = 0; i < 4; ++i) {
      const int ai = fe.active_index[static_cast<std::size_t>(2 * e + i)];
      if (ai >= 0) sensor_acc += shape[static_cast<std::size_t>(i)] * bridge_acc(ai);
    }
    raw_acc.push_back(-sensor_acc);
    for (int m = 0; m < sc.modal_channels; ++m) {
      const double qdd = proj.row(m).dot(bridge_acc);
      double phi = 0.0;
      for (int i = 0; i < 4; ++i) {
        const int ai = fe.active_index[static_cast<std::size_t>(2 * e + i)];
        if (ai >= 0) phi += shape[static_cast<std::size_t>(i)] * mode_vectors(ai, m);
      }
      raw_modal[static_cast<std::size_t>(m)].push_back(-phi * qdd);
    }
    if (keep_history && step_index % decimation == 0) {
      CoupledState st;
      st.time = t;
      st.vehicle_disp = u.head(nv);
      st.vehicle_vel = v1.head(nv);
      st.vehicle_acc = acc.head(nv);
      st.bridge_disp = u.tail(nb);
      st.bridge_vel = v1.tail(nb);
      st.bridge_acc = acc.tail(nb);
      result.history.push_back(std::move(st));
    }
  };

  if (j_start == 0) emit(0);
  for (int j = j_start + 1; j <= j_end; ++j) {
    fill_roughness(j);
    assemble_core(sc, time_at(j), rough, rough_slope, mats);
    keff.noalias() = mats.stiffness + a1 * mats.damping + a0 * mats.mass;
    rhs.noalias() = mats.load;
    rhs.noalias() += mats.mass * (a0 * u + 2.0 * a1 * v1 + acc);
    rhs.noalias() += mats.damping * (a1 * u + v1);
    lu.compute(keff);
    u_new.noalias() = lu.solve(rhs);
    acc_new.noalias() = a0 * (u_new - u) - 2.0 * a1 * v1 - acc;
    v1.noalias() += 0.5 * h * (acc + acc_new);
    u = u_new;
    acc = acc_new;

    if ((j & 255) == 0 && u.tail(nb).cwiseAbs().maxCoeff() > 1e3 * static_scale)
      throw std::runtime_error("vbi_integrate: response diverged");
    if (j >= 0) emit(j);
  }

  // anti-alias and decimate to the sensor rate
  const double nyquist = M_PI / sc.sensor_dt;
  SensorRecord& rec = result.record;
  rec.scenario = "vbi";
  std::vector<double> filtered = decimation > 1
                                     ? lowpass_zero_phase(raw_acc, h, 0.8 * nyquist)
                                     : raw_acc;
  for (std::size_t k = 0; k < raw_time.size(); k += static_cast<std::size_t>(decimation)) {
    rec.time.push_back(raw_time[k]);
    rec.position.push_back(raw_pos[k]);
    rec.acc.push_back(filtered[k]);
  }
  rec.modal.resize(raw_modal.size());
  for (std::size_t m = 0; m < raw_modal.size(); ++m) {
    std::vector<double> f = decimation > 1
                                ? lowpass_zero_phase(raw_modal[m], h, 0.8 * nyquist)
                                : raw_modal[m];
    for (std::size_t k = 0; k < f.size(); k += static_cast<std::size_t>(decimation))
      rec.modal[m].push_back(f[k]);
  }
  return result;
}

}  // namespace msid
