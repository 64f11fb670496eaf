#include "msid/modeshape.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "msid/duhamel.hpp"
#include "msid/stats.hpp"

namespace msid {

double mac(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty())
    throw std::invalid_argument("mac: grids differ");
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ab += a[k] * b[k];
    aa += a[k] * a[k];
    bb += b[k] * b[k];
  }
  if (aa == 0.0 || bb == 0.0) throw std::invalid_argument("mac: zero-norm shape");
  return ab * ab / (aa * bb);
}

std::vector<double> assign_signs(const std::vector<double>& magnitude,
                                 bool* fallback) {
  if (fallback) *fallback = false;
  const std::size_t n = magnitude.size();
  if (n < 3) throw std::invalid_argument("assign_signs: too short");
  double peak = 0.0;
  for (double v : magnitude) {
    if (v < -1e-12) throw std::invalid_argument("assign_signs: negative magnitude");
    peak = std::max(peak, v);
  }
  std::vector<double> out = magnitude;
  if (peak == 0.0) return out;
  const double threshold = 0.1 * peak;

  // interior near-zero runs are the node regions; the sign flips after each
  std::vector<std::size_t> flip_after;
  std::size_t k = 0;
  while (k < n) {
    if (magnitude[k] >= threshold) {
      ++k;
      continue;
    }
    std::size_t end = k;
    while (end + 1 < n && magnitude[end + 1] < threshold) ++end;
    if (k > 0 && end + 1 < n) flip_after.push_back((k + end) / 2);
    k = end + 1;
  }

  if (flip_after.empty()) {
    // several humps with no separating dip cannot be signed consistently
    int humps = 0;
    for (std::size_t i = 1; i + 1 < n; ++i)
      if (magnitude[i] > magnitude[i - 1] && magnitude[i] >= magnitude[i + 1] &&
          magnitude[i] > 0.5 * peak)
        ++humps;
    if (humps >= 2 && fallback) *fallback = true;
    return out;
  }

  double sign = 1.0;
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = sign * magnitude[i];
    if (next < flip_after.size() && i == flip_after[next]) {
      sign = -sign;
      ++next;
    }
  }
  return out;
}

std::vector<double> normalize_unit_max(std::vector<double> shape) {
  double peak = 0.0;
  for (double v : shape) peak = std::max(peak, std::abs(v));
  if (peak == 0.0) throw std::invalid_argument("normalize: zero shape");
  for (auto& v : shape) v /= peak;
  return shape;
}

namespace {

// Horner on the rounded coefficient table; fitting-grade evaluation (errors
// ~1e-8, far below measurement noise), much faster than the exact table.
struct BasisTable {
  std::vector<std::vector<double>> coeff;

  explicit BasisTable(const BopBasis& basis) : coeff(basis.coefficients()) {}

  void eval(double xi, double* out) const {
    for (std::size_t i = 0; i < coeff.size(); ++i) {
      double acc = 0.0;
      const auto& c = coeff[i];
      for (std::size_t k = c.size(); k-- > 0;) acc = acc * xi + c[k];
      out[i] = acc;
    }
  }
};

struct LmProblem {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> residual;
  int n_params = 0;
};

struct LmState {
  Eigen::VectorXd x;
  double objective = 0.0;
  bool converged = false;
  int iterations = 0;
};

LmState levenberg_marquardt(const LmProblem& prob, Eigen::VectorXd x0,
                            const FitOptions& opt) {
  LmState st;
  st.x = std::move(x0);
  Eigen::VectorXd r = prob.residual(st.x);
  if (!r.allFinite()) throw std::runtime_error("fit: non-finite objective");
  double obj = r.squaredNorm();
  double lambda = 1e-3;

  const int n = prob.n_params;
  Eigen::MatrixXd jac(r.size(), n);
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    st.iterations = iter + 1;
    for (int p = 0; p < n; ++p) {
      const double step = 1e-6 * std::max(1.0, std::abs(st.x(p)));
      Eigen::VectorXd xp = st.x;
      xp(p) += step;
      jac.col(p) = (prob.residual(xp) - r) / step;
    }
    const Eigen::MatrixXd a = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;

    bool accepted = false;
    while (lambda < 1e14) {
      Eigen::MatrixXd damped = a;
      for (int p = 0; p < n; ++p)
        damped(p, p) += lambda * (a(p, p) + 1e-12);
      const Eigen::VectorXd d = damped.ldlt().solve(-g);
      const Eigen::VectorXd x_new = st.x + d;
      const Eigen::VectorXd r_new = prob.residual(x_new);
      const double obj_new = r_new.allFinite() ? r_new.squaredNorm() : 1e300;
      if (obj_new < obj) {
        const double decrease = (obj - obj_new) / std::max(obj, 1e-300);
        st.x = x_new;
        r = r_new;
        obj = obj_new;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (decrease < opt.objective_tol) st.converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      st.converged = true;  // stagnated at a (possibly gauge-flat) minimum
      break;
    }
    if (st.converged) break;
  }
  st.objective = std::sqrt(obj);
  return st;
}

// forward model shared by both excitation kinds:
//   u_hat(t_j) = sum_n (B w_n)_j (D_n w_n)_j / (m L |w_n|^2)
// with B the basis along the sensor path and D_n the per-mode bracket
// matrix. The basis orthonormality turns the recomputed modal mass integral
// into m*L*|w_n|^2 exactly.
struct ForwardModel {
  Eigen::MatrixXd path_basis;            // N_T x N_B
  std::vector<Eigen::MatrixXd> bracket;  // per mode, N_T x N_B
  double mass_scale = 0.0;               // m * L

  Eigen::VectorXd predict(const Eigen::VectorXd& w_stacked) const {
    const int n_modes = static_cast<int>(bracket.size());
    const int n_basis = static_cast<int>(path_basis.cols());
    Eigen::VectorXd out = Eigen::VectorXd::Zero(path_basis.rows());
    for (int m = 0; m < n_modes; ++m) {
      const Eigen::VectorXd w = w_stacked.segment(m * n_basis, n_basis);
      const double norm2 = w.squaredNorm();
      if (norm2 < 1e-300) continue;
      const Eigen::VectorXd shape_path = path_basis * w;
      const Eigen::VectorXd drive = bracket[static_cast<std::size_t>(m)] * w;
      out.array() += shape_path.array() * drive.array() / (mass_scale * norm2);
    }
    return out;
  }
};

FitResult run_fit(const SensorRecord& rec, const ForwardModel& model,
                  int n_modes, int n_basis, const FitOptions& opt) {
  Eigen::VectorXd meas(rec.size());
  for (int k = 0; k < rec.size(); ++k) meas(k) = rec.acc[static_cast<std::size_t>(k)];

  LmProblem prob;
  prob.n_params = n_modes * n_basis;
  prob.residual = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
    return meas - model.predict(w);
  };

  // unit weight on the matching basis member per mode
  Eigen::VectorXd w0 = Eigen::VectorXd::Zero(prob.n_params);
  for (int m = 0; m < n_modes; ++m) w0(m * n_basis + std::min(m, n_basis - 1)) = 1.0;

  const LmState st = levenberg_marquardt(prob, w0, opt);

  FitResult result;
  result.objective = st.objective;
  result.converged = st.converged;
  result.iterations = st.iterations;
  result.weights.resize(n_modes, n_basis);
  for (int m = 0; m < n_modes; ++m) {
    Eigen::VectorXd w = st.x.segment(m * n_basis, n_basis);
    int lead = 0;
    for (int i = 1; i < n_basis; ++i)
      if (std::abs(w(i)) > std::abs(w(lead))) lead = i;
    if (w(lead) < 0.0) w = -w;
    result.weights.row(m) = w;
  }
  return result;
}

}  // namespace

FitResult fit_bop_weights(const SensorRecord& rec,
                          const std::vector<ModeEstimate>& modes,
                          const std::vector<double>& force, double location,
                          const BopBasis& basis, double mass_per_length,
                          double length, const FitOptions& opt) {
  rec.validate();
  if (rec.size() < 2) throw std::invalid_argument("fit: empty record");
  if (modes.empty()) throw std::invalid_argument("fit: no modes to fit");
  const int n_t = rec.size();
  const int n_basis = basis.size();
  const int n_modes = static_cast<int>(modes.size());
  const double dt = rec.time[1] - rec.time[0];

  const int k_entry = static_cast<int>(std::llround(rec.time[0] / dt));
  const int k_last = k_entry + n_t - 1;
  if (static_cast<int>(force.size()) < k_last + 1)
    throw std::invalid_argument("fit: force series shorter than the record");

  const BasisTable table(basis);
  ForwardModel model;
  model.mass_scale = mass_per_length * length;
  model.path_basis.resize(n_t, n_basis);
  std::vector<double> row(static_cast<std::size_t>(n_basis));
  for (int j = 0; j < n_t; ++j) {
    table.eval(rec.position[static_cast<std::size_t>(j)] / length, row.data());
    for (int i = 0; i < n_basis; ++i) model.path_basis(j, i) = row[static_cast<std::size_t>(i)];
  }
  std::vector<double> at_location(static_cast<std::size_t>(n_basis));
  table.eval(location / length, at_location.data());

  for (int m = 0; m < n_modes; ++m) {
    const ModeEstimate mode = modes[static_cast<std::size_t>(m)];
    ModalConvolution conv(mode.omega, mode.zeta, dt);
    conv.reset(force[0]);
    const double c1 =
        (1.0 - 2.0 * mode.zeta * mode.zeta) / std::sqrt(1.0 - mode.zeta * mode.zeta);
    Eigen::VectorXd drive(n_t);
    for (int k = 0; k <= k_last; ++k) {
      if (k > 0) conv.step(force[static_cast<std::size_t>(k)]);
      if (k < k_entry) continue;
      drive(k - k_entry) = force[static_cast<std::size_t>(k)] -
                           c1 * mode.omega * conv.is() -
                           2.0 * mode.zeta * mode.omega * conv.ic();
    }
    Eigen::MatrixXd bracket(n_t, n_basis);
    for (int i = 0; i < n_basis; ++i)
      bracket.col(i) = drive * at_location[static_cast<std::size_t>(i)];
    model.bracket.push_back(std::move(bracket));
  }
  return run_fit(rec, model, n_modes, n_basis, opt);
}

FitResult fit_bop_weights(const SensorRecord& rec,
                          const std::vector<ModeEstimate>& modes,
                          const TrafficRealization& traffic,
                          const BopBasis& basis, double mass_per_length,
                          double length, const FitOptions& opt) {
  rec.validate();
  traffic.validate();
  if (rec.size() < 2) throw std::invalid_argument("fit: empty record");
  if (modes.empty()) throw std::invalid_argument("fit: no modes to fit");
  const int n_t = rec.size();
  const int n_basis = basis.size();
  const int n_modes = static_cast<int>(modes.size());
  const double dt = rec.time[1] - rec.time[0];

  double t_start = rec.time[0];
  for (const auto& v : traffic.vehicles) t_start = std::min(t_start, v.arrival);
  const int k0 = static_cast<int>(std::ceil((rec.time[0] - t_start) / dt - 1e-9));
  const double grid_start = rec.time[0] - k0 * dt;
  const int n_steps = k0 + n_t;

  const BasisTable table(basis);
  ForwardModel model;
  model.mass_scale = mass_per_length * length;
  model.path_basis.resize(n_t, n_basis);
  std::vector<double> row(static_cast<std::size_t>(n_basis));
  for (int j = 0; j < n_t; ++j) {
    table.eval(rec.position[static_cast<std::size_t>(j)] / length, row.data());
    for (int i = 0; i < n_basis; ++i) model.path_basis(j, i) = row[static_cast<std::size_t>(i)];
  }

  // combined basis-weighted forcing of all on-span masses, per basis member
  Eigen::MatrixXd forcing(n_steps, n_basis);
  for (int k = 0; k < n_steps; ++k) {
    const double t = grid_start + k * dt;
    for (int i = 0; i < n_basis; ++i) forcing(k, i) = 0.0;
    for (const auto& v : traffic.vehicles) {
      if (!v.on_span(t, length)) continue;
      table.eval(v.position(t, length) / length, row.data());
      for (int i = 0; i < n_basis; ++i)
        forcing(k, i) += v.mass * kGravity * row[static_cast<std::size_t>(i)];
    }
  }

  for (int m = 0; m < n_modes; ++m) {
    const ModeEstimate mode = modes[static_cast<std::size_t>(m)];
    const double c1 =
        (1.0 - 2.0 * mode.zeta * mode.zeta) / std::sqrt(1.0 - mode.zeta * mode.zeta);
    Eigen::MatrixXd bracket(n_t, n_basis);
    for (int i = 0; i < n_basis; ++i) {
      ModalConvolution conv(mode.omega, mode.zeta, dt);
      conv.reset(forcing(0, i));
      for (int k = 0; k < n_steps; ++k) {
        if (k > 0) conv.step(forcing(k, i));
        if (k < k0) continue;
        bracket(k - k0, i) = forcing(k, i) - c1 * mode.omega * conv.is() -
                             2.0 * mode.zeta * mode.omega * conv.ic();
      }
    }
    model.bracket.push_back(std::move(bracket));
  }
  return run_fit(rec, model, n_modes, n_basis, opt);
}

std::vector<double> shapes_from_weights(const Eigen::VectorXd& weights,
                                        const BopBasis& basis,
                                        const std::vector<double>& x_grid,
                                        double length) {
  if (weights.size() != basis.size())
    throw std::invalid_argument("shapes_from_weights: weight count mismatch");
  std::vector<double> out;
  out.reserve(x_grid.size());
  for (double x : x_grid) {
    const auto p = basis.evaluate(x, length);
    double s = 0.0;
    for (int i = 0; i < basis.size(); ++i) s += weights(i) * p[static_cast<std::size_t>(i)];
    out.push_back(s);
  }
  return out;
}

std::vector<double> sd_modeshape(const std::vector<std::vector<double>>& ensemble) {
  if (ensemble.size() < 10)
    throw std::invalid_argument("sd_modeshape: insufficient ensemble (need >= 10 runs)");
  const std::size_t n = ensemble[0].size();
  for (const auto& run : ensemble)
    if (run.size() != n) throw std::invalid_argument("sd_modeshape: ragged ensemble");
  const double runs = static_cast<double>(ensemble.size());
  std::vector<double> sd(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double mean = 0.0;
    for (const auto& run : ensemble) mean += run[k];
    mean /= runs;
    double s2 = 0.0;
    for (const auto& run : ensemble) s2 += (run[k] - mean) * (run[k] - mean);
    sd[k] = std::sqrt(s2 / (runs - 1.0));
  }
  return smooth_3pt(sd);
}

std::vector<double> eps_modeshape(const EpsMatrix& eps, double omega) {
  const int row = eps.row_of(omega);
  const int lo = std::max(0, row - 1);
  const int hi = std::min<int>(static_cast<int>(eps.power.rows()) - 1, row + 1);
  std::vector<double> shape(static_cast<std::size_t>(eps.power.cols()), 0.0);
  for (int j = 0; j < eps.power.cols(); ++j) {
    double v = 0.0;
    for (int r = lo; r <= hi; ++r) v += eps.power(r, j);
    shape[static_cast<std::size_t>(j)] = std::sqrt(v / (hi - lo + 1));
  }
  return smooth_3pt(shape);
}

}  // namespace msid
