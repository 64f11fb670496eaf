#include "msid/fe_beam.hpp"

#include <cmath>
#include <stdexcept>

namespace msid {

std::array<double, 4> hermite_shape(double xi, double le) {
  if (xi < -1e-12 || xi > le + 1e-12)
    throw std::out_of_range("hermite_shape: xi outside element");
  const double s = xi / le;
  const double s2 = s * s, s3 = s2 * s;
  return {1.0 - 3.0 * s2 + 2.0 * s3,
          xi - 2.0 * le * s2 + le * s3,
          3.0 * s2 - 2.0 * s3,
          le * (s3 - s2)};
}

std::array<double, 4> hermite_shape_deriv(double xi, double le) {
  if (xi < -1e-12 || xi > le + 1e-12)
    throw std::out_of_range("hermite_shape_deriv: xi outside element");
  const double s = xi / le;
  const double s2 = s * s;
  return {(-6.0 * s + 6.0 * s2) / le,
          1.0 - 4.0 * s + 3.0 * s2,
          (6.0 * s - 6.0 * s2) / le,
          3.0 * s2 - 2.0 * s};
}

void fe_full_matrices(const BeamSpec& beam, int n_elements,
                      Eigen::MatrixXd& mass, Eigen::MatrixXd& stiffness) {
  const int n_full = 2 * (n_elements + 1);
  const double le = beam.length / n_elements;
  const double ei = beam.flexural_rigidity;
  const double ml = beam.mass_per_length * le / 420.0;
  const double k0 = ei / (le * le * le);

  Eigen::Matrix4d ke, me;
  ke << 12, 6 * le, -12, 6 * le,
      6 * le, 4 * le * le, -6 * le, 2 * le * le,
      -12, -6 * le, 12, -6 * le,
      6 * le, 2 * le * le, -6 * le, 4 * le * le;
  ke *= k0;
  me << 156, 22 * le, 54, -13 * le,
      22 * le, 4 * le * le, 13 * le, -3 * le * le,
      54, 13 * le, 156, -22 * le,
      -13 * le, -3 * le * le, -22 * le, 4 * le * le;
  me *= ml;

  mass = Eigen::MatrixXd::Zero(n_full, n_full);
  stiffness = Eigen::MatrixXd::Zero(n_full, n_full);
  for (int e = 0; e < n_elements; ++e) {
    const int base = 2 * e;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        mass(base + i, base + j) += me(i, j);
        stiffness(base + i, base + j) += ke(i, j);
      }
  }
}

FeBeam fe_assemble(const BeamSpec& beam, int n_elements) {
  beam.validate();
  if (n_elements < 4)
    throw std::invalid_argument("fe_assemble: need at least 4 elements");

  FeBeam fe;
  fe.n_elements = n_elements;
  fe.length = beam.length;
  fe.element_length = beam.length / n_elements;

  Eigen::MatrixXd m_full, k_full;
  fe_full_matrices(beam, n_elements, m_full, k_full);

  // simply supported: translations fixed at both end nodes
  const int n_full = 2 * (n_elements + 1);
  fe.active_index.assign(static_cast<std::size_t>(n_full), -1);
  int na = 0;
  for (int d = 0; d < n_full; ++d) {
    const bool fixed = (d == 0) || (d == n_full - 2);
    if (!fixed) fe.active_index[static_cast<std::size_t>(d)] = na++;
  }

  fe.mass.resize(na, na);
  fe.stiffness.resize(na, na);
  for (int i = 0; i < n_full; ++i) {
    const int ai = fe.active_index[static_cast<std::size_t>(i)];
    if (ai < 0) continue;
    for (int j = 0; j < n_full; ++j) {
      const int aj = fe.active_index[static_cast<std::size_t>(j)];
      if (aj < 0) continue;
      fe.mass(ai, aj) = m_full(i, j);
      fe.stiffness(ai, aj) = k_full(i, j);
    }
  }

  if (beam.damping.use_rayleigh) {
    fe.alpha = beam.damping.alpha;
    fe.beta = beam.damping.beta;
  } else {
    std::vector<double> ws, zs;
    for (int n = 1; n <= beam.n_modes; ++n) {
      ws.push_back(natural_frequency(beam, n));
      zs.push_back(beam.damping.ratios[static_cast<std::size_t>(n - 1)]);
    }
    auto [a, b] = rayleigh_from_targets(ws, zs);
    fe.alpha = a;
    fe.beta = b;
  }
  fe.damping = fe.alpha * fe.mass + fe.beta * fe.stiffness;
  return fe;
}

int FeBeam::locate(double x, double& xi) const {
  if (x < -1e-9 || x > length + 1e-9)
    throw std::out_of_range("FeBeam::locate: x off span");
  x = std::min(std::max(x, 0.0), length);
  int e = static_cast<int>(x / element_length);
  if (e >= n_elements) e = n_elements - 1;
  xi = x - e * element_length;
  return e;
}

Eigen::VectorXd FeBeam::shape_column(double x, bool derivative) const {
  double xi = 0.0;
  const int e = locate(x, xi);
  const auto local =
      derivative ? hermite_shape_deriv(xi, element_length) : hermite_shape(xi, element_length);
  Eigen::VectorXd col = Eigen::VectorXd::Zero(n_active());
  for (int i = 0; i < 4; ++i) {
    const int full = 2 * e + i;
    const int ai = active_index[static_cast<std::size_t>(full)];
    if (ai >= 0) col(ai) += local[static_cast<std::size_t>(i)];
  }
  return col;
}

FeModes fe_eigen_modes(const FeBeam& fe, int count) {
  if (count < 1 || count > fe.n_active())
    throw std::invalid_argument("fe_eigen_modes: bad mode count");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(fe.stiffness,
                                                               fe.mass);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("fe_eigen_modes: eigensolver failed");
  FeModes modes;
  modes.omega.resize(count);
  modes.vectors = es.eigenvectors().leftCols(count);  // M-orthonormal
  for (int i = 0; i < count; ++i)
    modes.omega(i) = std::sqrt(std::max(0.0, es.eigenvalues()(i)));
  return modes;
}

Eigen::VectorXd fe_static_solve(const FeBeam& fe, const Eigen::VectorXd& load) {
  if (load.size() != fe.n_active())
    throw std::invalid_argument("fe_static_solve: load size mismatch");
  Eigen::LDLT<Eigen::MatrixXd> ldlt(fe.stiffness);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("fe_static_solve: singular constrained system");
  return ldlt.solve(load);
}

}  // namespace msid
