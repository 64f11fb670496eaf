#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace msid::test {

// Gauss-Legendre nodes and weights on [0,1], by Newton iteration on the
// Legendre recurrence. Independent quadrature oracle for projection and
// orthogonality checks.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre_01(int n) {
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-15) break;
    }
    double p0 = 1.0, p1 = t;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double dp = n * (t * p1 - p0) / (t * t - 1.0);
    x[static_cast<std::size_t>(i)] = 0.5 * (1.0 - t);  // map [-1,1] -> [0,1], reversed order is fine
    w[static_cast<std::size_t>(i)] = 1.0 / ((1.0 - t * t) * dp * dp);
  }
  return {x, w};
}

inline double gl_integrate_01(const std::function<double(double)>& f, int n = 64) {
  auto [x, w] = gauss_legendre_01(n);
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    s += w[static_cast<std::size_t>(i)] * f(x[static_cast<std::size_t>(i)]);
  return s;
}

// Adaptive Cash-Karp RK45 for the damped modal oscillator
//   qdd + 2 zeta w qd + w^2 q = p(t),
// returning q, qd, qdd sampled on a uniform output grid.
struct OscillatorTrace {
  std::vector<double> q, qd, qdd;
};

inline OscillatorTrace integrate_oscillator(
    double omega, double zeta, const std::function<double(double)>& p,
    double t0, double dt_out, int n_out, double tol = 1e-10) {
  auto deriv = [&](double t, double q, double v, double& dq, double& dv) {
    dq = v;
    dv = p(t) - 2.0 * zeta * omega * v - omega * omega * q;
  };
  // Cash-Karp tableau
  static const double a2 = 0.2, a3 = 0.3, a4 = 0.6, a5 = 1.0, a6 = 0.875;
  static const double b21 = 0.2;
  static const double b31 = 3.0 / 40.0, b32 = 9.0 / 40.0;
  static const double b41 = 0.3, b42 = -0.9, b43 = 1.2;
  static const double b51 = -11.0 / 54.0, b52 = 2.5, b53 = -70.0 / 27.0,
                      b54 = 35.0 / 27.0;
  static const double b61 = 1631.0 / 55296.0, b62 = 175.0 / 512.0,
                      b63 = 575.0 / 13824.0, b64 = 44275.0 / 110592.0,
                      b65 = 253.0 / 4096.0;
  static const double c1 = 37.0 / 378.0, c3 = 250.0 / 621.0, c4 = 125.0 / 594.0,
                      c6 = 512.0 / 1771.0;
  static const double d1 = c1 - 2825.0 / 27648.0, d3 = c3 - 18575.0 / 48384.0,
                      d4 = c4 - 13525.0 / 55296.0, d5 = -277.0 / 14336.0,
                      d6 = c6 - 0.25;

  OscillatorTrace out;
  double t = t0, q = 0.0, v = 0.0;
  double h = dt_out / 8.0;
  for (int k = 0; k < n_out; ++k) {
    const double t_target = t0 + k * dt_out;
    while (t < t_target - 1e-12) {
      h = std::min(h, t_target - t);
      double k1q, k1v, k2q, k2v, k3q, k3v, k4q, k4v, k5q, k5v, k6q, k6v;
      deriv(t, q, v, k1q, k1v);
      deriv(t + a2 * h, q + h * b21 * k1q, v + h * b21 * k1v, k2q, k2v);
      deriv(t + a3 * h, q + h * (b31 * k1q + b32 * k2q),
            v + h * (b31 * k1v + b32 * k2v), k3q, k3v);
      deriv(t + a4 * h, q + h * (b41 * k1q + b42 * k2q + b43 * k3q),
            v + h * (b41 * k1v + b42 * k2v + b43 * k3v), k4q, k4v);
      deriv(t + a5 * h, q + h * (b51 * k1q + b52 * k2q + b53 * k3q + b54 * k4q),
            v + h * (b51 * k1v + b52 * k2v + b53 * k3v + b54 * k4v), k5q, k5v);
      deriv(t + a6 * h,
            q + h * (b61 * k1q + b62 * k2q + b63 * k3q + b64 * k4q + b65 * k5q),
            v + h * (b61 * k1v + b62 * k2v + b63 * k3v + b64 * k4v + b65 * k5v),
            k6q, k6v);
      const double q5 = q + h * (c1 * k1q + c3 * k3q + c4 * k4q + c6 * k6q);
      const double v5 = v + h * (c1 * k1v + c3 * k3v + c4 * k4v + c6 * k6v);
      const double eq = h * (d1 * k1q + d3 * k3q + d4 * k4q + d5 * k5q + d6 * k6q);
      const double ev = h * (d1 * k1v + d3 * k3v + d4 * k4v + d5 * k5v + d6 * k6v);
      const double scale = tol * (1.0 + std::abs(q) + std::abs(v));
      const double err = std::max(std::abs(eq), std::abs(ev));
      if (err <= scale) {
        t += h;
        q = q5;
        v = v5;
        h *= std::min(5.0, 0.9 * std::pow(scale / std::max(err, 1e-300), 0.2));
      } else {
        h *= std::max(0.1, 0.9 * std::pow(scale / err, 0.25));
        if (h < 1e-14) throw std::runtime_error("rk45: step underflow");
      }
    }
    out.q.push_back(q);
    out.qd.push_back(v);
    out.qdd.push_back(p(t_target) - 2.0 * zeta * omega * v - omega * omega * q);
  }
  return out;
}

}  // namespace msid::test
