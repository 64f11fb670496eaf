#include "msid/stationary.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

namespace msid {

void StationaryStreamSpec::validate() const {
  if (rate <= 0.0) throw std::invalid_argument("stream: rate > 0");
  if (mean_amp_sq < mean_amp * mean_amp)
    throw std::invalid_argument("stream: E[A^2] >= E[A]^2");
  if (atoms.empty()) throw std::invalid_argument("stream: need crossing atoms");
  double total = 0.0;
  for (const auto& a : atoms) {
    if (a.duration <= 0.0 || a.probability < 0.0)
      throw std::invalid_argument("stream: bad crossing atom");
    total += a.probability;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("stream: atom probabilities must sum to 1");
}

CrossingResponse::CrossingResponse(const ModalModel& modal, int n,
                                   double duration)
    : duration_(duration) {
  if (duration <= 0.0)
    throw std::invalid_argument("CrossingResponse: duration > 0");
  const double w = modal.omega(n);
  const double z = modal.zeta(n);
  if (z <= 0.0 || z >= 1.0)
    throw std::invalid_argument("CrossingResponse: zeta in (0,1)");
  beta_ = n * M_PI / duration;
  decay_ = z * w;
  wd_ = modal.omega_d(n);
  const double upsilon = (w * w - beta_ * beta_) * (w * w - beta_ * beta_) +
                         4.0 * z * z * w * w * beta_ * beta_;
  if (upsilon < 1e-12 * w * w * w * w)
    throw std::invalid_argument("CrossingResponse: crossing resonates with the mode");
  scale_ = 1.0 / (modal.modal_mass(n) * upsilon);

  const double a = decay_, b = wd_;
  a1_ = w * w - beta_ * beta_;
  a2_ = -2.0 * z * w * beta_;
  a3_ = (beta_ / b) * (2.0 * a * a - a1_);

  const double parity = (n % 2 == 0) ? 1.0 : -1.0;
  const double e = std::exp(-a * duration);
  const double sT = std::sin(b * duration), cT = std::cos(b * duration);
  b1_ = parity * (a1_ * beta_ + a2_ * a) / b + e * (a3_ * cT + a2_ * sT);
  b2_ = parity * a2_ + e * (a3_ * sT - a2_ * cT);

  // second derivative of e^{-as}(c1 sin + c2 cos):
  // sin: (a^2-b^2) c1 + 2ab c2, cos: (a^2-b^2) c2 - 2ab c1
  const double d = a * a - b * b;
  s_sin_ = d * a3_ + 2.0 * a * b * (-a2_);
  s_cos_ = d * (-a2_) - 2.0 * a * b * a3_;
  t_sin_ = d * b1_ + 2.0 * a * b * b2_;
  t_cos_ = d * b2_ - 2.0 * a * b * b1_;
}

double CrossingResponse::q_on_span(double s) const {
  const double e = std::exp(-decay_ * s);
  return scale_ * (a1_ * std::sin(beta_ * s) + a2_ * std::cos(beta_ * s) +
                   e * (a3_ * std::sin(wd_ * s) - a2_ * std::cos(wd_ * s)));
}

double CrossingResponse::qddot_on_span(double s) const {
  const double e = std::exp(-decay_ * s);
  return scale_ *
         (-beta_ * beta_ *
              (a1_ * std::sin(beta_ * s) + a2_ * std::cos(beta_ * s)) +
          e * (s_sin_ * std::sin(wd_ * s) + s_cos_ * std::cos(wd_ * s)));
}

double CrossingResponse::q_after(double u) const {
  const double e = std::exp(-decay_ * u);
  return scale_ * e * (b1_ * std::sin(wd_ * u) + b2_ * std::cos(wd_ * u));
}

double CrossingResponse::qddot_after(double u) const {
  const double e = std::exp(-decay_ * u);
  return scale_ * e * (t_sin_ * std::sin(wd_ * u) + t_cos_ * std::cos(wd_ * u));
}

namespace {

double simpson_value(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& f, double a,
                     double b, double fa, double fm, double fb, double whole,
                     double tol, int depth) {
  if (depth > 40)
    throw std::runtime_error("sigma_ss_qddot: non-convergent quadrature");
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson_value(a, m, fa, flm, fm);
  const double right = simpson_value(m, b, fm, frm, fb);
  if (std::abs(left + right - whole) <= 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth + 1) +
         adaptive_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth + 1);
}

// adaptive Simpson with a coarse pre-split so oscillatory integrands are
// seen at sub-period resolution from the start
double integrate(const std::function<double(double)>& f, double a, double b,
                 int pre_split, double tol) {
  double total = 0.0;
  const double h = (b - a) / pre_split;
  for (int i = 0; i < pre_split; ++i) {
    const double lo = a + i * h, hi = lo + h;
    const double m = 0.5 * (lo + hi);
    const double fa = f(lo), fm = f(m), fb = f(hi);
    const double whole = simpson_value(lo, hi, fa, fm, fb);
    total += adaptive_step(f, lo, hi, fa, fm, fb, whole, tol / pre_split, 0);
  }
  return total;
}

}  // namespace

double sigma_ss_qddot(const StationaryStreamSpec& spec, const ModalModel& modal,
                      int n, double eval_time) {
  spec.validate();
  const double zeta = modal.zeta(n);
  if (zeta <= 0.0 || zeta >= 1.0)
    throw std::invalid_argument("sigma_ss_qddot: zeta in (0,1)");

  double sum = 0.0;
  for (const auto& atom : spec.atoms) {
    const CrossingResponse resp(modal, n, atom.duration);
    const double t = eval_time;
    const double T = atom.duration;

    // decay window long enough that the neglected tail is ~1e-17 relative
    const double decay = zeta * modal.omega(n);
    const double after = 20.0 / decay;

    auto on_span = [&](double tau) {
      const double v = resp.qddot_on_span(t - tau);
      return v * v;
    };
    auto post = [&](double tau) {
      const double v = resp.qddot_after(t - tau);
      return v * v;
    };

    // scale estimate for the absolute quadrature tolerance
    double scale = 0.0;
    for (int i = 0; i <= 32; ++i) {
      const double s = T * i / 32.0;
      scale = std::max(scale, on_span(t - s));
    }
    const double tol_on = std::max(scale * T, 1e-300) * 1e-11;

    const double w_fast = 2.0 * std::max(modal.omega_d(n), n * M_PI / T);
    const int split_on = static_cast<int>(std::ceil(w_fast * T / M_PI)) + 8;
    const double i_on = integrate(on_span, t - T, t, std::min(split_on, 4096), tol_on);

    double scale_post = 0.0;
    for (int i = 0; i <= 32; ++i)
      scale_post = std::max(scale_post, post(t - after * i / 32.0));
    const double tol_post = std::max(scale_post * after, 1e-300) * 1e-11;
    const int split_post =
        static_cast<int>(std::ceil(2.0 * modal.omega_d(n) * after / M_PI)) + 8;
    const double i_post =
        integrate(post, t - after, t, std::min(split_post, 8192), tol_post);

    sum += atom.probability * (i_on + i_post);
  }
  return spec.rate * spec.mean_amp_sq * sum;
}

}  // namespace msid
