#pragma once

#include <vector>

#include "msid/beam.hpp"

namespace msid {

struct CrossingAtom {
  double duration = 0.0;     // T_k, s
  double probability = 0.0;  // p_k
};

// Poisson stream of moving forces with i.i.d. amplitudes and a discrete
// crossing-time distribution. Amplitudes are independent of arrival times
// and crossing times.
struct StationaryStreamSpec {
  double rate = 0.0;         // arrivals per second
  double mean_amp = 0.0;     // E[A], N
  double mean_amp_sq = 0.0;  // E[A^2], N^2
  std::vector<CrossingAtom> atoms;

  void validate() const;
};

// Exact modal response of one unit-amplitude force crossing the span in time
// T: the driven phase while the force is on the span and the free decay
// after departure. Closed forms; no numerical integration.
class CrossingResponse {
 public:
  CrossingResponse(const ModalModel& modal, int n, double duration);

  double q_on_span(double s) const;      // 0 <= s <= T
  double qddot_on_span(double s) const;
  double q_after(double u) const;        // u = s - T >= 0
  double qddot_after(double u) const;
  double duration() const { return duration_; }

 private:
  double duration_, scale_, beta_, decay_, wd_;
  double a1_, a2_, a3_, b1_, b2_;
  double s_sin_, s_cos_;  // on-span qddot transient coefficients
  double t_sin_, t_cos_;  // post-departure qddot coefficients
};

// Steady-state variance of the modal acceleration under the stream: the
// amplitude-weighted mean-square crossing response times the arrival rate,
// evaluated by adaptive quadrature over [t - T_k, t] plus the post-departure
// decay window. Independent of eval_time by construction; passing different
// times must return the same value to quadrature tolerance.
double sigma_ss_qddot(const StationaryStreamSpec& spec, const ModalModel& modal,
                      int n, double eval_time = 0.0);

}  // namespace msid
