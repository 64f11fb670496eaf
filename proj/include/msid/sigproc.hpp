#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace msid {

// One-sided power spectral density on a uniform rad/s grid; the integral of
// power over the grid approximates the series variance.
struct PsdEstimate {
  std::vector<double> omega;  // rad/s
  std::vector<double> power;  // (signal^2) per rad/s
  double domega = 0.0;
  int segment_length = 0;
  int n_segments = 0;

  // index of the nearest grid line
  int index_of(double w) const;
};

// Averaged modified periodograms, Hann window, 50% overlap by default.
// segment_length 0 picks half the series (power of two).
PsdEstimate welch_psd(const std::vector<double>& series, double dt,
                      int segment_length = 0, double overlap = 0.5);

struct EfddMode {
  double omega = 0.0;  // rad/s
  double zeta = 0.0;
  double peak_power = 0.0;
  bool resolved = false;
};

struct EfddResult {
  std::vector<EfddMode> modes;  // ascending frequency
  bool all_resolved = false;
};

// Single-channel frequency/damping identification: peak picking on the Welch
// spectrum, spectral-bell isolation (within 3 dB of the peak or to the first
// local minimum), inverse transform of the bell to a modal autocorrelation,
// zero-crossing frequency and log-decrement damping over extrema 2..8.
// Unresolvable peaks are returned flagged rather than invented.
EfddResult efdd_identify(const std::vector<double>& series, double dt,
                         int n_peaks, int segment_length = 0);

struct ImfSet {
  std::vector<std::vector<double>> imfs;
  std::vector<double> residual;
  std::vector<double> dominant_omega;  // rad/s per IMF

  // sum of IMFs plus residual
  std::vector<double> reconstruct() const;
};

// Standard sifting with cubic-spline envelopes through mirrored extrema.
// Stops a sift at Cauchy SD < 0.2 or 10 iterations; extraction ends on a
// monotone residual or 12 IMFs.
ImfSet emd(const std::vector<double>& series, double dt);

struct ModalChannels {
  std::vector<std::vector<double>> series;  // one per target mode
  std::vector<bool> excited;
};

// Per-mode isolation per the identification flow: EMD first, IMFs assigned
// to the target mode that dominates their spectrum, multi-mode IMFs split by
// a zero-phase bandpass. A mode whose channel carries less than 1% of the
// record variance is flagged unexcited.
ModalChannels modal_decompose(const std::vector<double>& record, double dt,
                              const std::vector<double>& omegas);

// weights [0.25, 0.5, 0.25], endpoints passed through
std::vector<double> smooth_3pt(const std::vector<double>& series);

// Zero-phase FFT-domain filters with Butterworth magnitude response of the
// given order; the signal is mirror-padded to suppress edge transients.
std::vector<double> bandpass_zero_phase(const std::vector<double>& series,
                                        double dt, double omega_lo,
                                        double omega_hi, int order = 4);
std::vector<double> lowpass_zero_phase(const std::vector<double>& series,
                                       double dt, double omega_cut,
                                       int order = 4);

struct EpsMatrix {
  Eigen::MatrixXd autocorr;  // N_T x N_T ensemble autocorrelation
  Eigen::MatrixXd power;     // N_omega x N_T magnitude spectra
  double domega = 0.0;       // rad/s row spacing
  double dt = 0.0;
  int n_half = 0;            // window length floor(N_T/2)

  int row_of(double w) const;
};

// Ensemble autocorrelation over runs (centered per time pair), then per
// column a half-length window (rows j..j+N_h-1 for the leading columns,
// trailing rows for the rest) is Fourier transformed; the magnitude spectrum
// forms the column of the evolutionary power matrix.
EpsMatrix build_eps(const std::vector<std::vector<double>>& runs, double dt,
                    int n_workers = 0);

}  // namespace msid
