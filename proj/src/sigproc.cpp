#include "msid/sigproc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "msid/fft.hpp"
#include "msid/stats.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace msid {

namespace {

std::size_t pow2_floor(std::size_t n) {
  std::size_t p = 1;
  while (p * 2 <= n) p *= 2;
  return p;
}

}  // namespace

int PsdEstimate::index_of(double w) const {
  if (omega.empty() || w < omega.front() - 0.5 * domega ||
      w > omega.back() + 0.5 * domega)
    throw std::out_of_range("psd: frequency off the grid");
  return static_cast<int>(std::llround((w - omega.front()) / domega));
}

PsdEstimate welch_psd(const std::vector<double>& series, double dt,
                      int segment_length, double overlap) {
  if (series.empty()) throw std::invalid_argument("welch_psd: empty series");
  if (dt <= 0.0) throw std::invalid_argument("welch_psd: dt > 0");
  const std::size_t n = series.size();
  std::size_t seg = segment_length > 0
                        ? pow2_floor(std::min<std::size_t>(static_cast<std::size_t>(segment_length), n))
                        : pow2_floor(std::max<std::size_t>(n / 2, 2));
  seg = std::max<std::size_t>(seg, 8);
  if (seg > n) seg = pow2_floor(n);
  if (static_cast<int>(seg) > segment_length && segment_length > 0)
    seg = pow2_floor(static_cast<std::size_t>(segment_length));
  const std::size_t hop =
      std::max<std::size_t>(1, static_cast<std::size_t>(static_cast<double>(seg) * (1.0 - overlap)));

  std::vector<double> window(seg);
  double wsum2 = 0.0;
  for (std::size_t j = 0; j < seg; ++j) {
    window[j] = 0.5 * (1.0 - std::cos(2.0 * M_PI * j / (seg - 1)));
    wsum2 += window[j] * window[j];
  }

  PsdEstimate psd;
  psd.segment_length = static_cast<int>(seg);
  const std::size_t nfft = seg;
  psd.power.assign(nfft / 2 + 1, 0.0);

  std::vector<std::complex<double>> buf(nfft);
  int count = 0;
  for (std::size_t start = 0; start + seg <= n; start += hop) {
    double mean = 0.0;
    for (std::size_t j = 0; j < seg; ++j) mean += series[start + j];
    mean /= static_cast<double>(seg);
    for (std::size_t j = 0; j < nfft; ++j)
      buf[j] = {j < seg ? (series[start + j] - mean) * window[j] : 0.0, 0.0};
    fft(buf, false);
    for (std::size_t k = 0; k <= nfft / 2; ++k)
      psd.power[k] += std::norm(buf[k]);
    ++count;
    if (start + seg == n) break;
  }
  if (count == 0) throw std::invalid_argument("welch_psd: segment longer than series");

  // one-sided density per rad/s; integral over the grid equals the variance
  const double scale = dt / (M_PI * wsum2 * count);
  for (std::size_t k = 0; k <= nfft / 2; ++k) {
    const double one_sided = (k == 0 || k == nfft / 2) ? 0.5 : 1.0;
    psd.power[k] *= scale * one_sided;
  }
  psd.domega = 2.0 * M_PI / (static_cast<double>(nfft) * dt);
  psd.omega.resize(nfft / 2 + 1);
  for (std::size_t k = 0; k <= nfft / 2; ++k)
    psd.omega[k] = static_cast<double>(k) * psd.domega;
  psd.n_segments = count;
  return psd;
}

namespace {

// interpolated zero crossings and extrema of a decaying oscillation
struct Oscillation {
  std::vector<double> crossing_times;
  std::vector<double> extrema_times;
  std::vector<double> extrema_values;
};

Oscillation scan_oscillation(const std::vector<double>& r, double dt,
                             std::size_t limit) {
  Oscillation osc;
  for (std::size_t k = 1; k < limit; ++k) {
    if ((r[k - 1] > 0.0 && r[k] <= 0.0) || (r[k - 1] < 0.0 && r[k] >= 0.0)) {
      const double frac = r[k - 1] / (r[k - 1] - r[k]);
      osc.crossing_times.push_back((static_cast<double>(k - 1) + frac) * dt);
    }
    if (k + 1 < limit) {
      const double a = std::abs(r[k - 1]), b = std::abs(r[k]), c = std::abs(r[k + 1]);
      if (b >= a && b > c) {
        osc.extrema_times.push_back(static_cast<double>(k) * dt);
        osc.extrema_values.push_back(b);
      }
    }
  }
  return osc;
}

}  // namespace

EfddResult efdd_identify(const std::vector<double>& series, double dt,
                         int n_peaks, int segment_length) {
  if (n_peaks < 1) throw std::invalid_argument("efdd: n_peaks >= 1");
  const PsdEstimate psd = welch_psd(series, dt, segment_length);
  const std::size_t n = psd.power.size();

  // resolvable peaks: local maxima at least 20 dB above the median level
  std::vector<double> sorted = psd.power;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[sorted.size() / 2];
  const double floor_level = median * 100.0;

  std::vector<std::size_t> candidates;
  for (std::size_t k = 2; k + 1 < n; ++k)
    if (psd.power[k] > psd.power[k - 1] && psd.power[k] >= psd.power[k + 1] &&
        psd.power[k] > floor_level)
      candidates.push_back(k);
  std::sort(candidates.begin(), candidates.end(),
            [&](std::size_t a, std::size_t b) { return psd.power[a] > psd.power[b]; });

  std::vector<std::size_t> peaks;
  for (std::size_t k : candidates) {
    if (static_cast<int>(peaks.size()) >= n_peaks) break;
    bool clash = false;
    for (std::size_t p : peaks) {
      const double sep = std::abs(psd.omega[k] - psd.omega[p]);
      if (sep < 0.2 * std::max(psd.omega[k], psd.omega[p]) ||
          std::abs(static_cast<long long>(k) - static_cast<long long>(p)) < 4)
        clash = true;
    }
    if (!clash) peaks.push_back(k);
  }
  std::sort(peaks.begin(), peaks.end());

  EfddResult result;
  result.all_resolved = static_cast<int>(peaks.size()) == n_peaks;

  const std::size_t nfft = 2 * (n - 1);
  for (std::size_t peak : peaks) {
    // spectral bell: within 3 dB of the peak or to the first local minimum
    std::size_t lo = peak, hi = peak;
    while (lo > 1 && psd.power[lo - 1] >= 0.5 * psd.power[peak] &&
           psd.power[lo - 1] < psd.power[lo])
      --lo;
    while (hi + 1 < n && psd.power[hi + 1] >= 0.5 * psd.power[peak] &&
           psd.power[hi + 1] < psd.power[hi])
      ++hi;

    std::vector<std::complex<double>> spec(nfft, {0.0, 0.0});
    for (std::size_t k = lo; k <= hi; ++k) {
      spec[k] = {psd.power[k], 0.0};
      if (k > 0 && k < nfft / 2) spec[nfft - k] = {psd.power[k], 0.0};
    }
    fft(spec, true);  // modal autocorrelation of the isolated bell
    std::vector<double> r(nfft / 2);
    for (std::size_t k = 0; k < nfft / 2; ++k) r[k] = spec[k].real();
    if (std::abs(r[0]) > 0.0)
      for (auto& v : r) v /= std::abs(r[0]);

    const Oscillation osc = scan_oscillation(r, dt, r.size());
    EfddMode mode;
    mode.peak_power = psd.power[peak];
    if (osc.crossing_times.size() < 4 || osc.extrema_times.size() < 4) {
      mode.omega = psd.omega[peak];
      mode.zeta = 0.0;
      mode.resolved = false;
      result.modes.push_back(mode);
      continue;
    }

    // frequency from interpolated zero crossings over the fit range
    const std::size_t last_ext =
        std::min<std::size_t>(osc.extrema_times.size() - 1, 8);
    const double t_end = osc.extrema_times[last_ext];
    std::vector<double> crossings;
    for (double c : osc.crossing_times)
      if (c <= t_end) crossings.push_back(c);
    if (crossings.size() < 3) crossings = osc.crossing_times;
    const double wd = M_PI * static_cast<double>(crossings.size() - 1) /
                      (crossings.back() - crossings.front());

    // log-decrement line through extrema 2..8
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (std::size_t e = 1; e <= last_ext; ++e) {
      if (osc.extrema_values[e] <= 0.0) continue;
      const double x = osc.extrema_times[e];
      const double y = std::log(osc.extrema_values[e]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++m;
    }
    double zeta = 0.0;
    if (m >= 3) {
      const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
      const double decay = -slope;  // zeta * omega
      if (decay > 0.0) zeta = decay / std::sqrt(decay * decay + wd * wd);
    }
    mode.zeta = zeta;
    mode.omega = wd / std::sqrt(1.0 - zeta * zeta);
    mode.resolved = true;
    result.modes.push_back(mode);
  }
  return result;
}

std::vector<double> smooth_3pt(const std::vector<double>& series) {
  if (series.size() < 3)
    throw std::invalid_argument("smooth_3pt: need at least 3 samples");
  std::vector<double> out = series;
  for (std::size_t k = 1; k + 1 < series.size(); ++k)
    out[k] = 0.25 * series[k - 1] + 0.5 * series[k] + 0.25 * series[k + 1];
  return out;
}

namespace {

std::vector<double> fft_filter(const std::vector<double>& x, double dt,
                               const std::function<double(double)>& gain) {
  const std::size_t n = x.size();
  if (n < 4) throw std::invalid_argument("filter: series too short");
  const std::size_t pad = std::min<std::size_t>(n - 1, std::max<std::size_t>(64, n / 2));
  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = 0; i < pad; ++i) ext.push_back(x[pad - i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 0; i < pad; ++i) ext.push_back(x[n - 2 - i]);

  const std::size_t nfft = next_pow2(ext.size());
  std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
  for (std::size_t i = 0; i < ext.size(); ++i) buf[i] = {ext[i], 0.0};
  fft(buf, false);
  for (std::size_t k = 0; k < nfft; ++k) {
    const std::size_t kk = k <= nfft / 2 ? k : nfft - k;
    const double w = 2.0 * M_PI * static_cast<double>(kk) / (static_cast<double>(nfft) * dt);
    buf[k] *= gain(w);
  }
  fft(buf, true);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = buf[pad + i].real();
  return out;
}

}  // namespace

std::vector<double> bandpass_zero_phase(const std::vector<double>& series,
                                        double dt, double omega_lo,
                                        double omega_hi, int order) {
  if (omega_lo <= 0.0 || omega_hi <= omega_lo)
    throw std::invalid_argument("bandpass: need 0 < lo < hi");
  return fft_filter(series, dt, [=](double w) {
    if (w == 0.0) return 0.0;
    const double u = (w * w - omega_lo * omega_hi) / (w * (omega_hi - omega_lo));
    return 1.0 / std::sqrt(1.0 + std::pow(u * u, order));
  });
}

std::vector<double> lowpass_zero_phase(const std::vector<double>& series,
                                       double dt, double omega_cut, int order) {
  if (omega_cut <= 0.0) throw std::invalid_argument("lowpass: cut > 0");
  return fft_filter(series, dt, [=](double w) {
    const double u = w / omega_cut;
    return 1.0 / std::sqrt(1.0 + std::pow(u * u, 2 * order));
  });
}

// ---------------------------------------------------------------------------
// empirical mode decomposition

namespace {

struct Extrema {
  std::vector<int> max_pos, min_pos;
};

Extrema find_extrema(const std::vector<double>& x) {
  Extrema e;
  for (std::size_t k = 1; k + 1 < x.size(); ++k) {
    if (x[k] > x[k - 1] && x[k] >= x[k + 1]) e.max_pos.push_back(static_cast<int>(k));
    if (x[k] < x[k - 1] && x[k] <= x[k + 1]) e.min_pos.push_back(static_cast<int>(k));
  }
  return e;
}

// natural cubic spline evaluated on the integer grid [0, n)
std::vector<double> spline_envelope(const std::vector<double>& xs,
                                    const std::vector<double>& ys, int n) {
  const std::size_t m = xs.size();
  std::vector<double> h(m - 1), alpha(m, 0.0), l(m), mu(m), z(m), c(m), b(m - 1),
      d(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) h[i] = xs[i + 1] - xs[i];
  for (std::size_t i = 1; i + 1 < m; ++i)
    alpha[i] = 3.0 * ((ys[i + 1] - ys[i]) / h[i] - (ys[i] - ys[i - 1]) / h[i - 1]);
  l[0] = 1.0;
  mu[0] = z[0] = 0.0;
  for (std::size_t i = 1; i + 1 < m; ++i) {
    l[i] = 2.0 * (xs[i + 1] - xs[i - 1]) - h[i - 1] * mu[i - 1];
    mu[i] = h[i] / l[i];
    z[i] = (alpha[i] - h[i - 1] * z[i - 1]) / l[i];
  }
  l[m - 1] = 1.0;
  z[m - 1] = c[m - 1] = 0.0;
  for (std::size_t j = m - 1; j-- > 0;) {
    c[j] = z[j] - mu[j] * c[j + 1];
    b[j] = (ys[j + 1] - ys[j]) / h[j] - h[j] * (c[j + 1] + 2.0 * c[j]) / 3.0;
    d[j] = (c[j + 1] - c[j]) / (3.0 * h[j]);
  }
  std::vector<double> out(static_cast<std::size_t>(n));
  std::size_t seg = 0;
  for (int k = 0; k < n; ++k) {
    const double xk = static_cast<double>(k);
    while (seg + 2 < m && xs[seg + 1] < xk) ++seg;
    const double dx = xk - xs[seg];
    out[static_cast<std::size_t>(k)] =
        ys[seg] + dx * (b[seg] + dx * (c[seg] + dx * d[seg]));
  }
  return out;
}

// extrema positions/values with two mirrored points beyond each boundary
void mirrored(const std::vector<int>& pos, const std::vector<double>& x, int n,
              std::vector<double>& xs, std::vector<double>& ys) {
  xs.clear();
  ys.clear();
  const std::size_t m = pos.size();
  const std::size_t reflect = std::min<std::size_t>(2, m);
  for (std::size_t i = reflect; i-- > 0;) {
    xs.push_back(-static_cast<double>(pos[i]));
    ys.push_back(x[static_cast<std::size_t>(pos[i])]);
  }
  for (std::size_t i = 0; i < m; ++i) {
    xs.push_back(static_cast<double>(pos[i]));
    ys.push_back(x[static_cast<std::size_t>(pos[i])]);
  }
  for (std::size_t i = 0; i < reflect; ++i) {
    const int p = pos[m - 1 - i];
    xs.push_back(static_cast<double>(2 * (n - 1) - p));
    ys.push_back(x[static_cast<std::size_t>(p)]);
  }
  // mirrored coordinates must increase strictly
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (xs[i] <= xs[i - 1]) xs[i] = xs[i - 1] + 1e-6;
}

bool is_monotone(const std::vector<double>& x) {
  const Extrema e = find_extrema(x);
  return e.max_pos.size() < 1 || e.min_pos.size() < 1;
}

}  // namespace

std::vector<double> ImfSet::reconstruct() const {
  std::vector<double> out = residual;
  for (const auto& imf : imfs)
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += imf[k];
  return out;
}

ImfSet emd(const std::vector<double>& series, double dt) {
  const int n = static_cast<int>(series.size());
  {
    const Extrema e = find_extrema(series);
    if (e.max_pos.size() + e.min_pos.size() < 4)
      throw std::invalid_argument("emd: too few extrema");
  }

  ImfSet set;
  std::vector<double> residual = series;
  for (int imf_count = 0; imf_count < 12; ++imf_count) {
    std::vector<double> h = residual;
    Extrema e = find_extrema(h);
    if (e.max_pos.size() < 2 || e.min_pos.size() < 2) break;

    for (int sift = 0; sift < 10; ++sift) {
      std::vector<double> xs, ys;
      mirrored(e.max_pos, h, n, xs, ys);
      const auto upper = spline_envelope(xs, ys, n);
      mirrored(e.min_pos, h, n, xs, ys);
      const auto lower = spline_envelope(xs, ys, n);

      double num = 0.0, den = 0.0;
      std::vector<double> h1(h.size());
      for (std::size_t k = 0; k < h.size(); ++k) {
        const double m = 0.5 * (upper[k] + lower[k]);
        h1[k] = h[k] - m;
        num += m * m;
        den += h[k] * h[k];
      }
      h.swap(h1);
      if (den > 0.0 && num / den < 0.2) break;
      e = find_extrema(h);
      if (e.max_pos.size() < 2 || e.min_pos.size() < 2) break;
    }

    for (std::size_t k = 0; k < h.size(); ++k) residual[k] -= h[k];
    set.imfs.push_back(std::move(h));
    if (is_monotone(residual)) break;
  }
  set.residual = residual;

  // dominant frequency per IMF from a full-length periodogram
  for (const auto& imf : set.imfs) {
    const std::size_t nfft = next_pow2(imf.size());
    auto spec = rfft(imf, nfft);
    std::size_t best = 1;
    for (std::size_t k = 1; k <= nfft / 2; ++k)
      if (std::norm(spec[k]) > std::norm(spec[best])) best = k;
    set.dominant_omega.push_back(2.0 * M_PI * static_cast<double>(best) /
                                 (static_cast<double>(nfft) * dt));
  }
  return set;
}

ModalChannels modal_decompose(const std::vector<double>& record, double dt,
                              const std::vector<double>& omegas) {
  if (omegas.empty()) throw std::invalid_argument("modal_decompose: no targets");
  for (std::size_t i = 1; i < omegas.size(); ++i) {
    if (omegas[i] <= omegas[i - 1])
      throw std::invalid_argument("modal_decompose: targets must ascend");
    if (omegas[i] - omegas[i - 1] < 0.2 * omegas[i - 1])
      throw std::invalid_argument("modal_decompose: targets closer than 20%");
  }
  const std::size_t n_modes = omegas.size();

  // non-overlapping bands: +-30% clipped at geometric midpoints
  std::vector<double> lo(n_modes), hi(n_modes);
  for (std::size_t i = 0; i < n_modes; ++i) {
    lo[i] = 0.7 * omegas[i];
    hi[i] = 1.3 * omegas[i];
    if (i > 0) lo[i] = std::max(lo[i], std::sqrt(omegas[i] * omegas[i - 1]));
    if (i + 1 < n_modes) hi[i] = std::min(hi[i], std::sqrt(omegas[i] * omegas[i + 1]));
  }

  ModalChannels out;
  out.series.assign(n_modes, std::vector<double>(record.size(), 0.0));
  out.excited.assign(n_modes, false);

  const ImfSet set = emd(record, dt);
  for (const auto& imf : set.imfs) {
    // band fractions from the periodogram
    const std::size_t nfft = next_pow2(imf.size());
    const auto spec = rfft(imf, nfft);
    const double domega = 2.0 * M_PI / (static_cast<double>(nfft) * dt);
    double total = 0.0;
    std::vector<double> band(n_modes, 0.0);
    for (std::size_t k = 1; k <= nfft / 2; ++k) {
      const double p = std::norm(spec[k]);
      total += p;
      const double w = static_cast<double>(k) * domega;
      for (std::size_t i = 0; i < n_modes; ++i)
        if (w >= lo[i] && w <= hi[i]) band[i] += p;
    }
    if (total <= 0.0) continue;
    for (auto& b : band) b /= total;

    std::size_t dominant = 0;
    double second = 0.0;
    for (std::size_t i = 1; i < n_modes; ++i)
      if (band[i] > band[dominant]) dominant = i;
    for (std::size_t i = 0; i < n_modes; ++i)
      if (i != dominant) second = std::max(second, band[i]);

    if (band[dominant] < 0.1) continue;  // noise or trend component
    if (second < 0.1) {
      for (std::size_t k = 0; k < record.size(); ++k)
        out.series[dominant][k] += imf[k];
    } else {
      for (std::size_t i = 0; i < n_modes; ++i) {
        if (band[i] < 0.1) continue;
        const auto part = bandpass_zero_phase(imf, dt, lo[i], hi[i]);
        for (std::size_t k = 0; k < record.size(); ++k)
          out.series[i][k] += part[k];
      }
    }
  }

  const double total_var = variance(record);
  for (std::size_t i = 0; i < n_modes; ++i)
    out.excited[i] = variance(out.series[i]) >= 0.01 * total_var;
  return out;
}

// ---------------------------------------------------------------------------
// evolutionary power matrix

int EpsMatrix::row_of(double w) const {
  const int row = static_cast<int>(std::llround(w / domega));
  if (row < 0 || row >= power.rows())
    throw std::out_of_range("eps: frequency off the grid");
  return row;
}

EpsMatrix build_eps(const std::vector<std::vector<double>>& runs, double dt,
                    int n_workers) {
  if (runs.size() < 2) throw std::invalid_argument("build_eps: need >= 2 runs");
  const std::size_t n_t = runs[0].size();
  for (const auto& r : runs)
    if (r.size() != n_t) throw std::invalid_argument("build_eps: ragged ensemble");
  if (n_t < 4) throw std::invalid_argument("build_eps: record too short");

  const int n_runs = static_cast<int>(runs.size());
  Eigen::MatrixXd y(n_runs, static_cast<int>(n_t));
  for (int r = 0; r < n_runs; ++r)
    for (std::size_t k = 0; k < n_t; ++k)
      y(r, static_cast<int>(k)) = runs[static_cast<std::size_t>(r)][k];
  const Eigen::RowVectorXd mean = y.colwise().mean();
  y.rowwise() -= mean;

  EpsMatrix eps;
  eps.dt = dt;
  eps.n_half = static_cast<int>(n_t / 2);
  eps.autocorr.noalias() = y.transpose() * y / static_cast<double>(n_runs - 1);

  const std::size_t nfft = next_pow2(static_cast<std::size_t>(eps.n_half));
  eps.domega = 2.0 * M_PI / (static_cast<double>(nfft) * dt);
  eps.power.resize(static_cast<int>(nfft / 2 + 1), static_cast<int>(n_t));

  const int nt = static_cast<int>(n_t);
  const int nh = eps.n_half;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(n_workers > 0 ? n_workers : omp_get_max_threads())
#endif
  for (int j = 0; j < nt; ++j) {
    std::vector<std::complex<double>> buf(nfft, {0.0, 0.0});
    const int first = j < nh ? j : j - nh + 1;
    for (int i = 0; i < nh; ++i) buf[static_cast<std::size_t>(i)] = {eps.autocorr(first + i, j), 0.0};
    fft(buf, false);
    for (std::size_t k = 0; k <= nfft / 2; ++k)
      eps.power(static_cast<int>(k), j) = std::abs(buf[k]);
  }
  return eps;
}

}  // namespace msid
