#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace msid {

inline double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean: empty series");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// unbiased sample variance
inline double variance(std::span<const double> v) {
  if (v.size() < 2) throw std::invalid_argument("variance: need >= 2 samples");
  double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

inline double stdev(std::span<const double> v) { return std::sqrt(variance(v)); }

inline double rms(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("rms: empty series");
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Pearson correlation coefficient
inline double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("pearson: size mismatch or too short");
  double ma = mean(a), mb = mean(b);
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double da = a[i] - ma, db = b[i] - mb;
    saa += da * da;
    sbb += db * db;
    sab += da * db;
  }
  if (saa == 0.0 || sbb == 0.0)
    throw std::invalid_argument("pearson: constant input");
  return sab / std::sqrt(saa * sbb);
}

inline double rms_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("rms_diff: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

}  // namespace msid
